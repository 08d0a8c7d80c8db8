//! Per-episode results CSV and per-method paired CSV.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::metrics::{MethodScore, Metric, PairedResults};
use crate::task::{compute_spl, mean_and_se, EpisodeRecord, EvalResult, Termination};

pub const RESULTS_HEADER: [&str; 14] = [
    "agent",
    "backend",
    "cell",
    "scene",
    "leg",
    "trial",
    "success",
    "spl",
    "p",
    "l",
    "steps",
    "collisions",
    "termination",
    "seed",
];

/// Formats a float with six significant digits, `%g` style.
pub fn format_g6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        trim(format!("{:.*}", (5 - exp).max(0) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    }
}

fn parse_f(s: &str) -> Result<f64, std::num::ParseFloatError> {
    s.parse()
}

/// One parsed results row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub agent: String,
    pub backend: String,
    pub cell: String,
    pub scene: String,
    pub leg: usize,
    pub trial: u32,
    pub success: u8,
    pub spl: f64,
    pub p: f64,
    pub l: f64,
    pub steps: u32,
    pub collisions: u32,
    pub termination: String,
    pub seed: u64,
}

fn record_fields(r: &EpisodeRecord, cell: &str) -> Vec<String> {
    let o = &r.outcome;
    let p = format_g6(o.path_length);
    let l = format_g6(o.geodesic_l);
    // spl is re-derived from the printed p and l so every row audits exactly
    let spl = compute_spl(
        o.success,
        parse_f(&p).unwrap_or(o.path_length),
        parse_f(&l).unwrap_or(o.geodesic_l),
    )
    .unwrap_or(o.spl);
    vec![
        r.agent.to_string(),
        r.backend.to_string(),
        cell.to_string(),
        r.scene.clone(),
        r.key.leg.to_string(),
        r.key.trial.to_string(),
        u8::from(o.success).to_string(),
        format_g6(spl),
        p,
        l,
        o.steps.to_string(),
        o.collisions.to_string(),
        o.termination.as_str().to_string(),
        r.seed.to_string(),
    ]
}

/// Serializes suite results; rows follow roster order then episode order.
pub fn write_results(results: &[EvalResult], cell: &str) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for r in results.iter().flat_map(|e| &e.records) {
        w.write_record(record_fields(r, cell))?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_results(text: &str) -> Result<Vec<ResultsRow>, IoError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(IoError::Invalid(format!("unexpected results header {header:?}")));
    }
    let rows: Vec<ResultsRow> = rdr.deserialize().collect::<Result<_, _>>()?;
    for row in &rows {
        if row.success > 1 || Termination::parse(&row.termination).is_none() {
            return Err(IoError::Invalid(format!("malformed row for agent '{}'", row.agent)));
        }
    }
    Ok(rows)
}

/// Per-agent `(mean, standard error)` of a metric over results rows.
pub fn aggregate(rows: &[ResultsRow], metric: Metric) -> BTreeMap<String, (f64, f64)> {
    let mut by_agent: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let v = match metric {
            Metric::Success => f64::from(r.success),
            Metric::Spl => r.spl,
        };
        by_agent.entry(r.agent.clone()).or_default().push(v);
    }
    by_agent.into_iter().map(|(k, v)| (k, mean_and_se(&v))).collect()
}

/// Pairs two results files by agent id.
pub fn pair_results(sim: &[ResultsRow], real: &[ResultsRow], metric: Metric) -> Result<PairedResults, IoError> {
    Ok(PairedResults::pair(
        metric,
        &aggregate(sim, metric),
        &aggregate(real, metric),
    )?)
}

const PAIRED_HEADER: [&str; 6] = ["metric", "method", "sim", "real", "sim_se", "real_se"];

pub fn write_paired(paired: &PairedResults) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PAIRED_HEADER)?;
    for e in &paired.entries {
        w.write_record([
            paired.metric.as_str().to_string(),
            e.method.clone(),
            format_g6(e.sim),
            format_g6(e.real),
            format_g6(e.sim_se),
            format_g6(e.real_se),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Deserialize)]
struct PairedRow {
    metric: Metric,
    method: String,
    sim: f64,
    real: f64,
    sim_se: f64,
    real_se: f64,
}

pub fn read_paired(text: &str) -> Result<PairedResults, IoError> {
    let rows: Vec<PairedRow> = csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()?;
    let metric = rows.first().map_or(Metric::Spl, |r| r.metric);
    if rows.iter().any(|r| r.metric != metric) {
        return Err(IoError::Invalid("paired file mixes metrics".into()));
    }
    let entries = rows
        .into_iter()
        .map(|r| MethodScore {
            method: r.method,
            sim: r.sim,
            real: r.real,
            sim_se: r.sim_se,
            real_se: r.real_se,
        })
        .collect();
    Ok(PairedResults::new(metric, entries)?)
}
