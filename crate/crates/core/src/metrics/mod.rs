//! Sim-to-real correlation, rank reversals and per-method aggregates.

mod table1;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::task::EvalResult;

pub use table1::{TableOneAnalysis, TableOneDataset, TableOneRow, TABLE_ONE_SHA256};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetricsError {
    #[error("need at least {needed} entries, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation undefined: {0} is constant")]
    Constant(&'static str),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("method '{method}': {what} = {value} is outside [0, 1]")]
    OutOfRange {
        method: String,
        what: &'static str,
        value: f64,
    },
    #[error("duplicate method id '{0}'")]
    DuplicateMethod(String),
    #[error("method sets differ: only in simulation {sim_only:?}, only in reality {real_only:?}")]
    MismatchedMethods {
        sim_only: Vec<String>,
        real_only: Vec<String>,
    },
    #[error("embedded dataset is corrupt: {0}")]
    Dataset(String),
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(MetricsError::TooFew {
            needed: 3,
            got: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(MetricsError::Constant("xs"));
    }
    if syy == 0.0 {
        return Err(MetricsError::Constant("ys"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discordance {
    pub count: usize,
    pub total: usize,
}

impl Discordance {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64
        }
    }
}

/// Counts rank reversals between two score vectors.
///
/// A pair is a reversal when the orderings disagree strictly, or when it is
/// strictly ordered in one vector and tied in the other. Pairs tied in both
/// are not reversals.
pub fn discordant_pairs(xs: &[f64], ys: &[f64]) -> Result<Discordance, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(MetricsError::TooFew {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len();
    let mut count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = xs[i] - xs[j];
            let dy = ys[i] - ys[j];
            if dx * dy < 0.0 || ((dx == 0.0) != (dy == 0.0)) {
                count += 1;
            }
        }
    }
    Ok(Discordance {
        count,
        total: n * (n - 1) / 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Success,
    Spl,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Success => "success",
            Metric::Spl => "spl",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One method's accuracy in simulation and reality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    pub sim: f64,
    pub real: f64,
    pub sim_se: f64,
    pub real_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedResults {
    pub metric: Metric,
    pub entries: Vec<MethodScore>,
}

impl PairedResults {
    pub fn new(metric: Metric, entries: Vec<MethodScore>) -> Result<Self, MetricsError> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.method.as_str()) {
                return Err(MetricsError::DuplicateMethod(e.method.clone()));
            }
            for (what, v) in [("sim", e.sim), ("real", e.real)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(MetricsError::OutOfRange {
                        method: e.method.clone(),
                        what,
                        value: v,
                    });
                }
            }
            if !(e.sim_se.is_finite() && e.real_se.is_finite()) {
                return Err(MetricsError::NonFinite);
            }
        }
        Ok(Self { metric, entries })
    }

    /// Pairs per-method aggregates by method id (sorted by id).
    pub fn pair(
        metric: Metric,
        sim: &BTreeMap<String, (f64, f64)>,
        real: &BTreeMap<String, (f64, f64)>,
    ) -> Result<Self, MetricsError> {
        let sim_only: Vec<String> = sim.keys().filter(|k| !real.contains_key(*k)).cloned().collect();
        let real_only: Vec<String> = real.keys().filter(|k| !sim.contains_key(*k)).cloned().collect();
        if !sim_only.is_empty() || !real_only.is_empty() {
            return Err(MetricsError::MismatchedMethods { sim_only, real_only });
        }
        let entries = sim
            .iter()
            .map(|(method, &(s, s_se))| {
                let (r, r_se) = real[method];
                MethodScore {
                    method: method.clone(),
                    sim: s,
                    real: r,
                    sim_se: s_se,
                    real_se: r_se,
                }
            })
            .collect();
        Self::new(metric, entries)
    }

    /// Pairs suite results agent by agent, keeping the simulation roster order.
    pub fn from_eval(metric: Metric, sim: &[EvalResult], real: &[EvalResult]) -> Result<Self, MetricsError> {
        let pick = |e: &EvalResult| match metric {
            Metric::Success => (e.success_rate, e.success_se),
            Metric::Spl => (e.mean_spl, e.spl_se),
        };
        let sim_ids: Vec<String> = sim.iter().map(|e| e.agent.to_string()).collect();
        let real_ids: Vec<String> = real.iter().map(|e| e.agent.to_string()).collect();
        let sim_only: Vec<String> = sim_ids.iter().filter(|k| !real_ids.contains(k)).cloned().collect();
        let real_only: Vec<String> = real_ids.iter().filter(|k| !sim_ids.contains(k)).cloned().collect();
        if !sim_only.is_empty() || !real_only.is_empty() {
            return Err(MetricsError::MismatchedMethods { sim_only, real_only });
        }
        let entries = sim
            .iter()
            .map(|s| {
                let r = real.iter().find(|r| r.agent == s.agent).expect("method sets match");
                let ((sv, sse), (rv, rse)) = (pick(s), pick(r));
                MethodScore {
                    method: s.agent.to_string(),
                    sim: sv,
                    real: rv,
                    sim_se: sse,
                    real_se: rse,
                }
            })
            .collect();
        Self::new(metric, entries)
    }

    pub fn sim(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.sim).collect()
    }

    pub fn real(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.real).collect()
    }
}

/// Standard errors of one method's means, for scatter-plot error bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodError {
    pub method: String,
    pub sim_se: f64,
    pub real_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SRCCReport {
    pub metric: Metric,
    pub srcc: f64,
    pub discordant_pairs: usize,
    pub total_pairs: usize,
    pub reversal_fraction: f64,
    pub standard_errors: Vec<MethodError>,
}

/// Pearson correlation, reversal count and error bars for a paired dataset.
pub fn srcc_report(paired: &PairedResults) -> Result<SRCCReport, MetricsError> {
    let (sim, real) = (paired.sim(), paired.real());
    let srcc = pearson(&sim, &real)?;
    let d = discordant_pairs(&sim, &real)?;
    Ok(SRCCReport {
        metric: paired.metric,
        srcc,
        discordant_pairs: d.count,
        total_pairs: d.total,
        reversal_fraction: d.fraction(),
        standard_errors: paired
            .entries
            .iter()
            .map(|e| MethodError {
                method: e.method.clone(),
                sim_se: e.sim_se,
                real_se: e.real_se,
            })
            .collect(),
    })
}
