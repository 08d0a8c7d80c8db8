//! Grid search over simulator parameters, maximizing SPL correlation with
//! fixed reference results.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentId;
use crate::backend::SimParams;
use crate::metrics::{srcc_report, Metric, MetricsError, PairedResults, SRCCReport};
use crate::task::{run_suite, BackendConfig, EvalResult, ScenarioSuite, TaskError};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Task(#[from] TaskError),
}

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub index: usize,
    pub sliding: bool,
    pub noise_multiplier: f64,
    pub params: SimParams,
}

impl GridCell {
    pub fn label(&self) -> String {
        format!(
            "sliding={},noise={:.1}",
            if self.sliding { "on" } else { "off" },
            self.noise_multiplier
        )
    }
}

/// Sliding × noise-multiplier grid; other parameters are pinned to `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub base: SimParams,
    pub sliding: Vec<bool>,
    pub noise_multipliers: Vec<f64>,
}

impl Default for ParamGrid {
    /// 2 × 11 cells: sliding off/on and multipliers 0.0, 0.1, …, 1.0.
    fn default() -> Self {
        Self {
            base: SimParams::default(),
            sliding: vec![false, true],
            noise_multipliers: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl ParamGrid {
    pub fn single(params: SimParams) -> Self {
        Self {
            sliding: vec![params.sliding],
            noise_multipliers: vec![params.noise_multiplier],
            base: params,
        }
    }

    /// Cells in grid order: sliding outer, multiplier inner.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut cells = Vec::with_capacity(self.sliding.len() * self.noise_multipliers.len());
        for &sliding in &self.sliding {
            for &m in &self.noise_multipliers {
                cells.push(GridCell {
                    index: cells.len(),
                    sliding,
                    noise_multiplier: m,
                    params: self.base.clone().with_sliding(sliding).with_noise(m),
                });
            }
        }
        cells
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.sliding.is_empty() || self.noise_multipliers.is_empty() {
            return Err(OptimizeError::InvalidGrid("every axis needs at least one value".into()));
        }
        for cell in self.cells() {
            cell.params
                .validate()
                .map_err(|e| OptimizeError::InvalidGrid(format!("{}: {e}", cell.label())))?;
        }
        Ok(())
    }
}

/// Simulation results of one cell and their correlation with reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEvaluation {
    pub cell: GridCell,
    pub spl: Result<SRCCReport, MetricsError>,
    pub success: Result<SRCCReport, MetricsError>,
    pub sim: Vec<EvalResult>,
}

impl CellEvaluation {
    pub fn spl_srcc(&self) -> Option<f64> {
        self.spl.as_ref().ok().map(|r| r.srcc)
    }
}

/// Runs the suite on `test_sim` with `params` and correlates it with
/// `reference`. Undefined correlations are kept as errors in the result.
pub fn evaluate_cell(
    params: &SimParams,
    roster: &[AgentId],
    suite: &ScenarioSuite,
    reference: &[EvalResult],
    seed: u64,
) -> Result<CellEvaluation, OptimizeError> {
    let cell = GridCell {
        index: 0,
        sliding: params.sliding,
        noise_multiplier: params.noise_multiplier,
        params: params.clone(),
    };
    evaluate(cell, roster, suite, reference, seed)
}

fn evaluate(
    cell: GridCell,
    roster: &[AgentId],
    suite: &ScenarioSuite,
    reference: &[EvalResult],
    seed: u64,
) -> Result<CellEvaluation, OptimizeError> {
    if roster.len() < 3 {
        return Err(MetricsError::TooFew {
            needed: 3,
            got: roster.len(),
        }
        .into());
    }
    let sim = run_suite(&BackendConfig::test_sim(cell.params.clone()), roster, suite, seed)?;
    let report = |metric| PairedResults::from_eval(metric, &sim, reference).and_then(|p| srcc_report(&p));
    Ok(CellEvaluation {
        spl: report(Metric::Spl),
        success: report(Metric::Success),
        cell,
        sim,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Cell evaluations in grid order.
    pub cells: Vec<CellEvaluation>,
    /// Cell indices from best to worst; undefined cells come last.
    pub ranking: Vec<usize>,
    /// Best cell, if any correlation was defined.
    pub argmax: Option<usize>,
}

impl OptimizationResult {
    pub fn best(&self) -> Option<&CellEvaluation> {
        self.argmax.map(|i| &self.cells[i])
    }

    pub fn find(&self, sliding: bool, noise_multiplier: f64) -> Option<&CellEvaluation> {
        self.cells
            .iter()
            .find(|c| c.cell.sliding == sliding && (c.cell.noise_multiplier - noise_multiplier).abs() < 1e-9)
    }
}

/// Ordering: higher SPL correlation, fewer reversals, lower multiplier,
/// sliding off.
fn rank(a: &CellEvaluation, b: &CellEvaluation) -> Ordering {
    match (&a.spl, &b.spl) {
        (Ok(ra), Ok(rb)) => rb
            .srcc
            .total_cmp(&ra.srcc)
            .then(ra.discordant_pairs.cmp(&rb.discordant_pairs))
            .then(a.cell.noise_multiplier.total_cmp(&b.cell.noise_multiplier))
            .then(a.cell.sliding.cmp(&b.cell.sliding)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => Ordering::Equal,
    }
    .then(a.cell.index.cmp(&b.cell.index))
}

/// Evaluates every cell against the same reference results and episode seeds.
pub fn optimize(
    grid: &ParamGrid,
    roster: &[AgentId],
    suite: &ScenarioSuite,
    reference: &[EvalResult],
    seed: u64,
) -> Result<OptimizationResult, OptimizeError> {
    grid.validate()?;
    let cells: Vec<CellEvaluation> = grid
        .cells()
        .into_par_iter()
        .map(|cell| evaluate(cell, roster, suite, reference, seed))
        .collect::<Result<_, _>>()?;
    let mut ranking: Vec<usize> = (0..cells.len()).collect();
    ranking.sort_by(|&i, &j| rank(&cells[i], &cells[j]));
    let argmax = ranking.first().copied().filter(|&i| cells[i].spl.is_ok());
    Ok(OptimizationResult { cells, ranking, argmax })
}
