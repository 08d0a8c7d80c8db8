//! The published nine-model SPL table, shipped as a checksummed CSV.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{discordant_pairs, pearson, Discordance, MethodScore, Metric, MetricsError, PairedResults};

const TABLE_ONE_CSV: &str = include_str!("../../data/table1.csv");

/// SHA-256 of the embedded CSV.
pub const TABLE_ONE_SHA256: &str = "ffe79221c96b4374fefdb891132b5041f11b7079dd6d98abd80c2ffa41f778b8";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOneRow {
    pub sensor: String,
    pub train_noise: f64,
    pub train_sliding: String,
    pub reality_spl: f64,
    pub coda_chall_sim_spl: f64,
    pub coda_test_sim_spl: f64,
    pub gibson_chall_sim_spl: f64,
    pub gibson_test_sim_spl: f64,
}

impl TableOneRow {
    pub fn label(&self) -> String {
        format!(
            "{} / noise {:.1} / sliding {}",
            self.sensor, self.train_noise, self.train_sliding
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOneDataset {
    pub rows: Vec<TableOneRow>,
}

/// Correlations of the reality column against both CODA simulator columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOneAnalysis {
    pub chall_srcc: f64,
    pub chall_reversals: Discordance,
    pub test_srcc: f64,
    pub test_reversals: Discordance,
}

impl TableOneDataset {
    pub fn raw_csv() -> &'static str {
        TABLE_ONE_CSV
    }

    /// Parses the embedded table after checking its digest.
    pub fn load() -> Result<Self, MetricsError> {
        let digest = hex::encode(Sha256::digest(TABLE_ONE_CSV.as_bytes()));
        if digest != TABLE_ONE_SHA256 {
            return Err(MetricsError::Dataset(format!("checksum {digest} does not match")));
        }
        let rows = csv::Reader::from_reader(TABLE_ONE_CSV.as_bytes())
            .deserialize()
            .collect::<Result<Vec<TableOneRow>, _>>()
            .map_err(|e| MetricsError::Dataset(e.to_string()))?;
        if rows.len() != 9 {
            return Err(MetricsError::Dataset(format!("expected 9 rows, got {}", rows.len())));
        }
        Ok(Self { rows })
    }

    pub fn column(&self, f: impl Fn(&TableOneRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// Reality against one simulator column, one entry per model.
    pub fn paired(&self, sim: impl Fn(&TableOneRow) -> f64) -> Result<PairedResults, MetricsError> {
        let entries = self
            .rows
            .iter()
            .map(|r| MethodScore {
                method: r.label(),
                sim: sim(r),
                real: r.reality_spl,
                sim_se: 0.0,
                real_se: 0.0,
            })
            .collect();
        PairedResults::new(Metric::Spl, entries)
    }

    pub fn analyze(&self) -> Result<TableOneAnalysis, MetricsError> {
        let reality = self.column(|r| r.reality_spl);
        let chall = self.column(|r| r.coda_chall_sim_spl);
        let test = self.column(|r| r.coda_test_sim_spl);
        Ok(TableOneAnalysis {
            chall_srcc: pearson(&chall, &reality)?,
            chall_reversals: discordant_pairs(&chall, &reality)?,
            test_srcc: pearson(&test, &reality)?,
            test_reversals: discordant_pairs(&test, &reality)?,
        })
    }
}
