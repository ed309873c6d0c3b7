//! Experiment reports: per-member ratio rows, summary statistics, and the
//! deterministic CSV/JSON serializations.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// `max / min` over the corpus; the boundedness gate.
    pub spread: f64,
}

impl Summary {
    pub fn from_ratios(ratios: &[f64]) -> Self {
        let mut sorted: Vec<f64> = ratios.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
        let count = sorted.len();
        let min = sorted.first().copied().unwrap_or(f64::NAN);
        let max = sorted.last().copied().unwrap_or(f64::NAN);
        let median = if count == 0 {
            f64::NAN
        } else if count % 2 == 1 {
            sorted[count / 2]
        } else {
            0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
        };
        Summary {
            count,
            min,
            median,
            max,
            spread: max / min,
        }
    }
}

/// Echo of everything that determined the run, embedded in the JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub config: ExperimentConfig,
    /// Derived Lebesgue target exponent for `hls`.
    pub derived_q: Option<f64>,
    /// Which independently validated oracle backs this inequality's
    /// operator chain (see the phl-core oracle test suite).
    pub oracle_note: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub inequality: String,
    pub config: ConfigEcho,
    pub rows: Vec<RatioRow>,
    pub summary: Summary,
    pub pass: bool,
}

impl ExperimentReport {
    /// CSV body: one row per member, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,lhs,rhs,ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                row.id, row.lhs, row.rhs, row.ratio
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).context("serializing report")?;
        s.push('\n');
        Ok(s)
    }

    /// Write `<out>/<id>.csv` and `<out>/<id>.json`; returns the two paths.
    pub fn write(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating {}", out_dir.display()))?;
        let csv_path = out_dir.join(format!("{}.csv", self.inequality));
        let json_path = out_dir.join(format!("{}.json", self.inequality));
        std::fs::write(&csv_path, self.to_csv())
            .with_context(|| format!("writing {}", csv_path.display()))?;
        std::fs::write(&json_path, self.to_json()?)
            .with_context(|| format!("writing {}", json_path.display()))?;
        Ok((csv_path, json_path))
    }

    /// One-line human summary.
    pub fn headline(&self) -> String {
        format!(
            "{}: {} members, ratio min {:.3e} / median {:.3e} / max {:.3e}, spread {:.3e} (gate {:.1e}) -> {}",
            self.inequality,
            self.summary.count,
            self.summary.min,
            self.summary.median,
            self.summary.max,
            self.summary.spread,
            self.config.config.gate,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}
