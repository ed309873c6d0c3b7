//! Experiment configuration: per-inequality defaults, plain-text
//! `key = value` config files, and CLI overrides (flags beat file values,
//! file values beat defaults).

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use phl_core::atoms::{CorpusConfig, Placement};

/// The inequality a `verify` run exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    Hls,
    HardyLittlewood,
    CesaroHardy,
    CesaroLp,
    IteratedHilbert,
    Uchiyama,
    Majorization,
    Counterexample,
    SqVsMax,
}

impl InequalityId {
    pub fn all() -> [InequalityId; 9] {
        [
            InequalityId::Hls,
            InequalityId::HardyLittlewood,
            InequalityId::CesaroHardy,
            InequalityId::CesaroLp,
            InequalityId::IteratedHilbert,
            InequalityId::Uchiyama,
            InequalityId::Majorization,
            InequalityId::Counterexample,
            InequalityId::SqVsMax,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Hls => "hls",
            InequalityId::HardyLittlewood => "hardy-littlewood",
            InequalityId::CesaroHardy => "cesaro-hardy",
            InequalityId::CesaroLp => "cesaro-lp",
            InequalityId::IteratedHilbert => "iterated-hilbert",
            InequalityId::Uchiyama => "uchiyama",
            InequalityId::Majorization => "majorization",
            InequalityId::Counterexample => "counterexample",
            InequalityId::SqVsMax => "sq-vs-max",
        }
    }
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::all()
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                anyhow!(
                    "unknown inequality '{s}'; expected one of: {}",
                    InequalityId::all().map(|i| i.as_str()).join(", ")
                )
            })
    }
}

/// How the right-hand side of the `hardy-littlewood` experiment is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    /// The product Hardy-norm estimator (maximal-function route).
    Estimate,
    /// The strengthened form: `(sum over axis subsets ||H_S f||_p^p)^(1/p)`.
    HilbertSum,
}

impl RhsKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RhsKind::Estimate => "estimate",
            RhsKind::HilbertSum => "hilbert-sum",
        }
    }
}

impl FromStr for RhsKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "estimate" => Ok(RhsKind::Estimate),
            "hilbert-sum" => Ok(RhsKind::HilbertSum),
            other => bail!("unknown rhs kind '{other}' (estimate | hilbert-sum)"),
        }
    }
}

/// Full experiment configuration. Everything that influences the output is
/// here, so identical configs give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub inequality: InequalityId,
    pub d: usize,
    pub p: f64,
    pub alpha: Option<f64>,
    pub n: Vec<usize>,
    pub l: Vec<f64>,
    /// Dyadic smoothing ladder exponents; `None` derives the coarsest ladder
    /// valid for the grid.
    pub ladder: Option<(i32, i32)>,
    /// Cone aperture exponents for the S-function; `None` derives defaults.
    pub cone: Option<(i32, i32)>,
    pub psi_resolution: usize,
    pub rhs: RhsKind,
    pub scales: Vec<i32>,
    pub aspects: Vec<i32>,
    pub variants: usize,
    pub cf_count: usize,
    pub cf_rect_min: usize,
    pub cf_rect_max: usize,
    pub seed: u64,
    /// Ratio-spread gate: pass requires `max/min <= gate`.
    pub gate: f64,
}

impl ExperimentConfig {
    /// Desk-scale defaults per inequality.
    pub fn defaults(id: InequalityId) -> Self {
        let d2 = Self {
            inequality: id,
            d: 2,
            p: 0.8,
            alpha: None,
            n: vec![256, 256],
            l: vec![16.0, 16.0],
            ladder: None,
            cone: None,
            psi_resolution: 512,
            rhs: RhsKind::Estimate,
            scales: vec![-2, -1, 0, 1],
            aspects: vec![0, 1, 2, 3],
            variants: 2,
            cf_count: 8,
            cf_rect_min: 2,
            cf_rect_max: 8,
            seed: 7,
            gate: 1e3,
        };
        let d1 = Self {
            d: 1,
            n: vec![4096],
            l: vec![32.0],
            scales: vec![-3, -2, -1, 0, 1, 2],
            aspects: vec![],
            variants: 6,
            cf_count: 0,
            ..d2.clone()
        };
        match id {
            InequalityId::Hls => Self {
                alpha: Some(0.5),
                ..d2
            },
            InequalityId::HardyLittlewood => Self {
                p: 0.7,
                gate: 1e2,
                ..d2
            },
            InequalityId::CesaroHardy | InequalityId::CesaroLp => d2,
            InequalityId::IteratedHilbert => d2,
            InequalityId::Uchiyama => Self { gate: 1e2, ..d1 },
            InequalityId::Majorization => d2,
            InequalityId::Counterexample => Self {
                n: vec![4096],
                l: vec![8.0],
                gate: 1e2,
                ..d1
            },
            InequalityId::SqVsMax => Self { gate: 50.0, ..d2 },
        }
    }

    pub fn corpus_config(&self) -> CorpusConfig {
        CorpusConfig {
            p: self.p,
            scales: self.scales.clone(),
            aspects: self.aspects.clone(),
            variants: self.variants,
            cf_count: self.cf_count,
            cf_rect_min: self.cf_rect_min,
            cf_rect_max: self.cf_rect_max,
            seed: self.seed,
        }
    }

    /// Apply `key = value` lines from a config file. `#` starts a comment;
    /// blank lines are skipped; unknown keys are errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            self.apply_key(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "inequality" => self.inequality = value.parse()?,
            "d" => self.d = value.parse()?,
            "p" => self.p = value.parse()?,
            "alpha" => self.alpha = Some(value.parse()?),
            "n" => self.n = parse_axis_list(value)?,
            "L" | "l" => self.l = parse_axis_list(value)?,
            "ladder" => self.ladder = Some(parse_range(value)?),
            "cone" => self.cone = Some(parse_range(value)?),
            "psi_resolution" => self.psi_resolution = value.parse()?,
            "rhs" => self.rhs = value.parse()?,
            "scales" => self.scales = parse_int_list(value)?,
            "aspects" => self.aspects = parse_int_list(value)?,
            "variants" => self.variants = value.parse()?,
            "cf_count" => self.cf_count = value.parse()?,
            "cf_rect_min" => self.cf_rect_min = value.parse()?,
            "cf_rect_max" => self.cf_rect_max = value.parse()?,
            "seed" => self.seed = value.parse()?,
            "gate" => self.gate = value.parse()?,
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Apply the `--grid n=...,L=...` flag.
    pub fn apply_grid_flag(&mut self, grid: &str) -> Result<()> {
        for part in grid.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("--grid expects n=...,L=..., got '{part}'"))?;
            match key.trim() {
                "n" => self.n = parse_axis_list(value)?,
                "L" | "l" => self.l = parse_axis_list(value)?,
                other => bail!("unknown --grid key '{other}'"),
            }
        }
        Ok(())
    }

    /// Broadcast single-entry grid vectors to the dimension and sanity-check
    /// the combination.
    pub fn finalize(&mut self) -> Result<()> {
        if self.n.len() == 1 && self.d > 1 {
            self.n = vec![self.n[0]; self.d];
        }
        if self.l.len() == 1 && self.d > 1 {
            self.l = vec![self.l[0]; self.d];
        }
        if self.n.len() != self.d || self.l.len() != self.d {
            bail!(
                "grid has {} / {} axes but d = {}",
                self.n.len(),
                self.l.len(),
                self.d
            );
        }
        match self.inequality {
            InequalityId::Uchiyama | InequalityId::Counterexample => {
                if self.d != 1 {
                    bail!("{} requires d = 1", self.inequality);
                }
            }
            InequalityId::Hls => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| anyhow!("hls requires alpha"))?;
                // Records the derived q and rejects incompatible exponents.
                phl_core::Exponents::new(self.p, alpha, self.d)?;
            }
            _ => {}
        }
        if !(self.gate.is_finite() && self.gate >= 1.0) {
            bail!("gate must be a finite number >= 1, got {}", self.gate);
        }
        Ok(())
    }

    pub fn derived_q(&self) -> Option<f64> {
        match (self.inequality, self.alpha) {
            (InequalityId::Hls, Some(alpha)) => {
                phl_core::Exponents::new(self.p, alpha, self.d)
                    .ok()
                    .map(|e| e.q())
            }
            _ => None,
        }
    }
}

fn parse_axis_list<T: FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    value
        .split('x')
        .map(|s| s.trim().parse::<T>().map_err(Into::into))
        .collect::<Result<Vec<T>>>()
        .with_context(|| format!("parsing axis list '{value}'"))
}

fn parse_int_list(value: &str) -> Result<Vec<i32>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| s.trim().parse::<i32>().map_err(Into::into))
        .collect::<Result<Vec<i32>>>()
        .with_context(|| format!("parsing integer list '{value}'"))
}

fn parse_range(value: &str) -> Result<(i32, i32)> {
    let (lo, hi) = value
        .split_once("..")
        .ok_or_else(|| anyhow!("expected lo..hi, got '{value}'"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_strings() {
        for id in InequalityId::all() {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert!("nope".parse::<InequalityId>().is_err());
    }

    #[test]
    fn defaults_finalize_cleanly() {
        for id in InequalityId::all() {
            let mut cfg = ExperimentConfig::defaults(id);
            cfg.finalize().unwrap();
        }
    }

    #[test]
    fn hls_records_q_and_rejects_incompatible_exponents() {
        let cfg = ExperimentConfig::defaults(InequalityId::Hls);
        assert!((cfg.derived_q().unwrap() - 1.0).abs() < 1e-12);
        let mut bad = cfg.clone();
        bad.alpha = Some(3.0); // outside (0, d)
        assert!(bad.finalize().is_err());
    }

    #[test]
    fn config_file_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.cfg");
        std::fs::write(
            &path,
            "# comment\np = 0.7\nn = 128x128\nseed = 99  # trailing comment\n",
        )
        .unwrap();
        let mut cfg = ExperimentConfig::defaults(InequalityId::Hls);
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.p, 0.7);
        assert_eq!(cfg.n, vec![128, 128]);
        assert_eq!(cfg.seed, 99);
        // CLI flags come last.
        cfg.apply_grid_flag("n=64x64,L=8x8").unwrap();
        assert_eq!(cfg.n, vec![64, 64]);
        assert_eq!(cfg.l, vec![8.0, 8.0]);
        cfg.finalize().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = ExperimentConfig::defaults(InequalityId::Hls);
        assert!(cfg.apply_key("wibble", "3").is_err());
    }
}
