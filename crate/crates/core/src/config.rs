//! Run configuration: a flat TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "ORLICZ_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance of adaptive cubature.
    pub quadrature_abs: f64,
    /// Bound on identity residuals (valuation, covariance, linear systems).
    pub residual_max: f64,
    /// Relative tolerance of inverse and root solves.
    pub root_rel: f64,
    /// Relative agreement of the two indicator-norm evaluations.
    pub indicator_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature_abs: 1e-12,
            residual_max: 1e-9,
            root_rel: 1e-12,
            indicator_rel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: Tolerances,
    /// Random pairs per dimension in the valuation battery.
    pub pairs: usize,
    /// Random unimodular maps per dimension in the covariance battery.
    pub maps: usize,
    /// Random cases in the indicator-norm battery.
    pub cases: usize,
    /// Truncation length of the divergence construction.
    pub truncation: usize,
    /// Deepest cube cover in the continuity battery.
    pub depth: u32,
    /// Annular truncations in the continuity battery.
    pub probe_steps: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            tol: Tolerances::default(),
            pairs: 200,
            maps: 100,
            cases: 50,
            truncation: 50,
            depth: 12,
            probe_steps: 8,
            format: Format::Csv,
            out: None,
        }
    }
}

/// The file layout: every key optional, tolerances prefixed with `tol_`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatConfig {
    seed: Option<u64>,
    pairs: Option<usize>,
    maps: Option<usize>,
    cases: Option<usize>,
    #[serde(alias = "J", alias = "j")]
    truncation: Option<usize>,
    depth: Option<u32>,
    probe_steps: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    tol_quadrature_abs: Option<f64>,
    tol_residual_max: Option<f64>,
    tol_root_rel: Option<f64>,
    tol_indicator_rel: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let flat: FlatConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        let mut c = RunConfig::default();
        macro_rules! take {
            ($($dst:expr => $src:ident),* $(,)?) => {
                $(if let Some(v) = flat.$src { $dst = v; })*
            };
        }
        take!(
            c.seed => seed, c.pairs => pairs, c.maps => maps, c.cases => cases,
            c.truncation => truncation, c.depth => depth, c.probe_steps => probe_steps, c.format => format,
            c.tol.quadrature_abs => tol_quadrature_abs, c.tol.residual_max => tol_residual_max,
            c.tol.root_rel => tol_root_rel, c.tol.indicator_rel => tol_indicator_rel,
        );
        c.out = flat.out;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    /// The file named by `ORLICZ_CONFIG`, or defaults when it is unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => RunConfig::from_file(Path::new(&p)),
            _ => Ok(RunConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tol;
        for (name, v) in [
            ("tol_quadrature_abs", t.quadrature_abs),
            ("tol_residual_max", t.residual_max),
            ("tol_root_rel", t.root_rel),
            ("tol_indicator_rel", t.indicator_rel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.truncation == 0 {
            return Err(Error::Domain("J must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file_overrides_defaults() {
        let c = RunConfig::from_toml("seed = 11\nJ = 20\ntol_residual_max = 1e-10\nformat = \"json\"\n").unwrap();
        assert_eq!((c.seed, c.truncation, c.format), (11, 20, Format::Json));
        assert_eq!(c.tol.residual_max, 1e-10);
        assert_eq!(c.pairs, 200);
    }

    #[test]
    fn rejects_unknown_and_nonpositive() {
        assert!(RunConfig::from_toml("colour = 3").is_err());
        assert!(RunConfig::from_toml("tol_root_rel = 0.0").is_err());
    }
}
