use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::pipeline::{Mode, PipelineParams};
use crate::polar::load_reliability;
use crate::region::GaussianSourcePair;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentMode {
    Case1,
    Case2,
    Ideal,
    Region,
}

impl ExperimentMode {
    pub fn pipeline_mode(self) -> Option<Mode> {
        match self {
            Self::Case1 => Some(Mode::Case1),
            Self::Case2 => Some(Mode::Case2),
            Self::Ideal => Some(Mode::Ideal),
            Self::Region => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Case1 => "case1",
            Self::Case2 => "case2",
            Self::Ideal => "ideal",
            Self::Region => "region",
        }
    }
}

/// The flat key-value experiment file. Every key is optional; missing
/// keys take the defaults of the selected mode.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<ExperimentMode>,
    pub sigma_x1_2: Option<f64>,
    pub sigma_x2_2: Option<f64>,
    pub rho: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub n: Option<usize>,
    pub list_size: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub width1: Option<f64>,
    pub width2: Option<f64>,
    pub sigma_d1_2: Option<f64>,
    pub sigma_d2_2: Option<f64>,
    pub side_noise_var: Option<f64>,
    pub shaped_weight1: Option<f64>,
    pub shaped_weight2: Option<f64>,
    pub rounding_trust: Option<f64>,
    pub design_trials: Option<usize>,
    pub design_seed: Option<u64>,
    pub enc2_modulo: Option<bool>,
    pub reliability_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub blocks: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub ccdf_out: Option<PathBuf>,
    pub ccdf_points: Option<usize>,
    pub grid_size: Option<usize>,
    pub d_min1: Option<f64>,
    pub d_min2: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Validated experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub params: PipelineParams,
    pub blocks: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub ccdf_out: Option<PathBuf>,
    pub ccdf_points: usize,
    pub grid_size: usize,
    pub d_min: Option<(f64, f64)>,
}

pub const DEFAULT_BLOCKS: u64 = 5000;

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::resolve(ConfigFile::parse(text)?)
    }

    /// Applies the mode defaults and checks every field, reporting all
    /// offenses at once.
    pub fn resolve(f: ConfigFile) -> Result<Self> {
        let mut bad = Vec::new();
        let mode = f.mode.unwrap_or(ExperimentMode::Case1);
        let mut p = PipelineParams::reference(mode.pipeline_mode().unwrap_or(Mode::Case1));

        let sx1 = f.sigma_x1_2.unwrap_or(p.src.sigma_x1_2);
        let sx2 = f.sigma_x2_2.unwrap_or(p.src.sigma_x2_2);
        let rho = f.rho.unwrap_or(p.src.rho);
        match GaussianSourcePair::new(sx1, sx2, rho) {
            Ok(s) => p.src = s,
            Err(e) => bad.push(format!("source: {e}")),
        }
        let pos = |bad: &mut Vec<String>, name: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    bad.push(format!("{name} must be positive and finite, got {v}"));
                }
            }
        };
        let pow2 = |bad: &mut Vec<String>, name: &str, v: Option<usize>| {
            if let Some(v) = v {
                if v < 2 || !v.is_power_of_two() {
                    bad.push(format!("{name} must be a power of two >= 2, got {v}"));
                }
            }
        };
        pos(&mut bad, "r1", f.r1);
        pos(&mut bad, "r2", f.r2);
        pos(&mut bad, "kappa1", f.kappa1);
        pos(&mut bad, "kappa2", f.kappa2);
        pos(&mut bad, "width1", f.width1);
        pos(&mut bad, "width2", f.width2);
        pos(&mut bad, "sigma_d1_2", f.sigma_d1_2);
        pos(&mut bad, "sigma_d2_2", f.sigma_d2_2);
        pos(&mut bad, "side_noise_var", f.side_noise_var);
        pos(&mut bad, "d_min1", f.d_min1);
        pos(&mut bad, "d_min2", f.d_min2);
        pow2(&mut bad, "n", f.n);
        pow2(&mut bad, "m1", f.m1);
        pow2(&mut bad, "m2", f.m2);
        for (name, v) in [("shaped_weight1", f.shaped_weight1), ("shaped_weight2", f.shaped_weight2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    bad.push(format!("{name} must be nonnegative, got {v}"));
                }
            }
        }
        if let Some(t) = f.rounding_trust {
            if !(0.0..=1.0).contains(&t) {
                bad.push(format!("rounding_trust must lie in [0, 1], got {t}"));
            }
        }
        if f.list_size == Some(0) {
            bad.push("list_size must be at least 1".into());
        }
        if let Some(t) = f.design_trials {
            if t < 1000 {
                bad.push(format!("design_trials must be at least 1000, got {t}"));
            }
        }
        if f.blocks == Some(0) {
            bad.push("blocks must be at least 1".into());
        }
        if f.workers == Some(0) {
            bad.push("workers must be at least 1".into());
        }
        if let Some(g) = f.grid_size {
            if g < 2 {
                bad.push(format!("grid_size must be at least 2, got {g}"));
            }
        }
        if let Some(c) = f.ccdf_points {
            if c < 2 {
                bad.push(format!("ccdf_points must be at least 2, got {c}"));
            }
        }
        let d_min = match (f.d_min1, f.d_min2) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                bad.push("d_min1 and d_min2 must be given together".into());
                None
            }
        };
        let n = f.n.unwrap_or(p.n);
        match &f.reliability_file {
            Some(path) => match load_reliability(path) {
                Ok(r) if r.len() == n => p.reliability = Some(r),
                Ok(r) => bad.push(format!(
                    "reliability file {} has {} entries, n is {n}",
                    path.display(),
                    r.len()
                )),
                Err(e @ Error::Io { .. }) => return Err(e),
                Err(e) => bad.push(format!("reliability file {}: {e}", path.display())),
            },
            None if n > 256 => bad.push(format!(
                "n = {n} exceeds the built-in reliability sequence; set reliability_file"
            )),
            None => {}
        }
        if !bad.is_empty() {
            return Err(Error::Config(bad));
        }

        p.n = n;
        p.r1 = f.r1.unwrap_or(p.r1);
        p.r2 = f.r2.unwrap_or(p.r2);
        p.list_size = f.list_size.unwrap_or(p.list_size);
        p.m1 = f.m1.unwrap_or(p.m1);
        p.m2 = f.m2.unwrap_or(p.m2);
        p.kappa1 = f.kappa1.unwrap_or(p.kappa1);
        p.kappa2 = f.kappa2.unwrap_or(p.kappa2);
        if f.sigma_d1_2.is_some() {
            p.sigma_d1_2 = f.sigma_d1_2;
        }
        if f.sigma_d2_2.is_some() {
            p.sigma_d2_2 = f.sigma_d2_2;
        }
        if mode == ExperimentMode::Ideal {
            // A_l = 16 sigma_{d,l} unless a spacing is given
            p.set_ideal_widths(16.0);
            if f.kappa1.is_some() {
                p.width1 = None;
            }
            if f.kappa2.is_some() {
                p.width2 = None;
            }
        }
        if f.width1.is_some() {
            p.width1 = f.width1;
        }
        if f.width2.is_some() {
            p.width2 = f.width2;
        }
        if p.width1.is_none() && p.kappa1 <= 0.0 {
            bad.push("kappa1 or width1 is required".into());
        }
        if p.width2.is_none() && p.kappa2 <= 0.0 {
            bad.push("kappa2 or width2 is required".into());
        }
        p.side_noise_var = f.side_noise_var.or(p.side_noise_var);
        p.shaped_weight1 = f.shaped_weight1.unwrap_or(p.shaped_weight1);
        p.shaped_weight2 = f.shaped_weight2.unwrap_or(p.shaped_weight2);
        p.rounding_trust = f.rounding_trust.unwrap_or(p.rounding_trust);
        p.design_trials = f.design_trials.unwrap_or(p.design_trials);
        p.design_seed = f.design_seed.unwrap_or(p.design_seed);
        p.enc2_modulo = f.enc2_modulo.unwrap_or(p.enc2_modulo);
        p.seed = f.seed.unwrap_or(p.seed);
        if !bad.is_empty() {
            return Err(Error::Config(bad));
        }
        Ok(Self {
            mode,
            params: p,
            blocks: f.blocks.unwrap_or(DEFAULT_BLOCKS),
            workers: f.workers.unwrap_or(1),
            out: f.out,
            ccdf_out: f.ccdf_out,
            ccdf_points: f.ccdf_points.unwrap_or(101),
            grid_size: f.grid_size.unwrap_or(200),
            d_min,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_case1_defaults() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c.mode, ExperimentMode::Case1);
        assert_eq!(c.params, PipelineParams::reference(Mode::Case1));
        assert_eq!(c.blocks, DEFAULT_BLOCKS);
        assert_eq!(c.workers, 1);
    }

    #[test]
    fn keys_override_defaults() {
        let c = ExperimentConfig::from_toml_str(
            "mode = \"case2\"\nseed = 9\nblocks = 12\nkappa1 = 0.7\nrounding_trust = 0.5\n",
        )
        .unwrap();
        assert_eq!(c.mode, ExperimentMode::Case2);
        assert_eq!(c.params.seed, 9);
        assert_eq!(c.blocks, 12);
        assert_eq!(c.params.kappa1, 0.7);
        assert_eq!(c.params.kappa2, 0.442);
        assert_eq!(c.params.rounding_trust, 0.5);
    }

    #[test]
    fn ideal_widths_follow_shaping() {
        let c = ExperimentConfig::from_toml_str("mode = \"ideal\"\nsigma_d1_2 = 0.04\n").unwrap();
        assert!((c.params.width1.unwrap() - 16.0 * 0.2).abs() < 1e-12);
        assert!((c.params.width2.unwrap() - 16.0 * 0.15625f64.sqrt()).abs() < 1e-12);
        assert_eq!(c.params.m1, 256);
    }

    #[test]
    fn every_offense_is_listed() {
        let err = ExperimentConfig::from_toml_str(
            "blocks = 0\nn = 100\nrho = 1.5\nrounding_trust = 2.0\nd_min1 = 0.1\n",
        )
        .unwrap_err();
        let Error::Config(list) = err else {
            panic!("expected a config error");
        };
        assert_eq!(list.len(), 5, "{list:?}");
        for key in ["blocks", "n ", "source", "rounding_trust", "d_min"] {
            assert!(list.iter().any(|m| m.contains(key)), "{key}: {list:?}");
        }
    }

    #[test]
    fn unknown_keys_and_bad_types_are_config_errors() {
        assert!(matches!(ConfigFile::parse("colour = 3"), Err(Error::Config(_))));
        assert!(matches!(ConfigFile::parse("blocks = \"many\""), Err(Error::Config(_))));
        assert!(matches!(ConfigFile::parse("mode = \"case3\""), Err(Error::Config(_))));
    }

    #[test]
    fn missing_file_is_io() {
        let e = ConfigFile::load(Path::new("/nonexistent/cfg.toml")).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
        assert!(e.to_string().contains("/nonexistent/cfg.toml"));
    }
}
