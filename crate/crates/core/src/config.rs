//! One JSON config shared by every CLI command, with per-command blocks.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::covariate::{CovariateModel, SampledCovariateLaw};
use crate::density::BaselineModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub covariates: Option<CovariateSpec>,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub empirical: Option<EmpiricalSpec>,
    #[serde(default)]
    pub verify: Option<VerifySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DensitySpec {
    Weibull { gamma: f64 },
    #[serde(rename = "loglogistic")]
    LogLogistic { gamma: f64 },
    /// {"family":"custom","grid":[[x,pdf],...]} with monotone-cubic interpolation
    Custom { grid: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CovariateSpec {
    Discrete {
        support: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
    Gaussian {
        mean: Vec<f64>,
        variances: Vec<f64>,
    },
    Grid { grid: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    /// "exact", "direct" or "point_process"
    pub mode: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// "weibull" or "loglogistic"
    pub family: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalSpec {
    /// "length_biased" or "current_duration"; both when omitted
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// estimate from an existing record file instead of generating
    #[serde(default)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// test-harness hook: name a closed-form case ("weibull:2" style) to
    /// corrupt deliberately, proving the battery can fail
    #[serde(default)]
    pub corrupt_case: Option<String>,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            Error::Config(format!(
                "{}: field `{}`: {}",
                path.display(),
                e.path(),
                e.inner()
            ))
        })
    }

    pub fn baseline(&self) -> Result<BaselineModel> {
        let spec = self
            .density
            .as_ref()
            .ok_or_else(|| Error::Config("config needs a `density` block".into()))?;
        match spec {
            DensitySpec::Weibull { gamma } => BaselineModel::weibull(*gamma),
            DensitySpec::LogLogistic { gamma } => BaselineModel::log_logistic(*gamma),
            DensitySpec::Custom { grid } => {
                let pts: Vec<(f64, f64)> = grid.iter().map(|p| (p[0], p[1])).collect();
                BaselineModel::from_grid(&pts)
            }
        }
    }

    /// The tilted covariate law, when a covariate block is present.
    /// theta defaults to the zero vector.
    pub fn covariate_law(&self) -> Result<Option<SampledCovariateLaw>> {
        let Some(spec) = &self.covariates else {
            return Ok(None);
        };
        let model = match spec {
            CovariateSpec::Discrete { support, probs } => {
                CovariateModel::discrete(support.clone(), probs.clone())?
            }
            CovariateSpec::Gaussian { mean, variances } => {
                CovariateModel::gaussian_diagonal(mean.clone(), variances.clone())?
            }
            CovariateSpec::Grid { grid } => {
                let pts: Vec<(f64, f64)> = grid.iter().map(|p| (p[0], p[1])).collect();
                CovariateModel::grid(&pts)?
            }
        };
        let theta = match &self.theta {
            Some(t) => t.clone(),
            None => vec![0.0; model.dim()],
        };
        Ok(Some(SampledCovariateLaw::new(model, theta)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_schema() {
        let text = r#"{
            "density": {"family": "weibull", "gamma": 2.0},
            "covariates": {"kind": "discrete", "support": [[0],[1]], "probs": [0.5, 0.5]},
            "theta": [0.6931471805599453],
            "sampler": {"mode": "exact", "n": 1000, "seed": 42}
        }"#;
        let cfg: Config = serde_json::from_str(text).unwrap();
        assert!(cfg.baseline().is_ok());
        let law = cfg.covariate_law().unwrap().unwrap();
        assert_eq!(law.dim(), 1);
    }

    #[test]
    fn custom_grid_density_parses() {
        let mut rows = String::new();
        for i in 1..60 {
            let x = 0.1 * i as f64;
            rows.push_str(&format!("[{x},{}],", (-(x - 2.0f64) * (x - 2.0)).exp()));
        }
        rows.pop();
        let text = format!(r#"{{"density": {{"family": "custom", "grid": [{rows}]}}}}"#);
        let cfg: Config = serde_json::from_str(&text).unwrap();
        assert!(cfg.baseline().is_ok());
    }

    #[test]
    fn bad_field_is_reported_with_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg.json");
        std::fs::write(&p, r#"{"density": {"family": "weibull", "gamma": "two"}}"#).unwrap();
        let err = Config::from_path(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma") || msg.contains("density"), "{msg}");
    }
}
