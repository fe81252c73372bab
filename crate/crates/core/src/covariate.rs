//! Covariate law h of W, the theta-tilted law of the sampled covariate Z,
//! its covariance Sigma_Z, and assembly of the information bounds
//! Sigma_Z * I_s (plus the "+1" variant when h is known).

use serde::Serialize;

use crate::density::{BaselineModel, DerivedDensity, PchipInterpolant};
use crate::error::{Error, Result};
use crate::fisher::{self, InfoScaleResult, Scheme};
use crate::quadrature;

/// Law of the covariate W in the core model. Restricted to models whose
/// tilted moments are exactly computable, so that Sigma_Z carries no
/// stochastic error of its own.
#[derive(Debug, Clone)]
pub enum CovariateModel {
    Discrete {
        support: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
    GaussianDiagonal {
        mean: Vec<f64>,
        variances: Vec<f64>,
    },
    /// one-dimensional density given on a grid
    GridContinuous { interp: PchipInterpolant },
}

impl CovariateModel {
    pub fn discrete(support: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::Config("support/probs length mismatch".into()));
        }
        let k = support[0].len();
        if k == 0 || support.iter().any(|z| z.len() != k) {
            return Err(Error::Config("support points must share a positive dimension".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Config("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(CovariateModel::Discrete { support, probs })
    }

    pub fn gaussian_diagonal(mean: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if mean.is_empty() || mean.len() != variances.len() {
            return Err(Error::Config("mean/variances length mismatch".into()));
        }
        if variances.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Config("variances must be positive".into()));
        }
        Ok(CovariateModel::GaussianDiagonal { mean, variances })
    }

    pub fn grid(points: &[(f64, f64)]) -> Result<Self> {
        let interp = PchipInterpolant::new(points)?;
        if interp.total_mass() <= 0.0 {
            return Err(Error::Config("grid covariate density has no mass".into()));
        }
        Ok(CovariateModel::GridContinuous { interp })
    }

    pub fn dim(&self) -> usize {
        match self {
            CovariateModel::Discrete { support, .. } => support[0].len(),
            CovariateModel::GaussianDiagonal { mean, .. } => mean.len(),
            CovariateModel::GridContinuous { .. } => 1,
        }
    }
}

/// The law of the sampled covariate Z: f_Z(z) = e^{-theta'z} h(z) / E_h e^{-theta'W}.
/// Identical under both sampling schemes, and independent of the
/// baseline law by construction (no baseline argument anywhere).
#[derive(Debug, Clone)]
pub struct SampledCovariateLaw {
    base: CovariateModel,
    theta: Vec<f64>,
    normalizer: f64,
}

const GRID_TOL: f64 = 1e-11;

impl SampledCovariateLaw {
    pub fn new(base: CovariateModel, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != base.dim() {
            return Err(Error::Config(format!(
                "theta has dimension {}, covariates have {}",
                theta.len(),
                base.dim()
            )));
        }
        let normalizer = match &base {
            CovariateModel::Discrete { support, probs } => support
                .iter()
                .zip(probs)
                .map(|(z, p)| p * (-dot(&theta, z)).exp())
                .sum(),
            CovariateModel::GaussianDiagonal { mean, variances } => {
                let exponent: f64 = mean
                    .iter()
                    .zip(variances)
                    .zip(&theta)
                    .map(|((m, v), t)| -t * m + 0.5 * t * t * v)
                    .sum();
                exponent.exp()
            }
            CovariateModel::GridContinuous { interp } => {
                let t = theta[0];
                let mass = interp.total_mass();
                let g = interp.clone();
                quadrature::integrate_finite(
                    move |z| (-t * z).exp() * g.eval(z) / mass,
                    interp.x_min(),
                    interp.x_max(),
                    GRID_TOL,
                )?
                .value
            }
        };
        if !normalizer.is_finite() || normalizer <= 0.0 {
            return Err(Error::Domain(format!(
                "E_h e^(-theta'W) = {normalizer} is not positive-finite at theta = {theta:?}"
            )));
        }
        Ok(SampledCovariateLaw {
            base,
            theta,
            normalizer,
        })
    }

    pub fn base(&self) -> &CovariateModel {
        &self.base
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Density/mass of Z at z. Points outside a discrete support get 0.
    pub fn pdf(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::Domain("dimension mismatch in covariate pdf".into()));
        }
        let h = match &self.base {
            CovariateModel::Discrete { support, probs } => support
                .iter()
                .zip(probs)
                .find(|(s, _)| s.iter().zip(z).all(|(a, b)| a == b))
                .map(|(_, p)| *p)
                .unwrap_or(0.0),
            CovariateModel::GaussianDiagonal { mean, variances } => mean
                .iter()
                .zip(variances)
                .zip(z)
                .map(|((m, v), x)| {
                    (-0.5 * (x - m) * (x - m) / v).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
                })
                .product(),
            CovariateModel::GridContinuous { interp } => interp.eval(z[0]) / interp.total_mass(),
        };
        Ok((-dot(&self.theta, z)).exp() * h / self.normalizer)
    }

    /// Tilted point masses (discrete models only).
    pub fn tilted_probs(&self) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        match &self.base {
            CovariateModel::Discrete { support, probs } => {
                let q: Vec<f64> = support
                    .iter()
                    .zip(probs)
                    .map(|(z, p)| p * (-dot(&self.theta, z)).exp() / self.normalizer)
                    .collect();
                Some((support.clone(), q))
            }
            _ => None,
        }
    }

    /// E Z under the tilted law.
    pub fn mean_z(&self) -> Result<Vec<f64>> {
        match &self.base {
            CovariateModel::Discrete { .. } => {
                let (support, q) = self.tilted_probs().unwrap();
                let k = self.dim();
                let mut m = vec![0.0; k];
                for (z, w) in support.iter().zip(&q) {
                    for j in 0..k {
                        m[j] += w * z[j];
                    }
                }
                Ok(m)
            }
            CovariateModel::GaussianDiagonal { mean, variances } => Ok(mean
                .iter()
                .zip(variances)
                .zip(&self.theta)
                .map(|((m, v), t)| m - v * t)
                .collect()),
            CovariateModel::GridContinuous { interp } => {
                let t = self.theta[0];
                let mass = interp.total_mass();
                let g = interp.clone();
                let num = quadrature::integrate_finite(
                    move |z| z * (-t * z).exp() * g.eval(z) / mass,
                    interp.x_min(),
                    interp.x_max(),
                    GRID_TOL,
                )?;
                Ok(vec![num.value / self.normalizer])
            }
        }
    }

    /// Covariance matrix Sigma_Z of the sampled covariates.
    pub fn sigma_z(&self) -> Result<Vec<Vec<f64>>> {
        let k = self.dim();
        let mean = self.mean_z()?;
        match &self.base {
            CovariateModel::Discrete { .. } => {
                let (support, q) = self.tilted_probs().unwrap();
                let mut cov = vec![vec![0.0; k]; k];
                for (z, w) in support.iter().zip(&q) {
                    for i in 0..k {
                        for j in 0..k {
                            cov[i][j] += w * (z[i] - mean[i]) * (z[j] - mean[j]);
                        }
                    }
                }
                Ok(cov)
            }
            CovariateModel::GaussianDiagonal { variances, .. } => {
                // exponential tilting shifts a Gaussian, covariance is untouched
                let mut cov = vec![vec![0.0; k]; k];
                for (j, v) in variances.iter().enumerate() {
                    cov[j][j] = *v;
                }
                Ok(cov)
            }
            CovariateModel::GridContinuous { interp } => {
                let t = self.theta[0];
                let mass = interp.total_mass();
                let m0 = mean[0];
                let norm = self.normalizer;
                let g = interp.clone();
                let r = quadrature::integrate_finite(
                    move |z| (z - m0) * (z - m0) * (-t * z).exp() * g.eval(z) / mass,
                    interp.x_min(),
                    interp.x_max(),
                    GRID_TOL,
                )?;
                Ok(vec![vec![r.value / norm]])
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A k x k information bound with its ingredients.
#[derive(Debug, Clone, Serialize)]
pub struct InfoBoundReport {
    pub matrix: Vec<Vec<f64>>,
    pub scheme: Scheme,
    pub h_known: bool,
    pub scalar_info: f64,
    pub scalar_info_error: f64,
    pub sigma_z: Vec<Vec<f64>>,
}

/// Sigma_Z * I_s(f_scheme), or Sigma_Z * (I_s + 1) when the covariate
/// law is known.
pub fn info_bound(
    m: &BaselineModel,
    law: &SampledCovariateLaw,
    scheme: Scheme,
    h_known: bool,
    tol: f64,
) -> Result<InfoBoundReport> {
    let d = match scheme {
        Scheme::LengthBiased => DerivedDensity::length_biased(m.clone()),
        Scheme::CurrentDuration => DerivedDensity::current_duration(m.clone()),
    };
    let info: InfoScaleResult = fisher::info_scale(&d, tol)?;
    if !info.finite {
        return Err(Error::Numerical(format!(
            "scale information did not converge for {scheme:?}"
        )));
    }
    let sigma = law.sigma_z()?;
    let factor = if h_known { info.value + 1.0 } else { info.value };
    let matrix = sigma
        .iter()
        .map(|row| row.iter().map(|v| v * factor).collect())
        .collect();
    Ok(InfoBoundReport {
        matrix,
        scheme,
        h_known,
        scalar_info: info.value,
        scalar_info_error: info.error_estimate,
        sigma_z: sigma,
    })
}

/// I_s(f2) / I_s(f1): per-observation efficiency of current-duration
/// relative to length-biased sampling. Sigma_Z cancels.
pub fn relative_efficiency(m: &BaselineModel, tol: f64) -> Result<f64> {
    let f1 = DerivedDensity::length_biased(m.clone());
    let f2 = DerivedDensity::current_duration(m.clone());
    let i1 = fisher::info_scale(&f1, tol)?;
    let i2 = fisher::info_scale(&f2, tol)?;
    if !i1.finite || !(i1.value > 0.0) {
        return Err(Error::Domain("length-biased information is zero or non-finite".into()));
    }
    if !i2.finite {
        return Err(Error::Domain("current-duration information is non-finite".into()));
    }
    Ok(i2.value / i1.value)
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi sweeps.
/// Sized for the small k used here.
pub fn min_eigenvalue_symmetric(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (mip, miq) = (m[i][p], m[i][q]);
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for i in 0..n {
                    let (mpi, mqi) = (m[p][i], m[q][i]);
                    m[p][i] = c * mpi - s * mqi;
                    m[q][i] = s * mpi + c * mqi;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}
