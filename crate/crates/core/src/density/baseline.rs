use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use super::grid::PchipInterpolant;
use crate::error::{Error, Result};
use crate::quadrature;

type DynFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied baseline density given by callables.
#[derive(Clone)]
pub struct CustomDensity {
    pub pdf: DynFn,
    pub pdf_derivative: Option<DynFn>,
    pub survival: DynFn,
    pub mean_hint: Option<f64>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("pdf_derivative", &self.pdf_derivative.is_some())
            .field("mean_hint", &self.mean_hint)
            .finish()
    }
}

#[derive(Debug, Clone)]
enum Family {
    Weibull { gamma: f64 },
    LogLogistic { gamma: f64 },
    Custom(CustomDensity),
}

/// A positive-support absolutely continuous baseline law for the
/// duration V, with evaluable density, density derivative, survival
/// function and mean.
#[derive(Debug, Clone)]
pub struct BaselineModel {
    family: Family,
    mean: f64,
}

const MEAN_TOL: f64 = 1e-9;
const MEAN_CROSS_CHECK_TOL: f64 = 1e-5;

impl BaselineModel {
    /// Weibull baseline g(x) = gamma x^{gamma-1} e^{-x^gamma}.
    pub fn weibull(shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::Domain(format!(
                "Weibull shape must be positive and finite, got {shape}"
            )));
        }
        let mean = gamma(1.0 + 1.0 / shape);
        Ok(BaselineModel {
            family: Family::Weibull { gamma: shape },
            mean,
        })
    }

    /// Log-logistic baseline g(x) = gamma x^{gamma-1} / (1 + x^gamma)^2.
    /// Requires gamma > 1 so that the mean is finite.
    pub fn log_logistic(shape: f64) -> Result<Self> {
        if !(shape > 1.0) || !shape.is_finite() {
            return Err(Error::Domain(format!(
                "log-logistic shape must exceed 1 (infinite mean otherwise), got {shape}"
            )));
        }
        let mean = (std::f64::consts::PI / shape) / (std::f64::consts::PI / shape).sin();
        Ok(BaselineModel {
            family: Family::LogLogistic { gamma: shape },
            mean,
        })
    }

    /// Baseline from user callables. The mean is taken from `mean_hint`
    /// or computed by quadrature, then cross-checked against the
    /// survival-function integral.
    pub fn custom(custom: CustomDensity) -> Result<Self> {
        let pdf = custom.pdf.clone();
        let mean = match custom.mean_hint {
            Some(m) if m > 0.0 && m.is_finite() => m,
            Some(m) => {
                return Err(Error::Domain(format!("mean_hint must be positive, got {m}")))
            }
            None => {
                let r = quadrature::integrate_halfline(move |x| x * pdf(x), MEAN_TOL)?;
                if !r.converged || !r.value.is_finite() || r.value <= 0.0 {
                    return Err(Error::Numerical(
                        "mean quadrature for custom density did not converge".into(),
                    ));
                }
                r.value
            }
        };
        let surv = custom.survival.clone();
        let check = quadrature::integrate_halfline(move |x| surv(x), MEAN_TOL)?;
        if (check.value - mean).abs() > MEAN_CROSS_CHECK_TOL.max(10.0 * check.abs_error_estimate) {
            return Err(Error::Numerical(format!(
                "mean cross-check failed: int survival = {} vs mean = {}",
                check.value, mean
            )));
        }
        Ok(BaselineModel {
            family: Family::Custom(custom),
            mean,
        })
    }

    /// Baseline from a density sampled on a grid, interpolated by a
    /// shape-preserving cubic and renormalized to unit mass.
    pub fn from_grid(points: &[(f64, f64)]) -> Result<Self> {
        if points.iter().any(|p| p.0 < 0.0) {
            return Err(Error::Domain("grid x values must be nonnegative".into()));
        }
        let interp = Arc::new(PchipInterpolant::new(points)?);
        let mass = interp.total_mass();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain("grid density has nonpositive total mass".into()));
        }
        let p = interp.clone();
        let d = interp.clone();
        let s = interp.clone();
        Self::custom(CustomDensity {
            pdf: Arc::new(move |x| p.eval(x) / mass),
            pdf_derivative: Some(Arc::new(move |x| d.derivative(x) / mass)),
            survival: Arc::new(move |x| 1.0 - s.integral_to(x) / mass),
            mean_hint: None,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unit-exponential detection for the dedicated Gamma(2,1) sampling path.
    pub fn is_unit_exponential(&self) -> bool {
        matches!(self.family, Family::Weibull { gamma } if gamma == 1.0)
    }

    /// True when `pdf_derivative` falls back to finite differences.
    pub fn derivative_is_numeric(&self) -> bool {
        matches!(&self.family, Family::Custom(c) if c.pdf_derivative.is_none())
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x must be finite, got {x}")));
        }
        if x < 0.0 {
            return Err(Error::Domain(format!("x must be positive, got {x}")));
        }
        if x == 0.0 {
            // pdf blows up at the origin for gamma < 1
            if let Family::Weibull { gamma } = self.family {
                if gamma < 1.0 {
                    return Err(Error::Domain(
                        "x = 0 is outside the domain for Weibull shape < 1".into(),
                    ));
                }
            }
            if let Family::LogLogistic { gamma } = self.family {
                if gamma < 1.0 {
                    return Err(Error::Domain(
                        "x = 0 is outside the domain for log-logistic shape < 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &self.family {
            Family::Weibull { gamma } => {
                if x == 0.0 {
                    if *gamma > 1.0 {
                        0.0
                    } else {
                        1.0 // gamma == 1: exponential
                    }
                } else {
                    gamma * x.powf(gamma - 1.0) * (-x.powf(*gamma)).exp()
                }
            }
            Family::LogLogistic { gamma } => {
                if x == 0.0 {
                    if *gamma > 1.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    let xg = x.powf(*gamma);
                    gamma * x.powf(gamma - 1.0) / (1.0 + xg).powi(2)
                }
            }
            Family::Custom(c) => (c.pdf)(x),
        };
        finite_or_err(v, "pdf", x)
    }

    pub fn pdf_derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &self.family {
            Family::Weibull { gamma } => {
                if x == 0.0 {
                    return self.numeric_derivative_near_zero();
                }
                let g = *gamma;
                let xg = x.powf(g);
                // d/dx [g x^{g-1} e^{-x^g}] = g e^{-x^g} x^{g-2} ((g-1) - g x^g)
                g * (-xg).exp() * x.powf(g - 2.0) * ((g - 1.0) - g * xg)
            }
            Family::LogLogistic { gamma } => {
                if x == 0.0 {
                    return self.numeric_derivative_near_zero();
                }
                let g = *gamma;
                let xg = x.powf(g);
                g * x.powf(g - 2.0) * ((g - 1.0) * (1.0 + xg) - 2.0 * g * xg) / (1.0 + xg).powi(3)
            }
            Family::Custom(c) => match &c.pdf_derivative {
                Some(d) => d(x),
                None => {
                    // central difference, relative step ~ cbrt(eps)
                    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
                    ((c.pdf)(x + h) - (c.pdf)((x - h).max(0.0))) / (x + h - (x - h).max(0.0))
                }
            },
        };
        finite_or_err(v, "pdf_derivative", x)
    }

    fn numeric_derivative_near_zero(&self) -> Result<f64> {
        let h = f64::EPSILON.cbrt();
        Ok((self.pdf(2.0 * h)? - self.pdf(h)?) / h)
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &self.family {
            Family::Weibull { gamma } => (-x.powf(*gamma)).exp(),
            Family::LogLogistic { gamma } => 1.0 / (1.0 + x.powf(*gamma)),
            Family::Custom(c) => (c.survival)(x),
        };
        finite_or_err(v, "survival", x)
    }

    /// Baseline hazard g / (1 - G), convenience accessor.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.survival(x)?;
        if s <= 0.0 {
            return Err(Error::Numerical(format!("hazard undefined at x = {x}: survival is 0")));
        }
        Ok(self.pdf(x)? / s)
    }

    /// Quantile of V by inversion of the survival function.
    /// Closed forms for the built-in families, bisection otherwise.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level must be in [0,1), got {p}")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        match &self.family {
            Family::Weibull { gamma } => Ok((-(1.0 - p).ln()).powf(1.0 / gamma)),
            Family::LogLogistic { gamma } => Ok((p / (1.0 - p)).powf(1.0 / gamma)),
            Family::Custom(_) => {
                // bracket then bisect on survival(x) = 1 - p
                let target = 1.0 - p;
                let mut hi = 1.0;
                let mut iter = 0;
                while self.survival(hi)? > target {
                    hi *= 2.0;
                    iter += 1;
                    if iter > 200 {
                        return Err(Error::Numerical(format!(
                            "quantile bracketing failed at level {p}"
                        )));
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.survival(mid)? > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-12 * hi.max(1.0) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

fn finite_or_err(v: f64, what: &str, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} non-finite at x = {x:e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn weibull_basics() {
        let m = BaselineModel::weibull(1.0).unwrap();
        assert_abs_diff_eq!(m.pdf(1.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.mean(), 1.0, epsilon = 1e-12);

        let m2 = BaselineModel::weibull(2.0).unwrap();
        // derivative of 2x e^{-x^2} at 1 is -2/e
        assert_abs_diff_eq!(
            m2.pdf_derivative(1.0).unwrap(),
            -2.0 * (-1.0f64).exp(),
            epsilon = 1e-12
        );
        // quadrature oracle for the mean
        let pdf = move |x: f64| m2.pdf(x).unwrap();
        let q = quadrature::integrate_halfline(move |x| x * pdf(x), 1e-10).unwrap();
        assert_abs_diff_eq!(q.value, PI.sqrt() / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(BaselineModel::weibull(2.0).unwrap().mean(), q.value, epsilon = 1e-9);
    }

    #[test]
    fn log_logistic_mean_oracle() {
        let m = BaselineModel::log_logistic(2.0).unwrap();
        let pdf = move |x: f64| m.pdf(x).unwrap();
        let q = quadrature::integrate_halfline(move |x| x * pdf(x), 1e-10).unwrap();
        assert_abs_diff_eq!(q.value, PI / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(
            BaselineModel::log_logistic(2.0).unwrap().mean(),
            PI / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_logistic_requires_shape_above_one() {
        assert!(BaselineModel::log_logistic(1.0).is_err());
        assert!(BaselineModel::log_logistic(0.5).is_err());
    }

    #[test]
    fn weibull_origin_rules() {
        let heavy = BaselineModel::weibull(0.5).unwrap();
        assert!(heavy.pdf(0.0).is_err());
        let light = BaselineModel::weibull(2.0).unwrap();
        assert_eq!(light.pdf(0.0).unwrap(), 0.0);
        assert!(light.pdf(-1.0).is_err());
    }

    #[test]
    fn survival_consistency_grid() {
        for m in [
            BaselineModel::weibull(2.0).unwrap(),
            BaselineModel::log_logistic(3.0).unwrap(),
        ] {
            for i in 1..=20 {
                let x = 0.2 * i as f64;
                let mm = m.clone();
                let head =
                    quadrature::integrate_finite(move |t| mm.pdf(t).unwrap(), 1e-9, x, 1e-10)
                        .unwrap();
                // tiny [0, 1e-9] sliver is below tolerance
                assert_abs_diff_eq!(m.survival(x).unwrap() + head.value, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn custom_from_grid_normalizes() {
        // lognormal-ish bump sampled on a grid
        let pts: Vec<(f64, f64)> = (1..200)
            .map(|i| {
                let x = 0.05 * i as f64;
                (x, (-(x.ln()).powi(2) / 0.5).exp() / x)
            })
            .collect();
        let m = BaselineModel::from_grid(&pts).unwrap();
        let mm = m.clone();
        let q = quadrature::integrate_halfline(move |x| mm.pdf(x).unwrap(), 1e-9).unwrap();
        assert_abs_diff_eq!(q.value, 1.0, epsilon = 1e-7);
        assert!(m.mean() > 0.0);
    }

    #[test]
    fn custom_mean_cross_check_rejects_inconsistent_callables() {
        // survival inconsistent with the claimed mean
        let res = BaselineModel::custom(CustomDensity {
            pdf: Arc::new(|x| (-x).exp()),
            pdf_derivative: Some(Arc::new(|x| -(-x).exp())),
            survival: Arc::new(|x| (-x / 3.0).exp()),
            mean_hint: Some(1.0),
        });
        assert!(res.is_err());
    }

    #[test]
    fn quantile_round_trip() {
        for m in [
            BaselineModel::weibull(2.0).unwrap(),
            BaselineModel::log_logistic(3.0).unwrap(),
        ] {
            for p in [0.1, 0.5, 0.9, 0.999] {
                let q = m.quantile(p).unwrap();
                assert_abs_diff_eq!(m.survival(q).unwrap(), 1.0 - p, epsilon = 1e-10);
            }
        }
    }
}
