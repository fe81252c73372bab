use std::sync::Arc;

use super::baseline::BaselineModel;
use super::mixing::MixingLaw;
use crate::error::{Error, Result};
use crate::quadrature;

// internal tolerance for the quadratures hidden inside pdf/survival
// evaluations (continuous mixtures, tail integrals)
const INNER_TOL: f64 = 1e-10;

/// Support of a derived density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    PositiveHalfline,
    RealLine,
}

#[derive(Debug)]
enum Kind {
    Baseline(BaselineModel),
    LengthBiased { base: BaselineModel, mu: f64 },
    CurrentDuration { base: BaselineModel, mu: f64 },
    Scaled { base: DerivedDensity, sigma: f64 },
    Mixture { base: DerivedDensity, law: MixingLaw },
    LogTransformed { base: DerivedDensity },
}

/// A density on (0, inf) (or on the line, for the log transform) with
/// evaluable pdf, pdf derivative and survival function. Immutable and
/// cheap to clone.
#[derive(Debug, Clone)]
pub struct DerivedDensity {
    inner: Arc<Kind>,
}

impl DerivedDensity {
    pub fn baseline(model: BaselineModel) -> Self {
        DerivedDensity {
            inner: Arc::new(Kind::Baseline(model)),
        }
    }

    /// f1(x) = x g(x) / mu: the law of a full duration picked by
    /// cross-sectional sampling.
    pub fn length_biased(model: BaselineModel) -> Self {
        let mu = model.mean();
        DerivedDensity {
            inner: Arc::new(Kind::LengthBiased { base: model, mu }),
        }
    }

    /// f2(x) = survival(x) / mu: the law of an elapsed duration at the
    /// sampling time.
    pub fn current_duration(model: BaselineModel) -> Self {
        let mu = model.mean();
        DerivedDensity {
            inner: Arc::new(Kind::CurrentDuration { base: model, mu }),
        }
    }

    pub fn scaled(base: DerivedDensity, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got {sigma}")));
        }
        base.require_positive_support("scaled")?;
        Ok(DerivedDensity {
            inner: Arc::new(Kind::Scaled { base, sigma }),
        })
    }

    /// Scale mixture h(x) = int (1/u) f(x/u) dG(u).
    pub fn mixture(base: DerivedDensity, law: MixingLaw) -> Result<Self> {
        law.validate()?;
        base.require_positive_support("mixture")?;
        Ok(DerivedDensity {
            inner: Arc::new(Kind::Mixture { base, law }),
        })
    }

    /// Density of log X when X has density `base`.
    pub fn log_transformed(base: DerivedDensity) -> Result<Self> {
        base.require_positive_support("log transform")?;
        Ok(DerivedDensity {
            inner: Arc::new(Kind::LogTransformed { base }),
        })
    }

    fn require_positive_support(&self, what: &str) -> Result<()> {
        if self.support() != Support::PositiveHalfline {
            return Err(Error::Domain(format!(
                "{what} requires a density on the positive half-line"
            )));
        }
        Ok(())
    }

    pub fn support(&self) -> Support {
        match &*self.inner {
            Kind::LogTransformed { .. } => Support::RealLine,
            _ => Support::PositiveHalfline,
        }
    }

    /// Cached mean of the generating baseline, where one exists.
    pub fn base_mean(&self) -> Option<f64> {
        match &*self.inner {
            Kind::Baseline(m) => Some(m.mean()),
            Kind::LengthBiased { mu, .. } | Kind::CurrentDuration { mu, .. } => Some(*mu),
            Kind::Scaled { base, .. } | Kind::Mixture { base, .. } | Kind::LogTransformed { base } => {
                base.base_mean()
            }
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x must be finite, got {x}")));
        }
        match self.support() {
            Support::RealLine => Ok(()),
            Support::PositiveHalfline => {
                if matches!(&*self.inner, Kind::Baseline(_)) {
                    // baseline handles its own origin rules
                    Ok(())
                } else if x > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("x must be positive, got {x}")))
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &*self.inner {
            Kind::Baseline(m) => m.pdf(x)?,
            Kind::LengthBiased { base, mu } => x * base.pdf(x)? / mu,
            Kind::CurrentDuration { base, mu } => base.survival(x)? / mu,
            Kind::Scaled { base, sigma } => base.pdf(x / sigma)? / sigma,
            Kind::Mixture { base, law } => match law {
                // substituting t = x/u turns E[(1/U) f(x/U)] into an integral
                // in t, which avoids the near-origin spike in u
                MixingLaw::Uniform { a, b } => {
                    let f = base.clone();
                    let r = quadrature::integrate_finite(
                        move |t| {
                            if t > 0.0 {
                                f.pdf(t).unwrap_or(0.0) / t
                            } else {
                                0.0
                            }
                        },
                        x / b,
                        x / a,
                        INNER_TOL,
                    )?;
                    r.value / (b - a)
                }
                MixingLaw::UnitUniform => {
                    let f = base.clone();
                    quadrature::integrate_from(move |t| f.pdf(t).unwrap_or(0.0) / t, x, INNER_TOL)?
                        .value
                }
                _ => {
                    let f = base.clone();
                    law.expect(move |u| f.pdf(x / u).map(|v| v / u).unwrap_or(0.0), INNER_TOL)?
                }
            },
            Kind::LogTransformed { base } => {
                let ex = x.exp();
                if ex == 0.0 || ex.is_infinite() {
                    0.0
                } else {
                    ex * base.pdf(ex)?
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Numerical(format!("pdf non-finite at x = {x:e}")));
        }
        Ok(v)
    }

    pub fn pdf_derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &*self.inner {
            Kind::Baseline(m) => m.pdf_derivative(x)?,
            Kind::LengthBiased { base, mu } => (base.pdf(x)? + x * base.pdf_derivative(x)?) / mu,
            Kind::CurrentDuration { base, mu } => -base.pdf(x)? / mu,
            Kind::Scaled { base, sigma } => base.pdf_derivative(x / sigma)? / (sigma * sigma),
            Kind::Mixture { base, law } => match law {
                // same t = x/u substitution; the t-integral of f' telescopes
                MixingLaw::Uniform { a, b } => {
                    (base.pdf(x / a)? - base.pdf(x / b)?) / ((b - a) * x)
                }
                MixingLaw::UnitUniform => -base.pdf(x)? / x,
                _ => {
                    let f = base.clone();
                    law.expect(
                        move |u| f.pdf_derivative(x / u).map(|v| v / (u * u)).unwrap_or(0.0),
                        INNER_TOL,
                    )?
                }
            },
            Kind::LogTransformed { base } => {
                let ex = x.exp();
                if ex == 0.0 || ex.is_infinite() {
                    0.0
                } else {
                    ex * base.pdf(ex)? + ex * ex * base.pdf_derivative(ex)?
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Numerical(format!("pdf_derivative non-finite at x = {x:e}")));
        }
        Ok(v)
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match &*self.inner {
            Kind::Baseline(m) => m.survival(x)?,
            Kind::LengthBiased { base, mu } => {
                let b = base.clone();
                let r = quadrature::integrate_from(
                    move |y| y * b.pdf(y).unwrap_or(0.0),
                    x,
                    INNER_TOL,
                )?;
                r.value / mu
            }
            Kind::CurrentDuration { base, mu } => {
                let b = base.clone();
                let r =
                    quadrature::integrate_from(move |y| b.survival(y).unwrap_or(0.0), x, INNER_TOL)?;
                r.value / mu
            }
            Kind::Scaled { base, sigma } => base.survival(x / sigma)?,
            Kind::Mixture { base, law } => {
                let f = base.clone();
                law.expect(move |u| f.survival(x / u).unwrap_or(0.0), INNER_TOL)?
            }
            Kind::LogTransformed { base } => {
                let ex = x.exp();
                if ex == 0.0 {
                    1.0
                } else if ex.is_infinite() {
                    0.0
                } else {
                    base.survival(ex)?
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Numerical(format!("survival non-finite at x = {x:e}")));
        }
        Ok(v.clamp(0.0, 1.0))
    }

    /// The unsquared scale score 1 + x f'(x)/f(x), in the algebraically
    /// reduced form for the length-biased and current-duration kinds:
    /// 2 + x g'/g and 1 - x g / survival respectively.
    pub fn scale_score(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        match &*self.inner {
            Kind::LengthBiased { base, .. } => {
                let g = base.pdf(x)?;
                if g <= 0.0 {
                    return Err(score_undefined(x));
                }
                Ok(2.0 + x * base.pdf_derivative(x)? / g)
            }
            Kind::CurrentDuration { base, .. } => {
                let s = base.survival(x)?;
                if s <= 0.0 {
                    return Err(score_undefined(x));
                }
                Ok(1.0 - x * base.pdf(x)? / s)
            }
            _ => {
                let f = self.pdf(x)?;
                if f <= 0.0 {
                    return Err(score_undefined(x));
                }
                Ok(1.0 + x * self.pdf_derivative(x)? / f)
            }
        }
    }

    /// True when derivative evaluations fall back to finite differences
    /// somewhere in the density tree.
    pub fn derivative_is_numeric(&self) -> bool {
        match &*self.inner {
            Kind::Baseline(m)
            | Kind::LengthBiased { base: m, .. }
            | Kind::CurrentDuration { base: m, .. } => m.derivative_is_numeric(),
            Kind::Scaled { base, .. } | Kind::Mixture { base, .. } | Kind::LogTransformed { base } => {
                base.derivative_is_numeric()
            }
        }
    }
}

fn score_undefined(x: f64) -> Error {
    Error::Numerical(format!("scale score undefined at x = {x:e}: density is 0"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn exponential() -> BaselineModel {
        BaselineModel::weibull(1.0).unwrap()
    }

    #[test]
    fn exponential_derived_pdfs() {
        let cd = DerivedDensity::current_duration(exponential());
        assert_abs_diff_eq!(cd.pdf(1.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-14);
        let lb = DerivedDensity::length_biased(exponential());
        assert_abs_diff_eq!(lb.pdf(2.0).unwrap(), 2.0 * (-2.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn two_point_mixture_pdf_is_the_finite_sum() {
        let f = DerivedDensity::baseline(exponential());
        let h = DerivedDensity::mixture(
            f,
            MixingLaw::TwoPoint {
                u1: 1.0,
                u2: 2.0,
                p: 0.5,
            },
        )
        .unwrap();
        let want = 0.5 * (-1.0f64).exp() + 0.25 * (-0.5f64).exp();
        assert_abs_diff_eq!(h.pdf(1.0).unwrap(), want, epsilon = 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let cd = DerivedDensity::current_duration(exponential());
        assert_abs_diff_eq!(cd.pdf_derivative(1.0).unwrap(), -(-1.0f64).exp(), epsilon = 1e-14);

        // log-logistic gamma=2 length-biased density peaks at x=1
        let lb = DerivedDensity::length_biased(BaselineModel::log_logistic(2.0).unwrap());
        assert_abs_diff_eq!(lb.pdf_derivative(1.0).unwrap(), 0.0, epsilon = 1e-12);
        // finite-difference confirmation
        let h = 1e-6;
        let fd = (lb.pdf(1.0 + h).unwrap() - lb.pdf(1.0 - h).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(fd, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn scale_score_examples() {
        let lb = DerivedDensity::length_biased(exponential());
        assert_abs_diff_eq!(lb.scale_score(2.0).unwrap(), 0.0, epsilon = 1e-13);
        let cd = DerivedDensity::current_duration(exponential());
        assert_abs_diff_eq!(cd.scale_score(3.0).unwrap(), -2.0, epsilon = 1e-13);
        // Weibull scale-family score is gamma (1 - x^gamma), zero at x=1
        let w2 = DerivedDensity::baseline(BaselineModel::weibull(2.0).unwrap());
        assert_abs_diff_eq!(w2.scale_score(1.0).unwrap(), 0.0, epsilon = 1e-12);
        // finite-difference cross-check away from the zero
        let x = 1.7f64;
        let h = 1e-6;
        let fd = (w2.pdf(x + h).unwrap() - w2.pdf(x - h).unwrap()) / (2.0 * h);
        let score_fd = 1.0 + x * fd / w2.pdf(x).unwrap();
        assert_abs_diff_eq!(w2.scale_score(x).unwrap(), score_fd, epsilon = 1e-5);
    }

    #[test]
    fn normalization_across_kinds_and_families() {
        let models = [
            BaselineModel::weibull(0.5).unwrap(),
            BaselineModel::weibull(1.0).unwrap(),
            BaselineModel::weibull(2.0).unwrap(),
            BaselineModel::weibull(5.0).unwrap(),
            BaselineModel::log_logistic(1.5).unwrap(),
            BaselineModel::log_logistic(2.0).unwrap(),
            BaselineModel::log_logistic(5.0).unwrap(),
        ];
        for m in models {
            let kinds = [
                DerivedDensity::baseline(m.clone()),
                DerivedDensity::length_biased(m.clone()),
                DerivedDensity::current_duration(m.clone()),
                DerivedDensity::scaled(DerivedDensity::baseline(m.clone()), 2.5).unwrap(),
                DerivedDensity::mixture(
                    DerivedDensity::baseline(m.clone()),
                    MixingLaw::TwoPoint {
                        u1: 1.0,
                        u2: 2.0,
                        p: 0.3,
                    },
                )
                .unwrap(),
                DerivedDensity::log_transformed(DerivedDensity::baseline(m.clone())).unwrap(),
            ];
            for d in kinds {
                let dd = d.clone();
                let mass = match d.support() {
                    Support::PositiveHalfline => {
                        quadrature::integrate_halfline(move |x| dd.pdf(x).unwrap_or(0.0), 1e-9)
                            .unwrap()
                    }
                    Support::RealLine => {
                        quadrature::integrate_line(move |x| dd.pdf(x).unwrap_or(0.0), 1e-9)
                            .unwrap()
                    }
                };
                assert!(
                    (mass.value - 1.0).abs() < 1e-8,
                    "mass {} for {:?}",
                    mass.value,
                    d
                );
            }
        }
    }

    #[test]
    fn zero_mean_score() {
        let ds = [
            DerivedDensity::length_biased(BaselineModel::weibull(2.0).unwrap()),
            DerivedDensity::current_duration(BaselineModel::weibull(2.0).unwrap()),
            DerivedDensity::length_biased(BaselineModel::log_logistic(3.0).unwrap()),
            DerivedDensity::current_duration(BaselineModel::log_logistic(3.0).unwrap()),
        ];
        for d in ds {
            let dd = d.clone();
            let r = quadrature::integrate_halfline(
                move |x| match (dd.scale_score(x), dd.pdf(x)) {
                    (Ok(s), Ok(f)) => s * f,
                    _ => 0.0,
                },
                1e-9,
            )
            .unwrap();
            assert!(r.value.abs() < 1e-6, "score mean {} for {:?}", r.value, d);
        }
    }

    #[test]
    fn survival_plus_cdf_is_one() {
        let d = DerivedDensity::current_duration(BaselineModel::weibull(2.0).unwrap());
        for i in 1..=20 {
            let x = 0.15 * i as f64;
            let dd = d.clone();
            let head = quadrature::integrate_finite(move |t| dd.pdf(t).unwrap_or(0.0), 1e-12, x, 1e-10)
                .unwrap();
            assert_abs_diff_eq!(d.survival(x).unwrap() + head.value, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn current_duration_mean_identity() {
        // E X under f2 equals E V^2 / (2 mu); Weibull gamma=2
        let g = 2.0f64;
        let m = BaselineModel::weibull(g).unwrap();
        let d = DerivedDensity::current_duration(m.clone());
        let q = quadrature::integrate_halfline(move |x| x * d.pdf(x).unwrap_or(0.0), 1e-10).unwrap();
        let want = statrs::function::gamma::gamma(1.0 + 2.0 / g)
            / (2.0 * statrs::function::gamma::gamma(1.0 + 1.0 / g));
        assert_abs_diff_eq!(q.value, want, epsilon = 1e-8);
    }

    #[test]
    fn degenerate_mixture_equals_scaled() {
        let base = DerivedDensity::baseline(BaselineModel::weibull(2.0).unwrap());
        let mixed = DerivedDensity::mixture(base.clone(), MixingLaw::Degenerate(0.7)).unwrap();
        let scaled = DerivedDensity::scaled(base, 0.7).unwrap();
        for i in 1..=20 {
            let x = 0.2 * i as f64;
            assert_abs_diff_eq!(
                mixed.pdf(x).unwrap(),
                scaled.pdf(x).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn unit_uniform_mixture_of_f1_is_f2() {
        // f2(x) = int_0^1 f1(x/u) (1/u) du
        for m in [
            BaselineModel::weibull(1.0).unwrap(),
            BaselineModel::weibull(2.0).unwrap(),
        ] {
            let f1 = DerivedDensity::length_biased(m.clone());
            let f2 = DerivedDensity::current_duration(m);
            let h = DerivedDensity::mixture(f1, MixingLaw::UnitUniform).unwrap();
            for i in 1..=20 {
                let x = 0.25 * i as f64;
                assert_abs_diff_eq!(h.pdf(x).unwrap(), f2.pdf(x).unwrap(), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn log_transform_pdf() {
        let f = DerivedDensity::baseline(exponential());
        let ft = DerivedDensity::log_transformed(f).unwrap();
        // Gumbel-type density e^{z - e^z}
        for z in [-2.0, -0.5, 0.0, 1.0] {
            assert_abs_diff_eq!(
                ft.pdf(z).unwrap(),
                (z - z.exp() as f64).exp(),
                epsilon = 1e-14
            );
        }
        assert!(DerivedDensity::log_transformed(ft).is_err());
    }
}
