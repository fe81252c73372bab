//! Fisher information for scale and location, the closed forms for the
//! built-in families, and numerical checks of the two information
//! inequalities (waiting beats current-duration sampling; scale mixing
//! never increases information).

use crate::density::{BaselineModel, DerivedDensity, MixingLaw, Support};
use crate::error::{Error, Result};
use crate::quadrature;
use serde::Serialize;

/// Default tolerance for information integrals (squared scores are
/// rougher than plain normalizations).
pub const INFO_TOL: f64 = 1e-7;

// density values below this are treated as dead tail; the neglected
// mass is accounted for in the reported error estimate
const PDF_CUT: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfoMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    LengthBiased,
    CurrentDuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormFamily {
    Weibull,
    LogLogistic,
}

/// Result of a scale- or location-information computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InfoScaleResult {
    pub value: f64,
    pub method: InfoMethod,
    pub error_estimate: f64,
    pub finite: bool,
}

/// I_s(f) = int (1 + x f'/f)^2 f dx by quadrature over (0, inf).
pub fn info_scale(d: &DerivedDensity, tol: f64) -> Result<InfoScaleResult> {
    if d.support() != Support::PositiveHalfline {
        return Err(Error::Domain(
            "scale information needs a positive-support density; use info_location for log transforms"
                .into(),
        ));
    }
    let dd = d.clone();
    let r = quadrature::integrate_halfline(
        move |x| {
            let f = match dd.pdf(x) {
                Ok(f) => f,
                Err(_) => return 0.0,
            };
            if f < PDF_CUT {
                return 0.0;
            }
            match dd.scale_score(x) {
                Ok(s) => s * s * f,
                Err(_) => 0.0,
            }
        },
        tol,
    )?;
    Ok(InfoScaleResult {
        value: r.value,
        method: InfoMethod::Quadrature,
        error_estimate: r.abs_error_estimate,
        finite: r.converged && r.value.is_finite(),
    })
}

/// Location information I_l(f) = int (f'/f)^2 f over the line, for a
/// log-transformed density.
pub fn info_location(d: &DerivedDensity, tol: f64) -> Result<InfoScaleResult> {
    if d.support() != Support::RealLine {
        return Err(Error::Domain("location information expects a log-transformed density".into()));
    }
    let dd = d.clone();
    let r = quadrature::integrate_line(
        move |z| {
            let f = match dd.pdf(z) {
                Ok(f) => f,
                Err(_) => return 0.0,
            };
            if f < PDF_CUT {
                return 0.0;
            }
            match dd.pdf_derivative(z) {
                Ok(df) => df * df / f,
                Err(_) => 0.0,
            }
        },
        tol,
    )?;
    Ok(InfoScaleResult {
        value: r.value,
        method: InfoMethod::Quadrature,
        error_estimate: r.abs_error_estimate,
        finite: r.converged && r.value.is_finite(),
    })
}

/// Exact information values for the built-in families:
/// Weibull: gamma(gamma+1) length biased, gamma current duration;
/// log-logistic: (gamma^2-1)/3 and (gamma-1)/2.
pub fn info_scale_closed_form(
    family: ClosedFormFamily,
    shape: f64,
    scheme: Scheme,
) -> Result<InfoScaleResult> {
    let value = match (family, scheme) {
        (ClosedFormFamily::Weibull, _) if !(shape > 0.0) => {
            return Err(Error::Domain(format!("Weibull shape must be positive, got {shape}")));
        }
        (ClosedFormFamily::LogLogistic, _) if !(shape > 1.0) => {
            return Err(Error::Domain(format!(
                "log-logistic shape must exceed 1, got {shape}"
            )));
        }
        (ClosedFormFamily::Weibull, Scheme::LengthBiased) => shape * (shape + 1.0),
        (ClosedFormFamily::Weibull, Scheme::CurrentDuration) => shape,
        (ClosedFormFamily::LogLogistic, Scheme::LengthBiased) => (shape * shape - 1.0) / 3.0,
        (ClosedFormFamily::LogLogistic, Scheme::CurrentDuration) => (shape - 1.0) / 2.0,
    };
    Ok(InfoScaleResult {
        value,
        method: InfoMethod::ClosedForm,
        error_estimate: 0.0,
        finite: true,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PatienceReport {
    /// I_s of the length-biased density f1
    pub i1: f64,
    /// I_s of the current-duration density f2
    pub i2: f64,
    pub margin: f64,
    pub holds: bool,
    /// false when either information failed to converge
    pub conclusive: bool,
}

/// Checks I_s(f2) < I_s(f1) by quadrature with an error-aware margin.
pub fn verify_patience_inequality(m: &BaselineModel, tol: f64) -> Result<PatienceReport> {
    let f1 = DerivedDensity::length_biased(m.clone());
    let f2 = DerivedDensity::current_duration(m.clone());
    let r1 = info_scale(&f1, tol)?;
    let r2 = info_scale(&f2, tol)?;
    let conclusive = r1.finite && r2.finite;
    let err = r1.error_estimate.max(r2.error_estimate);
    Ok(PatienceReport {
        i1: r1.value,
        i2: r2.value,
        margin: r1.value - r2.value,
        holds: conclusive && r2.value + err < r1.value,
        conclusive,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixtureContractionReport {
    pub i_f: f64,
    pub i_h: f64,
    pub holds: bool,
    pub degenerate: bool,
    pub conclusive: bool,
}

/// Checks I_s(h) <= I_s(f) for the scale mixture h of f over G, with
/// equality expected exactly when G is degenerate.
pub fn verify_mixture_contraction(
    f: &DerivedDensity,
    law: &MixingLaw,
    tol: f64,
) -> Result<MixtureContractionReport> {
    let h = DerivedDensity::mixture(f.clone(), law.clone())?;
    let rf = info_scale(f, tol)?;
    let rh = info_scale(&h, tol)?;
    let conclusive = rf.finite && rh.finite;
    let combined = (rf.error_estimate + rh.error_estimate).max(tol);
    let degenerate = law.is_degenerate();
    let holds = if degenerate {
        conclusive && (rh.value - rf.value).abs() <= combined
    } else {
        conclusive && rh.value <= rf.value + combined
    };
    Ok(MixtureContractionReport {
        i_f: rf.value,
        i_h: rh.value,
        holds,
        degenerate,
        conclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_values() {
        let v = |f, g, s| info_scale_closed_form(f, g, s).unwrap().value;
        assert_eq!(v(ClosedFormFamily::Weibull, 5.0, Scheme::LengthBiased), 30.0);
        assert_eq!(v(ClosedFormFamily::Weibull, 5.0, Scheme::CurrentDuration), 5.0);
        assert_eq!(v(ClosedFormFamily::LogLogistic, 10.0, Scheme::LengthBiased), 33.0);
        assert_eq!(v(ClosedFormFamily::LogLogistic, 10.0, Scheme::CurrentDuration), 4.5);
        assert!(info_scale_closed_form(ClosedFormFamily::Weibull, 0.0, Scheme::LengthBiased).is_err());
        assert!(info_scale_closed_form(ClosedFormFamily::LogLogistic, 1.0, Scheme::LengthBiased).is_err());
    }

    #[test]
    fn quadrature_matches_reference_values() {
        let exp = BaselineModel::weibull(1.0).unwrap();
        let lb = info_scale(&DerivedDensity::length_biased(exp.clone()), INFO_TOL).unwrap();
        assert!(lb.finite);
        assert_abs_diff_eq!(lb.value, 2.0, epsilon = 1e-7);
        let cd = info_scale(&DerivedDensity::current_duration(exp), INFO_TOL).unwrap();
        assert_abs_diff_eq!(cd.value, 1.0, epsilon = 1e-7);

        let ll = BaselineModel::log_logistic(2.0).unwrap();
        let lb = info_scale(&DerivedDensity::length_biased(ll.clone()), INFO_TOL).unwrap();
        assert_abs_diff_eq!(lb.value, 1.0, epsilon = 1e-7);
        let cd = info_scale(&DerivedDensity::current_duration(ll), INFO_TOL).unwrap();
        assert_abs_diff_eq!(cd.value, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn scale_invariance() {
        let f = DerivedDensity::length_biased(BaselineModel::weibull(2.0).unwrap());
        let base = info_scale(&f, 1e-9).unwrap().value;
        for sigma in [0.1, 1.0, 10.0] {
            let s = DerivedDensity::scaled(f.clone(), sigma).unwrap();
            let v = info_scale(&s, 1e-9).unwrap().value;
            assert_abs_diff_eq!(v, base, epsilon = 1e-8);
        }
    }

    #[test]
    fn log_transform_identity() {
        // I_s(f) equals I_l of the log-transformed density
        let cases = [
            DerivedDensity::baseline(BaselineModel::weibull(1.0).unwrap()),
            DerivedDensity::baseline(BaselineModel::weibull(2.0).unwrap()),
            DerivedDensity::length_biased(BaselineModel::weibull(2.0).unwrap()),
            DerivedDensity::current_duration(BaselineModel::log_logistic(3.0).unwrap()),
        ];
        for d in cases {
            let is = info_scale(&d, 1e-8).unwrap();
            let lt = DerivedDensity::log_transformed(d).unwrap();
            let il = info_location(&lt, 1e-8).unwrap();
            assert_abs_diff_eq!(is.value, il.value, epsilon = 2e-7);
        }
    }

    #[test]
    fn location_information_examples() {
        // exponential: I_l of Gumbel-type density equals I_s = 1
        let f = DerivedDensity::baseline(BaselineModel::weibull(1.0).unwrap());
        let lt = DerivedDensity::log_transformed(f).unwrap();
        assert_abs_diff_eq!(info_location(&lt, 1e-8).unwrap().value, 1.0, epsilon = 1e-7);

        // Weibull gamma=2: I_s = gamma^2 = 4
        let f = DerivedDensity::baseline(BaselineModel::weibull(2.0).unwrap());
        let lt = DerivedDensity::log_transformed(f).unwrap();
        assert_abs_diff_eq!(info_location(&lt, 1e-8).unwrap().value, 4.0, epsilon = 1e-7);
    }

    #[test]
    fn patience_inequality_reports() {
        let r = verify_patience_inequality(&BaselineModel::weibull(2.0).unwrap(), INFO_TOL).unwrap();
        assert!(r.holds && r.conclusive);
        assert_abs_diff_eq!(r.i1, 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.i2, 2.0, epsilon = 1e-6);

        let r = verify_patience_inequality(&BaselineModel::log_logistic(5.0).unwrap(), INFO_TOL).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.i1, 8.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.i2, 2.0, epsilon = 1e-6);

        let r = verify_patience_inequality(&BaselineModel::weibull(0.5).unwrap(), INFO_TOL).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.i1, 0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(r.i2, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn mixture_contraction_degenerate_is_equality() {
        let f = DerivedDensity::baseline(BaselineModel::weibull(1.0).unwrap());
        let r = verify_mixture_contraction(&f, &MixingLaw::Degenerate(3.0), INFO_TOL).unwrap();
        assert!(r.holds && r.degenerate);
        assert_abs_diff_eq!(r.i_f, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.i_h, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn mixture_contraction_unit_uniform_on_gamma2_is_theorem_one() {
        // Gamma(2,1) is the exponential's length-biased law; mixing it
        // over U(0,1] reproduces the exponential current-duration law.
        let f1 = DerivedDensity::length_biased(BaselineModel::weibull(1.0).unwrap());
        let r = verify_mixture_contraction(&f1, &MixingLaw::UnitUniform, INFO_TOL).unwrap();
        assert!(r.holds && !r.degenerate);
        assert_abs_diff_eq!(r.i_f, 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(r.i_h, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn mixture_info_shrinks_with_spread() {
        let f = DerivedDensity::baseline(BaselineModel::weibull(1.0).unwrap());
        let i_f = info_scale(&f, INFO_TOL).unwrap().value;
        let mut prev = i_f + 1e-6;
        for b in [1.001, 1.5, 2.0, 5.0] {
            let h = DerivedDensity::mixture(
                f.clone(),
                MixingLaw::TwoPoint {
                    u1: 1.0,
                    u2: b,
                    p: 0.5,
                },
            )
            .unwrap();
            let i_h = info_scale(&h, INFO_TOL).unwrap().value;
            assert!(i_h <= prev + 1e-6, "i_h {i_h} vs prev {prev} at b={b}");
            assert!(i_h <= i_f + 1e-6);
            prev = i_h;
        }
        // b -> 1 approaches i_f
        let h = DerivedDensity::mixture(
            f,
            MixingLaw::TwoPoint {
                u1: 1.0,
                u2: 1.001,
                p: 0.5,
            },
        )
        .unwrap();
        let i_h = info_scale(&h, INFO_TOL).unwrap().value;
        assert!((i_f - i_h).abs() < 1e-3);
    }
}
