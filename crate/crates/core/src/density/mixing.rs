use crate::error::{Error, Result};
use crate::quadrature;

/// Mixing distribution G on (0, infinity) for scale mixtures
/// h(x) = int (1/u) f(x/u) dG(u).
#[derive(Debug, Clone, PartialEq)]
pub enum MixingLaw {
    /// all mass at u0
    Degenerate(f64),
    /// mass p at u1, 1-p at u2
    TwoPoint { u1: f64, u2: f64, p: f64 },
    /// uniform on (a, b), 0 < a < b
    Uniform { a: f64, b: f64 },
    /// uniform on (0, 1]
    UnitUniform,
}

impl MixingLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MixingLaw::Degenerate(u0) => u0 > 0.0 && u0.is_finite(),
            MixingLaw::TwoPoint { u1, u2, p } => {
                u1 > 0.0 && u2 > 0.0 && u1.is_finite() && u2.is_finite() && (0.0..=1.0).contains(&p)
            }
            MixingLaw::Uniform { a, b } => a > 0.0 && a < b && b.is_finite(),
            MixingLaw::UnitUniform => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid mixing law {self:?}")))
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            MixingLaw::Degenerate(_) => true,
            MixingLaw::TwoPoint { u1, u2, p } => u1 == u2 || p == 0.0 || p == 1.0,
            _ => false,
        }
    }

    /// E_G[phi(U)], exact for the discrete laws and by quadrature for
    /// the continuous ones.
    pub fn expect<F: Fn(f64) -> f64>(&self, phi: F, tol: f64) -> Result<f64> {
        match *self {
            MixingLaw::Degenerate(u0) => Ok(phi(u0)),
            MixingLaw::TwoPoint { u1, u2, p } => Ok(p * phi(u1) + (1.0 - p) * phi(u2)),
            MixingLaw::Uniform { a, b } => {
                let r = quadrature::integrate_finite(&phi, a, b, tol * (b - a))?;
                Ok(r.value / (b - a))
            }
            MixingLaw::UnitUniform => {
                let r = quadrature::integrate_finite(&phi, 0.0, 1.0, tol)?;
                Ok(r.value)
            }
        }
    }

    /// Inverse-CDF draw from G at uniform level `v`.
    pub fn quantile(&self, v: f64) -> f64 {
        match *self {
            MixingLaw::Degenerate(u0) => u0,
            MixingLaw::TwoPoint { u1, u2, p } => {
                if v < p {
                    u1
                } else {
                    u2
                }
            }
            MixingLaw::Uniform { a, b } => a + v * (b - a),
            MixingLaw::UnitUniform => v.max(f64::MIN_POSITIVE),
        }
    }
}
