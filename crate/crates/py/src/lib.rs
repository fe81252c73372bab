//! Python bindings: baseline densities, derived densities, information
//! bounds and the exact sampler, mirroring the CLI feature set.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use durinfo::covariate::{self, CovariateModel, SampledCovariateLaw};
use durinfo::density::{BaselineModel, DerivedDensity, MixingLaw};
use durinfo::empirical;
use durinfo::fisher::{self, Scheme};
use durinfo::sampler::{self, EpisodeRecord, SamplerConfig};

fn err(e: durinfo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    match s {
        "length_biased" => Ok(Scheme::LengthBiased),
        "current_duration" => Ok(Scheme::CurrentDuration),
        other => Err(PyValueError::new_err(format!(
            "scheme must be length_biased or current_duration, got {other}"
        ))),
    }
}

fn parse_law(kind: &str, params: Vec<f64>) -> PyResult<MixingLaw> {
    let law = match (kind, params.as_slice()) {
        ("degenerate", [u0]) => MixingLaw::Degenerate(*u0),
        ("two_point", [u1, u2, p]) => MixingLaw::TwoPoint {
            u1: *u1,
            u2: *u2,
            p: *p,
        },
        ("uniform", [a, b]) => MixingLaw::Uniform { a: *a, b: *b },
        ("unit_uniform", []) => MixingLaw::UnitUniform,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown mixing law {kind} with {} parameter(s)",
                params.len()
            )))
        }
    };
    law.validate().map_err(err)?;
    Ok(law)
}

/// Baseline duration density g0 on (0, inf).
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Baseline {
    inner: BaselineModel,
}

#[pymethods]
impl Baseline {
    #[staticmethod]
    fn weibull(gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: BaselineModel::weibull(gamma).map_err(err)?,
        })
    }

    #[staticmethod]
    fn log_logistic(gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: BaselineModel::log_logistic(gamma).map_err(err)?,
        })
    }

    /// Grid-specified density, [(x, pdf), ...], renormalized internally.
    #[staticmethod]
    fn from_grid(points: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: BaselineModel::from_grid(&points).map_err(err)?,
        })
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        self.inner.pdf(x).map_err(err)
    }

    fn survival(&self, x: f64) -> PyResult<f64> {
        self.inner.survival(x).map_err(err)
    }

    fn hazard(&self, x: f64) -> PyResult<f64> {
        self.inner.hazard(x).map_err(err)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        self.inner.quantile(p).map_err(err)
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }
}

/// A density derived from a baseline: itself, its length-biased or
/// current-duration version, scale mixtures, scalings, log transforms.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Density {
    inner: DerivedDensity,
}

#[pymethods]
impl Density {
    #[staticmethod]
    fn baseline(b: Baseline) -> Self {
        Self {
            inner: DerivedDensity::baseline(b.inner),
        }
    }

    #[staticmethod]
    fn length_biased(b: Baseline) -> Self {
        Self {
            inner: DerivedDensity::length_biased(b.inner),
        }
    }

    #[staticmethod]
    fn current_duration(b: Baseline) -> Self {
        Self {
            inner: DerivedDensity::current_duration(b.inner),
        }
    }

    #[staticmethod]
    fn scaled(base: Density, sigma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: DerivedDensity::scaled(base.inner, sigma).map_err(err)?,
        })
    }

    /// Scale mixture over a mixing law: kind in
    /// {"degenerate", "two_point", "uniform", "unit_uniform"}.
    #[staticmethod]
    fn mixture(base: Density, kind: &str, params: Vec<f64>) -> PyResult<Self> {
        let law = parse_law(kind, params)?;
        Ok(Self {
            inner: DerivedDensity::mixture(base.inner, law).map_err(err)?,
        })
    }

    #[staticmethod]
    fn log_transformed(base: Density) -> PyResult<Self> {
        Ok(Self {
            inner: DerivedDensity::log_transformed(base.inner).map_err(err)?,
        })
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        self.inner.pdf(x).map_err(err)
    }

    fn pdf_derivative(&self, x: f64) -> PyResult<f64> {
        self.inner.pdf_derivative(x).map_err(err)
    }

    fn survival(&self, x: f64) -> PyResult<f64> {
        self.inner.survival(x).map_err(err)
    }

    fn scale_score(&self, x: f64) -> PyResult<f64> {
        self.inner.scale_score(x).map_err(err)
    }

    /// Fisher information for scale: (value, error_estimate, finite).
    #[pyo3(signature = (tol = 1e-7))]
    fn info_scale(&self, tol: f64) -> PyResult<(f64, f64, bool)> {
        let r = fisher::info_scale(&self.inner, tol).map_err(err)?;
        Ok((r.value, r.error_estimate, r.finite))
    }

    /// Fisher information for location (real-line densities).
    #[pyo3(signature = (tol = 1e-7))]
    fn info_location(&self, tol: f64) -> PyResult<(f64, f64, bool)> {
        let r = fisher::info_location(&self.inner, tol).map_err(err)?;
        Ok((r.value, r.error_estimate, r.finite))
    }
}

/// Checks I_s(f2) < I_s(f1): returns (i1, i2, margin, holds).
#[pyfunction]
#[pyo3(signature = (baseline, tol = 1e-7))]
fn verify_patience_inequality(baseline: Baseline, tol: f64) -> PyResult<(f64, f64, f64, bool)> {
    let r = fisher::verify_patience_inequality(&baseline.inner, tol).map_err(err)?;
    Ok((r.i1, r.i2, r.margin, r.holds && r.conclusive))
}

/// Checks I_s(h) <= I_s(f) for the scale mixture of f over the law:
/// returns (i_f, i_h, holds, degenerate).
#[pyfunction]
#[pyo3(signature = (f, kind, params, tol = 1e-7))]
fn verify_mixture_contraction(
    f: Density,
    kind: &str,
    params: Vec<f64>,
    tol: f64,
) -> PyResult<(f64, f64, bool, bool)> {
    let law = parse_law(kind, params)?;
    let r = fisher::verify_mixture_contraction(&f.inner, &law, tol).map_err(err)?;
    Ok((r.i_f, r.i_h, r.holds && r.conclusive, r.degenerate))
}

fn discrete_law(
    support: Vec<Vec<f64>>,
    probs: Vec<f64>,
    theta: Vec<f64>,
) -> PyResult<SampledCovariateLaw> {
    let base = CovariateModel::discrete(support, probs).map_err(err)?;
    SampledCovariateLaw::new(base, theta).map_err(err)
}

/// Information bound for theta with a discrete covariate law:
/// returns (matrix, scalar_info, sigma_z).
#[pyfunction]
#[pyo3(signature = (baseline, support, probs, theta, scheme, h_known = false, tol = 1e-7))]
#[allow(clippy::too_many_arguments)]
fn info_bound(
    baseline: Baseline,
    support: Vec<Vec<f64>>,
    probs: Vec<f64>,
    theta: Vec<f64>,
    scheme: &str,
    h_known: bool,
    tol: f64,
) -> PyResult<(Vec<Vec<f64>>, f64, Vec<Vec<f64>>)> {
    let law = discrete_law(support, probs, theta)?;
    let r = covariate::info_bound(&baseline.inner, &law, parse_scheme(scheme)?, h_known, tol)
        .map_err(err)?;
    Ok((r.matrix, r.scalar_info, r.sigma_z))
}

/// I_s(f2) / I_s(f1), the price of sampling only elapsed durations.
#[pyfunction]
#[pyo3(signature = (baseline, tol = 1e-7))]
fn relative_efficiency(baseline: Baseline, tol: f64) -> PyResult<f64> {
    covariate::relative_efficiency(&baseline.inner, tol).map_err(err)
}

type RecordTuple = (f64, f64, Vec<f64>, f64, f64);

fn to_tuple(r: &EpisodeRecord) -> RecordTuple {
    (r.x, r.d, r.z.clone(), r.onset, r.fraction)
}

fn from_tuple(t: &RecordTuple) -> EpisodeRecord {
    EpisodeRecord {
        x: t.0,
        d: t.1,
        z: t.2.clone(),
        onset: t.3,
        fraction: t.4,
    }
}

/// Exact draws from the cross-sectional model; records are
/// (x, d, z, onset, fraction) tuples.
#[pyfunction]
#[pyo3(signature = (baseline, n, seed, support = None, probs = None, theta = None))]
fn sample_exact(
    baseline: Baseline,
    n: usize,
    seed: u64,
    support: Option<Vec<Vec<f64>>>,
    probs: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
) -> PyResult<Vec<RecordTuple>> {
    let covariates = match (support, probs) {
        (Some(s), Some(p)) => {
            let k = s.first().map(|w| w.len()).unwrap_or(0);
            Some(discrete_law(s, p, theta.unwrap_or_else(|| vec![0.0; k]))?)
        }
        (None, None) => None,
        _ => {
            return Err(PyValueError::new_err(
                "support and probs must be given together",
            ))
        }
    };
    let cfg = SamplerConfig {
        baseline: baseline.inner,
        covariates,
        seed,
    };
    let records = sampler::sample_exact(&cfg, n).map_err(err)?;
    Ok(records.iter().map(to_tuple).collect())
}

/// Empirical score covariance with jackknife standard errors:
/// returns (matrix_estimate, standard_errors, excluded).
#[pyfunction]
fn empirical_information(
    records: Vec<RecordTuple>,
    theta: Vec<f64>,
    baseline: Baseline,
    scheme: &str,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>, usize)> {
    let recs: Vec<EpisodeRecord> = records.iter().map(from_tuple).collect();
    let r = empirical::empirical_information(
        &recs,
        &theta,
        &baseline.inner,
        parse_scheme(scheme)?,
        None,
    )
    .map_err(err)?;
    Ok((r.matrix_estimate, r.standard_errors, r.excluded))
}

/// One-sample Kolmogorov-Smirnov test: returns (statistic, p_bound).
#[pyfunction]
fn ks_uniform_fraction(records: Vec<RecordTuple>) -> PyResult<(f64, f64)> {
    let fr: Vec<f64> = records.iter().map(|r| r.4).collect();
    let r = empirical::ks_distance(&fr, |u| u.clamp(0.0, 1.0)).map_err(err)?;
    Ok((r.statistic, r.p_bound))
}

#[pymodule]
fn durinfo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Baseline>()?;
    m.add_class::<Density>()?;
    m.add_function(wrap_pyfunction!(verify_patience_inequality, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mixture_contraction, m)?)?;
    m.add_function(wrap_pyfunction!(info_bound, m)?)?;
    m.add_function(wrap_pyfunction!(relative_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(sample_exact, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_information, m)?)?;
    m.add_function(wrap_pyfunction!(ks_uniform_fraction, m)?)?;
    Ok(())
}
