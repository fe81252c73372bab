//! Cross-sectional sampling of disease episodes: random left truncation
//! with a uniform onset window, a stationary Poisson onset process, and
//! exact inverse-transform sampling via the multiplicative-censoring
//! representation X = U * D.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::covariate::{CovariateModel, SampledCovariateLaw};
use crate::density::{BaselineModel, DerivedDensity};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::{CounterRng, RecordStream};

/// One sampled disease episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// elapsed duration at the sampling time
    pub x: f64,
    /// full duration
    pub d: f64,
    /// covariate (empty when the model has none)
    pub z: Vec<f64>,
    /// onset time, sampling happens at time 0
    pub onset: f64,
    /// x / d, uniform on (0, 1] under the model
    pub fraction: f64,
}

/// Shared ingredients for all three sampling modes.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub baseline: BaselineModel,
    pub covariates: Option<SampledCovariateLaw>,
    pub seed: u64,
}

/// Window guard: onset windows default to this multiple of the 0.999
/// quantile of the tilted duration law, keeping truncation bias at the
/// level of P(T > window).
pub const WINDOW_QUANTILE_FACTOR: f64 = 50.0;

const MIN_ACCEPTANCE: f64 = 1e-9;
const ACCEPTANCE_CHECK_EVERY: u64 = 10_000_000;

#[derive(Debug)]
pub struct DirectSample {
    pub records: Vec<EpisodeRecord>,
    pub acceptance_rate: f64,
    pub attempts: u64,
    pub tau: f64,
    /// set when a user-supplied tau undercuts the quantile guard
    pub tau_warning: bool,
}

#[derive(Debug)]
pub struct PointProcessSample {
    pub records: Vec<EpisodeRecord>,
    /// number of onset candidates drawn (Poisson with mean lambda * window)
    pub candidates: u64,
    pub window: f64,
    pub window_warning: bool,
}

impl SamplerConfig {
    pub fn dim(&self) -> usize {
        self.covariates.as_ref().map(|c| c.dim()).unwrap_or(0)
    }

    /// Upper estimate of the 0.999 quantile of T = e^{-theta'W} V.
    pub fn duration_quantile_guard(&self) -> Result<f64> {
        let v_q = self.baseline.quantile(0.999)?;
        let scale_hi = match &self.covariates {
            None => 1.0,
            Some(law) => match law.base() {
                CovariateModel::Discrete { support, .. } => support
                    .iter()
                    .map(|z| (-dot(law.theta(), z)).exp())
                    .fold(0.0f64, f64::max),
                CovariateModel::GaussianDiagonal { mean, variances } => {
                    let m: f64 = law
                        .theta()
                        .iter()
                        .zip(mean)
                        .map(|(t, mu)| -t * mu)
                        .sum();
                    let var: f64 = law
                        .theta()
                        .iter()
                        .zip(variances)
                        .map(|(t, v)| t * t * v)
                        .sum();
                    (m + 3.29 * var.sqrt()).exp()
                }
                CovariateModel::GridContinuous { interp } => {
                    let t = law.theta()[0];
                    (-t * interp.x_min()).exp().max((-t * interp.x_max()).exp())
                }
            },
        };
        Ok(v_q * scale_hi)
    }

    fn default_window(&self) -> Result<f64> {
        Ok(WINDOW_QUANTILE_FACTOR * self.duration_quantile_guard()?)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draw W from the untilted covariate law h.
fn draw_base_covariate(law: &SampledCovariateLaw, stream: &mut RecordStream) -> Result<Vec<f64>> {
    match law.base() {
        CovariateModel::Discrete { support, probs } => {
            let u = stream.uniform();
            Ok(support[categorical(probs, u)].clone())
        }
        CovariateModel::GaussianDiagonal { mean, variances } => mean
            .iter()
            .zip(variances)
            .map(|(m, v)| {
                let n = Normal::new(*m, v.sqrt())
                    .map_err(|e| Error::Numerical(format!("normal draw: {e}")))?;
                Ok(n.sample(stream))
            })
            .collect(),
        CovariateModel::GridContinuous { interp } => {
            let u = stream.uniform() * interp.total_mass();
            Ok(vec![invert_monotone(
                |x| interp.integral_to(x),
                u,
                interp.x_min(),
                interp.x_max(),
            )])
        }
    }
}

fn categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn invert_monotone<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draw Z from the tilted sampled-covariate law f_Z.
fn draw_tilted_covariate(law: &SampledCovariateLaw, stream: &mut RecordStream) -> Result<Vec<f64>> {
    match law.base() {
        CovariateModel::Discrete { .. } => {
            let (support, q) = law.tilted_probs().unwrap();
            let u = stream.uniform();
            Ok(support[categorical(&q, u)].clone())
        }
        CovariateModel::GaussianDiagonal { mean, variances } => mean
            .iter()
            .zip(variances)
            .zip(law.theta())
            .map(|((m, v), t)| {
                let n = Normal::new(m - v * t, v.sqrt())
                    .map_err(|e| Error::Numerical(format!("normal draw: {e}")))?;
                Ok(n.sample(stream))
            })
            .collect(),
        CovariateModel::GridContinuous { interp } => {
            let t = law.theta()[0];
            let mass = interp.total_mass();
            let g = interp.clone();
            // tilted CDF by quadrature, inverted by bisection
            let norm = law.normalizer();
            let lo = interp.x_min();
            let cdf = move |x: f64| {
                quadrature::integrate_finite(
                    |z| (-t * z).exp() * g.eval(z) / mass,
                    lo,
                    x,
                    1e-10,
                )
                .map(|r| r.value / norm)
                .unwrap_or(f64::NAN)
            };
            let u = stream.uniform();
            Ok(vec![invert_monotone(cdf, u, lo, interp.x_max())])
        }
    }
}

/// Draw V ~ g0, redrawing the measure-zero (via floating point) event V = 0.
fn draw_baseline_duration(m: &BaselineModel, stream: &mut RecordStream) -> Result<f64> {
    loop {
        let v = m.quantile(stream.uniform())?;
        if v > 0.0 {
            return Ok(v);
        }
    }
}

/// Random left truncation: onset uniform on [-tau, 0], episode kept iff
/// it is still running at time 0.
pub fn sample_direct(cfg: &SamplerConfig, n: usize, tau: Option<f64>) -> Result<DirectSample> {
    let guard = cfg.default_window()?;
    let tau_warning = matches!(tau, Some(t) if t < guard);
    let tau = tau.unwrap_or(guard);
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }

    let rng = CounterRng::new(cfg.seed);
    let mut records = Vec::with_capacity(n);
    let mut attempts: u64 = 0;
    while records.len() < n {
        let mut stream = rng.stream(attempts);
        attempts += 1;

        let z = match &cfg.covariates {
            Some(law) => draw_base_covariate(law, &mut stream)?,
            None => Vec::new(),
        };
        let v = draw_baseline_duration(&cfg.baseline, &mut stream)?;
        let t_dur = (-dot(cfg.covariates.as_ref().map(|l| l.theta()).unwrap_or(&[]), &z)).exp() * v;
        let minus_l = tau * stream.uniform();
        if t_dur >= minus_l {
            records.push(EpisodeRecord {
                x: minus_l,
                d: t_dur,
                z,
                onset: -minus_l,
                fraction: minus_l / t_dur,
            });
        }

        if attempts % ACCEPTANCE_CHECK_EVERY == 0 {
            let rate = records.len() as f64 / attempts as f64;
            if rate < MIN_ACCEPTANCE {
                return Err(Error::Numerical(format!(
                    "direct sampling acceptance rate {rate:e} after {attempts} attempts; \
                     check theta and the covariate law"
                )));
            }
        }
    }
    Ok(DirectSample {
        acceptance_rate: records.len() as f64 / attempts as f64,
        records,
        attempts,
        tau,
        tau_warning,
    })
}

/// Stationary Poisson onsets with intensity lambda on [-window, 0];
/// the number of sampled episodes is itself random.
pub fn sample_point_process(
    cfg: &SamplerConfig,
    lambda: f64,
    window: Option<f64>,
) -> Result<PointProcessSample> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("intensity must be positive, got {lambda}")));
    }
    let guard = cfg.default_window()?;
    let window_warning = matches!(window, Some(w) if w > 0.0 && w < guard);
    let window = window.unwrap_or(guard);
    if window < 0.0 {
        return Err(Error::Domain(format!("window must be nonnegative, got {window}")));
    }

    let rng = CounterRng::new(cfg.seed);
    if window == 0.0 {
        return Ok(PointProcessSample {
            records: Vec::new(),
            candidates: 0,
            window,
            window_warning,
        });
    }

    // stream u64::MAX is reserved for the candidate count
    let mut count_stream = rng.stream(u64::MAX);
    let pois = Poisson::new(lambda * window)
        .map_err(|e| Error::Numerical(format!("poisson draw: {e}")))?;
    let candidates = pois.sample(&mut count_stream) as u64;

    let mut records = Vec::new();
    for i in 0..candidates {
        let mut stream = rng.stream(i);
        let onset = -window * stream.uniform();
        let z = match &cfg.covariates {
            Some(law) => draw_base_covariate(law, &mut stream)?,
            None => Vec::new(),
        };
        let v = draw_baseline_duration(&cfg.baseline, &mut stream)?;
        let t_dur = (-dot(cfg.covariates.as_ref().map(|l| l.theta()).unwrap_or(&[]), &z)).exp() * v;
        if t_dur >= -onset {
            records.push(EpisodeRecord {
                x: -onset,
                d: t_dur,
                z,
                onset,
                fraction: -onset / t_dur,
            });
        }
    }
    Ok(PointProcessSample {
        records,
        candidates,
        window,
        window_warning,
    })
}

/// Quantile function of the length-biased duration law f1, by inversion
/// of its quadrature CDF. The exponential baseline gets the exact
/// Gamma(2,1) path.
#[derive(Debug)]
pub enum LengthBiasedSampler {
    /// f1 is Gamma(2,1): sum of two unit exponentials
    Gamma2,
    Table {
        f1: DerivedDensity,
        xs: Vec<f64>,
        cdf: Vec<f64>,
    },
}

const TABLE_SIZE: usize = 1200;

impl LengthBiasedSampler {
    pub fn new(m: &BaselineModel) -> Result<Self> {
        if m.is_unit_exponential() {
            return Ok(LengthBiasedSampler::Gamma2);
        }
        let f1 = DerivedDensity::length_biased(m.clone());

        let mut lo = m.quantile(1e-9)?.max(1e-12);
        if lo <= 0.0 {
            lo = 1e-12;
        }
        let mut hi = m.quantile(0.999)?;
        for _ in 0..60 {
            if f1.survival(hi)? < 1e-13 {
                break;
            }
            hi *= 2.0;
        }

        let log_lo = lo.ln();
        let log_hi = hi.ln();
        let mut xs = Vec::with_capacity(TABLE_SIZE);
        for i in 0..TABLE_SIZE {
            let t = i as f64 / (TABLE_SIZE - 1) as f64;
            xs.push((log_lo + t * (log_hi - log_lo)).exp());
        }
        let mut cdf = vec![0.0f64; TABLE_SIZE];
        for i in 1..TABLE_SIZE {
            let f = f1.clone();
            let seg = quadrature::integrate_finite(
                move |y| f.pdf(y).unwrap_or(0.0),
                xs[i - 1],
                xs[i],
                1e-13,
            )?;
            cdf[i] = cdf[i - 1] + seg.value;
        }
        let total = cdf[TABLE_SIZE - 1];
        if !(total > 0.9999) {
            return Err(Error::Numerical(format!(
                "length-biased CDF table covers only mass {total}"
            )));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(LengthBiasedSampler::Table { f1, xs, cdf })
    }

    pub fn draw(&self, stream: &mut RecordStream) -> Result<f64> {
        match self {
            LengthBiasedSampler::Gamma2 => {
                Ok(-(stream.uniform().ln()) - (stream.uniform().ln()))
            }
            LengthBiasedSampler::Table { f1, xs, cdf } => {
                let u = stream.uniform();
                self.invert(f1, xs, cdf, u)
            }
        }
    }

    fn invert(&self, f1: &DerivedDensity, xs: &[f64], cdf: &[f64], u: f64) -> Result<f64> {
        let i = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, cdf.len() - 1),
        };
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let mut x = if c1 > c0 {
            x0 + (u - c0) / (c1 - c0) * (x1 - x0)
        } else {
            0.5 * (x0 + x1)
        };

        // Newton refinement on F(x) = cdf[i-1] + int_{x0}^{x} f1
        for _ in 0..3 {
            let f = f1.clone();
            let partial =
                quadrature::integrate_finite(move |y| f.pdf(y).unwrap_or(0.0), x0, x, 1e-13)?;
            let fx = c0 + partial.value;
            let dens = f1.pdf(x).unwrap_or(0.0);
            if dens <= 0.0 {
                break;
            }
            let step = (fx - u) / dens;
            let next = x - step;
            x = next.clamp(x0, x1);
            if step.abs() < 1e-12 * x.max(1.0) {
                break;
            }
        }
        if !(x > 0.0) {
            return Err(Error::Numerical(format!(
                "length-biased quantile inversion failed at level {u}"
            )));
        }
        Ok(x)
    }
}

/// Exact sampling: Z ~ f_Z, V* ~ f1, D = e^{-theta'Z} V*, X = U D.
/// No rejection, no truncation bias.
pub fn sample_exact(cfg: &SamplerConfig, n: usize) -> Result<Vec<EpisodeRecord>> {
    let sampler = LengthBiasedSampler::new(&cfg.baseline)?;
    let rng = CounterRng::new(cfg.seed);
    let mut records = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let mut stream = rng.stream(i);
        let z = match &cfg.covariates {
            Some(law) => draw_tilted_covariate(law, &mut stream)?,
            None => Vec::new(),
        };
        let v_star = sampler.draw(&mut stream)?;
        let d = (-dot(cfg.covariates.as_ref().map(|l| l.theta()).unwrap_or(&[]), &z)).exp() * v_star;
        let u = stream.uniform();
        let x = u * d;
        records.push(EpisodeRecord {
            x,
            d,
            z,
            onset: -x,
            fraction: u,
        });
    }
    Ok(records)
}

/// CSV with header `x,d,z_1..z_k,onset,fraction`.
pub fn write_records_csv<W: Write>(records: &[EpisodeRecord], out: &mut W) -> Result<()> {
    let k = records.first().map(|r| r.z.len()).unwrap_or(0);
    let mut header = String::from("x,d");
    for j in 1..=k {
        header.push_str(&format!(",z_{j}"));
    }
    header.push_str(",onset,fraction");
    writeln!(out, "{header}")?;
    for r in records {
        let mut line = format!("{:.17e},{:.17e}", r.x, r.d);
        for zj in &r.z {
            line.push_str(&format!(",{zj:.17e}"));
        }
        line.push_str(&format!(",{:.17e},{:.17e}", r.onset, r.fraction));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_records_jsonl<W: Write>(records: &[EpisodeRecord], out: &mut W) -> Result<()> {
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty record file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 4 || cols[0] != "x" || cols[1] != "d" {
        return Err(Error::Config(format!("unexpected record header: {header}")));
    }
    let k = cols.len() - 4;
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: std::result::Result<Vec<f64>, _> =
            line.trim().split(',').map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| {
            Error::Config(format!("record line {}: {e}", lineno + 2))
        })?;
        if vals.len() != k + 4 {
            return Err(Error::Config(format!(
                "record line {} has {} fields, expected {}",
                lineno + 2,
                vals.len(),
                k + 4
            )));
        }
        records.push(EpisodeRecord {
            x: vals[0],
            d: vals[1],
            z: vals[2..2 + k].to_vec(),
            onset: vals[2 + k],
            fraction: vals[3 + k],
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_config(seed: u64) -> SamplerConfig {
        SamplerConfig {
            baseline: BaselineModel::weibull(1.0).unwrap(),
            covariates: None,
            seed,
        }
    }

    #[test]
    fn records_satisfy_structural_invariants() {
        let recs = sample_exact(&exp_config(1), 2000).unwrap();
        for r in &recs {
            assert!(r.x > 0.0 && r.x <= r.d);
            assert!(r.fraction > 0.0 && r.fraction <= 1.0);
            assert_eq!(r.onset, -r.x);
        }
    }

    #[test]
    fn exact_sampling_is_deterministic() {
        let a = sample_exact(&exp_config(9), 500).unwrap();
        let b = sample_exact(&exp_config(9), 500).unwrap();
        assert_eq!(a, b);
        let c = sample_exact(&exp_config(10), 500).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn direct_sampling_mean_of_d_is_length_biased() {
        // exponential: E D = E V^2 / mu = 2
        let s = sample_direct(&exp_config(3), 20_000, None).unwrap();
        let mean_d: f64 = s.records.iter().map(|r| r.d).sum::<f64>() / s.records.len() as f64;
        let se = (s.records.iter().map(|r| (r.d - mean_d).powi(2)).sum::<f64>()
            / (s.records.len() as f64 - 1.0)
            / s.records.len() as f64)
            .sqrt();
        assert!((mean_d - 2.0).abs() < 3.0 * se, "mean D {mean_d}, se {se}");
        let mean_x: f64 = s.records.iter().map(|r| r.x).sum::<f64>() / s.records.len() as f64;
        assert!((mean_x - 1.0).abs() < 0.05, "mean X {mean_x}");
        assert!(!s.tau_warning);
    }

    #[test]
    fn user_tau_below_guard_warns() {
        let s = sample_direct(&exp_config(3), 500, Some(5.0)).unwrap();
        assert!(s.tau_warning);
    }

    #[test]
    fn point_process_count_matches_lambda_mu() {
        // replicate-mean test over seeds: E N = lambda * mu = 100 * Gamma(1.5)
        let cfg = SamplerConfig {
            baseline: BaselineModel::weibull(2.0).unwrap(),
            covariates: None,
            seed: 0,
        };
        let expected = 100.0 * statrs::function::gamma::gamma(1.5);
        let mut total = 0usize;
        let reps = 40;
        for seed in 0..reps {
            let s = sample_point_process(
                &SamplerConfig { seed, ..cfg.clone() },
                100.0,
                None,
            )
            .unwrap();
            total += s.records.len();
        }
        let mean_n = total as f64 / reps as f64;
        let se = (expected / reps as f64).sqrt();
        assert!(
            (mean_n - expected).abs() < 4.0 * se,
            "mean N {mean_n}, expected {expected}"
        );
    }

    #[test]
    fn zero_window_yields_no_records() {
        let s = sample_point_process(&exp_config(1), 1.0, Some(0.0)).unwrap();
        assert!(s.records.is_empty());
    }

    #[test]
    fn tilted_covariate_frequencies() {
        // Bernoulli(1/2) tilted at theta = log 2: P(Z=1) = 1/3
        let base =
            CovariateModel::discrete(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let law = SampledCovariateLaw::new(base, vec![2.0f64.ln()]).unwrap();
        let cfg = SamplerConfig {
            baseline: BaselineModel::weibull(2.0).unwrap(),
            covariates: Some(law),
            seed: 11,
        };
        let recs = sample_exact(&cfg, 50_000).unwrap();
        let p1 = recs.iter().filter(|r| r.z[0] == 1.0).count() as f64 / recs.len() as f64;
        let se = (2.0f64 / 9.0 / recs.len() as f64).sqrt();
        assert!((p1 - 1.0 / 3.0).abs() < 3.0 * se, "P(Z=1) = {p1}");
    }

    #[test]
    fn direct_theta_zero_keeps_base_frequencies() {
        let base =
            CovariateModel::discrete(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let law = SampledCovariateLaw::new(base, vec![0.0]).unwrap();
        let cfg = SamplerConfig {
            baseline: BaselineModel::weibull(2.0).unwrap(),
            covariates: Some(law),
            seed: 4,
        };
        let s = sample_direct(&cfg, 20_000, None).unwrap();
        let p1 = s.records.iter().filter(|r| r.z[0] == 1.0).count() as f64
            / s.records.len() as f64;
        let se = (0.25f64 / s.records.len() as f64).sqrt();
        assert!((p1 - 0.5).abs() < 3.0 * se, "P(Z=1) = {p1}");
    }

    #[test]
    fn length_biased_table_sampler_matches_cdf() {
        // Weibull gamma=2: f1 has CDF F1(x) = int_0^x 2 y^2 e^{-y^2} / Gamma(1.5)
        let m = BaselineModel::weibull(2.0).unwrap();
        let s = LengthBiasedSampler::new(&m).unwrap();
        let f1 = DerivedDensity::length_biased(m);
        let rng = CounterRng::new(5);
        let n = 20_000;
        let mut draws: Vec<f64> = (0..n)
            .map(|i| s.draw(&mut rng.stream(i)).unwrap())
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // KS against the quadrature CDF, accumulated along the sorted draws
        let mut dmax: f64 = 0.0;
        let mut cdf = 0.0;
        let mut prev = 1e-12;
        for (i, x) in draws.iter().enumerate() {
            let f = f1.clone();
            cdf += quadrature::integrate_finite(move |y| f.pdf(y).unwrap_or(0.0), prev, *x, 1e-12)
                .unwrap()
                .value;
            prev = *x;
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            dmax = dmax.max((cdf - lo).abs()).max((cdf - hi).abs());
        }
        assert!(dmax < 1.63 / (n as f64).sqrt(), "KS distance {dmax}");
    }

    #[test]
    fn csv_round_trip() {
        let recs = sample_exact(
            &SamplerConfig {
                baseline: BaselineModel::weibull(2.0).unwrap(),
                covariates: Some(
                    SampledCovariateLaw::new(
                        CovariateModel::discrete(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5])
                            .unwrap(),
                        vec![0.3],
                    )
                    .unwrap(),
                ),
                seed: 2,
            },
            200,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_records_csv(&recs, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("recs.csv");
        std::fs::write(&path, &buf).unwrap();
        let back = read_records_csv(&path).unwrap();
        assert_eq!(recs, back);
    }
}
