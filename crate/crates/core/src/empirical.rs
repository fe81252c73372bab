//! Monte Carlo estimation of the information bounds from simulated
//! records, plus the Kolmogorov-Smirnov and chi-square machinery the
//! sampler checks rely on.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::covariate::InfoBoundReport;
use crate::density::BaselineModel;
use crate::error::{Error, Result};
use crate::fisher::Scheme;
use crate::sampler::EpisodeRecord;

/// Fixed pairwise-summation tree: the result does not depend on how the
/// work might be chunked, so runs are bit-reproducible.
pub fn pairwise_sum<F: Fn(usize) -> f64 + Copy>(n: usize, term: F) -> f64 {
    fn go<F: Fn(usize) -> f64 + Copy>(lo: usize, hi: usize, term: F) -> f64 {
        if hi - lo <= 8 {
            let mut s = 0.0;
            for i in lo..hi {
                s += term(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, n, term)
}

/// The efficient-score contribution of one record: centered covariate
/// times the duration scale score at v = e^{theta'z} * (d or x).
pub fn efficient_score(
    rec: &EpisodeRecord,
    theta: &[f64],
    m: &BaselineModel,
    mean_z: &[f64],
    scheme: Scheme,
) -> Result<Vec<f64>> {
    let tz: f64 = theta.iter().zip(&rec.z).map(|(t, z)| t * z).sum();
    let scale = tz.exp();
    let s = match scheme {
        Scheme::LengthBiased => {
            let v = scale * rec.d;
            let g = m.pdf(v)?;
            if g <= 0.0 {
                return Err(Error::Numerical(format!("baseline density is 0 at v = {v:e}")));
            }
            2.0 + v * m.pdf_derivative(v)? / g
        }
        Scheme::CurrentDuration => {
            let v = scale * rec.x;
            let surv = m.survival(v)?;
            if surv <= 0.0 {
                return Err(Error::Numerical(format!("baseline survival is 0 at v = {v:e}")));
            }
            1.0 - v * m.pdf(v)? / surv
        }
    };
    Ok(rec
        .z
        .iter()
        .zip(mean_z)
        .map(|(z, mz)| (z - mz) * s)
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalInfoReport {
    pub matrix_estimate: Vec<Vec<f64>>,
    /// jackknife standard errors, elementwise
    pub standard_errors: Vec<Vec<f64>>,
    pub n: usize,
    pub excluded: usize,
    pub scheme: Scheme,
    /// the analytic bound this estimates, when available
    pub target: Option<InfoBoundReport>,
}

const JACKKNIFE_GROUPS: usize = 100;
const MAX_EXCLUSION_FRACTION: f64 = 1e-4;

/// Sample covariance of the efficient score over records, with
/// delete-one-group jackknife standard errors.
pub fn empirical_information(
    records: &[EpisodeRecord],
    theta: &[f64],
    m: &BaselineModel,
    scheme: Scheme,
    target: Option<InfoBoundReport>,
) -> Result<EmpiricalInfoReport> {
    if records.len() < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 records for meaningful standard errors, got {}",
            records.len()
        )));
    }
    let k = records[0].z.len();
    if k == 0 {
        return Err(Error::Domain("records carry no covariates".into()));
    }
    if theta.len() != k {
        return Err(Error::Domain("theta dimension does not match records".into()));
    }

    // in-sample covariate mean (the analytic one stays available in target)
    let n_total = records.len();
    let mean_z: Vec<f64> = (0..k)
        .map(|j| pairwise_sum(n_total, |i| records[i].z[j]) / n_total as f64)
        .collect();

    let mut scores: Vec<Vec<f64>> = Vec::with_capacity(n_total);
    let mut excluded = 0usize;
    for rec in records {
        match efficient_score(rec, theta, m, &mean_z, scheme) {
            Ok(s) => scores.push(s),
            Err(_) => excluded += 1,
        }
    }
    if (excluded as f64) > MAX_EXCLUSION_FRACTION * n_total as f64 {
        return Err(Error::Numerical(format!(
            "{excluded} of {n_total} records excluded; systematic score failure"
        )));
    }
    let n = scores.len();

    let cov_from = |lo: usize, hi: usize, skip_lo: usize, skip_hi: usize| -> Vec<Vec<f64>> {
        // covariance over scores[lo..hi] minus scores[skip_lo..skip_hi]
        let count = (hi - lo) - (skip_hi - skip_lo);
        let idx = |i: usize| if i < skip_lo { i } else { i + (skip_hi - skip_lo) };
        let mean: Vec<f64> = (0..k)
            .map(|j| pairwise_sum(count, |i| scores[idx(i)][j]) / count as f64)
            .collect();
        let mut cov = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in 0..k {
                let s = pairwise_sum(count, |i| {
                    (scores[idx(i)][a] - mean[a]) * (scores[idx(i)][b] - mean[b])
                });
                cov[a][b] = s / (count as f64 - 1.0);
            }
        }
        cov
    };

    let estimate = cov_from(0, n, 0, 0);

    // delete-one-group jackknife over contiguous blocks
    let groups = JACKKNIFE_GROUPS.min(n / 2);
    let mut group_estimates: Vec<Vec<Vec<f64>>> = Vec::with_capacity(groups);
    for g in 0..groups {
        let lo = g * n / groups;
        let hi = (g + 1) * n / groups;
        group_estimates.push(cov_from(0, n, lo, hi));
    }
    let mut standard_errors = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            let mean_g =
                pairwise_sum(groups, |g| group_estimates[g][a][b]) / groups as f64;
            let var = pairwise_sum(groups, |g| {
                let d = group_estimates[g][a][b] - mean_g;
                d * d
            }) * (groups as f64 - 1.0)
                / groups as f64;
            standard_errors[a][b] = var.sqrt();
        }
    }

    Ok(EmpiricalInfoReport {
        matrix_estimate: estimate,
        standard_errors,
        n,
        excluded,
        scheme,
        target,
    })
}

/// Covariance of the covariate-only score -(z - mean z), i.e. an
/// empirical estimate of Sigma_Z, with jackknife standard errors.
pub fn empirical_sigma_z(records: &[EpisodeRecord]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if records.len() < 100 {
        return Err(Error::Domain("need at least 100 records".into()));
    }
    let k = records[0].z.len();
    let n = records.len();
    let cov_skip = |skip_lo: usize, skip_hi: usize| -> Vec<Vec<f64>> {
        let count = n - (skip_hi - skip_lo);
        let idx = |i: usize| if i < skip_lo { i } else { i + (skip_hi - skip_lo) };
        let mean: Vec<f64> = (0..k)
            .map(|j| pairwise_sum(count, |i| records[idx(i)].z[j]) / count as f64)
            .collect();
        let mut cov = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in 0..k {
                cov[a][b] = pairwise_sum(count, |i| {
                    (records[idx(i)].z[a] - mean[a]) * (records[idx(i)].z[b] - mean[b])
                }) / (count as f64 - 1.0);
            }
        }
        cov
    };
    let estimate = cov_skip(0, 0);
    let groups = JACKKNIFE_GROUPS.min(n / 2);
    let ests: Vec<Vec<Vec<f64>>> = (0..groups)
        .map(|g| cov_skip(g * n / groups, (g + 1) * n / groups))
        .collect();
    let mut se = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            let m = pairwise_sum(groups, |g| ests[g][a][b]) / groups as f64;
            let var = pairwise_sum(groups, |g| {
                let d = ests[g][a][b] - m;
                d * d
            }) * (groups as f64 - 1.0)
                / groups as f64;
            se[a][b] = var.sqrt();
        }
    }
    Ok((estimate, se))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    /// asymptotic p-value bound from the Kolmogorov distribution
    pub p_bound: f64,
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov distance against a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.len() < 10 {
        return Err(Error::Domain("KS test needs at least 10 samples".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut stat: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        stat = stat
            .max((f - i as f64 / n).abs())
            .max((f - (i as f64 + 1.0) / n).abs());
    }
    Ok(KsResult {
        statistic: stat,
        p_bound: kolmogorov_tail(n.sqrt() * stat),
    })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsResult> {
    if xs.len() < 10 || ys.len() < 10 {
        return Err(Error::Domain("KS test needs at least 10 samples per side".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat: f64 = 0.0;
    while i < n && j < m {
        let v = a[i].min(b[j]);
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        stat = stat.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let eff = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    Ok(KsResult {
        statistic: stat,
        p_bound: kolmogorov_tail(eff * stat),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit on equal-probability bins: samples are
/// pushed through the model CDF and the resulting uniforms are binned.
pub fn chi_square_uniform(transformed: &[f64], bins: usize) -> Result<ChiSquareResult> {
    if bins < 2 || transformed.len() < 5 * bins {
        return Err(Error::Domain(format!(
            "chi-square needs >= {} samples for {bins} bins",
            5 * bins
        )));
    }
    let n = transformed.len();
    let mut counts = vec![0usize; bins];
    for &u in transformed {
        let b = ((u * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = n as f64 / bins as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Numerical(format!("chi-square dof: {e}")))?;
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: 1.0 - dist.cdf(stat),
    })
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    let mx = pairwise_sum(n, |i| xs[i]) / n as f64;
    let my = pairwise_sum(n, |i| ys[i]) / n as f64;
    let sxy = pairwise_sum(n, |i| (xs[i] - mx) * (ys[i] - my));
    let sxx = pairwise_sum(n, |i| (xs[i] - mx) * (xs[i] - mx));
    let syy = pairwise_sum(n, |i| (ys[i] - my) * (ys[i] - my));
    sxy / (sxx * syy).sqrt()
}
