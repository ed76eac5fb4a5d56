//! Hill estimation of the ratio tail index, empirical tail dependence and
//! Kolmogorov–Smirnov distances used by the Monte Carlo checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{stream_rng, Exec};
use crate::sampler::PairSampler;
use crate::spectral::SpectralModel;

/// Hill estimate of `γ = 1/α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillEstimate {
    pub gamma_hat: f64,
    pub k: usize,
    pub n: usize,
    /// `γ̂/√k`
    pub se_approx: f64,
}

/// Mean log-excess of the `k` largest observations over the `(k+1)`-th largest.
pub fn hill(data: &[f64], k: usize) -> Result<HillEstimate> {
    let n = data.len();
    if k < 1 || k >= n {
        return Err(Error::invalid("k", k, format!("must satisfy 1 <= k <= n - 1 (n = {n})")));
    }
    if let Some(bad) = data.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("data", bad, "observations must be positive and finite"));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let base = sorted[k].ln();
    let gamma_hat = sorted[..k].iter().map(|v| v.ln() - base).sum::<f64>() / k as f64;
    Ok(HillEstimate {
        gamma_hat,
        k,
        n,
        se_approx: gamma_hat / (k as f64).sqrt(),
    })
}

/// Default number of order statistics, `⌊n^{0.3}⌋` (at least 1).
pub fn default_k(n: usize) -> usize {
    ((n as f64).powf(0.3).floor() as usize).max(1)
}

/// Summary of the standardized Hill statistic `α√k(γ̂ - 1/α)` over replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltSummary {
    pub mean: f64,
    pub variance: f64,
    pub k: usize,
    pub n: usize,
    pub reps: usize,
    pub beta: f64,
    pub alpha: f64,
}

/// Replicates the Hill estimator on ratios with `k = ⌊n^{β/2}⌋`.
///
/// `alpha` is the ratio tail index of `model`; replicate `r` uses stream `r` of `seed`.
pub fn hill_clt_check(
    model: &SpectralModel,
    alpha: f64,
    n: usize,
    beta: f64,
    reps: usize,
    seed: u64,
    exec: Exec,
) -> Result<CltSummary> {
    if !(beta > 0.0 && beta < 2.0 / 3.0) {
        return Err(Error::invalid("beta", beta, "must lie in (0, 2/3)"));
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", alpha, "must be finite and > 1"));
    }
    if reps < 2 {
        return Err(Error::invalid("reps", reps, "must be >= 2"));
    }
    let k = ((n as f64).powf(beta / 2.0).floor() as usize).max(1);
    if k >= n {
        return Err(Error::invalid("n", n, "too small for the requested beta"));
    }
    let sampler = PairSampler::new(model);
    let stats = exec.try_map(reps, |r| {
        let mut rng = stream_rng(seed, r as u64);
        let ratios: Vec<f64> = sampler.sample_n(n, &mut rng)?.into_iter().map(|(x, y)| x / y).collect();
        let h = hill(&ratios, k)?;
        Ok::<_, Error>(alpha * (k as f64).sqrt() * (h.gamma_hat - 1.0 / alpha))
    })?;
    let (mean, variance) = mean_var(&stats);
    Ok(CltSummary {
        mean,
        variance,
        k,
        n,
        reps,
        beta,
        alpha,
    })
}

/// Sample mean and unbiased variance.
pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `#{xᵢ > t, yᵢ > t} / #{yᵢ > t}`.
pub fn empirical_tail_dependence(pairs: &[(f64, f64)], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", t, "must be > 0"));
    }
    let (mut both, mut ys) = (0usize, 0usize);
    for &(x, y) in pairs {
        if y > t {
            ys += 1;
            both += (x > t) as usize;
        }
    }
    if ys == 0 {
        return Err(Error::NoExceedances(t));
    }
    Ok(both as f64 / ys as f64)
}

/// Empirical quantile by the nearest-rank rule.
pub fn quantile(data: &[f64], p: f64) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    v[idx]
}

pub fn median(data: &[f64]) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// One-sample KS distance `sup |F_n - F|` for a continuous `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0_f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample KS distance.
pub fn ks_critical_1pct_two(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}
