//! Quotient correlation coefficient and the gamma test of independence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{norming, ratio_tail_index, Side};
use crate::error::{Error, Result};
use crate::exec::{stream_rng, Exec};
use crate::sampler::{thresholded_ratio, PairSampler};
use crate::spectral::SpectralModel;

/// Maxima `R⁺ = ⋁ X(u)/Y(u)` and `R⁻ = ⋁ Y(u)/X(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioMaxima {
    pub plus: f64,
    pub minus: f64,
}

impl RatioMaxima {
    pub fn from_pairs(pairs: &[(f64, f64)], u: f64) -> Result<Self> {
        check_pairs(pairs)?;
        check_u(u)?;
        let (mut plus, mut minus) = (0.0_f64, 0.0_f64);
        for &(x, y) in pairs {
            let r = thresholded_ratio(x, y, u);
            plus = plus.max(r);
            minus = minus.max(1.0 / r);
        }
        Ok(RatioMaxima { plus, minus })
    }
}

fn check_pairs(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::invalid("n", 0, "need at least one pair"));
    }
    if let Some(p) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("pairs", format!("{p:?}"), "entries must be positive and finite"));
    }
    Ok(())
}

fn check_u(u: f64) -> Result<()> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::invalid("u", u, "must be finite and >= 0"));
    }
    Ok(())
}

/// `q_{u,n} = (R⁺ + R⁻ - 2)/(R⁺R⁻ - 1)`; a zero denominator is [`Error::Degenerate`].
pub fn quotient_coefficient(pairs: &[(f64, f64)], u: f64) -> Result<f64> {
    let m = RatioMaxima::from_pairs(pairs, u)?;
    let den = m.plus * m.minus - 1.0;
    if den == 0.0 {
        return Err(Error::Degenerate(
            "quotient coefficient is 0/0: both ratio maxima equal 1".into(),
        ));
    }
    Ok((m.plus + m.minus - 2.0) / den)
}

/// `q̂_{u,n} = (R⁺ + R⁻)/(R⁺R⁻) = 1/R⁺ + 1/R⁻`; always finite.
pub fn modified_quotient(pairs: &[(f64, f64)], u: f64) -> Result<f64> {
    let m = RatioMaxima::from_pairs(pairs, u)?;
    Ok((m.plus + m.minus) / (m.plus * m.minus))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::invalid("theta", theta, "must be finite and > 0"));
    }
    Ok(())
}

/// CDF of `Γ(2, θ)`: `1 - e^{-x/θ}(1 + x/θ)`.
pub fn gamma_cdf(x: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(x >= 0.0) {
        return Err(Error::invalid("x", x, "must be >= 0"));
    }
    Ok(gamma2_cdf_unit(x / theta))
}

fn gamma2_cdf_unit(z: f64) -> f64 {
    if z == f64::INFINITY {
        return 1.0;
    }
    // 1 - e^{-z}(1+z), accurate for small z
    let v = -(-z).exp_m1() - z * (-z).exp();
    v.clamp(0.0, 1.0)
}

fn gamma2_sf_unit(z: f64) -> f64 {
    (-z).exp() * (1.0 + z)
}

/// Quantile of `Γ(2, θ)` by safeguarded Newton iteration.
pub fn gamma_quantile(p: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", p, "must lie in (0, 1)"));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while gamma2_cdf_unit(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = gamma2_cdf_unit(z) - p;
        if f > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let dens = z * (-z).exp();
        let mut next = if dens > 0.0 { z - f / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 4.0 * f64::EPSILON * z.max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi {
            z = next;
            break;
        }
        z = next;
    }
    Ok(z * theta)
}

/// Which quotient statistic the test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    #[default]
    Modified,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Original => "original",
            Variant::Modified => "modified",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Variant::Original),
            "modified" => Ok(Variant::Modified),
            other => Err(Error::invalid("variant", other, "expected original or modified")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaTestReport {
    pub statistic: f64,
    pub variant: Variant,
    pub u: f64,
    pub null_theta: f64,
    pub p_value: f64,
    pub reject: bool,
    pub level: f64,
    pub n: usize,
}

/// Scale `θ = (1 - e^{-1/u})⁻¹` of the `Γ(2, θ)` null law (`θ = 1` at `u = 0`).
pub fn null_theta(u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(if u == 0.0 { 1.0 } else { 1.0 / -(-1.0 / u).exp_m1() })
}

/// Gamma test of `H₀`: `X` and `Y` independent.
pub fn gamma_test(pairs: &[(f64, f64)], level: f64, u: f64, variant: Variant) -> Result<GammaTestReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("level", level, "must lie in (0, 1)"));
    }
    if pairs.len() < 2 {
        return Err(Error::invalid("n", pairs.len(), "need at least two pairs"));
    }
    let theta = null_theta(u)?;
    let q = match variant {
        Variant::Original => quotient_coefficient(pairs, u)?,
        Variant::Modified => modified_quotient(pairs, u)?,
    };
    let n = pairs.len();
    let statistic = n as f64 * q;
    let p_value = gamma2_sf_unit(statistic / theta).clamp(0.0, 1.0);
    Ok(GammaTestReport {
        statistic,
        variant,
        u,
        null_theta: theta,
        p_value,
        reject: p_value < level,
        level,
        n,
    })
}

/// Limiting power against `rho(ρ)`: `1 - F_{Γ(2,1)}(ρ q₁(1 - level))`.
pub fn limit_power(rho: f64, level: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid("rho", rho, "must lie in (0, 1]"));
    }
    let q = gamma_quantile(1.0 - level, 1.0)?;
    Ok(gamma2_sf_unit(rho * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerPoint {
    pub rho: f64,
    pub empirical_power: f64,
    pub limit_power: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCurve {
    pub points: Vec<PowerPoint>,
    pub n: usize,
    pub level: f64,
    pub seed: u64,
}

/// Rejection rate of the modified gamma test under `rho(ρ)` for each `ρ` in the grid.
///
/// Replicate `r` uses stream `r` of `seed` at every grid point (common random numbers).
pub fn power_simulation(
    rho_grid: &[f64],
    n: usize,
    reps: usize,
    level: f64,
    seed: u64,
    exec: Exec,
) -> Result<PowerCurve> {
    if reps == 0 {
        return Err(Error::invalid("reps", reps, "must be >= 1"));
    }
    if n < 2 {
        return Err(Error::invalid("n", n, "must be >= 2"));
    }
    let mut points = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let limit = limit_power(rho, level)?;
        let sampler = PairSampler::new(&SpectralModel::rho(rho)?);
        let rejects = exec.try_map(reps, |r| {
            let pairs = sampler.sample_n(n, &mut stream_rng(seed, r as u64))?;
            Ok::<_, Error>(gamma_test(&pairs, level, 0.0, Variant::Modified)?.reject)
        })?;
        let hits = rejects.iter().filter(|r| **r).count();
        points.push(PowerPoint {
            rho,
            empirical_power: hits as f64 / reps as f64,
            limit_power: limit,
            reps,
        });
    }
    Ok(PowerCurve {
        points,
        n,
        level,
        seed,
    })
}

/// Statistics `n·q` of `reps` independent batches from `model`.
pub fn replicate_statistics(
    model: &SpectralModel,
    n: usize,
    reps: usize,
    u: f64,
    variant: Variant,
    seed: u64,
    exec: Exec,
) -> Result<Vec<f64>> {
    let sampler = PairSampler::new(model);
    exec.try_map(reps, |r| {
        let pairs = sampler.sample_n(n, &mut stream_rng(seed, r as u64))?;
        let q = match variant {
            Variant::Original => quotient_coefficient(&pairs, u)?,
            Variant::Modified => modified_quotient(&pairs, u)?,
        };
        Ok(n as f64 * q)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximaCheck {
    pub max_deviation: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub grid: Vec<f64>,
    pub n: usize,
    pub reps: usize,
}

/// Compares the joint law of `(R⁺/κ⁺, R⁻/κ⁻)` over `reps` batches with
/// `Φ_{α₊}(s)Φ_{α₋}(t)` on the grid `{0.5, 1, 2}²`; returns the largest gap.
pub fn joint_maxima_independence_check(
    model: &SpectralModel,
    n: usize,
    reps: usize,
    seed: u64,
    exec: Exec,
) -> Result<MaximaCheck> {
    if n == 0 || reps == 0 {
        return Err(Error::invalid("n, reps", format!("{n}, {reps}"), "must be >= 1"));
    }
    let kappa_plus = norming(model, Side::Plus, n as u64, 0.0)?;
    let kappa_minus = norming(model, Side::Minus, n as u64, 0.0)?;
    let alpha_plus = ratio_tail_index(model, Side::Plus)?;
    let alpha_minus = ratio_tail_index(model, Side::Minus)?;
    let sampler = PairSampler::new(model);
    let scaled = exec.try_map(reps, |r| {
        let pairs = sampler.sample_n(n, &mut stream_rng(seed, r as u64))?;
        let m = RatioMaxima::from_pairs(&pairs, 0.0)?;
        Ok::<_, Error>((m.plus / kappa_plus, m.minus / kappa_minus))
    })?;
    let grid = vec![0.5, 1.0, 2.0];
    let frechet = |s: f64, a: f64| (-s.powf(-a)).exp();
    let mut dev = 0.0_f64;
    for &s in &grid {
        for &t in &grid {
            let hits = scaled.iter().filter(|(a, b)| *a <= s && *b <= t).count();
            let emp = hits as f64 / reps as f64;
            dev = dev.max((emp - frechet(s, alpha_plus) * frechet(t, alpha_minus)).abs());
        }
    }
    Ok(MaximaCheck {
        max_deviation: dev,
        kappa_plus,
        kappa_minus,
        alpha_plus,
        alpha_minus,
        grid,
        n,
        reps,
    })
}
