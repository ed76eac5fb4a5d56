//! Exact i.i.d. sampling of `(X, Y)` from a spectral model.
//!
//! Purely atomic models are max-linear: `X = ⋁ aᵢZᵢ`, `Y = ⋁ bᵢZᵢ` with
//! `Zᵢ` i.i.d. standard Fréchet. Models with a density part draw `Y ~ Φ₁`
//! and invert the conditional CDF of `X` given `Y` in `t = X/Y`.

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;

use crate::dist::{conditional_from_norms, norms_with, Boundary, Method};
use crate::error::{Error, Result};
use crate::exec::{stream_rng, Exec};
use crate::spectral::SpectralModel;

/// Pairs per RNG stream in [`SampleBatch::generate`].
pub const CHUNK: usize = 1024;

const LN_T_TOL: f64 = 1e-10;

/// `Φ₁⁻¹(u) = -1/ln u`.
pub fn frechet_from_uniform(u: f64) -> f64 {
    -1.0 / u.ln()
}

/// One standard Fréchet draw.
pub fn sample_frechet<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    frechet_from_uniform(rng.sample(Open01))
}

#[derive(Debug, Clone)]
enum Route {
    MaxLinear { a: Vec<f64>, b: Vec<f64> },
    Inversion { model: SpectralModel, jumps: Vec<f64> },
}

/// Prepared sampler for one model.
#[derive(Debug, Clone)]
pub struct PairSampler {
    route: Route,
    id: String,
}

impl PairSampler {
    pub fn new(model: &SpectralModel) -> Self {
        let route = if model.is_atomic() {
            let (a, b) = model.atoms().iter().map(|x| (x.f_weight(), x.g_weight())).unzip();
            Route::MaxLinear { a, b }
        } else {
            let mut jumps: Vec<f64> = model
                .atoms()
                .iter()
                .map(|a| a.ratio())
                .filter(|r| *r > 0.0 && r.is_finite())
                .collect();
            jumps.sort_by(f64::total_cmp);
            jumps.dedup();
            Route::Inversion {
                model: model.clone(),
                jumps,
            }
        };
        PairSampler { route, id: model.id() }
    }

    /// Max-linear sampler with explicit weight vectors.
    fn max_linear(a: Vec<f64>, b: Vec<f64>, id: String) -> Self {
        PairSampler {
            route: Route::MaxLinear { a, b },
            id,
        }
    }

    pub fn is_max_linear(&self) -> bool {
        matches!(self.route, Route::MaxLinear { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        match &self.route {
            Route::MaxLinear { a, b } => {
                let (mut x, mut y) = (0.0_f64, 0.0_f64);
                for (ai, bi) in a.iter().zip(b) {
                    let z = sample_frechet(rng);
                    x = x.max(ai * z);
                    y = y.max(bi * z);
                }
                Ok((x, y))
            }
            Route::Inversion { model, jumps } => {
                let y = sample_frechet(rng);
                let u: f64 = rng.sample(Open01);
                let t = invert_conditional(model, jumps, y, u)?;
                Ok((t * y, y))
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<(f64, f64)>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

fn cond_at(model: &SpectralModel, t: f64, y: f64, boundary: Boundary) -> Result<f64> {
    let n = norms_with(model, t, Method::Auto, boundary)?;
    Ok(conditional_from_norms(&n, t * y, y))
}

/// Smallest `t` with `P(X/Y ≤ t | Y = y) ≥ u`.
fn invert_conditional(model: &SpectralModel, jumps: &[f64], y: f64, u: f64) -> Result<f64> {
    for &r in jumps {
        let right = cond_at(model, r, y, Boundary::Closed)?;
        if u <= right {
            let left = cond_at(model, r, y, Boundary::Open)?;
            if u > left {
                return Ok(r);
            }
        }
    }
    let fail = || Error::Inversion {
        model: model.id(),
        y,
        target: u,
    };
    let h = |s: f64| -> Result<f64> { Ok(cond_at(model, s.exp(), y, Boundary::Closed)? - u) };

    // bracket in s = ln t
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    let (mut h_lo, mut h_hi) = (h(0.0)?, h(0.0)?);
    let mut step = 1.0;
    while h_hi < 0.0 {
        lo = hi;
        h_lo = h_hi;
        hi += step;
        step *= 2.0;
        if hi > 700.0 {
            return Err(fail());
        }
        h_hi = h(hi)?;
    }
    step = 1.0;
    while h_lo >= 0.0 {
        hi = lo;
        h_hi = h_lo;
        lo -= step;
        step *= 2.0;
        if lo < -700.0 {
            return Err(fail());
        }
        h_lo = h(lo)?;
    }
    brent(h, lo, hi, h_lo, h_hi, LN_T_TOL)
        .map(f64::exp)
        .map_err(|e| match e {
            Error::Degenerate(_) => fail(),
            other => other,
        })
}

/// Brent's root finder on a sign-changing bracket `h(a) < 0 ≤ h(b)`.
fn brent<F>(h: F, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if (fb > 0.0) == (fc > 0.0) && fb != 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            // the CDF may jump; report the right end of the bracket
            return Ok(if fb >= 0.0 { b } else { c });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = h(b)?;
    }
    Err(Error::Degenerate("root finder did not converge".into()))
}

/// One pair from `model`.
pub fn sample_pair<R: Rng + ?Sized>(model: &SpectralModel, rng: &mut R) -> Result<(f64, f64)> {
    PairSampler::new(model).sample(rng)
}

/// `n` thresholded ratios `max(X, u)/max(Y, u)`.
pub fn sample_ratios<R: Rng + ?Sized>(model: &SpectralModel, n: usize, u: f64, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n", n, "must be >= 1"));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::invalid("u", u, "must be finite and >= 0"));
    }
    let s = PairSampler::new(model);
    (0..n)
        .map(|_| s.sample(rng).map(|(x, y)| x.max(u) / y.max(u)))
        .collect()
}

/// Thresholded ratio of one pair.
pub fn thresholded_ratio(x: f64, y: f64, u: f64) -> f64 {
    x.max(u) / y.max(u)
}

/// Approximate sampler: the density part is replaced by `m` atoms, one per
/// equal-width cell, carrying the cell's `f` and `g` mass.
#[derive(Debug, Clone)]
pub struct QuantizedSampler {
    inner: PairSampler,
    m: usize,
}

impl QuantizedSampler {
    pub fn new(model: &SpectralModel, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("m", m, "must be >= 2"));
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        if let Some(d) = model.density() {
            let (lo, hi) = d.support();
            let w = (hi - lo) / m as f64;
            for i in 0..m {
                let c0 = lo + w * i as f64;
                let c1 = if i + 1 == m { hi } else { c0 + w };
                let fa = d.integrate_f(c0, c1)?;
                let gb = d.integrate_g(c0, c1)?;
                if fa > 0.0 || gb > 0.0 {
                    a.push(fa);
                    b.push(gb);
                }
            }
        }
        for atom in model.atoms() {
            a.push(atom.f_weight());
            b.push(atom.g_weight());
        }
        Ok(QuantizedSampler {
            inner: PairSampler::max_linear(a, b, model.id()),
            m,
        })
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        self.inner.sample(rng)
    }
}

/// One pair from the `m`-cell quantization of `model`.
pub fn sample_pair_quantized<R: Rng + ?Sized>(model: &SpectralModel, m: usize, rng: &mut R) -> Result<(f64, f64)> {
    QuantizedSampler::new(model, m)?.sample(rng)
}

/// `n` pairs reproducible from `(model, seed, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub pairs: Vec<(f64, f64)>,
    pub model_id: String,
    pub seed: u64,
}

impl SampleBatch {
    /// Pairs are produced in chunks of [`CHUNK`]; chunk `c` uses stream `c`
    /// of `seed`, so the output does not depend on `exec`.
    pub fn generate(model: &SpectralModel, n: usize, seed: u64, exec: Exec) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", n, "must be >= 1"));
        }
        let sampler = PairSampler::new(model);
        let chunks = n.div_ceil(CHUNK);
        let parts = exec.try_map(chunks, |c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = stream_rng(seed, c as u64);
            sampler.sample_n(len, &mut rng)
        })?;
        Ok(SampleBatch {
            pairs: parts.into_iter().flatten().collect(),
            model_id: sampler.id.clone(),
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn ratios(&self, u: f64) -> Vec<f64> {
        self.pairs.iter().map(|&(x, y)| thresholded_ratio(x, y, u)).collect()
    }
}
