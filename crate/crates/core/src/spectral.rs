//! Standardized bivariate 1-Fréchet laws given by spectral functions.
//!
//! A model is a triple `(f, g, μ)` on `[0, 1]`: a finite list of atoms of `μ`
//! plus an optional density part. The joint law is
//! `P(X ≤ x, Y ≤ y) = exp(-∫ max(f/x, g/y) dμ)`. Every model satisfies
//! `∫ f dμ = ∫ g dμ = 1` and has `f/g` nondecreasing in the location, so the
//! set `{f/g > t}` is always an upper interval.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::special::exp_integral_e1;

/// Tolerance on `∫ f dμ = ∫ g dμ = 1`.
pub const STANDARDIZATION_TOL: f64 = 1e-8;

/// Number of interior grid points used when checking ratio monotonicity.
const ORDER_GRID: usize = 1000;

/// `f/g` with the convention `1/0 = ∞`; `0/0` is NaN (no mass there).
pub fn ratio_of(f: f64, g: f64) -> f64 {
    if g > 0.0 {
        f / g
    } else if f > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// A point mass of `μ` with the spectral function values at its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
    pub f: f64,
    pub g: f64,
}

impl Atom {
    pub fn new(location: f64, mass: f64, f: f64, g: f64) -> Self {
        Atom { location, mass, f, g }
    }

    /// Contribution `f(s) μ{s}` to `∫ f dμ`.
    pub fn f_weight(&self) -> f64 {
        self.f * self.mass
    }

    pub fn g_weight(&self) -> f64 {
        self.g * self.mass
    }

    pub fn ratio(&self) -> f64 {
        ratio_of(self.f, self.g)
    }

    fn swapped(&self) -> Atom {
        Atom {
            location: 1.0 - self.location,
            mass: self.mass,
            f: self.g,
            g: self.f,
        }
    }
}

/// A user-supplied absolutely continuous part of `μ` on a subinterval of `[0, 1]`.
///
/// `density` is the Radon–Nikodym derivative of `μ` against Lebesgue measure.
/// Implementations must keep `f/g` nondecreasing on the support.
pub trait SpectralDensity: Send + Sync + fmt::Debug {
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// Interior points where the integrands are not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn density(&self, s: f64) -> f64;
    fn f(&self, s: f64) -> f64;
    fn g(&self, s: f64) -> f64;

    fn ratio(&self, s: f64) -> f64 {
        ratio_of(self.f(s), self.g(s))
    }
}

/// Built-in density kinds. Standard-form kinds use `f = 2s`, `g = 2(1 - s)`.
#[derive(Debug, Clone)]
pub enum DensityKind {
    /// Gumbel logistic: `f = (α-1) s^{α-1} (1-s^α)^{-1/α}`, `g = (α-1) s^{α-2}`, Lebesgue `μ`.
    Logistic { alpha: f64 },
    /// Standard form with constant density `k`.
    Uniform { k: f64 },
    /// Standard form with the symmetric exponential-ratio density calibrated by `c`.
    ExpRatio { c: f64 },
    Custom(Arc<dyn SpectralDensity>),
}

impl PartialEq for DensityKind {
    fn eq(&self, other: &Self) -> bool {
        use DensityKind::*;
        match (self, other) {
            (Logistic { alpha: a }, Logistic { alpha: b }) => a == b,
            (Uniform { k: a }, Uniform { k: b }) => a == b,
            (ExpRatio { c: a }, ExpRatio { c: b }) => a == b,
            (Custom(a), Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Density part of a model, possibly viewed through the swap `(f, g, s) ↦ (g, f, 1-s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    kind: DensityKind,
    swapped: bool,
}

/// `h₁(s) / C` of the exponential-ratio density on `[1/2, 1]`.
fn exp_ratio_half(s: f64) -> f64 {
    exp_ratio_half_at(s, 1.0 - s)
}

/// Same as [`exp_ratio_half`] with `q = 1 - s` supplied exactly.
fn exp_ratio_half_at(s: f64, q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let e = (-s / q).exp();
    if e == 0.0 {
        return 0.0;
    }
    e / (2.0 * s * q * q * q)
}

/// A point of the support given by its distances to both endpoints, so that
/// functions singular at the upper end can be evaluated without cancellation.
#[derive(Debug, Clone, Copy)]
struct Pt {
    below: f64,
    above: f64,
}

impl Density {
    pub fn new(kind: DensityKind) -> Self {
        Density { kind, swapped: false }
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::Custom(d) => d.support(),
            _ => (0.0, 1.0),
        }
    }

    fn reflect(&self, s: f64) -> f64 {
        if self.swapped {
            let (lo, hi) = self.support();
            lo + hi - s
        } else {
            s
        }
    }

    fn pt(&self, s: f64) -> Pt {
        let (lo, hi) = self.support();
        Pt {
            below: s - lo,
            above: hi - s,
        }
    }

    /// The point in the coordinates of the unswapped kind.
    fn base_pt(&self, p: Pt) -> Pt {
        if self.swapped {
            Pt {
                below: p.above,
                above: p.below,
            }
        } else {
            p
        }
    }

    /// Sorted breakpoints including the support endpoints.
    pub fn pieces(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let inner: Vec<f64> = match &self.kind {
            DensityKind::ExpRatio { .. } => vec![0.5],
            DensityKind::Custom(d) => d.breakpoints(),
            _ => Vec::new(),
        };
        let mut pts = vec![lo];
        let mut mapped: Vec<f64> = inner
            .into_iter()
            .map(|b| self.reflect(b))
            .filter(|b| *b > lo && *b < hi)
            .collect();
        mapped.sort_by(f64::total_cmp);
        pts.extend(mapped);
        pts.push(hi);
        pts
    }

    fn custom_s(&self, p: Pt) -> f64 {
        self.support().0 + p.below
    }

    fn base_density(&self, p: Pt) -> f64 {
        match &self.kind {
            DensityKind::Logistic { .. } => 1.0,
            DensityKind::Uniform { k } => *k,
            DensityKind::ExpRatio { c } => {
                let (s, q) = if p.below >= p.above {
                    (p.below, p.above)
                } else {
                    (p.above, p.below)
                };
                c * exp_ratio_half_at(s, q)
            }
            DensityKind::Custom(d) => d.density(self.custom_s(p)),
        }
    }

    /// `1 - s^α` for the logistic kind.
    fn logistic_tail(alpha: f64, p: Pt) -> f64 {
        if p.above < 0.5 {
            -(alpha * (-p.above).ln_1p()).exp_m1()
        } else {
            -(alpha * p.below.ln()).exp_m1()
        }
    }

    fn base_f(&self, p: Pt) -> f64 {
        match &self.kind {
            DensityKind::Logistic { alpha } => {
                let a = *alpha;
                let s = p.below;
                if s <= 0.0 {
                    return 0.0;
                }
                (a - 1.0) * s.powf(a - 1.0) * Self::logistic_tail(a, p).powf(-1.0 / a)
            }
            DensityKind::Uniform { .. } | DensityKind::ExpRatio { .. } => 2.0 * p.below,
            DensityKind::Custom(d) => d.f(self.custom_s(p)),
        }
    }

    fn base_g(&self, p: Pt) -> f64 {
        match &self.kind {
            DensityKind::Logistic { alpha } => (alpha - 1.0) * p.below.powf(alpha - 2.0),
            DensityKind::Uniform { .. } | DensityKind::ExpRatio { .. } => 2.0 * p.above,
            DensityKind::Custom(d) => d.g(self.custom_s(p)),
        }
    }

    fn base_ratio(&self, p: Pt) -> f64 {
        match &self.kind {
            DensityKind::Logistic { alpha } => p.below * Self::logistic_tail(*alpha, p).powf(-1.0 / alpha),
            DensityKind::Uniform { .. } | DensityKind::ExpRatio { .. } => ratio_of(p.below, p.above),
            DensityKind::Custom(d) => d.ratio(self.custom_s(p)),
        }
    }

    fn density_at(&self, p: Pt) -> f64 {
        self.base_density(self.base_pt(p))
    }

    fn f_at(&self, p: Pt) -> f64 {
        let b = self.base_pt(p);
        if self.swapped {
            self.base_g(b)
        } else {
            self.base_f(b)
        }
    }

    fn g_at(&self, p: Pt) -> f64 {
        let b = self.base_pt(p);
        if self.swapped {
            self.base_f(b)
        } else {
            self.base_g(b)
        }
    }

    fn ratio_at(&self, p: Pt) -> f64 {
        let q = self.base_ratio(self.base_pt(p));
        if self.swapped {
            if q == 0.0 {
                f64::INFINITY
            } else {
                1.0 / q
            }
        } else {
            q
        }
    }

    fn f_mass_at(&self, p: Pt) -> f64 {
        let h = self.density_at(p);
        if h == 0.0 {
            0.0
        } else {
            self.f_at(p) * h
        }
    }

    fn g_mass_at(&self, p: Pt) -> f64 {
        let h = self.density_at(p);
        if h == 0.0 {
            0.0
        } else {
            self.g_at(p) * h
        }
    }

    pub fn density(&self, s: f64) -> f64 {
        self.density_at(self.pt(s))
    }

    pub fn f(&self, s: f64) -> f64 {
        self.f_at(self.pt(s))
    }

    pub fn g(&self, s: f64) -> f64 {
        self.g_at(self.pt(s))
    }

    pub fn ratio(&self, s: f64) -> f64 {
        self.ratio_at(self.pt(s))
    }

    /// `f(s) h(s)`, the integrand of `‖f‖` over the density part.
    pub fn f_mass(&self, s: f64) -> f64 {
        self.f_mass_at(self.pt(s))
    }

    pub fn g_mass(&self, s: f64) -> f64 {
        self.g_mass_at(self.pt(s))
    }

    fn swap(&self) -> Density {
        match self.kind {
            // symmetric standard-form densities are invariant under the swap
            DensityKind::Uniform { .. } | DensityKind::ExpRatio { .. } => self.clone(),
            _ => Density {
                kind: self.kind.clone(),
                swapped: !self.swapped,
            },
        }
    }

    /// `inf{s : f(s)/g(s) > t}` by bisection, clamped to the support.
    pub fn threshold(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.ratio(mid);
            if r > t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Lower-open variant: `inf{s : f(s)/g(s) ≥ t}`.
    pub fn threshold_open(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ratio(mid) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `∫ f h` over `[a, b]`, split at the density breakpoints.
    pub fn integrate_f(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_split(a, b, |p| self.f_mass_at(p))
    }

    pub fn integrate_g(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_split(a, b, |p| self.g_mass_at(p))
    }

    pub(crate) fn integrate_density(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_split(a, b, |p| self.density_at(p))
    }

    /// `∫ min(f, g) h` over `[a, b]`.
    pub(crate) fn integrate_min(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_split(a, b, |p| {
            let h = self.density_at(p);
            if h == 0.0 {
                0.0
            } else {
                self.f_at(p).min(self.g_at(p)) * h
            }
        })
    }

    /// Integrates over `[a, b]` split at the breakpoints; each piece's upper
    /// half is integrated in the distance to the top of the support.
    fn integrate_split<F: Fn(Pt) -> f64>(&self, a: f64, b: f64, f: F) -> Result<f64> {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if !(b > a) {
            return Ok(0.0);
        }
        let mut pts = vec![a];
        pts.extend(self.pieces().into_iter().filter(|p| *p > a && *p < b));
        pts.push(b);
        let mut total = 0.0;
        for w in pts.windows(2) {
            let (p0, p1) = (w[0], w[1]);
            let mid = 0.5 * (p0 + p1);
            total += quad::integrate(
                |s| {
                    f(Pt {
                        below: s - lo,
                        above: hi - s,
                    })
                },
                p0,
                mid,
            )?;
            total += quad::integrate(
                |v| {
                    f(Pt {
                        below: (hi - v) - lo,
                        above: v,
                    })
                },
                hi - p1,
                hi - mid,
            )?;
        }
        Ok(total)
    }
}

/// Closed-form family of a model, used to select fast analytic paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FormTag {
    Independent,
    Logistic { alpha: f64 },
    Mixed { k: f64 },
    Rho { rho: f64 },
    /// Spectrally discrete; `scale_a`, `scale_b` are the sums removed by standardization.
    Discrete { scale_a: f64, scale_b: f64 },
    ExpRatio { c: f64 },
    Custom,
}

impl FormTag {
    /// True when the law of `(X, Y)` equals the law of `(Y, X)`.
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            FormTag::Independent
                | FormTag::Logistic { .. }
                | FormTag::Mixed { .. }
                | FormTag::Rho { .. }
                | FormTag::ExpRatio { .. }
        )
    }
}

/// JSON model description, e.g. `{"form": "logistic", "alpha": 2.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Independent,
    Rho { rho: f64 },
    Logistic { alpha: f64 },
    Mixed { k: f64 },
    Discrete { a: Vec<f64>, b: Vec<f64> },
    ExpRatio,
    /// The model with `X` and `Y` exchanged.
    Swapped { of: Box<ModelSpec> },
    /// Built programmatically; cannot be rebuilt from JSON.
    Custom { name: String },
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<ModelSpec> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("bad model JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    pub fn build(&self) -> Result<SpectralModel> {
        match self {
            ModelSpec::Independent => Ok(SpectralModel::independent()),
            ModelSpec::Rho { rho } => SpectralModel::rho(*rho),
            ModelSpec::Logistic { alpha } => SpectralModel::logistic(*alpha),
            ModelSpec::Mixed { k } => SpectralModel::mixed(*k),
            ModelSpec::Discrete { a, b } => SpectralModel::discrete(a, b),
            ModelSpec::ExpRatio => SpectralModel::exp_ratio(),
            ModelSpec::Swapped { of } => Ok(of.build()?.swap()),
            ModelSpec::Custom { name } => Err(Error::InvalidModel(format!(
                "custom model `{name}` cannot be rebuilt from its description"
            ))),
        }
    }
}

/// A validated standardized bivariate 1-Fréchet law. Immutable once built.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    atoms: Vec<Atom>,
    density: Option<Density>,
    form: FormTag,
    spec: ModelSpec,
}

impl SpectralModel {
    /// `μ = (δ₀ + δ₁)/2` in standard form: independent `X` and `Y`.
    pub fn independent() -> Self {
        SpectralModel {
            atoms: vec![Atom::new(0.0, 0.5, 0.0, 2.0), Atom::new(1.0, 0.5, 2.0, 0.0)],
            density: None,
            form: FormTag::Independent,
            spec: ModelSpec::Independent,
        }
    }

    /// `H = ρ/2 (δ₀ + δ₁) + (1-ρ) δ_{1/2}`, i.e.
    /// `(X, Y) = ((1-ρ)Z₂ ∨ ρZ₃, ρZ₁ ∨ (1-ρ)Z₂)`.
    pub fn rho(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::invalid("rho", rho, "must lie in [0, 1]"));
        }
        let atoms = standard_atoms(&[(0.0, rho / 2.0), (0.5, 1.0 - rho), (1.0, rho / 2.0)]);
        let model = SpectralModel {
            atoms,
            density: None,
            form: FormTag::Rho { rho },
            spec: ModelSpec::Rho { rho },
        };
        model.validate()?;
        Ok(model)
    }

    /// Gumbel logistic law `exp{-(x^{-α} + y^{-α})^{1/α}}`, `α > 1`.
    pub fn logistic(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::invalid(
                "alpha",
                alpha,
                "must be finite and > 1 (alpha = 1 is the independent model)",
            ));
        }
        let model = SpectralModel {
            atoms: Vec::new(),
            density: Some(Density::new(DensityKind::Logistic { alpha })),
            form: FormTag::Logistic { alpha },
            spec: ModelSpec::Logistic { alpha },
        };
        model.validate()?;
        Ok(model)
    }

    /// Mixed law `exp{-(1/x + 1/y - k/(x+y))}`: `H = k·Leb + (1-k)/2 (δ₀ + δ₁)`.
    pub fn mixed(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::invalid("k", k, "must lie in [0, 1]"));
        }
        let atoms = standard_atoms(&[(0.0, (1.0 - k) / 2.0), (1.0, (1.0 - k) / 2.0)]);
        let density = (k > 0.0).then(|| Density::new(DensityKind::Uniform { k }));
        let model = SpectralModel {
            atoms,
            density,
            form: FormTag::Mixed { k },
            spec: ModelSpec::Mixed { k },
        };
        model.validate()?;
        Ok(model)
    }

    /// Spectrally discrete law `(∨ aᵢZᵢ, ∨ bᵢZᵢ)` after rescaling to `Σa = Σb = 1`.
    pub fn discrete(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(
                "b",
                format!("{} entries", b.len()),
                format!("length must match a ({} entries)", a.len()),
            ));
        }
        if a.is_empty() {
            return Err(Error::invalid("a", "[]", "need at least one atom"));
        }
        for (name, v) in [("a", a), ("b", b)] {
            if let Some(bad) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::invalid(name, bad, "entries must be finite and >= 0"));
            }
        }
        let scale_a: f64 = a.iter().sum();
        let scale_b: f64 = b.iter().sum();
        if scale_a <= 0.0 {
            return Err(Error::invalid("a", format!("{a:?}"), "all-zero vector"));
        }
        if scale_b <= 0.0 {
            return Err(Error::invalid("b", format!("{b:?}"), "all-zero vector"));
        }
        let mut pairs: Vec<(f64, f64)> = a
            .iter()
            .zip(b)
            .filter(|(x, y)| **x > 0.0 || **y > 0.0)
            .map(|(x, y)| (x / scale_a, y / scale_b))
            .collect();
        pairs.sort_by(|p, q| ratio_of(p.0, p.1).total_cmp(&ratio_of(q.0, q.1)));
        for w in pairs.windows(2) {
            let (r0, r1) = (ratio_of(w[0].0, w[0].1), ratio_of(w[1].0, w[1].1));
            if r0 == r1 {
                return Err(Error::invalid(
                    "a/b",
                    r0,
                    "duplicate ratio a_i/b_i; merge tied atoms first",
                ));
            }
        }
        let m = pairs.len();
        let atoms = pairs
            .iter()
            .enumerate()
            .map(|(i, &(fa, gb))| {
                let loc = if m == 1 { 0.5 } else { i as f64 / (m - 1) as f64 };
                Atom::new(loc, 1.0, fa, gb)
            })
            .collect();
        let model = SpectralModel {
            atoms,
            density: None,
            form: FormTag::Discrete { scale_a, scale_b },
            spec: ModelSpec::Discrete {
                a: a.to_vec(),
                b: b.to_vec(),
            },
        };
        model.validate()?;
        Ok(model)
    }

    /// Symmetric standard-form model whose ratio tail decays like `e^{-t}`.
    ///
    /// `h(s) = h₁(max(s, 1-s))` with `h₁(s) = C e^{-s/(1-s)} / (2s(1-s)³)`;
    /// `C` is calibrated by quadrature so that `H([0,1]) = 1`.
    pub fn exp_ratio() -> Result<Self> {
        let cfg = quad::QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_intervals: 4000,
        };
        let half_mass = quad::integrate_with(exp_ratio_half, 0.5, 1.0, cfg)
            .map_err(|e| Error::Calibration(format!("exp-ratio normalizer: {e}")))?;
        if !(half_mass > 0.0) || !half_mass.is_finite() {
            return Err(Error::Calibration(format!("exp-ratio normalizer integral = {half_mass}")));
        }
        let c = 1.0 / (2.0 * half_mass);
        let model = SpectralModel {
            atoms: Vec::new(),
            density: Some(Density::new(DensityKind::ExpRatio { c })),
            form: FormTag::ExpRatio { c },
            spec: ModelSpec::ExpRatio,
        };
        model.validate()?;
        Ok(model)
    }

    /// A model from explicit atoms and an optional custom density.
    pub fn custom(
        name: impl Into<String>,
        atoms: Vec<Atom>,
        density: Option<Arc<dyn SpectralDensity>>,
    ) -> Result<Self> {
        for a in &atoms {
            if !(a.location.is_finite() && (0.0..=1.0).contains(&a.location)) {
                return Err(Error::InvalidModel(format!("atom location {} outside [0, 1]", a.location)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidModel(format!("atom mass {} must be > 0", a.mass)));
            }
            if !(a.f.is_finite() && a.g.is_finite() && a.f >= 0.0 && a.g >= 0.0) {
                return Err(Error::InvalidModel(format!(
                    "atom at {} has negative or non-finite spectral values",
                    a.location
                )));
            }
        }
        let mut atoms: Vec<Atom> = atoms.into_iter().filter(|a| a.f > 0.0 || a.g > 0.0).collect();
        atoms.sort_by(|p, q| p.location.total_cmp(&q.location));
        if atoms.windows(2).any(|w| w[0].location == w[1].location) {
            return Err(Error::InvalidModel("two atoms share a location".into()));
        }
        let density = density.map(|d| Density::new(DensityKind::Custom(d)));
        if let Some(d) = &density {
            let (lo, hi) = d.support();
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::InvalidModel(format!("density support [{lo}, {hi}] not inside [0, 1]")));
            }
        }
        let model = SpectralModel {
            atoms,
            density,
            form: FormTag::Custom,
            spec: ModelSpec::Custom { name: name.into() },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ModelSpec::from_json(text)?.build()
    }

    /// The model of `(Y, X)`: `f` and `g` exchanged, locations reflected.
    pub fn swap(&self) -> SpectralModel {
        let mut atoms: Vec<Atom> = self.atoms.iter().map(Atom::swapped).collect();
        atoms.reverse();
        let form = match self.form {
            FormTag::Discrete { scale_a, scale_b } => FormTag::Discrete {
                scale_a: scale_b,
                scale_b: scale_a,
            },
            other => other,
        };
        let spec = match &self.spec {
            ModelSpec::Swapped { of } => (**of).clone(),
            ModelSpec::Discrete { a, b } => ModelSpec::Discrete {
                a: b.clone(),
                b: a.clone(),
            },
            s @ (ModelSpec::Independent
            | ModelSpec::Rho { .. }
            | ModelSpec::Mixed { .. }
            | ModelSpec::ExpRatio) => s.clone(),
            s => ModelSpec::Swapped { of: Box::new(s.clone()) },
        };
        SpectralModel {
            atoms,
            density: self.density.as_ref().map(Density::swap),
            form,
            spec,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn form(&self) -> FormTag {
        self.form
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Compact identifier: the JSON model description.
    pub fn id(&self) -> String {
        self.spec.to_json()
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_none()
    }

    /// `(∫ f dμ, ∫ g dμ)`, atoms exactly and the density part by quadrature.
    pub fn total_masses(&self) -> Result<(f64, f64)> {
        let mut f_total: f64 = self.atoms.iter().map(Atom::f_weight).sum();
        let mut g_total: f64 = self.atoms.iter().map(Atom::g_weight).sum();
        if let Some(d) = &self.density {
            let (lo, hi) = d.support();
            f_total += d.integrate_f(lo, hi)?;
            g_total += d.integrate_g(lo, hi)?;
        }
        Ok((f_total, g_total))
    }

    /// Total `μ` mass (the measure `H` for standard-form models).
    pub fn total_measure(&self) -> Result<f64> {
        let mut total: f64 = self.atoms.iter().map(|a| a.mass).sum();
        if let Some(d) = &self.density {
            let (lo, hi) = d.support();
            total += d.integrate_density(lo, hi)?;
        }
        Ok(total)
    }

    /// `sup{f/g}` over the part of `μ` where `f > 0`; infinite when the ratio is unbounded.
    pub fn ratio_supremum(&self) -> f64 {
        let mut sup = self
            .atoms
            .iter()
            .filter(|a| a.f_weight() > 0.0)
            .map(Atom::ratio)
            .fold(0.0_f64, f64::max);
        if let Some(d) = &self.density {
            let top = match d.kind() {
                DensityKind::Custom(_) => {
                    let (lo, hi) = d.support();
                    let probe = hi - (hi - lo) * 1e-12;
                    d.ratio(probe)
                }
                // every built-in density has f/g → ∞ at the top of its support
                _ => f64::INFINITY,
            };
            sup = sup.max(top);
        }
        sup
    }

    /// Points `(location, f/g)` checked by the ratio-order invariant.
    fn order_probe(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.location, a.ratio())).collect();
        if let Some(d) = &self.density {
            let (lo, hi) = d.support();
            for i in 0..ORDER_GRID {
                let s = lo + (hi - lo) * (i as f64 + 0.5) / ORDER_GRID as f64;
                if d.density(s) > 0.0 {
                    pts.push((s, d.ratio(s)));
                }
            }
        }
        pts.retain(|p| !p.1.is_nan());
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
        pts
    }

    /// Checks standardization, positivity and monotonicity of `f/g`.
    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(a.mass > 0.0) || a.f < 0.0 || a.g < 0.0 {
                return Err(Error::InvalidModel(format!("bad atom {a:?}")));
            }
        }
        if let Some(d) = &self.density {
            let (lo, hi) = d.support();
            for i in 0..ORDER_GRID {
                let s = lo + (hi - lo) * (i as f64 + 0.5) / ORDER_GRID as f64;
                let (h, f, g) = (d.density(s), d.f(s), d.g(s));
                if !(h >= 0.0 && f >= 0.0 && g >= 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "density part negative or undefined at s = {s}: h = {h}, f = {f}, g = {g}"
                    )));
                }
            }
        }
        let probe = self.order_probe();
        for w in probe.windows(2) {
            let (r0, r1) = (w[0].1, w[1].1);
            if r1 < r0 && (r0 - r1) > 1e-12 * r0.abs().max(1.0) {
                return Err(Error::InvalidModel(format!(
                    "f/g decreases between s = {} ({r0}) and s = {} ({r1})",
                    w[0].0, w[1].0
                )));
            }
        }
        let (f_total, g_total) = self.total_masses()?;
        if (f_total - 1.0).abs() > STANDARDIZATION_TOL || (g_total - 1.0).abs() > STANDARDIZATION_TOL {
            return Err(Error::InvalidModel(format!(
                "not standardized: ∫f dμ = {f_total}, ∫g dμ = {g_total}"
            )));
        }
        Ok(())
    }

    /// Same law up to `tol`: equal atom weights in ratio order and the same density part.
    pub fn same_law(&self, other: &SpectralModel, tol: f64) -> bool {
        let weights = |m: &SpectralModel| -> Vec<(f64, f64)> {
            m.atoms
                .iter()
                .filter(|a| a.f_weight() > 0.0 || a.g_weight() > 0.0)
                .map(|a| (a.f_weight(), a.g_weight()))
                .collect()
        };
        let (wa, wb) = (weights(self), weights(other));
        wa.len() == wb.len()
            && wa
                .iter()
                .zip(&wb)
                .all(|(p, q)| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol)
            && self.density == other.density
    }
}

fn standard_atoms(points: &[(f64, f64)]) -> Vec<Atom> {
    points
        .iter()
        .filter(|(_, mass)| *mass > 0.0)
        .map(|&(s, mass)| Atom::new(s, mass, 2.0 * s, 2.0 * (1.0 - s)))
        .collect()
}

/// Closed form of the exp-ratio normalizer, `1 / (E1(1) + 4/e)`.
pub fn exp_ratio_constant_closed_form() -> f64 {
    1.0 / (exp_integral_e1(1.0) + 4.0 * (-1.0f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zoo() -> Vec<SpectralModel> {
        vec![
            SpectralModel::independent(),
            SpectralModel::rho(0.3).unwrap(),
            SpectralModel::logistic(1.5).unwrap(),
            SpectralModel::logistic(2.0).unwrap(),
            SpectralModel::logistic(3.0).unwrap(),
            SpectralModel::mixed(0.5).unwrap(),
            SpectralModel::mixed(1.0).unwrap(),
            SpectralModel::discrete(&[0.2, 0.8], &[0.7, 0.3]).unwrap(),
            SpectralModel::exp_ratio().unwrap(),
        ]
    }

    #[test]
    fn zoo_is_standardized() {
        for m in zoo() {
            let (f, g) = m.total_masses().unwrap();
            assert!((f - 1.0).abs() <= 1e-8, "{}: ∫f = {f}", m.id());
            assert!((g - 1.0).abs() <= 1e-8, "{}: ∫g = {g}", m.id());
        }
    }

    #[test]
    fn rho_one_and_mixed_zero_are_independent() {
        let ind = SpectralModel::independent();
        assert!(SpectralModel::rho(1.0).unwrap().same_law(&ind, 0.0));
        assert!(SpectralModel::mixed(0.0).unwrap().same_law(&ind, 0.0));
        assert!(SpectralModel::discrete(&[0.0, 1.0], &[1.0, 0.0]).unwrap().same_law(&ind, 0.0));
    }

    #[test]
    fn parameter_errors() {
        assert!(SpectralModel::rho(-0.1).is_err());
        assert!(SpectralModel::rho(1.5).is_err());
        assert!(SpectralModel::logistic(1.0).is_err());
        assert!(SpectralModel::logistic(f64::INFINITY).is_err());
        assert!(SpectralModel::logistic(f64::NAN).is_err());
        assert!(SpectralModel::mixed(1.01).is_err());
    }

    #[test]
    fn discrete_rejects_bad_input() {
        assert!(SpectralModel::discrete(&[1.0], &[0.5, 0.5]).is_err());
        assert!(SpectralModel::discrete(&[0.0, 0.0], &[0.5, 0.5]).is_err());
        assert!(SpectralModel::discrete(&[], &[]).is_err());
        // 0.2/0.4 == 0.3/0.6
        assert!(SpectralModel::discrete(&[0.2, 0.3, 0.5], &[0.4, 0.6, 0.0]).is_err());
        // two atoms with b = 0
        assert!(SpectralModel::discrete(&[0.5, 0.5], &[1.0, 0.0]).is_ok());
        assert!(SpectralModel::discrete(&[0.3, 0.3, 0.4], &[1.0, 0.0, 0.0]).is_err());
        assert!(SpectralModel::discrete(&[-0.1, 1.1], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn discrete_rescales_and_sorts() {
        let m = SpectralModel::discrete(&[8.0, 2.0], &[3.0, 7.0]).unwrap();
        assert_eq!(
            m.form(),
            FormTag::Discrete {
                scale_a: 10.0,
                scale_b: 10.0
            }
        );
        let w: Vec<_> = m.atoms().iter().map(|a| (a.f_weight(), a.g_weight())).collect();
        assert_eq!(w, vec![(0.2, 0.7), (0.8, 0.3)]);
    }

    #[test]
    fn swap_is_an_involution() {
        for m in zoo() {
            let back = m.swap().swap();
            assert!(back.same_law(&m, 0.0), "{}", m.id());
            assert_eq!(back.spec(), m.spec());
        }
        let ind = SpectralModel::independent();
        assert!(ind.swap().same_law(&ind, 0.0));
        let d = SpectralModel::discrete(&[0.2, 0.8], &[0.7, 0.3]).unwrap();
        let e = SpectralModel::discrete(&[0.7, 0.3], &[0.2, 0.8]).unwrap();
        assert!(d.swap().same_law(&e, 1e-15));
    }

    #[test]
    fn swapped_density_exchanges_spectral_functions() {
        let m = SpectralModel::logistic(2.5).unwrap();
        let d = m.density().unwrap();
        let s = m.swap();
        let ds = s.density().unwrap();
        for x in [0.1, 0.4, 0.77] {
            assert_abs_diff_eq!(ds.f(1.0 - x), d.g(x), epsilon = 1e-14);
            assert_abs_diff_eq!(ds.g(1.0 - x), d.f(x), epsilon = 1e-14);
            assert_abs_diff_eq!(ds.ratio(1.0 - x), 1.0 / d.ratio(x), epsilon = 1e-12);
        }
        s.validate().unwrap();
    }

    #[test]
    fn exp_ratio_constant_matches_frozen_value() {
        // 1 / (E1(1) + 4/e), mpmath at 40 digits
        const C: f64 = 0.591_400_434_775_910_2;
        let m = SpectralModel::exp_ratio().unwrap();
        let FormTag::ExpRatio { c } = m.form() else { panic!() };
        assert_abs_diff_eq!(c, C, epsilon = 1e-12);
        assert_abs_diff_eq!(exp_ratio_constant_closed_form(), C, epsilon = 1e-14);
        assert_abs_diff_eq!(m.total_measure().unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn custom_model_validation() {
        #[derive(Debug)]
        struct Decreasing;
        impl SpectralDensity for Decreasing {
            fn density(&self, _: f64) -> f64 {
                1.0
            }
            fn f(&self, s: f64) -> f64 {
                2.0 * (1.0 - s)
            }
            fn g(&self, s: f64) -> f64 {
                2.0 * s
            }
        }
        let err = SpectralModel::custom("dec", vec![], Some(Arc::new(Decreasing))).unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)));

        let ok = SpectralModel::custom(
            "atoms",
            vec![Atom::new(0.0, 0.5, 0.0, 2.0), Atom::new(1.0, 0.5, 2.0, 0.0)],
            None,
        )
        .unwrap();
        assert!(ok.same_law(&SpectralModel::independent(), 0.0));
        assert!(SpectralModel::custom("unstd", vec![Atom::new(0.5, 1.0, 2.0, 1.0)], None).is_err());
    }

    #[test]
    fn json_round_trip() {
        for m in zoo() {
            let text = m.spec().to_json();
            let back = SpectralModel::from_json(&text).unwrap();
            assert!(back.same_law(&m, 0.0), "{text}");
        }
        let spec = ModelSpec::from_json(r#"{"form":"logistic","alpha":2.0}"#).unwrap();
        assert_eq!(spec, ModelSpec::Logistic { alpha: 2.0 });
        assert!(ModelSpec::from_json(r#"{"form":"logistic"}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"form":"nope"}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"form":"rho","rho":0.3,"extra":1}"#).is_err());
    }

    #[test]
    fn ratio_supremum() {
        assert_eq!(SpectralModel::independent().ratio_supremum(), f64::INFINITY);
        let d = SpectralModel::discrete(&[0.2, 0.8], &[0.7, 0.3]).unwrap();
        assert_abs_diff_eq!(d.ratio_supremum(), 8.0 / 3.0, epsilon = 1e-15);
        assert_eq!(SpectralModel::logistic(2.0).unwrap().ratio_supremum(), f64::INFINITY);
    }
}
