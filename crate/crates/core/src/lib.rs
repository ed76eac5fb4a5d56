//! Ratios of bivariate extremes: spectral models of bivariate Fréchet
//! max-stable laws, the distribution of `X/Y`, simulation, tail-index
//! estimation and a gamma test for asymptotic independence of ratio maxima.

pub mod dist;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod gammatest;
pub mod quad;
pub mod sampler;
pub mod special;
pub mod spectral;

pub use dist::{Boundary, GammaFn, Method, Norms, Side};
pub use error::{Error, Result};
pub use estimate::{hill, HillEstimate};
pub use exec::{stream_rng, Exec};
pub use gammatest::{gamma_test, GammaTestReport, Variant};
pub use sampler::{PairSampler, SampleBatch};
pub use spectral::{Atom, DensityKind, FormTag, ModelSpec, SpectralDensity, SpectralModel};
