//! Lifetime distributions of parallel systems built from independent Weibull
//! components with a common shape, and grid-based verification of the usual
//! stochastic, hazard rate, reverse hazard rate and likelihood ratio orders
//! between two such systems.
//!
//! Weibull components use the rate parameterisation `W(alpha, lambda)` with
//! survival `exp(-(lambda t)^alpha)`. A larger `lambda` gives a stochastically
//! smaller lifetime. This is the reciprocal of the scale used by most
//! statistics libraries.
//!
//! The distribution code (`special_fns`, `weibull`, `parallel`,
//! `majorization`) is generic over [`Real`], so it runs in `f32` or `f64`.
//! The verification harness (`ordering`, `mc_oracle`, `verify`, `cli`) works
//! in `f64`.

pub mod cli;
pub mod error;
pub mod majorization;
pub mod mc_oracle;
pub mod ordering;
pub mod parallel;
pub mod rng;
pub mod scalar;
pub mod special_fns;
pub mod verify;
pub mod weibull;

pub use error::{Error, Result};
pub use majorization::{is_majorized, is_weakly_majorized, ParamVector};
pub use ordering::{GridSpec, Order, OrderingVerdict, Verdict};
pub use parallel::ParallelSystem;
pub use scalar::Real;
pub use verify::{TheoremId, TheoremReport};
pub use weibull::Weibull;

/// Single Weibull component in double precision.
pub type Weibull64 = Weibull<f64>;
/// Single Weibull component in single precision.
pub type Weibull32 = Weibull<f32>;
/// Parallel system in double precision.
pub type ParallelSystem64 = ParallelSystem<f64>;
/// Parallel system in single precision.
pub type ParallelSystem32 = ParallelSystem<f32>;
/// Scale-parameter vector in double precision.
pub type ParamVector64 = ParamVector<f64>;
