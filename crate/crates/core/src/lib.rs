//! Hausdorff operators on Bergman spaces `A^p` of the upper half-plane.
//!
//! The crate evaluates the dilation average
//!
//! ```text
//! H_mu(f)(z) = ∫_0^∞ (1/t) f(z/t) dmu(t),   Im z > 0,
//! ```
//!
//! its Bergman adjoint `H*_mu(f)(z) = ∫ t f(tz) dmu(t)`, and estimates
//! normalized area norms `((1/π) ∫ |f|^p dA)^{1/p}` by nested adaptive
//! Gauss-Kronrod quadrature in polar coordinates. The [`harness`] module
//! turns these pieces into runnable experiments that check the moment
//! criterion `||H_mu|| = ∫ t^{2/p-1} dmu(t)` and its sharpness.
//!
//! Parallel evaluation uses rayon when the `parallel` feature is enabled
//! (the default). All reductions run in a fixed order, so results are
//! bit-identical with and without the feature.

pub mod error;
pub mod halfplane;
pub mod harness;
pub mod measure;
pub mod operator;
mod par;
pub mod quadrature;

pub use error::{Error, Result};
pub use halfplane::{
    DecayHint, FunctionSpec, HalfPlaneFunction, HalfPlanePoint, ModulusFunction, Sector,
    SectorCase, TestFunction,
};
pub use measure::{Atom, Boundedness, Density, DensitySegment, EndpointExponents, Measure, Moment};
pub use operator::HausdorffOperator;
pub use quadrature::{ErrorPolicy, IntegralResult, QuadratureConfig};

pub use num_complex::Complex64;

/// Whether this build was compiled with the `parallel` feature.
pub const fn parallel_available() -> bool {
    par::available()
}
