//! Numerical toolkit for Kronecker point sets on closed horocycles.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! * [`hyperbolic`]: Möbius maps acting on the unit tangent bundle of the
//!   upper half-plane, the point-pair invariant and hyperbolic distance.
//! * [`fuchsian`]: the two group presets (`PSL(2,Z)` and `Γ̄₁(4)`), reduction
//!   to a fundamental domain, the invariant height `Y_Γ` and a sampler for
//!   normalized hyperbolic area.
//! * [`testfun`]: test functions with known reference means.
//! * [`kronecker`]: averages over `{(mα + iy, 0)}` and over closed horocycles.
//! * [`diophantine`]: continued fractions, diophantine type estimates,
//!   `Σ min(M, 1/‖nα‖)` and the escape-to-the-cusp counterexamples.
//! * [`paircorr`]: pair correlation of `n²α mod 1`, its smoothed version and
//!   the theta-sum route through Poisson summation.
//!
//! Hot loops take an [`Executor`] so that the std companion crate can run
//! them on a thread pool; chunking is fixed, so results are bit-identical
//! for any executor.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diophantine;
mod error;
pub mod fuchsian;
pub mod hyperbolic;
pub mod kronecker;
pub(crate) mod math;
pub mod paircorr;
pub mod phase;
pub mod sum;
pub mod testfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sum::{CompensatedSum, Executor, Serial};
