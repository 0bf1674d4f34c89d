//! Structural classification, tail-exponent prediction and Monte Carlo
//! validation for asymptotically linear iterated function systems (ALIFS)
//! on the real line.
//!
//! An ALIFS is driven by i.i.d. random maps `Ψ` that stay within a bounded
//! distance `B` of a random two-slope linear map
//! `Λ(x) = ⁺A·x` for `x > 0`, `⁻A·x` for `x < 0`. The stationary law of the
//! forward iteration `Xₙ = Ψₙ(Xₙ₋₁)` has power tails whose exponents are
//! governed by the 2×2 Cramér transform `P(θ)` of the slope pair.
//!
//! The crate is `no_std` (with `alloc`). Parallel execution, file formats
//! and the command line live in the companion `alifs` crate.
//!
//! Module map:
//!
//! * [`dist`], [`slope`]: scalar laws and their fractional moments;
//! * [`model`]: model families, function draws, the AL bound check;
//! * [`spectral`]: Cramér matrix, Perron root, eigenvectors, case taxonomy;
//! * [`tail_index`]: `κ`, `κ₋`, `κ₊` solvers and the stationary drift;
//! * [`renewal`]: Markov random walk, measure change, lattice test and
//!   tail constants;
//! * [`sim`]: forward/backward iteration, coupled burn-in and empirical
//!   tail statistics.
#![no_std]
#![warn(missing_docs)]
#![deny(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod dist;
pub mod error;
pub mod math;
pub mod model;
pub mod quad;
pub mod renewal;
pub mod rng;
pub mod sim;
pub mod slope;
pub mod spectral;
pub mod tail_index;

pub use dist::{ScalarDist, Sign};
pub use error::{Error, Result};
pub use model::{FunctionSample, ModelSpec, ShapeTag};
pub use rng::RandomStream;
pub use spectral::{CaseTag, CramerMatrix, MomentMethod, SpectralData};
