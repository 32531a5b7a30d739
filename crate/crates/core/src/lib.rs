//! Exact factorization of black-box polynomials into products of linear
//! forms.
//!
//! Three independent algorithms are provided:
//!
//! * [`lieform`]: reduction to simultaneous diagonalization of the Lie
//!   algebra of `f`, for products of linearly independent forms;
//! * [`bivproj`]: interpolation and affine factorization of bivariate
//!   projections after a random change of variables;
//! * [`hyper`]: recovery of the hyperplanes in the zero set of `f` from
//!   intersections with random lines.
//!
//! All arithmetic is over the rationals and exact. Randomness is drawn from a
//! seeded [`RandomSource`], so every run is reproducible.

pub mod bivproj;
pub mod error;
pub mod exactmath;
pub mod factorization;
pub mod hyper;
pub mod lie;
pub mod lieform;
pub mod oracle;
mod par;
pub mod random;
pub mod verify;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use factorization::{Factorization, LinearForm};
pub use oracle::PolyOracle;
pub use par::is_parallel;
pub use random::RandomSource;
