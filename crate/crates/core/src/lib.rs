//! Lorentzian reflection groups on the divisor lattice of Calabi-Yau complete
//! intersections in products of projective spaces.
//!
//! The crate works entirely in `N^1(X)` with the basis `h_1, ..., h_l` of
//! pulled-back hyperplane classes. Intersection numbers, Gram matrices,
//! reflections and cone membership are exact over the rationals; quantities
//! that are irrational by nature (expanding eigenvalues, digamma values) are
//! carried either in a real quadratic field or in binary64.
//!
//! Indices are 0-based throughout the library. The command-line front end
//! converts to the 1-based labels used for factors in the literature.

pub mod ambient;
pub mod cones;
pub mod digamma;
pub mod error;
pub mod lorentz;
pub mod matrix;
pub mod poly;
pub mod quadratic;
pub mod scalar;
pub mod series;
pub mod summation;
pub mod volume;
pub mod weyl;

pub use ambient::AmbientSpace;
pub use error::{Error, Result};
pub use quadratic::QuadraticNumber;
pub use scalar::{parse_rational, Scalar, Q};
pub use weyl::{DivisorClass, Word};
