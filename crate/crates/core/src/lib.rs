//! Relative Rota-Baxter operators of weight zero on groups, and the
//! structures they generate: descendent groups, braces, set-theoretic
//! Yang-Baxter solutions, structure groups, T-structures, a numeric
//! matrix-group module, and an exact truncated Baker-Campbell-Hausdorff
//! engine.

pub mod bch;
pub mod domain;
pub mod error;
pub mod groups;
pub mod lie;
pub mod perm_rb;
pub mod rbops;
pub mod report;
pub mod tstruct;
pub mod ybe;

pub use error::CoreError;
pub use groups::{AbSignature, IntVec, Perm};
pub use report::Report;

/// Default exact scalar for the truncated series engine.
pub type Rat = num_rational::BigRational;
/// Truncated noncommutative polynomial over the default exact scalar.
pub type NcPolyRat = bch::NcPoly<Rat>;

/// Double-precision 2x2 matrix, the default for the numeric checks.
pub type Mat2f64 = lie::Mat2<f64>;
/// Single-precision 2x2 matrix.
pub type Mat2f32 = lie::Mat2<f32>;
/// Double-precision plane vector.
pub type Vec2f64 = lie::Vec2<f64>;
/// Single-precision plane vector.
pub type Vec2f32 = lie::Vec2<f32>;
