//! Character sums, power-residue sieves and point counts over `F_q(T)`.

pub mod arith;
pub mod characters;
pub mod charsums;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod form;
pub mod geometry;
pub mod identities;
pub mod report;
pub mod scalar;
pub mod sieve;

pub use error::{Error, Result};

/// Exact values in `Z[ζ_p, ζ_ℓ]` with machine integers.
pub type CycValue = cyclotomic::Cyclotomic<i64>;

/// Exact rationals for sieve terms.
pub type Rational = num_rational::Ratio<i128>;
