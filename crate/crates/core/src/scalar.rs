//! Scalar bounds for the exact arithmetic layers.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{Float, FloatConst, FromPrimitive, Signed, ToPrimitive};

/// Exact signed integers: `i64`, `i128` or a big integer.
pub trait ExactInt: Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync {}

impl<T> ExactInt for T where T: Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync {}

/// Floats used for magnitudes and bound comparisons.
pub trait Real: Float + FloatConst + Debug {}

impl<T> Real for T where T: Float + FloatConst + Debug {}

/// Relative tolerance for comparing a float magnitude against a bound.
pub const REL_TOL: f64 = 1e-9;

/// `value <= bound` up to relative tolerance.
pub fn le_tol<F: Real>(value: F, bound: F) -> bool {
    value <= bound + F::from(REL_TOL).unwrap() * bound.abs().max(F::one())
}

/// `value < bound` up to relative tolerance (strict only beyond rounding).
pub fn lt_tol<F: Real>(value: F, bound: F) -> bool {
    value < bound + F::from(REL_TOL).unwrap() * bound.abs().max(F::one())
}

/// Rounds to 12 significant digits, the precision used in all reports.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
