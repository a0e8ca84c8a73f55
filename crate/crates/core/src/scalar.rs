//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a performance score: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Relative tolerance used by iterative routines (Jacobi sweeps) to
    /// decide convergence. Never tighter than a few ulps of the type.
    fn convergence_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values not representable
    /// at all, which never happens for the constants used in this crate.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {
    fn convergence_tol() -> Self {
        8.0 * f32::EPSILON
    }
}

impl Scalar for f64 {
    fn convergence_tol() -> Self {
        1e-12
    }
}

/// Rounds half-to-even at `decimals` places. Used only at report emission.
pub fn round_half_even(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let rounded = (value * scale).round_ties_even() / scale;
    // avoid emitting "-0.0000"
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Formats a value rounded half-to-even to 4 decimals, the precision of all
/// emitted tables.
pub fn fmt4(value: f64) -> String {
    format!("{:.4}", round_half_even(value, 4))
}
