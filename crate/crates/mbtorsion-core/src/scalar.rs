//! Scalar abstraction for the numerical kernels.
//!
//! Everything numeric in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The trait is a thin bundle over the
//! `num-traits` floating-point traits plus the conversions the solvers need:
//! literal injection from `f64` (all tolerances and geometry constants are
//! written as `f64` literals) and lossless extraction to `f64` for reporting
//! and CSV output.
//!
//! `f64` is the working precision for every documented tolerance; the `f32`
//! instantiation exists for storage-constrained callers and is exercised by
//! smoke tests only.

use num_traits::{Float, FloatConst, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar usable by all meshes, operators and solvers.
pub trait Real:
    Float + FloatConst + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Injects an `f64` literal (rounding to the nearest representable value).
    fn of(x: f64) -> Self;

    /// Widens to `f64` (exact for both supported scalars).
    fn to_f64(self) -> f64;

    /// Injects a `usize` count (exact for the grid sizes in use).
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hypot_generic<T: Real>(a: T, b: T) -> T {
        (a * a + b * b).sqrt()
    }

    #[test]
    fn literal_injection_round_trips() {
        assert_eq!(f64::of(0.25), 0.25);
        assert_eq!(f32::of(0.25), 0.25_f32);
        assert_eq!(0.25_f64.to_f64(), 0.25);
        assert_eq!(f64::of_usize(4096), 4096.0);
    }

    #[test]
    fn generic_code_runs_in_both_precisions() {
        assert_eq!(hypot_generic(3.0_f64, 4.0_f64), 5.0);
        assert!((hypot_generic(3.0_f32, 4.0_f32) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn constants_available_through_trait() {
        fn pi<T: Real>() -> T {
            T::PI()
        }
        assert_eq!(pi::<f64>(), std::f64::consts::PI);
    }
}
