//! Floating-point scalar abstraction shared by the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the linear algebra, LP, and clustering kernels.
///
/// Implemented for `f32` and `f64`. The tolerance constants are tuned per
/// precision; everything privacy-related runs in `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Smallest admissible pivot magnitude in the simplex method.
    const PIVOT_TOL: f64;
    /// Primal feasibility tolerance.
    const FEAS_TOL: f64;
    /// Dual (reduced cost) optimality tolerance.
    const OPT_TOL: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const PIVOT_TOL: f64 = 1e-9;
    const FEAS_TOL: f64 = 1e-8;
    const OPT_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const PIVOT_TOL: f64 = 1e-5;
    const FEAS_TOL: f64 = 1e-4;
    const OPT_TOL: f64 = 1e-5;
}
