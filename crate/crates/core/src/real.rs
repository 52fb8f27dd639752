//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar the simulator is generic over.
///
/// Implemented for `f32` and `f64`. Double precision is the intended
/// working type; the tolerances quoted throughout the docs are for `f64`
/// and widen automatically with [`Real::tolerance`] for coarser types.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// A tolerance of `nominal` in double precision, widened to a few
    /// hundred ulps for types whose epsilon makes `nominal` unreachable.
    #[inline]
    fn tolerance(nominal: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        Self::lit(nominal).max(floor)
    }

    /// Lossy conversion used for diagnostics and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

/// `ln(n!)` for `n = 0..=max`, accumulated as a running sum of logarithms.
pub(crate) fn ln_factorials<T: Real>(max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = T::zero();
    out.push(acc);
    for k in 1..=max {
        acc += T::from_count(k).ln();
        out.push(acc);
    }
    out
}
