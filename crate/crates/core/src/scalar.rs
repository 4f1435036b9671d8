//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar. Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Maps an angle into `[0, 2π)`.
pub fn canonical<T: Real>(angle: T) -> T {
    let tau = T::TAU();
    let mut a = angle % tau;
    if a < T::zero() {
        a += tau;
    }
    // `-tiny % tau + tau` can round up to exactly tau
    if a >= tau {
        a -= tau;
    }
    a
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_pi<T: Real>(angle: T) -> T {
    let a = canonical(angle);
    if a > T::PI() {
        a - T::TAU()
    } else {
        a
    }
}

/// Absolute distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance<T: Real>(a: T, b: T) -> T {
    wrap_pi(a - b).abs()
}

/// Neumaier-compensated running sum. Results depend only on the order
/// in which terms are added.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}
