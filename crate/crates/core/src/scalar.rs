//! Floating-point scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used for matrix entries, correlators and statistics.
///
/// Implemented for `f32` and `f64`. Tolerances are per-type: the `f64`
/// values are the contract values; the `f32` values are scaled to its
/// epsilon so the same checks stay meaningful in single precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Max-norm bound on `U^dagger U - I` and on row-norm deviations.
    const UNITARITY_TOL: f64;
    /// Bound on the imaginary residue of an assembled correlator.
    const IMAG_TOL: f64;
    /// Most negative probability tolerated before clamping to zero.
    const NEGATIVITY_TOL: f64;
    /// Allowed deviation of a distribution's total mass from one.
    const NORMALIZATION_TOL: f64;

    /// Lossless for `f64`, rounding for `f32`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f64 {
    const UNITARITY_TOL: f64 = 1e-10;
    const IMAG_TOL: f64 = 1e-12;
    const NEGATIVITY_TOL: f64 = 1e-14;
    const NORMALIZATION_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const UNITARITY_TOL: f64 = 1e-4;
    const IMAG_TOL: f64 = 1e-5;
    const NEGATIVITY_TOL: f64 = 1e-6;
    const NORMALIZATION_TOL: f64 = 1e-4;
}

/// Kahan–Babuska (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
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

    pub fn total(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    values.into_iter().collect::<CompensatedSum<T>>().total()
}
