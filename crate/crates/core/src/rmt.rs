//! Haar-ensemble moments `E_U[C]`, `E_U[C^2]`, `E_U[C^3]` of a fixed-pair
//! correlator and the benchmark statistics derived from them.
//!
//! The closed forms are rational functions of `(n, m)`. They are written
//! once, generically over any field-like scalar, and evaluated either in
//! floating point (with every denominator kept as a product of linear
//! factors) or exactly in [`BigRational`].

use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::species::Species;

/// Raw (non-central) first three moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple<T> {
    pub m1: T,
    pub m2: T,
    pub m3: T,
}

impl<T: Real> MomentTriple<T> {
    pub fn new(m1: T, m2: T, m3: T) -> Self {
        Self { m1, m2, m3 }
    }

    pub fn variance(&self) -> T {
        self.m2 - self.m1 * self.m1
    }

    /// Normalised mean, signed coefficient of variation and skewness for
    /// `n` particles in `m` modes.
    pub fn statistics(&self, n: usize, m: usize) -> Result<BenchmarkStatistics<T>> {
        if self.m1 == T::zero() {
            return Err(Error::CvUndefined);
        }
        let var = self.variance();
        if !(var > T::zero()) {
            return Err(Error::SkewnessUndefined);
        }
        let (m1, m2, m3) = (self.m1, self.m2, self.m3);
        let mf = T::of_usize(m);
        let two = T::of(2.0);
        let three = T::of(3.0);
        Ok(BenchmarkStatistics {
            nm: m1 * mf * mf / T::of_usize(n),
            cv: var.sqrt() / m1,
            s: (m3 - three * m1 * m2 + two * m1 * m1 * m1) / (var * var.sqrt()),
        })
    }
}

/// Normalised mean `NM = E[C] m^2 / n`, coefficient of variation
/// `CV = sd / mean` (sign of the mean kept) and skewness `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkStatistics<T> {
    pub nm: T,
    pub cv: T,
    pub s: T,
}

/// Scalars the closed forms can be evaluated in.
pub trait RmtScalar: Clone + Num + Neg<Output = Self> + FromPrimitive {}

impl<T: Clone + Num + Neg<Output = T> + FromPrimitive> RmtScalar for T {}

fn check_domain(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("at least one particle is required".into()));
    }
    if n >= m {
        return Err(Error::Domain(format!(
            "predictions need m > n, got n={n}, m={m}"
        )));
    }
    Ok(())
}

/// Floating-point ensemble moments.
pub fn rmt_moments<T: Real>(species: Species, n: usize, m: usize) -> Result<MomentTriple<T>> {
    check_domain(n, m)?;
    let [m1, m2, m3] = closed_form::<T>(species, n, m);
    Ok(MomentTriple { m1, m2, m3 })
}

/// Exact rational ensemble moments `[E[C], E[C^2], E[C^3]]`.
pub fn rmt_moments_exact(species: Species, n: usize, m: usize) -> Result<[BigRational; 3]> {
    check_domain(n, m)?;
    Ok(closed_form::<BigRational>(species, n, m))
}

/// Exact moments rounded to the nearest `f64` only at the end.
pub fn rmt_moments_rounded(species: Species, n: usize, m: usize) -> Result<MomentTriple<f64>> {
    let [a, b, c] = rmt_moments_exact(species, n, m)?;
    let f = |q: BigRational| num_traits::ToPrimitive::to_f64(&q).expect("finite rational");
    Ok(MomentTriple {
        m1: f(a),
        m2: f(b),
        m3: f(c),
    })
}

/// Ensemble benchmark statistics.
pub fn rmt_statistics<T: Real>(
    species: Species,
    n: usize,
    m: usize,
) -> Result<BenchmarkStatistics<T>> {
    rmt_moments::<T>(species, n, m)?.statistics(n, m)
}

pub fn exact_to_big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn closed_form<T: RmtScalar>(species: Species, n: usize, m: usize) -> [T; 3] {
    let k = |x: i64| T::from_i64(x).expect("small integer constant");
    let n = T::from_usize(n).expect("particle count");
    let m = T::from_usize(m).expect("mode count");
    let pow = |x: &T, e: u32| (0..e).fold(T::one(), |acc, _| acc * x.clone());
    let (n1, n2, n3, n4, n5) = (n.clone(), pow(&n, 2), pow(&n, 3), pow(&n, 4), pow(&n, 5));
    let (m2, m3) = (pow(&m, 2), pow(&m, 3));
    let sh = |x: &T, c: i64| x.clone() + k(c);

    // Shared denominators, kept in factored form.
    // m (m^2 - 1) = (m-1) m (m+1)
    let d1 = sh(&m, -1) * m.clone() * sh(&m, 1);
    // m^2 (m+2)(m+3)(m^2-1)
    let d2 = m2.clone() * sh(&m, 2) * sh(&m, 3) * sh(&m, -1) * sh(&m, 1);
    // m^2 (m+1)(m+2)(m+3)(m+4)(m+5)(m^2-1)
    let d3_with_m1 = d2.clone() * sh(&m, 1) * sh(&m, 4) * sh(&m, 5);
    // m^2 (m+2)(m+3)(m+4)(m+5)(m^2-1)
    let d3 = d2.clone() * sh(&m, 4) * sh(&m, 5);

    match species {
        Species::Boson => {
            let first = n1.clone() * (-m.clone() - n.clone() + k(2)) / d1;
            let second = k(2)
                * n1.clone()
                * (m2.clone() * n1.clone() + m2.clone() + k(9) * m.clone() * n1.clone()
                    - k(11) * m.clone()
                    + n3.clone()
                    - k(2) * n2.clone()
                    + k(5) * n1.clone()
                    - k(4))
                / d2;
            let num_a = m3.clone() * n2.clone()
                + k(15) * m3.clone() * n1.clone()
                + k(2) * m3.clone()
                + k(3) * m2.clone() * n3.clone()
                + k(6) * m2.clone() * n2.clone()
                + k(213) * m2.clone() * n1.clone()
                - k(222) * m2.clone()
                - k(3) * m.clone() * n4.clone();
            let num_b = k(45) * m.clone() * n3.clone()
                + k(32) * m.clone() * n2.clone()
                + k(372) * m.clone() * n1.clone()
                - k(464) * m.clone()
                + k(3) * n5.clone()
                - k(6) * n4.clone()
                + k(45) * n3.clone()
                + k(78) * n2.clone()
                + k(168) * n1.clone()
                - k(288);
            let third = -(k(2) * n1.clone()) * (num_a + num_b) / d3_with_m1;
            [first, second, third]
        }
        Species::Fermion => {
            let mn = m.clone() - n.clone();
            let first = n1.clone() * (n.clone() - m.clone()) / d1;
            let second = k(2) * n1.clone() * sh(&n, 1) * mn.clone() * sh(&mn, 1) / d2;
            let third =
                -(k(6) * n1.clone() * sh(&n, 1) * sh(&n, 2) * mn.clone() * sh(&mn, 1) * sh(&mn, 2))
                    / d3_with_m1;
            [first, second, third]
        }
        Species::Distinguishable => {
            let first = -n1.clone() / (m.clone() * sh(&m, 1));
            let second = n1.clone()
                * (m2.clone() * n1.clone() + k(3) * m2.clone() + m.clone() * n1.clone()
                    - k(5) * m.clone()
                    + k(2) * n1.clone()
                    - k(2))
                / d2;
            let third = -(n1.clone()
                * (m2.clone() * n2.clone()
                    + k(9) * m2.clone() * n1.clone()
                    + k(26) * m2.clone()
                    + k(5) * m.clone() * n2.clone()
                    + k(21) * m.clone() * n1.clone()
                    - k(62) * m.clone()
                    + k(12) * n2.clone()
                    + k(60) * n1.clone()
                    - k(72)))
                / d3;
            [first, second, third]
        }
        Species::SimulatedBoson => {
            let first = -(n1.clone() * (m.clone() + n.clone() - k(2))) / d1;
            let num2 = (k(4) * m.clone() * n1.clone() - m.clone() - k(14) * n2.clone()
                + k(8) * n1.clone()
                - k(2))
                + (k(2) * m2.clone() * n3.clone() - m2.clone() * n2.clone()
                    + k(4) * m2.clone() * n1.clone()
                    - m2.clone()
                    + k(18) * m.clone() * n3.clone()
                    - k(25) * m.clone() * n2.clone()
                    + k(2) * n5.clone()
                    - k(4) * n4.clone()
                    + k(10) * n3.clone());
            let second = num2 / (d2 * n1.clone());
            let (n6, n7, n8) = (pow(&n, 6), pow(&n, 7), pow(&n, 8));
            let row1 = -(k(2) * m3.clone() * n5.clone()) - k(21) * m3.clone() * n4.clone()
                + k(30) * m3.clone() * n3.clone()
                - k(41) * m3.clone() * n2.clone()
                - k(10) * m3.clone() * n1.clone()
                + k(8) * m3.clone()
                - k(6) * m2.clone() * n6.clone()
                - k(3) * m2.clone() * n5.clone();
            let row2 = -(k(285) * m2.clone() * n4.clone())
                + k(261) * m2.clone() * n3.clone()
                + k(75) * m2.clone() * n2.clone()
                - k(66) * m2.clone() * n1.clone()
                + k(24) * m2.clone()
                + k(6) * m.clone() * n7.clone()
                - k(90) * m.clone() * n6.clone()
                - k(55) * m.clone() * n5.clone();
            let row3 = -(k(360) * m.clone() * n4.clone())
                + k(591) * m.clone() * n3.clone()
                + k(8) * m.clone() * n2.clone()
                - k(128) * m.clone() * n1.clone()
                + k(64) * m.clone();
            let row4 =
                -(k(6) * n8) + k(12) * n7 - k(90) * n6 - k(120) * n5.clone() - k(24) * n4.clone()
                    + k(396) * n3.clone()
                    - k(168) * n2.clone()
                    - k(48) * sh(&n, -1);
            // (m-1) m^2 (m+1)^2 (m+2)(m+3)(m+4)(m+5) n^2
            let d = d3_with_m1 * n2.clone();
            let third = (row1 + row2 + row3 + row4) / d;
            [first, second, third]
        }
    }
}
