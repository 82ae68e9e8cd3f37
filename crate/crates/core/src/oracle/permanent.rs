use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::Real;

/// Largest matrix order [`permanent`] accepts.
pub const PERMANENT_MAX_N: usize = 16;

/// Permanent by Ryser's formula with Gray-code subset iteration, `O(2^n n)`.
///
/// `perm(A) = (-1)^n sum_{S subset of cols} (-1)^{|S|} prod_i sum_{j in S} a_ij`.
/// Consecutive Gray codes differ in one column, so the row sums are
/// updated by adding or removing that column. The sign of a term is
/// `(-1)^{n - |S|}`.
pub fn permanent<T: Real>(a: &CMatrix<T>) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "{}x{} matrix is not square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > PERMANENT_MAX_N {
        return Err(Error::SizeCap(format!(
            "permanent of order {n} exceeds cap {PERMANENT_MAX_N}"
        )));
    }
    if n == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let mut row_sums = vec![Complex::<T>::zero(); n];
    let mut total = Complex::<T>::zero();
    let mut gray: u32 = 0;
    let mut subset_size = 0usize;
    for step in 1u32..(1u32 << n) {
        let col = step.trailing_zeros() as usize;
        let bit = 1u32 << col;
        gray ^= bit;
        if gray & bit != 0 {
            subset_size += 1;
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += a[(r, col)];
            }
        } else {
            subset_size -= 1;
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(r, col)];
            }
        }
        let prod = row_sums
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, s| acc * s);
        if (n - subset_size) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Real>(a: &CMatrix<T>) -> Result<Complex<T>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "{}x{} matrix is not square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut det = Complex::new(T::one(), T::zero());
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&x, &y| {
                w[(x, c)]
                    .norm()
                    .partial_cmp(&w[(y, c)].norm())
                    .expect("finite")
            })
            .expect("nonempty");
        if w[(pivot, c)].norm() == T::zero() {
            return Ok(Complex::zero());
        }
        if pivot != c {
            for k in 0..n {
                let tmp = w[(c, k)];
                w[(c, k)] = w[(pivot, k)];
                w[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = w[(c, c)];
        det *= p;
        for r in c + 1..n {
            let f = w[(r, c)] / p;
            for k in c..n {
                let upd = f * w[(c, k)];
                w[(r, k)] -= upd;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let id = CMatrix::<f64>::identity(3);
        assert!((permanent(&id).unwrap() - 1.0).norm() < 1e-15);
        let ones = CMatrix::<f64>::from_real_rows(&[&[1.0; 3], &[1.0; 3], &[1.0; 3]], 1.0).unwrap();
        assert!((permanent(&ones).unwrap() - 6.0).norm() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bs = CMatrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]], h).unwrap();
        assert!(permanent(&bs).unwrap().norm() < 1e-15);
        assert!((determinant(&bs).unwrap() + 1.0).norm() < 1e-15);
        assert!((permanent(&CMatrix::<f64>::zeros(0, 0)).unwrap() - 1.0).norm() == 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            permanent(&CMatrix::<f64>::zeros(2, 3)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            permanent(&CMatrix::<f64>::zeros(17, 17)),
            Err(Error::SizeCap(_))
        ));
        assert!(matches!(
            determinant(&CMatrix::<f64>::zeros(2, 3)),
            Err(Error::InvalidDimension(_))
        ));
    }
}
