//! Haar-random unitaries, input-mode selections and interferometer submatrices.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::rng::RngSeed;
use crate::scalar::Real;

/// Square matrix whose unitarity residual is within `T::UNITARITY_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() == 0 {
            return Err(Error::InvalidDimension("m must be at least 1".into()));
        }
        let residual = unitarity_residual(&matrix)?;
        if residual.as_f64() > T::UNITARITY_TOL {
            return Err(Error::Numerical(format!(
                "unitarity residual {residual} exceeds tolerance"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(CMatrix::identity(m))
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }
}

/// Occupied input modes, 1-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputSelection {
    modes: Vec<usize>,
}

impl InputSelection {
    pub fn new(modes: Vec<usize>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Selection(
                "at least one input mode is required".into(),
            ));
        }
        if modes[0] == 0 {
            return Err(Error::Selection("mode indices are 1-based".into()));
        }
        if modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Selection(format!(
                "modes {modes:?} are not strictly increasing"
            )));
        }
        Ok(Self { modes })
    }

    /// Modes `1..=n`.
    pub fn first(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    /// Uniformly random `n`-subset of `1..=m`.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > m {
            return Err(Error::Selection(format!("cannot choose {n} of {m} modes")));
        }
        let mut modes: Vec<usize> = rand::seq::index::sample(rng, m, n)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        modes.sort_unstable();
        Self::new(modes)
    }

    pub fn n(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }
}

/// The `n x m` block of a unitary whose rows are the occupied input modes.
///
/// Rows have unit norm to `T::UNITARITY_TOL`. `n <= m` is accepted here so
/// that balanced two-mode setups (`n = m = 2`) can be expressed; `n < m`
/// is enforced where a selection is extracted from a circuit and by the
/// ensemble predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSubmatrix<T> {
    entries: CMatrix<T>,
}

impl<T: Real> InterferometerSubmatrix<T> {
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        let (n, m) = (entries.rows(), entries.cols());
        if n == 0 {
            return Err(Error::InvalidDimension(
                "submatrix needs at least one row".into(),
            ));
        }
        if n > m {
            return Err(Error::InvalidDimension(format!(
                "{n} particles exceed {m} modes"
            )));
        }
        for k in 0..n {
            let norm: T = entries
                .row(k)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<T>()
                .sqrt();
            if (norm - T::one()).abs().as_f64() > T::UNITARITY_TOL {
                return Err(Error::Numerical(format!("row {} has norm {norm}", k + 1)));
            }
        }
        Ok(Self { entries })
    }

    /// Particle count.
    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    /// Mode count.
    pub fn m(&self) -> usize {
        self.entries.cols()
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    /// Amplitude from the `k`-th occupied input (0-based) to output mode `i` (0-based).
    pub fn amplitude(&self, k: usize, i: usize) -> Complex<T> {
        self.entries[(k, i)]
    }

    /// Same submatrix with output-mode columns reordered: column `c` of
    /// the result is column `perm[c]` of `self`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.m()];
        if perm.len() != self.m()
            || perm
                .iter()
                .any(|&p| p >= self.m() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Selection(
                "not a permutation of the output modes".into(),
            ));
        }
        Ok(Self {
            entries: self.entries.select_columns(perm),
        })
    }
}

/// `max |(U^dagger U - I)_ab|`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> Result<T> {
    if !u.is_square() {
        return Err(Error::InvalidDimension(format!(
            "{}x{} matrix is not square",
            u.rows(),
            u.cols()
        )));
    }
    let m = u.rows();
    let mut worst = T::zero();
    for a in 0..m {
        for b in a..m {
            let mut acc = Complex::new(T::zero(), T::zero());
            for r in 0..m {
                acc += u[(r, a)].conj() * u[(r, b)];
            }
            if a == b {
                acc.re -= T::one();
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst)
}

/// Haar-distributed `m x m` unitary drawn from stream 0 of `seed`.
pub fn haar_unitary<T: Real>(m: usize, seed: &RngSeed) -> Result<UnitaryMatrix<T>> {
    haar_unitary_with(m, &mut seed.rng(0))
}

/// Haar-distributed unitary from a caller-supplied generator.
///
/// QR-decomposes a complex Ginibre matrix and multiplies column `j` of
/// `Q` by `r_jj / |r_jj|`, which makes the factorisation unique and the
/// resulting distribution exactly Haar.
pub fn haar_unitary_with<T: Real, R: Rng + ?Sized>(
    m: usize,
    rng: &mut R,
) -> Result<UnitaryMatrix<T>> {
    if m == 0 {
        return Err(Error::InvalidDimension("m must be at least 1".into()));
    }
    let q = phase_fixed_q(ginibre(m, m, rng));
    Ok(UnitaryMatrix { matrix: q })
}

/// `n` rows of a Haar-distributed `m x m` unitary without forming the rest.
///
/// The first `n` columns of the phase-fixed Q factor depend only on the
/// first `n` Ginibre columns, and `U^T` is Haar whenever `U` is, so the
/// transpose of a thin phase-fixed QR of an `m x n` Ginibre block has the
/// same law as any `n` rows of a Haar unitary. Cost is `O(m n^2)`.
pub fn haar_submatrix_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<InterferometerSubmatrix<T>> {
    if n == 0 || n >= m {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= n < m, got n={n}, m={m}"
        )));
    }
    let q = phase_fixed_q(ginibre(m, n, rng));
    Ok(InterferometerSubmatrix {
        entries: q.transpose(),
    })
}

/// Rows `sel` of `u`, bit-exact.
pub fn extract_submatrix<T: Real>(
    u: &UnitaryMatrix<T>,
    sel: &InputSelection,
) -> Result<InterferometerSubmatrix<T>> {
    let m = u.m();
    if let Some(&bad) = sel.modes().iter().find(|&&q| q > m) {
        return Err(Error::Selection(format!("mode {bad} out of range 1..={m}")));
    }
    if sel.n() >= m {
        return Err(Error::InvalidDimension(format!(
            "need n < m, got n={}, m={m}",
            sel.n()
        )));
    }
    let rows: Vec<usize> = sel.modes().iter().map(|q| q - 1).collect();
    Ok(InterferometerSubmatrix {
        entries: u.matrix().select_rows(&rows),
    })
}

fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::of(re * scale), T::of(im * scale))
        })
        .collect();
    CMatrix::from_vec(rows, cols, data).expect("shape matches")
}

/// Thin Householder QR of a tall `rows x cols` matrix; returns the
/// `rows x cols` orthonormal factor with column `j` rotated by the phase
/// of `r_jj`.
fn phase_fixed_q<T: Real>(mut a: CMatrix<T>) -> CMatrix<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut reflectors: Vec<Option<Vec<Complex<T>>>> = Vec::with_capacity(cols);
    let mut diag_phase = Vec::with_capacity(cols);

    for k in 0..cols {
        let x: Vec<Complex<T>> = (k..rows).map(|r| a[(r, k)]).collect();
        let sigma = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let x0_abs = x[0].norm();
        let phase = if x0_abs > T::zero() {
            x[0] / x0_abs
        } else {
            one
        };
        if sigma == T::zero() || x.len() == 1 {
            // Nothing to annihilate; r_kk is the entry itself.
            reflectors.push(None);
            diag_phase.push(phase);
            continue;
        }
        // H x = alpha e1 with alpha = -phase * sigma, v = x - alpha e1.
        let alpha = -phase * sigma;
        let mut v = x;
        v[0] -= alpha;
        let beta = T::of(2.0) / v.iter().map(|z| z.norm_sqr()).sum::<T>();
        for c in k..cols {
            let mut s = zero;
            for (off, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + off, c)];
            }
            let s = s * beta;
            for (off, vi) in v.iter().enumerate() {
                let upd = *vi * s;
                a[(k + off, c)] -= upd;
            }
        }
        diag_phase.push(-phase);
        reflectors.push(Some(v.into_iter().map(|z| z * beta.sqrt()).collect()));
    }

    // Q = H_0 H_1 ... H_{cols-1} applied to the first `cols` columns of I.
    let mut q = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        q[(j, j)] = one;
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        let Some(v) = v else { continue };
        for c in 0..cols {
            let mut s = zero;
            for (off, vi) in v.iter().enumerate() {
                s += vi.conj() * q[(k + off, c)];
            }
            for (off, vi) in v.iter().enumerate() {
                let upd = *vi * s;
                q[(k + off, c)] -= upd;
            }
        }
    }
    for (c, ph) in diag_phase.iter().enumerate() {
        for r in 0..rows {
            q[(r, c)] *= ph;
        }
    }
    q
}
