//! Species-resolved two-point mode correlators `C_ij = <n_i n_j> - <n_i><n_j>`
//! and the C-dataset of all output-mode pairs.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::species::Species;
use crate::unitary::InterferometerSubmatrix;

/// The sums every species' correlator is assembled from, for one pair
/// `(i, j)` of output modes. With `w_k = U_{q_k,i} U*_{q_k,j}`:
///
/// * `direct   = sum_k |U_{q_k,i}|^2 |U_{q_k,j}|^2`
/// * `exchange = sum_{k != l} w_k w_l^*`, i.e. `U_{q_k,i} U_{q_l,j} U*_{q_l,i} U*_{q_k,j}`
/// * `cross    = sum_{r,s} |U_{q_r,i}|^2 |U_{q_s,j}|^2`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms<T> {
    pub direct: T,
    pub exchange: T,
    pub exchange_imag: T,
    pub cross: T,
    pub n: usize,
}

impl<T: Real> PairTerms<T> {
    /// Correlator of `species` from the precomputed sums.
    pub fn correlator(&self, species: Species) -> T {
        match species {
            Species::Boson => -self.direct + self.exchange,
            Species::Fermion => -self.direct - self.exchange,
            Species::Distinguishable => -self.direct,
            Species::SimulatedBoson => {
                let inv_n = T::one() / T::of_usize(self.n);
                (T::one() - inv_n) * self.exchange - inv_n * self.cross
            }
        }
    }
}

/// Per-submatrix cache of the columns and their squared moduli.
struct Columns<T> {
    n: usize,
    amps: Vec<Vec<Complex<T>>>,
    probs: Vec<Vec<T>>,
    prob_sums: Vec<T>,
}

impl<T: Real> Columns<T> {
    fn new(sub: &InterferometerSubmatrix<T>) -> Self {
        let amps: Vec<Vec<Complex<T>>> = (0..sub.m())
            .map(|i| sub.entries().column(i).collect())
            .collect();
        let probs: Vec<Vec<T>> = amps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
            .collect();
        let prob_sums = probs.iter().map(|p| p.iter().copied().sum()).collect();
        Self {
            n: sub.n(),
            amps,
            probs,
            prob_sums,
        }
    }

    /// 0-based pair; checks the imaginary residue of the exchange sum.
    fn terms(&self, i: usize, j: usize) -> Result<PairTerms<T>> {
        let (a, b) = (&self.amps[i], &self.amps[j]);
        let w: Vec<Complex<T>> = a.iter().zip(b).map(|(x, y)| x * y.conj()).collect();
        let mut exchange = Complex::new(T::zero(), T::zero());
        for (k, wk) in w.iter().enumerate() {
            for (l, wl) in w.iter().enumerate() {
                if k != l {
                    exchange += wk * wl.conj();
                }
            }
        }
        if exchange.im.abs().as_f64() > T::IMAG_TOL {
            return Err(Error::Numerical(format!(
                "imaginary residue {} of the exchange sum for pair ({}, {})",
                exchange.im,
                i + 1,
                j + 1
            )));
        }
        let direct = self.probs[i]
            .iter()
            .zip(&self.probs[j])
            .map(|(p, q)| *p * *q)
            .sum();
        Ok(PairTerms {
            direct,
            exchange: exchange.re,
            exchange_imag: exchange.im,
            cross: self.prob_sums[i] * self.prob_sums[j],
            n: self.n,
        })
    }
}

fn check_pair(m: usize, i: usize, j: usize) -> Result<()> {
    if i == 0 || j == 0 || i > m || j > m {
        return Err(Error::Selection(format!(
            "pair ({i}, {j}) outside modes 1..={m}"
        )));
    }
    if i == j {
        return Err(Error::DiagonalNotDefined(i));
    }
    if i > j {
        return Err(Error::Selection(format!(
            "pair ({i}, {j}) must satisfy i < j"
        )));
    }
    Ok(())
}

/// Sums for the pair `(i, j)`, 1-based with `i < j`.
pub fn pair_terms<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    i: usize,
    j: usize,
) -> Result<PairTerms<T>> {
    check_pair(sub.m(), i, j)?;
    Columns::new(sub).terms(i - 1, j - 1)
}

/// Exact correlator `C_ij` for `species`, 1-based modes with `i < j`.
pub fn correlator<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    i: usize,
    j: usize,
    species: Species,
) -> Result<T> {
    Ok(pair_terms(sub, i, j)?.correlator(species))
}

/// All `m(m-1)/2` off-diagonal correlators of one species and submatrix,
/// in lexicographic `(i, j)` order with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CDataset<T> {
    pub species: Species,
    pub n: usize,
    pub m: usize,
    pub values: Vec<T>,
}

impl<T: Real> CDataset<T> {
    pub fn new(species: Species, n: usize, m: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != pair_count(m) {
            return Err(Error::InvalidDimension(format!(
                "{} values for m = {m}, expected {}",
                values.len(),
                pair_count(m)
            )));
        }
        Ok(Self {
            species,
            n,
            m,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `((i, j), C_ij)` with 1-based modes.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        pairs(self.m).zip(self.values.iter().copied())
    }

    /// 1-based lookup; `i < j` required.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        if i == 0 || i >= j || j > self.m {
            return None;
        }
        Some(self.values[pair_index(self.m, i, j)])
    }
}

pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Lexicographic `(i, j)`, `1 <= i < j <= m`.
pub fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (1..=m).flat_map(move |i| (i + 1..=m).map(move |j| (i, j)))
}

/// Position of the 1-based pair `(i, j)` in [`pairs`] order.
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    let before = (i - 1) * m - (i - 1) * i / 2;
    before + (j - i - 1)
}

fn all_pair_terms<T: Real>(sub: &InterferometerSubmatrix<T>) -> Result<Vec<PairTerms<T>>> {
    let cols = Columns::new(sub);
    let m = sub.m();
    let rows: Vec<Vec<PairTerms<T>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i + 1..m)
                .map(|j| cols.terms(i, j))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// C-dataset of one species.
pub fn c_dataset<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    species: Species,
) -> Result<CDataset<T>> {
    let values = all_pair_terms(sub)?
        .iter()
        .map(|t| t.correlator(species))
        .collect();
    CDataset::new(species, sub.n(), sub.m(), values)
}

/// C-datasets of all four species from a single pass over the pairs,
/// indexed by [`Species::index`].
pub fn c_datasets_all<T: Real>(sub: &InterferometerSubmatrix<T>) -> Result<[CDataset<T>; 4]> {
    let terms = all_pair_terms(sub)?;
    let build = |species| CDataset {
        species,
        n: sub.n(),
        m: sub.m(),
        values: terms.iter().map(|t| t.correlator(species)).collect(),
    };
    Ok(Species::ALL.map(build))
}
