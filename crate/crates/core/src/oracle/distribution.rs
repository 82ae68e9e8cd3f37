use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::permanent::{determinant, permanent};
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::scalar::{compensated_sum, Real};
use crate::species::Species;
use crate::unitary::InterferometerSubmatrix;

pub const BOSON_MAX_N: usize = 5;
pub const BOSON_MAX_M: usize = 12;
pub const FERMION_MAX_N: usize = 10;
pub const FERMION_MAX_M: usize = 16;
pub const DEFAULT_PHASE_SAMPLES: usize = 100_000;

/// Output occupation vector `y`, `sum y_i = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutputConfiguration(pub Vec<usize>);

impl OutputConfiguration {
    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).product::<usize>() as f64)
            .product()
    }

    /// Output column indices, each mode repeated by its occupation.
    fn column_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
            .collect()
    }
}

/// Exact (or phase-averaged) probabilities over output configurations,
/// sorted in colexicographic order of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution<T> {
    pub species: Species,
    pub n: usize,
    pub m: usize,
    pub entries: Vec<(OutputConfiguration, T)>,
}

impl<T: Real> OutputDistribution<T> {
    pub fn probability(&self, y: &[usize]) -> T {
        self.entries
            .iter()
            .find(|(c, _)| c.0 == y)
            .map_or(T::zero(), |(_, p)| *p)
    }

    pub fn total_mass(&self) -> T {
        compensated_sum(self.entries.iter().map(|(_, p)| *p))
    }

    /// Mean occupation `<n_i>` of each mode.
    pub fn mean_occupations(&self) -> Vec<T> {
        (0..self.m)
            .map(|i| compensated_sum(self.entries.iter().map(|(y, p)| *p * T::of_usize(y.0[i]))))
            .collect()
    }
}

fn colex(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// All `y` with `sum y = n`, colex order.
fn all_configurations(n: usize, m: usize) -> Vec<OutputConfiguration> {
    fn rec(mode: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if mode + 1 == cur.len() {
            cur[mode] = left;
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[mode] = k;
            rec(mode + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut vec![0; m], &mut out);
    out.sort_by(|a, b| colex(a, b));
    out.into_iter().map(OutputConfiguration).collect()
}

/// Binary `y` with `sum y = n`, colex order.
fn binary_configurations(n: usize, m: usize) -> Vec<OutputConfiguration> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let mut y = vec![0; m];
        for &i in &idx {
            y[i] = 1;
        }
        out.push(y);
        // Next n-subset of 0..m in lexicographic index order.
        let Some(pos) = (0..n).rev().find(|&p| idx[p] < m - n + p) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..n {
            idx[p] = idx[p - 1] + 1;
        }
    }
    out.sort_by(|a, b| colex(a, b));
    out.into_iter().map(OutputConfiguration).collect()
}

fn check_caps(sub_n: usize, sub_m: usize, max_n: usize, max_m: usize, what: &str) -> Result<()> {
    if sub_n > max_n || sub_m > max_m {
        return Err(Error::SizeCap(format!(
            "{what} distribution limited to n <= {max_n}, m <= {max_m}; got n={sub_n}, m={sub_m}"
        )));
    }
    Ok(())
}

fn finalize<T: Real>(
    species: Species,
    n: usize,
    m: usize,
    raw: Vec<(OutputConfiguration, T)>,
) -> Result<OutputDistribution<T>> {
    let mut entries = Vec::with_capacity(raw.len());
    for (y, p) in raw {
        if p.as_f64() < -T::NEGATIVITY_TOL {
            return Err(Error::Numerical(format!(
                "probability {p} of {:?} is negative",
                y.0
            )));
        }
        entries.push((y, p.max(T::zero()).min(T::one())));
    }
    let dist = OutputDistribution {
        species,
        n,
        m,
        entries,
    };
    let mass = dist.total_mass();
    if (mass - T::one()).abs().as_f64() > T::NORMALIZATION_TOL {
        return Err(Error::Numerical(format!(
            "{species} distribution has total mass {mass}"
        )));
    }
    Ok(dist)
}

/// `p(y) = |perm(M_y)|^2 / prod y_i!`, `M_y` the columns of the
/// submatrix repeated according to `y`.
pub fn boson_distribution<T: Real>(
    sub: &InterferometerSubmatrix<T>,
) -> Result<OutputDistribution<T>> {
    let (n, m) = (sub.n(), sub.m());
    check_caps(n, m, BOSON_MAX_N, BOSON_MAX_M, "boson")?;
    let raw = all_configurations(n, m)
        .into_par_iter()
        .map(|y| {
            let perm = permanent(&sub.entries().select_columns(&y.column_list()))?;
            let p = perm.norm_sqr() / T::of(y.factorial_product());
            Ok((y, p))
        })
        .collect::<Result<Vec<_>>>()?;
    finalize(Species::Boson, n, m, raw)
}

/// `p(y) = |det(M_y)|^2` over binary `y`.
pub fn fermion_distribution<T: Real>(
    sub: &InterferometerSubmatrix<T>,
) -> Result<OutputDistribution<T>> {
    let (n, m) = (sub.n(), sub.m());
    check_caps(n, m, FERMION_MAX_N, FERMION_MAX_M, "fermion")?;
    let raw = binary_configurations(n, m)
        .into_par_iter()
        .map(|y| {
            let det = determinant(&sub.entries().select_columns(&y.column_list()))?;
            Ok((y, det.norm_sqr()))
        })
        .collect::<Result<Vec<_>>>()?;
    finalize(Species::Fermion, n, m, raw)
}

/// `p(y) = perm(P_y) / prod y_i!` with `P` the matrix of single-particle
/// transition probabilities `|U_{q_k,i}|^2`.
pub fn distinguishable_distribution<T: Real>(
    sub: &InterferometerSubmatrix<T>,
) -> Result<OutputDistribution<T>> {
    let (n, m) = (sub.n(), sub.m());
    check_caps(n, m, BOSON_MAX_N, BOSON_MAX_M, "distinguishable")?;
    let probs = sub.entries().map(|z| Complex::new(z.norm_sqr(), T::zero()));
    let raw = all_configurations(n, m)
        .into_par_iter()
        .map(|y| {
            let perm = permanent(&probs.select_columns(&y.column_list()))?;
            let p = perm.re / T::of(y.factorial_product());
            Ok((y, p))
        })
        .collect::<Result<Vec<_>>>()?;
    finalize(Species::Distinguishable, n, m, raw)
}

/// Exact distribution for bosons, fermions or distinguishable particles.
pub fn exact_distribution<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    species: Species,
) -> Result<OutputDistribution<T>> {
    match species {
        Species::Boson => boson_distribution(sub),
        Species::Fermion => fermion_distribution(sub),
        Species::Distinguishable => distinguishable_distribution(sub),
        Species::SimulatedBoson => Err(Error::Domain(
            "simulated bosons need phase averaging; use simulated_distribution".into(),
        )),
    }
}

/// Single-particle output probabilities `p_i = |sum_r e^{i theta_r} U_{q_r,i}|^2 / n`,
/// one row per phase sample. Sample `s` uses stream `s` of `seed`.
fn phase_probabilities<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    samples: usize,
    seed: &RngSeed,
) -> Vec<Vec<T>> {
    let (n, m) = (sub.n(), sub.m());
    let inv_n = T::one() / T::of_usize(n);
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.rng(s as u64);
            let phases: Vec<Complex<T>> = (0..n)
                .map(|_| {
                    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    Complex::from_polar(T::one(), T::of(theta))
                })
                .collect();
            (0..m)
                .map(|i| {
                    let amp: Complex<T> = (0..n).map(|r| phases[r] * sub.amplitude(r, i)).sum();
                    amp.norm_sqr() * inv_n
                })
                .collect()
        })
        .collect()
}

/// Phase-averaged multinomial distribution of `n` independent particles
/// sharing the random-phase single-particle state.
pub fn simulated_distribution<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    phase_samples: usize,
    seed: &RngSeed,
) -> Result<OutputDistribution<T>> {
    let (n, m) = (sub.n(), sub.m());
    check_caps(n, m, BOSON_MAX_N, BOSON_MAX_M, "simulated-boson")?;
    if phase_samples == 0 {
        return Err(Error::Domain("phase_samples must be positive".into()));
    }
    let probs = phase_probabilities(sub, phase_samples, seed);
    let n_fact = (1..=n).product::<usize>() as f64;
    let samples = T::of_usize(phase_samples);
    let raw = all_configurations(n, m)
        .into_par_iter()
        .map(|y| {
            let coeff = T::of(n_fact / y.factorial_product());
            let avg = compensated_sum(probs.iter().map(|p| {
                y.0.iter()
                    .zip(p)
                    .fold(T::one(), |acc, (&k, &pi)| acc * pi.powi(k as i32))
            })) / samples;
            (y, coeff * avg)
        })
        .collect();
    finalize(Species::SimulatedBoson, n, m, raw)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEstimate<T> {
    pub value: T,
    pub std_error: T,
}

/// Simulated-boson `C_ij = E[n(n-1) p_i p_j] - E[n p_i] E[n p_j]` from
/// the same phase samples [`simulated_distribution`] draws, with a
/// delta-method standard error.
pub fn simulated_phase_correlator<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    i: usize,
    j: usize,
    phase_samples: usize,
    seed: &RngSeed,
) -> Result<PhaseEstimate<T>> {
    let m = sub.m();
    if i == 0 || j == 0 || i > m || j > m {
        return Err(Error::Selection(format!(
            "pair ({i}, {j}) outside modes 1..={m}"
        )));
    }
    if i == j {
        return Err(Error::DiagonalNotDefined(i));
    }
    if phase_samples < 2 {
        return Err(Error::InsufficientSample(
            "need at least two phase samples".into(),
        ));
    }
    let probs = phase_probabilities(sub, phase_samples, seed);
    Ok(phase_estimate(&probs, sub.n(), i - 1, j - 1))
}

/// [`simulated_phase_correlator`] for every pair `i < j`, in [`crate::correlators::pairs`]
/// order, sharing one set of phase samples.
pub fn simulated_phase_correlators<T: Real>(
    sub: &InterferometerSubmatrix<T>,
    phase_samples: usize,
    seed: &RngSeed,
) -> Result<Vec<PhaseEstimate<T>>> {
    if phase_samples < 2 {
        return Err(Error::InsufficientSample(
            "need at least two phase samples".into(),
        ));
    }
    let probs = phase_probabilities(sub, phase_samples, seed);
    Ok(crate::correlators::pairs(sub.m())
        .map(|(i, j)| phase_estimate(&probs, sub.n(), i - 1, j - 1))
        .collect())
}

// Delta-method standard error of E[n(n-1) p_a p_b] - E[n p_a] E[n p_b].
fn phase_estimate<T: Real>(probs: &[Vec<T>], n: usize, a: usize, b: usize) -> PhaseEstimate<T> {
    let nf = T::of_usize(n);
    let x: Vec<T> = probs
        .iter()
        .map(|p| nf * (nf - T::one()) * p[a] * p[b])
        .collect();
    let y: Vec<T> = probs.iter().map(|p| nf * p[a]).collect();
    let z: Vec<T> = probs.iter().map(|p| nf * p[b]).collect();
    let samples = probs.len();
    let len = T::of_usize(samples);
    let mean = |v: &[T]| compensated_sum(v.iter().copied()) / len;
    let (mx, my, mz) = (mean(&x), mean(&y), mean(&z));
    let influence: Vec<T> = (0..samples).map(|s| x[s] - mz * y[s] - my * z[s]).collect();
    let mi = mean(&influence);
    let var =
        compensated_sum(influence.iter().map(|&w| (w - mi) * (w - mi))) / T::of_usize(samples - 1);
    PhaseEstimate {
        value: mx - my * mz,
        std_error: (var / len).sqrt(),
    }
}

/// `sum_y p(y) y_i y_j - (sum_y p(y) y_i)(sum_y p(y) y_j)`, 1-based;
/// `i = j` gives the variance of `n_i`.
pub fn oracle_correlator<T: Real>(dist: &OutputDistribution<T>, i: usize, j: usize) -> Result<T> {
    let m = dist.m;
    if i == 0 || j == 0 || i > m || j > m {
        return Err(Error::Selection(format!(
            "pair ({i}, {j}) outside modes 1..={m}"
        )));
    }
    let (a, b) = (i - 1, j - 1);
    let e = |f: &dyn Fn(&[usize]) -> usize| {
        compensated_sum(dist.entries.iter().map(|(y, p)| *p * T::of_usize(f(&y.0))))
    };
    let ninj = e(&|y| y[a] * y[b]);
    let ni = e(&|y| y[a]);
    let nj = e(&|y| y[b]);
    Ok(ninj - ni * nj)
}
