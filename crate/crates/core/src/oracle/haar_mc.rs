use rayon::prelude::*;
use serde::Serialize;

use crate::correlators::correlator;
use crate::error::{Error, Result};
use crate::rmt::MomentTriple;
use crate::rng::RngSeed;
use crate::scalar::{compensated_sum, Real};
use crate::species::Species;
use crate::unitary::{extract_submatrix, haar_unitary_with, InputSelection};

pub const MIN_TRIALS: usize = 100;

/// Monte Carlo moment estimates with per-moment standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate<T> {
    pub trials: usize,
    pub moments: MomentTriple<T>,
    pub std_errors: [T; 3],
}

/// Averages `C_12`, `C_12^2` and `C_12^3` over `trials` independent full
/// Haar unitaries with inputs `1..=n`. Trial `t` uses stream `t` of `seed`.
pub fn mc_haar_moments<T: Real>(
    species: Species,
    n: usize,
    m: usize,
    trials: usize,
    seed: &RngSeed,
) -> Result<MomentEstimate<T>> {
    if trials < MIN_TRIALS {
        return Err(Error::InsufficientSample(format!(
            "{trials} trials; need at least {MIN_TRIALS}"
        )));
    }
    let sel = InputSelection::first(n)?;
    let samples: Vec<T> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let u = haar_unitary_with::<T, _>(m, &mut seed.rng(t as u64))?;
            correlator(&extract_submatrix(&u, &sel)?, 1, 2, species)
        })
        .collect::<Result<_>>()?;
    let tf = T::of_usize(trials);
    let est = |p: i32| {
        let vals: Vec<T> = samples.iter().map(|c| c.powi(p)).collect();
        let mean = compensated_sum(vals.iter().copied()) / tf;
        let var = compensated_sum(vals.iter().map(|&v| (v - mean) * (v - mean)))
            / T::of_usize(trials - 1);
        (mean, (var / tf).sqrt())
    };
    let ((m1, e1), (m2, e2), (m3, e3)) = (est(1), est(2), est(3));
    Ok(MomentEstimate {
        trials,
        moments: MomentTriple::new(m1, m2, m3),
        std_errors: [e1, e2, e3],
    })
}
