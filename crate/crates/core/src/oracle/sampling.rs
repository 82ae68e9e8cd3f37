use rand::Rng;

use super::distribution::OutputDistribution;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::scalar::{compensated_sum, Real};

/// Plug-in covariance estimates of the mode occupations from finite shots.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCorrelators<T> {
    pub shots: usize,
    pub m: usize,
    /// Sample mean occupation per mode.
    pub means: Vec<T>,
    /// `m x m` plug-in covariance (divisor `shots`); diagonal = variances.
    pub covariance: Vec<Vec<T>>,
    /// Standard error of each covariance entry; NaN when `shots < 2`.
    pub std_errors: Vec<Vec<T>>,
    /// True when the estimate cannot carry an uncertainty (`shots < 2`).
    pub low_confidence: bool,
}

impl<T: Real> SampledCorrelators<T> {
    /// 1-based lookup.
    pub fn correlator(&self, i: usize, j: usize) -> T {
        self.covariance[i - 1][j - 1]
    }

    pub fn std_error(&self, i: usize, j: usize) -> T {
        self.std_errors[i - 1][j - 1]
    }
}

/// Draws `shots` i.i.d. configurations from `dist` (stream 0 of `seed`).
pub fn sampled_counts<T: Real>(
    dist: &OutputDistribution<T>,
    shots: usize,
    seed: &RngSeed,
) -> Result<SampledCorrelators<T>> {
    if shots == 0 {
        return Err(Error::InsufficientSample("shots must be positive".into()));
    }
    let m = dist.m;
    let mut cdf = Vec::with_capacity(dist.entries.len());
    let mut acc = 0.0f64;
    for (_, p) in &dist.entries {
        acc += p.as_f64();
        cdf.push(acc);
    }
    let mut rng = seed.rng(0);
    let draws: Vec<&[usize]> = (0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            dist.entries[idx].0.occupations()
        })
        .collect();

    let sf = T::of_usize(shots);
    let means: Vec<T> = (0..m)
        .map(|i| compensated_sum(draws.iter().map(|y| T::of_usize(y[i]))) / sf)
        .collect();
    let mut covariance = vec![vec![T::zero(); m]; m];
    let mut std_errors = vec![vec![T::nan(); m]; m];
    for i in 0..m {
        for j in i..m {
            let prods: Vec<T> = draws
                .iter()
                .map(|y| (T::of_usize(y[i]) - means[i]) * (T::of_usize(y[j]) - means[j]))
                .collect();
            let c = compensated_sum(prods.iter().copied()) / sf;
            covariance[i][j] = c;
            covariance[j][i] = c;
            if shots >= 2 {
                let v = compensated_sum(prods.iter().map(|&x| (x - c) * (x - c)))
                    / T::of_usize(shots - 1);
                let se = (v / sf).sqrt();
                std_errors[i][j] = se;
                std_errors[j][i] = se;
            }
        }
    }
    Ok(SampledCorrelators {
        shots,
        m,
        means,
        covariance,
        std_errors,
        low_confidence: shots < 2,
    })
}
