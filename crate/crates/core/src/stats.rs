//! Empirical moments of C-datasets, (CV, S) cloud summaries and the
//! standard-error-ellipse certification test.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::correlators::CDataset;
use crate::error::{Error, Result};
use crate::rmt::{BenchmarkStatistics, MomentTriple};
use crate::scalar::{compensated_sum, CompensatedSum, Real};
use crate::species::Species;

/// Clouds with fewer points than this are flagged low-confidence.
pub const LOW_CONFIDENCE_TRIALS: usize = 10;
/// Default certification threshold in standard errors.
pub const DEFAULT_K: f64 = 4.0;
/// Relative ridge added to a singular standard-error covariance.
pub const RIDGE_EPSILON: f64 = 1e-12;

/// Population moments (no bias correction) of raw values.
pub fn moments_of<T: Real>(values: &[T]) -> Result<MomentTriple<T>> {
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    let mut s3 = CompensatedSum::new();
    for &v in values {
        s1.add(v);
        s2.add(v * v);
        s3.add(v * v * v);
    }
    let len = T::of_usize(values.len());
    Ok(MomentTriple::new(
        s1.total() / len,
        s2.total() / len,
        s3.total() / len,
    ))
}

pub fn dataset_moments<T: Real>(ds: &CDataset<T>) -> Result<MomentTriple<T>> {
    moments_of(&ds.values)
}

/// NM / CV / S of a dataset, using its `n` and `m` for the normalisation.
pub fn dataset_statistics<T: Real>(ds: &CDataset<T>) -> Result<BenchmarkStatistics<T>> {
    dataset_moments(ds)?.statistics(ds.n, ds.m)
}

/// Summary of a (CV, S) point cloud.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudSummary<T> {
    pub t: usize,
    pub mean: [T; 2],
    /// Sample covariance (divisor `t - 1`); the cloud spread.
    pub covariance: [[T; 2]; 2],
    /// `covariance / t`; the uncertainty of `mean`.
    pub standard_error_cov: [[T; 2]; 2],
}

impl<T: Real> CloudSummary<T> {
    /// Per-axis standard deviation of the cloud.
    pub fn std_dev(&self) -> [T; 2] {
        [self.covariance[0][0].sqrt(), self.covariance[1][1].sqrt()]
    }

    /// Per-axis standard error of the mean.
    pub fn std_error(&self) -> [T; 2] {
        [
            self.standard_error_cov[0][0].sqrt(),
            self.standard_error_cov[1][1].sqrt(),
        ]
    }

    pub fn low_confidence(&self) -> bool {
        self.t < LOW_CONFIDENCE_TRIALS
    }
}

pub fn cloud_summary<T: Real>(points: &[(T, T)]) -> Result<CloudSummary<T>> {
    let t = points.len();
    if t < 2 {
        return Err(Error::InsufficientSample(format!(
            "cloud of {t} point(s); need at least 2"
        )));
    }
    let tf = T::of_usize(t);
    let mx = compensated_sum(points.iter().map(|p| p.0)) / tf;
    let my = compensated_sum(points.iter().map(|p| p.1)) / tf;
    let denom = T::of_usize(t - 1);
    let sxx = compensated_sum(points.iter().map(|p| (p.0 - mx) * (p.0 - mx))) / denom;
    let syy = compensated_sum(points.iter().map(|p| (p.1 - my) * (p.1 - my))) / denom;
    let sxy = compensated_sum(points.iter().map(|p| (p.0 - mx) * (p.1 - my))) / denom;
    let covariance = [[sxx, sxy], [sxy, syy]];
    let standard_error_cov = [[sxx / tf, sxy / tf], [sxy / tf, syy / tf]];
    Ok(CloudSummary {
        t,
        mean: [mx, my],
        covariance,
        standard_error_cov,
    })
}

/// Inverse of a symmetric 2x2 covariance, ridge-regularised when singular.
/// Returns `(inverse, regularised)`, or `None` for an all-zero matrix.
fn regularised_inverse<T: Real>(cov: [[T; 2]; 2]) -> Option<([[T; 2]; 2], bool)> {
    let invert = |c: [[T; 2]; 2]| {
        let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        let scale = c[0][0].abs().max(c[1][1].abs());
        if !(det > T::epsilon() * scale * scale) || !det.is_finite() {
            return None;
        }
        Some([
            [c[1][1] / det, -c[0][1] / det],
            [-c[1][0] / det, c[0][0] / det],
        ])
    };
    if let Some(inv) = invert(cov) {
        return Some((inv, false));
    }
    let trace = cov[0][0] + cov[1][1];
    if !(trace > T::zero()) {
        return None;
    }
    let ridge = T::of(RIDGE_EPSILON) * trace / T::of(2.0);
    let reg = [
        [cov[0][0] + ridge, cov[0][1]],
        [cov[1][0], cov[1][1] + ridge],
    ];
    invert(reg).map(|inv| (inv, true))
}

fn quad_form<T: Real>(d: [T; 2], inv: [[T; 2]; 2]) -> T {
    let q =
        d[0] * (inv[0][0] * d[0] + inv[0][1] * d[1]) + d[1] * (inv[1][0] * d[0] + inv[1][1] * d[1]);
    q.max(T::zero()).sqrt()
}

/// Mahalanobis distance of `point` from `mean` under `cov`.
pub fn mahalanobis<T: Real>(point: [T; 2], mean: [T; 2], cov: [[T; 2]; 2]) -> Option<T> {
    let (inv, _) = regularised_inverse(cov)?;
    Some(quad_form([point[0] - mean[0], point[1] - mean[1]], inv))
}

/// Distance between two cloud means under the pooled standard-error
/// covariance `SE_a + SE_b` of their difference.
pub fn cloud_separation<T: Real>(a: &CloudSummary<T>, b: &CloudSummary<T>) -> Option<T> {
    let mut pooled = a.standard_error_cov;
    for (r, row) in pooled.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x += b.standard_error_cov[r][c];
        }
    }
    mahalanobis(a.mean, b.mean, pooled)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "diagnostic", rename_all = "kebab-case")]
pub enum VerdictStatus {
    Conclusive,
    Inconclusive(String),
}

/// Outcome of testing RMT predictions against a cloud mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationVerdict<T> {
    pub k: T,
    pub distances: BTreeMap<Species, T>,
    /// Species whose prediction lies within `k` standard errors; may be empty.
    pub accepted: Vec<Species>,
    pub status: VerdictStatus,
    pub regularized: bool,
    pub low_confidence: bool,
}

/// Accept each species whose `(CV, S)` prediction is within Mahalanobis
/// distance `k` of the cloud mean under the standard-error covariance.
pub fn certify<T: Real>(
    cloud: &CloudSummary<T>,
    predictions: &BTreeMap<Species, BenchmarkStatistics<T>>,
    k: T,
) -> Result<CertificationVerdict<T>> {
    if !(k > T::zero()) {
        return Err(Error::Domain(format!(
            "threshold k must be positive, got {k}"
        )));
    }
    let low_confidence = cloud.low_confidence();
    let Some((inv, regularized)) = regularised_inverse(cloud.standard_error_cov) else {
        return Ok(CertificationVerdict {
            k,
            distances: BTreeMap::new(),
            accepted: Vec::new(),
            status: VerdictStatus::Inconclusive(
                "degenerate cloud: standard-error covariance is zero".into(),
            ),
            regularized: false,
            low_confidence,
        });
    };
    let distances: BTreeMap<Species, T> = predictions
        .iter()
        .map(|(&s, p)| {
            (
                s,
                quad_form([p.cv - cloud.mean[0], p.s - cloud.mean[1]], inv),
            )
        })
        .collect();
    let accepted = distances
        .iter()
        .filter(|(_, &d)| d <= k)
        .map(|(&s, _)| s)
        .collect();
    Ok(CertificationVerdict {
        k,
        distances,
        accepted,
        status: VerdictStatus::Conclusive,
        regularized,
        low_confidence,
    })
}

/// Mean and sample standard deviation (NaN for fewer than two values).
pub fn mean_and_std<T: Real>(values: &[T]) -> (T, T) {
    if values.is_empty() {
        return (T::nan(), T::nan());
    }
    let len = T::of_usize(values.len());
    let mean = compensated_sum(values.iter().copied()) / len;
    if values.len() < 2 {
        return (mean, T::nan());
    }
    let ss = compensated_sum(values.iter().map(|&v| (v - mean) * (v - mean)));
    (mean, (ss / T::of_usize(values.len() - 1)).sqrt())
}
