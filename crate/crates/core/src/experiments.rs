//! Experiment drivers behind the CLI: single-circuit histograms, sweeps
//! over the mode count, (CV, S) scatter clouds with certification, and the
//! closed-form versus oracle consistency suite.
//!
//! Every trial draws from its own random stream, keyed by the experiment
//! seed, the mode count and the trial index, so results do not depend on
//! the thread count or scheduling. Reductions run sequentially over the
//! trial-ordered results.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlators::{c_datasets_all, correlator, pairs, CDataset};
use crate::error::{Error, Result};
use crate::oracle::{
    exact_distribution, oracle_correlator, simulated_distribution, simulated_phase_correlators,
    DEFAULT_PHASE_SAMPLES,
};
use crate::rmt::{rmt_moments, BenchmarkStatistics, MomentTriple};
use crate::rng::RngSeed;
use crate::species::Species;
use crate::stats::{
    certify, cloud_separation, cloud_summary, dataset_statistics, mean_and_std,
    CertificationVerdict, CloudSummary,
};
use crate::unitary::{
    extract_submatrix, haar_submatrix_with, haar_unitary, haar_unitary_with, InputSelection,
    InterferometerSubmatrix, UnitaryMatrix,
};

/// `start:stop:step` (inclusive) or a single mode count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl ModeRange {
    pub fn single(m: usize) -> Self {
        Self {
            start: m,
            stop: m,
            step: 1,
        }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }

    pub fn is_single(&self) -> bool {
        self.start == self.stop
    }
}

impl FromStr for ModeRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad mode count `{t}`")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [m] => Self::single(parse(m)?),
            [a, b] => Self {
                start: parse(a)?,
                stop: parse(b)?,
                step: 1,
            },
            [a, b, c] => Self {
                start: parse(a)?,
                stop: parse(b)?,
                step: parse(c)?,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "mode range `{s}` is not start:stop:step"
                )))
            }
        };
        if range.step == 0 {
            return Err(Error::Parse("mode range step must be positive".into()));
        }
        if range.stop < range.start {
            return Err(Error::Parse(format!("mode range `{s}` is empty")));
        }
        Ok(range)
    }
}

/// How each trial obtains its submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitMode {
    /// New Haar circuit per trial, inputs `1..=n`.
    FreshCircuit,
    /// One Haar circuit per mode count; each trial picks a random input set.
    ReuseCircuit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub modes: ModeRange,
    pub trials: usize,
    pub species: Vec<Species>,
    pub seed: u64,
    /// Certification thresholds, in standard errors.
    pub k: Vec<f64>,
    pub circuit: CircuitMode,
}

impl ExperimentConfig {
    pub fn new(n: usize, modes: ModeRange, trials: usize, seed: u64) -> Self {
        Self {
            n,
            modes,
            trials,
            species: Species::ALL.to_vec(),
            seed,
            k: vec![2.0, 4.0],
            circuit: CircuitMode::FreshCircuit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parse("trials must be at least 1".into()));
        }
        if self.modes.step == 0 {
            return Err(Error::Parse("mode range step must be positive".into()));
        }
        if self.species.is_empty() {
            return Err(Error::Parse("no species selected".into()));
        }
        if self.k.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::Parse(
                "certification thresholds must be positive".into(),
            ));
        }
        if self.n == 0 || self.n >= self.modes.start {
            return Err(Error::Domain(format!(
                "need 1 <= n < m, got n={}, smallest m={}",
                self.n, self.modes.start
            )));
        }
        Ok(())
    }
}

/// Produces the submatrix of trial `t` at mode count `m`.
struct TrialSource {
    n: usize,
    m: usize,
    seed: u64,
    circuit: Option<UnitaryMatrix<f64>>,
}

impl TrialSource {
    fn new(config: &ExperimentConfig, m: usize) -> Result<Self> {
        let circuit = match config.circuit {
            CircuitMode::FreshCircuit => None,
            CircuitMode::ReuseCircuit => Some(haar_unitary(
                m,
                &RngSeed::new(config.seed, format!("circuit/m={m}")),
            )?),
        };
        Ok(Self {
            n: config.n,
            m,
            seed: config.seed,
            circuit,
        })
    }

    fn submatrix(&self, t: usize) -> Result<InterferometerSubmatrix<f64>> {
        match &self.circuit {
            None => {
                let mut rng = RngSeed::new(self.seed, format!("trial/m={}", self.m)).rng(t as u64);
                haar_submatrix_with(self.n, self.m, &mut rng)
            }
            Some(u) => {
                let mut rng =
                    RngSeed::new(self.seed, format!("selection/m={}", self.m)).rng(t as u64);
                extract_submatrix(u, &InputSelection::random(self.n, self.m, &mut rng)?)
            }
        }
    }
}

/// Statistics of every species' dataset for each trial, trial-ordered.
pub fn trial_statistics(
    config: &ExperimentConfig,
    m: usize,
) -> Result<Vec<[BenchmarkStatistics<f64>; 4]>> {
    let source = TrialSource::new(config, m)?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let datasets = c_datasets_all(&source.submatrix(t)?)?;
            let mut out = [BenchmarkStatistics {
                nm: 0.0,
                cv: 0.0,
                s: 0.0,
            }; 4];
            for (slot, ds) in out.iter_mut().zip(&datasets) {
                *slot = dataset_statistics(ds)?;
            }
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub species: Species,
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Counts divided by `total * width`; integrates to one.
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.density
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

const MAX_BINS: usize = 10_000;

/// Density-normalised histogram; Freedman–Diaconis bin width unless
/// `bins` is given.
pub fn histogram(species: Species, values: &[f64], bins: Option<usize>) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let count = match bins {
        Some(0) => return Err(Error::Parse("bin count must be positive".into())),
        Some(b) => b,
        None => {
            let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
            let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
            if width > 0.0 && hi > lo {
                (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
            } else {
                ((sorted.len() as f64).sqrt().ceil() as usize).max(1)
            }
        }
    };
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let width = (hi - lo) / count as f64;
    let edges: Vec<f64> = (0..=count)
        .map(|b| {
            if b == count {
                hi
            } else {
                lo + b as f64 * width
            }
        })
        .collect();
    let mut counts = vec![0usize; count];
    for &v in &sorted {
        let b = (((v - lo) / width) as usize).min(count - 1);
        counts[b] += 1;
    }
    let total = sorted.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (total * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        species,
        edges,
        counts,
        density,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub n: usize,
    pub m: usize,
    pub selection: InputSelection,
    pub datasets: Vec<CDataset<f64>>,
    pub histograms: Vec<Histogram>,
    pub statistics: Vec<(Species, BenchmarkStatistics<f64>)>,
}

impl HistogramReport {
    pub fn statistics_of(&self, species: Species) -> Option<BenchmarkStatistics<f64>> {
        self.statistics
            .iter()
            .find(|(s, _)| *s == species)
            .map(|(_, st)| *st)
    }
}

/// One circuit, one input selection, every selected species' C-dataset.
pub fn run_histogram(config: &ExperimentConfig, bins: Option<usize>) -> Result<HistogramReport> {
    config.validate()?;
    if !config.modes.is_single() {
        return Err(Error::Parse("histogram needs a single mode count".into()));
    }
    let m = config.modes.start;
    let u = haar_unitary::<f64>(m, &RngSeed::new(config.seed, format!("histogram/m={m}")))?;
    let selection = match config.circuit {
        CircuitMode::FreshCircuit => InputSelection::first(config.n)?,
        CircuitMode::ReuseCircuit => InputSelection::random(
            config.n,
            m,
            &mut RngSeed::new(config.seed, format!("histogram/selection/m={m}")).rng(0),
        )?,
    };
    let all = c_datasets_all(&extract_submatrix(&u, &selection)?)?;
    let mut report = HistogramReport {
        n: config.n,
        m,
        selection,
        datasets: Vec::new(),
        histograms: Vec::new(),
        statistics: Vec::new(),
    };
    for &s in &config.species {
        let ds = all[s.index()].clone();
        report.histograms.push(histogram(s, &ds.values, bins)?);
        report.statistics.push((s, dataset_statistics(&ds)?));
        report.datasets.push(ds);
    }
    Ok(report)
}

/// Cloud mean and standard deviation of one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    /// NaN for a single trial.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub species: Species,
    pub trials: usize,
    pub nm: MeanSd,
    pub cv: MeanSd,
    pub s: MeanSd,
    pub rmt: BenchmarkStatistics<f64>,
}

/// Per mode count: mean and spread of NM / CV / S over `trials`
/// datasets, next to the ensemble prediction.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for m in config.modes.values() {
        let stats = trial_statistics(config, m)?;
        for &s in &config.species {
            let column = |f: fn(&BenchmarkStatistics<f64>) -> f64| {
                let v: Vec<f64> = stats.iter().map(|t| f(&t[s.index()])).collect();
                let (mean, sd) = mean_and_std(&v);
                MeanSd { mean, sd }
            };
            rows.push(SweepRow {
                m,
                species: s,
                trials: config.trials,
                nm: column(|b| b.nm),
                cv: column(|b| b.cv),
                s: column(|b| b.s),
                rmt: rmt_moments::<f64>(s, config.n, m)?.statistics(config.n, m)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesCloud {
    pub species: Species,
    /// `(CV, S)` per trial, trial-ordered.
    pub points: Vec<(f64, f64)>,
    /// `None` for a single trial.
    pub summary: Option<CloudSummary<f64>>,
    pub prediction: BenchmarkStatistics<f64>,
    /// One verdict per configured `k`, testing every selected species'
    /// prediction against this cloud.
    pub verdicts: Vec<CertificationVerdict<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterReport {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub clouds: Vec<SpeciesCloud>,
}

impl ScatterReport {
    pub fn cloud(&self, species: Species) -> Option<&SpeciesCloud> {
        self.clouds.iter().find(|c| c.species == species)
    }

    /// Cloud-mean separations under the pooled standard-error covariance.
    pub fn separations(&self) -> Vec<(Species, Species, Option<f64>)> {
        let mut out = Vec::new();
        for (a, ca) in self.clouds.iter().enumerate() {
            for cb in &self.clouds[a + 1..] {
                let d = match (&ca.summary, &cb.summary) {
                    (Some(x), Some(y)) => cloud_separation(x, y),
                    _ => None,
                };
                out.push((ca.species, cb.species, d));
            }
        }
        out
    }
}

pub fn predictions(
    species: &[Species],
    n: usize,
    m: usize,
) -> Result<BTreeMap<Species, BenchmarkStatistics<f64>>> {
    species
        .iter()
        .map(|&s| Ok((s, rmt_moments::<f64>(s, n, m)?.statistics(n, m)?)))
        .collect()
}

/// (CV, S) clouds at a single mode count with certification verdicts.
pub fn run_scatter(config: &ExperimentConfig) -> Result<ScatterReport> {
    config.validate()?;
    if !config.modes.is_single() {
        return Err(Error::Parse("scatter needs a single mode count".into()));
    }
    let m = config.modes.start;
    let stats = trial_statistics(config, m)?;
    let preds = predictions(&config.species, config.n, m)?;
    let mut clouds = Vec::new();
    for &s in &config.species {
        let points: Vec<(f64, f64)> = stats
            .iter()
            .map(|t| (t[s.index()].cv, t[s.index()].s))
            .collect();
        let summary = if points.len() >= 2 {
            Some(cloud_summary(&points)?)
        } else {
            None
        };
        let verdicts = match &summary {
            Some(sum) => config
                .k
                .iter()
                .map(|&k| certify(sum, &preds, k))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        clouds.push(SpeciesCloud {
            species: s,
            points,
            summary,
            prediction: preds[&s],
            verdicts,
        });
    }
    Ok(ScatterReport {
        n: config.n,
        m,
        trials: config.trials,
        clouds,
    })
}

/// Bounds and knobs of the formula/oracle consistency suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheckConfig {
    pub max_n: usize,
    pub max_m: usize,
    pub draws: usize,
    pub seed: u64,
    pub phase_samples: usize,
    /// Simulated-boson closed forms must agree within this many standard errors.
    pub sigma: f64,
    /// Test hook: shifts one closed-form correlator by `1e-6`.
    pub inject_fault: bool,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self {
            max_n: 3,
            max_m: 6,
            draws: 50,
            seed: 1,
            phase_samples: DEFAULT_PHASE_SAMPLES,
            sigma: 5.0,
            inject_fault: false,
        }
    }
}

pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const SUM_RULE_TOL: f64 = 1e-10;
/// Phase samples used for the simulated-boson sum-rule distribution.
const SUM_RULE_PHASE_SAMPLES: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation (absolute, or in standard errors for
    /// Monte Carlo checks).
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst: 0.0,
            cases: 0,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN must fail the check.
        if deviation.is_nan() || deviation > self.worst {
            self.worst = deviation;
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.cases += other.cases;
        if other.worst.is_nan() || other.worst > self.worst {
            self.worst = other.worst;
        }
    }

    fn into_check(self, name: String, tolerance: f64) -> CheckResult {
        CheckResult {
            passed: self.worst <= tolerance,
            name,
            worst: self.worst,
            tolerance,
            cases: self.cases,
        }
    }
}

/// Per-instance deviations: equivalence for B/F/D, simulated-boson
/// z-scores, and sum-rule residuals for all four species.
struct InstanceTallies {
    equivalence: [Tally; 3],
    simulated: Tally,
    sum_rule: [Tally; 4],
}

fn sum_rule_residual(dist: &crate::oracle::OutputDistribution<f64>) -> Result<f64> {
    let m = dist.m;
    let mut total = 0.0;
    for i in 1..=m {
        total += oracle_correlator(dist, i, i)?;
        for j in i + 1..=m {
            total += 2.0 * oracle_correlator(dist, i, j)?;
        }
    }
    Ok(total.abs())
}

fn check_instance(
    config: &OracleCheckConfig,
    n: usize,
    m: usize,
    draw: usize,
    sub: &InterferometerSubmatrix<f64>,
) -> Result<InstanceTallies> {
    let mut out = InstanceTallies {
        equivalence: [Tally::new(), Tally::new(), Tally::new()],
        simulated: Tally::new(),
        sum_rule: [Tally::new(), Tally::new(), Tally::new(), Tally::new()],
    };
    let fault_here = config.inject_fault && draw == 0 && n == 1 && m == 2;
    for (slot, species) in [Species::Boson, Species::Fermion, Species::Distinguishable]
        .into_iter()
        .enumerate()
    {
        let dist = exact_distribution(sub, species)?;
        for (i, j) in pairs(m) {
            let mut closed = correlator(sub, i, j, species)?;
            if fault_here && species == Species::Boson && (i, j) == (1, 2) {
                closed += 1e-6;
            }
            out.equivalence[slot].record((closed - oracle_correlator(&dist, i, j)?).abs());
        }
        out.sum_rule[species.index()].record(sum_rule_residual(&dist)?);
    }
    let phase_seed = RngSeed::new(config.seed, format!("oracle/phase/n={n}/m={m}/draw={draw}"));
    let estimates = simulated_phase_correlators(sub, config.phase_samples, &phase_seed)?;
    for ((i, j), est) in pairs(m).zip(estimates) {
        let closed = correlator(sub, i, j, Species::SimulatedBoson)?;
        let diff = (closed - est.value).abs();
        // n = 1 has no phase fluctuation and a zero standard error.
        let z = if diff <= 1e-12 {
            0.0
        } else {
            diff / est.std_error
        };
        out.simulated.record(z);
    }
    let sim = simulated_distribution(sub, SUM_RULE_PHASE_SAMPLES, &phase_seed.child("sum-rule"))?;
    out.sum_rule[Species::SimulatedBoson.index()].record(sum_rule_residual(&sim)?);
    Ok(out)
}

/// Closed-form correlators against permanent/determinant distributions for
/// every `n <= max_n`, `max(n, 2) <= m <= max_m`, plus the particle-number
/// sum rule.
pub fn run_oracle_check(config: &OracleCheckConfig) -> Result<OracleReport> {
    if config.max_n == 0 || config.max_m < 2 || config.draws == 0 {
        return Err(Error::Parse(
            "oracle check needs max_n >= 1, max_m >= 2 and draws >= 1".into(),
        ));
    }
    let mut instances = Vec::new();
    for n in 1..=config.max_n {
        for m in n.max(2)..=config.max_m {
            for draw in 0..config.draws {
                instances.push((n, m, draw));
            }
        }
    }
    let tallies: Vec<InstanceTallies> = instances
        .par_iter()
        .map(|&(n, m, draw)| {
            let circuit_seed = RngSeed::new(config.seed, format!("oracle/circuit/n={n}/m={m}"));
            let mut rng = circuit_seed.rng(draw as u64);
            let u = haar_unitary_with::<f64, _>(m, &mut rng)?;
            let sel = InputSelection::random(n, m, &mut rng)?;
            // `n = m` is outside `extract_submatrix`'s domain but still a valid scattering problem.
            let rows: Vec<usize> = sel.modes().iter().map(|r| r - 1).collect();
            let sub = InterferometerSubmatrix::new(u.matrix().select_rows(&rows))?;
            check_instance(config, n, m, draw, &sub)
        })
        .collect::<Result<_>>()?;

    let mut equivalence = [Tally::new(), Tally::new(), Tally::new()];
    let mut simulated = Tally::new();
    let mut sum_rule = [Tally::new(), Tally::new(), Tally::new(), Tally::new()];
    for t in &tallies {
        for (acc, x) in equivalence.iter_mut().zip(&t.equivalence) {
            acc.merge(x);
        }
        simulated.merge(&t.simulated);
        for (acc, x) in sum_rule.iter_mut().zip(&t.sum_rule) {
            acc.merge(x);
        }
    }
    let mut checks = Vec::new();
    for (tally, s) in
        equivalence
            .into_iter()
            .zip([Species::Boson, Species::Fermion, Species::Distinguishable])
    {
        checks.push(tally.into_check(format!("equivalence/{s}"), EQUIVALENCE_TOL));
    }
    checks.push(simulated.into_check(
        format!("equivalence/{}", Species::SimulatedBoson),
        config.sigma,
    ));
    for (tally, s) in sum_rule.into_iter().zip(Species::ALL) {
        checks.push(tally.into_check(format!("sum-rule/{s}"), SUM_RULE_TOL));
    }
    Ok(OracleReport { checks })
}

/// Ensemble moments and statistics for one species, as reported by `predict`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub species: Species,
    pub n: usize,
    pub m: usize,
    pub moments: MomentTriple<f64>,
    pub statistics: BenchmarkStatistics<f64>,
}

pub fn predict(species: Species, n: usize, m: usize) -> Result<Prediction> {
    let moments = rmt_moments::<f64>(species, n, m)?;
    Ok(Prediction {
        species,
        n,
        m,
        moments,
        statistics: moments.statistics(n, m)?,
    })
}
