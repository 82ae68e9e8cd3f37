use boson_bench::experiments::{
    run_histogram, run_scatter, run_sweep, trial_statistics, CircuitMode, ExperimentConfig,
    ModeRange,
};
use boson_bench::stats::mean_and_std;
use boson_bench::{haar_unitary, rmt_statistics, RngSeed, Species};

fn config(n: usize, modes: &str, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(n, modes.parse::<ModeRange>().unwrap(), trials, seed)
}

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn single_circuit_histograms() {
    let report = run_histogram(&config(6, "120", 1, 7), None).unwrap();
    for (ds, h) in report.datasets.iter().zip(&report.histograms) {
        assert_eq!(ds.len(), 7140);
        assert_eq!(h.counts.iter().sum::<usize>(), 7140);
        assert!((h.integral() - 1.0).abs() <= 1e-9);
    }
    let b = report.statistics_of(Species::Boson).unwrap();
    let f = report.statistics_of(Species::Fermion).unwrap();
    let s = report.statistics_of(Species::SimulatedBoson).unwrap();
    assert!(b.s > f.s);
    assert!((b.nm - s.nm).abs() < 0.2 * (b.nm - f.nm).abs());
}

#[test]
fn fixed_bin_count() {
    let report = run_histogram(&config(3, "30", 1, 2), Some(17)).unwrap();
    assert!(report.histograms.iter().all(|h| h.counts.len() == 17));
}

#[test]
fn single_dataset_lies_in_the_cloud_band() {
    let report = run_histogram(&config(6, "120", 1, 11), None).unwrap();
    let cloud: Vec<f64> = trial_statistics(&config(6, "120", 200, 12), 120)
        .unwrap()
        .iter()
        .map(|row| row[Species::Boson.index()].nm)
        .collect();
    let (_, sd) = mean_and_std(&cloud);
    let predicted = rmt_statistics::<f64>(Species::Boson, 6, 120).unwrap().nm;
    assert!((predicted + 1.033405).abs() < 1e-6);
    assert!((report.statistics_of(Species::Boson).unwrap().nm - predicted).abs() <= 3.0 * sd);
}

#[test]
fn sweep_shape() {
    let rows = run_sweep(&config(6, "20:300:20", 2, 1)).unwrap();
    assert_eq!(rows.len(), 15 * 4);
    assert_eq!(rows.iter().map(|r| r.m).max(), Some(300));
}

#[test]
fn low_confidence_scatter() {
    let report = run_scatter(&config(6, "20", 2, 1)).unwrap();
    for cloud in &report.clouds {
        assert_eq!(cloud.points.len(), 2);
        assert!(cloud.verdicts.iter().all(|v| v.low_confidence));
    }
}

#[test]
fn haar_generation_ignores_thread_count() {
    let seed = RngSeed::new(42, "threads");
    let one = in_pool(1, || haar_unitary::<f64>(32, &seed).unwrap());
    let four = in_pool(4, || haar_unitary::<f64>(32, &seed).unwrap());
    assert_eq!(one, four);
}

#[test]
fn trials_ignore_thread_count() {
    for circuit in [CircuitMode::FreshCircuit, CircuitMode::ReuseCircuit] {
        let mut c = config(4, "24", 40, 9);
        c.circuit = circuit;
        let one = in_pool(1, || trial_statistics(&c, 24).unwrap());
        let many = in_pool(16, || trial_statistics(&c, 24).unwrap());
        assert_eq!(one, many);
    }
}
