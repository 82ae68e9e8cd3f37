//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs at full scale; use `cargo test --release -p boson-bench-cli --test acceptance`
//! or the workspace test profile (optimised) for the timing budgets.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use boson_bench::correlators::pairs;
use boson_bench::experiments::{
    run_oracle_check, run_scatter, run_sweep, ExperimentConfig, ModeRange, OracleCheckConfig,
    OracleReport,
};
use boson_bench::oracle::{
    exact_distribution, mc_haar_moments, oracle_correlator, simulated_distribution,
};
use boson_bench::{
    c_datasets_all, correlator, haar_submatrix_with, pair_terms, rmt_moments, CMatrix, RngSeed,
    Species, Submatrix64,
};
use rand::Rng;

const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn hom() -> Submatrix64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Submatrix64::new(CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]], h).unwrap()).unwrap()
}

fn config(n: usize, modes: &str, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(n, modes.parse::<ModeRange>().unwrap(), trials, seed)
}

// Shared by the equivalence and sum-rule criteria.
fn oracle_report() -> &'static (OracleReport, Duration) {
    static REPORT: OnceLock<(OracleReport, Duration)> = OnceLock::new();
    REPORT.get_or_init(|| {
        let start = Instant::now();
        let report = run_oracle_check(&OracleCheckConfig {
            max_n: 3,
            max_m: 6,
            draws: 50,
            seed: SEED,
            ..Default::default()
        })
        .unwrap();
        (report, start.elapsed())
    })
}

fn oracle_equivalence() -> Outcome {
    let (report, elapsed) = oracle_report();
    let checks: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("equivalence/"))
        .collect();
    let detail = checks
        .iter()
        .map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.worst, c.tolerance))
        .collect::<Vec<_>>();
    Outcome::new(
        checks.len() == 4 && checks.iter().all(|c| c.passed) && *elapsed < Duration::from_secs(60),
        format!(
            "{}; {:.1}s (limit 60s)",
            detail.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn hom_triple() -> Outcome {
    let sub = hom();
    let expected = [
        (Species::Boson, -1.0),
        (Species::Fermion, 0.0),
        (Species::Distinguishable, -0.5),
        (Species::SimulatedBoson, -0.75),
    ];
    let worst = expected
        .iter()
        .map(|&(s, v)| (correlator(&sub, 1, 2, s).unwrap() - v).abs())
        .fold(0.0, f64::max);
    Outcome::new(
        worst <= 1e-12,
        format!("max deviation {worst:.2e} (limit 1e-12)"),
    )
}

fn algebraic_identities() -> Outcome {
    let (mut identity, mut imag, mut collapse, mut positive, mut singles) =
        (0.0f64, 0.0f64, 0.0f64, 0usize, 0usize);
    for k in 0..1000u64 {
        let mut rng = RngSeed::new(SEED, "acceptance/identities").rng(k);
        let n = rng.random_range(1..=8usize);
        let m = rng.random_range(n + 1..=64usize);
        let sub: Submatrix64 = haar_submatrix_with(n, m, &mut rng).unwrap();
        for (i, j) in pairs(m) {
            let t = pair_terms(&sub, i, j).unwrap();
            let d = t.correlator(Species::Distinguishable);
            identity = identity.max(
                (t.correlator(Species::Boson) + t.correlator(Species::Fermion) - 2.0 * d).abs(),
            );
            imag = imag.max(t.exchange_imag.abs());
            positive += usize::from(d > 0.0);
        }
        if n == 1 {
            singles += 1;
            let [b, f, d, s] = c_datasets_all(&sub).unwrap();
            for other in [&b, &f, &s] {
                for (x, y) in other.values.iter().zip(&d.values) {
                    collapse = collapse.max((x - y).abs());
                }
            }
        }
    }
    Outcome::new(
        identity <= 1e-12 && imag <= 1e-12 && positive == 0 && collapse <= 1e-14 && singles > 0,
        format!(
            "B+F-2D {identity:.2e}, imaginary residue {imag:.2e}, C^D>0 count {positive}, n=1 collapse {collapse:.2e} over {singles} instances"
        ),
    )
}

fn sum_rule() -> Outcome {
    let mut worst = oracle_report()
        .0
        .checks
        .iter()
        .filter(|c| c.name.starts_with("sum-rule/"))
        .map(|c| c.worst)
        .fold(0.0, f64::max);
    // Up to the simulated-boson oracle cap as well.
    for n in 1..=5usize {
        for m in (n + 1).max(2)..=8 {
            let sub: Submatrix64 = haar_submatrix_with(
                n,
                m,
                &mut RngSeed::new(SEED, "acceptance/sum-rule").rng((n * 100 + m) as u64),
            )
            .unwrap();
            let mut dists: Vec<_> = [Species::Boson, Species::Fermion, Species::Distinguishable]
                .into_iter()
                .map(|s| exact_distribution(&sub, s).unwrap())
                .collect();
            dists.push(
                simulated_distribution(&sub, 500, &RngSeed::new(SEED, "acceptance/sum-rule/phase"))
                    .unwrap(),
            );
            for dist in &dists {
                let mut total = 0.0;
                for i in 1..=m {
                    total += oracle_correlator(dist, i, i).unwrap();
                }
                for (i, j) in pairs(m) {
                    total += 2.0 * oracle_correlator(dist, i, j).unwrap();
                }
                worst = worst.max(total.abs());
            }
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!("max |residual| {worst:.2e} (limit 1e-10)"),
    )
}

fn moment_formulas() -> Outcome {
    let start = Instant::now();
    let mut worst_z = 0.0f64;
    for species in Species::ALL {
        let est =
            mc_haar_moments::<f64>(species, 3, 12, 10_000, &RngSeed::new(SEED, "acceptance/mc"))
                .unwrap();
        let exact = rmt_moments::<f64>(species, 3, 12).unwrap();
        let got = [est.moments.m1, est.moments.m2, est.moments.m3];
        let want = [exact.m1, exact.m2, exact.m3];
        for k in 0..3 {
            worst_z = worst_z.max((got[k] - want[k]).abs() / est.std_errors[k]);
        }
    }
    let mut collapse = 0.0f64;
    for m in 2..=1000 {
        let reference = rmt_moments::<f64>(Species::Distinguishable, 1, m).unwrap();
        for species in Species::ALL {
            let t = rmt_moments::<f64>(species, 1, m).unwrap();
            for (x, y) in [
                (t.m1, reference.m1),
                (t.m2, reference.m2),
                (t.m3, reference.m3),
            ] {
                collapse = collapse.max((x - y).abs() / y.abs());
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst_z <= 5.0 && collapse <= 1e-14 && elapsed < Duration::from_secs(120),
        format!(
            "worst |z| {worst_z:.2} (limit 5), n=1 relative spread {collapse:.2e} (limit 1e-14); {:.1}s (limit 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn sweep_reproduction() -> Outcome {
    let start = Instant::now();
    let rows = run_sweep(&config(6, "20:300:20", 500, SEED)).unwrap();
    let mut worst = 0.0f64;
    for r in &rows {
        for (c, p) in [(&r.nm, r.rmt.nm), (&r.cv, r.rmt.cv), (&r.s, r.rmt.s)] {
            worst = worst.max((c.mean - p).abs() / c.sd);
        }
    }
    let mut by_m: BTreeMap<usize, BTreeMap<Species, (f64, f64)>> = BTreeMap::new();
    for r in &rows {
        by_m.entry(r.m)
            .or_default()
            .insert(r.species, (r.rmt.nm, r.nm.mean));
    }
    let ordered = by_m.values().all(|s| {
        let (b, f, d, sim) = (
            s[&Species::Boson],
            s[&Species::Fermion],
            s[&Species::Distinguishable],
            s[&Species::SimulatedBoson],
        );
        f.0 > d.0 && d.0 > b.0 && (b.0 - sim.0).abs() <= 1e-12 * b.0.abs() && f.1 > d.1 && d.1 > b.1
    });
    Outcome::new(
        rows.len() == 60 && worst <= 3.0 && ordered,
        format!(
            "{} rows, worst |mean - prediction| {worst:.2} cloud sd (limit 3), ordering F > D > B = S {}; {:.1}s",
            rows.len(),
            if ordered { "holds" } else { "violated" },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn scatter_reproduction() -> Outcome {
    let report = run_scatter(&config(6, "120", 500, SEED)).unwrap();
    let min_sep = report
        .separations()
        .iter()
        .map(|(_, _, d)| d.unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let own: Vec<(Species, f64)> = report
        .clouds
        .iter()
        .map(|c| {
            let v = c.verdicts.iter().find(|v| v.k == 4.0).unwrap();
            (c.species, v.distances[&c.species])
        })
        .collect();
    let worst_own = own.iter().map(|x| x.1).fold(0.0, f64::max);
    Outcome::new(
        min_sep > 10.0 && worst_own <= 4.0,
        format!(
            "min pairwise separation {min_sep:.1} (limit > 10); distance to own prediction {} (limit 4)",
            own.iter().map(|(s, d)| format!("{s} {d:.2}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn small_cloud_certification() -> Outcome {
    let (mut boson_accepted, mut simulated_rejected) = (0, 0);
    let mut distances = Vec::new();
    for rep in 0..4u64 {
        let report = run_scatter(&config(6, "20", 20, SEED + rep)).unwrap();
        let cloud = report.cloud(Species::Boson).unwrap();
        let v = cloud.verdicts.iter().find(|v| v.k == 4.0).unwrap();
        boson_accepted += usize::from(v.accepted.contains(&Species::Boson));
        simulated_rejected += usize::from(!v.accepted.contains(&Species::SimulatedBoson));
        distances.push(format!(
            "{:.2}/{:.2}",
            v.distances[&Species::Boson],
            v.distances[&Species::SimulatedBoson]
        ));
    }
    Outcome::new(
        boson_accepted >= 3 && simulated_rejected == 4,
        format!(
            "boson accepted {boson_accepted}/4 (need 3), simulated-boson rejected {simulated_rejected}/4 (need 4); distances B/S {}",
            distances.join(" ")
        ),
    )
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            for (k, v) in read_tree(&path) {
                out.insert(
                    format!("{}/{k}", path.file_name().unwrap().to_string_lossy()),
                    v,
                );
            }
        } else {
            out.insert(
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            );
        }
    }
    out
}

fn determinism() -> Outcome {
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "predict",
            "-n",
            "6",
            "-m",
            "20:60:20",
            "--out",
            "{out}/predict",
        ],
        vec![
            "histogram",
            "-n",
            "4",
            "-m",
            "30",
            "--seed",
            "3",
            "--out",
            "{out}/histogram",
        ],
        vec![
            "sweep",
            "-n",
            "4",
            "-m",
            "20:40:10",
            "--trials",
            "30",
            "--seed",
            "3",
            "--out",
            "{out}/sweep",
        ],
        vec![
            "scatter",
            "-n",
            "4",
            "-m",
            "30",
            "--trials",
            "30",
            "--seed",
            "3",
            "--out",
            "{out}/scatter",
        ],
        vec![
            "scatter",
            "-n",
            "4",
            "-m",
            "30",
            "--trials",
            "30",
            "--seed",
            "3",
            "--reuse-circuit",
            "--out",
            "{out}/reuse",
        ],
        vec![
            "oracle-check",
            "--max-n",
            "2",
            "--max-m",
            "4",
            "--draws",
            "3",
            "--phase-samples",
            "5000",
            "--out",
            "{out}/oracle",
        ],
        vec![
            "haar-gen",
            "-m",
            "8",
            "--seed",
            "5",
            "--out",
            "{out}/unitary.json",
        ],
        vec![
            "haar-gen",
            "-m",
            "8",
            "--seed",
            "5",
            "--select",
            "2,5,7",
            "--out",
            "{out}/submatrix.json",
        ],
    ];
    let mut trees = Vec::new();
    for threads in [1, 4, 16] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_string_lossy().into_owned();
        let mut stdout = Vec::new();
        for run in &runs {
            let args: Vec<String> = run.iter().map(|a| a.replace("{out}", &out)).collect();
            let result = Command::new(env!("CARGO_BIN_EXE_boson-bench"))
                .arg("--threads")
                .arg(threads.to_string())
                .args(&args)
                .output()
                .unwrap();
            if !result.status.success() {
                return Outcome::new(
                    false,
                    format!("`{}` failed with {}", args.join(" "), result.status),
                );
            }
            stdout.extend(result.stdout);
        }
        let mut tree = read_tree(dir.path());
        tree.insert("<stdout>".into(), stdout);
        trees.push((threads, tree));
    }
    let files = trees[0].1.len();
    let identical = trees.iter().all(|(_, t)| *t == trees[0].1);
    Outcome::new(
        identical,
        format!(
            "{files} outputs compared across 1/4/16 workers: {}",
            if identical { "identical" } else { "differ" }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        (
            "formula-oracle equivalence (n<=3, m<=6, 50 draws)",
            oracle_equivalence,
        ),
        ("two-mode balanced beamsplitter correlators", hom_triple),
        (
            "algebraic identities on 1000 random instances",
            algebraic_identities,
        ),
        ("particle-number sum rule", sum_rule),
        (
            "ensemble moment formulas vs Haar Monte Carlo",
            moment_formulas,
        ),
        (
            "NM/CV/S sweep n=6 m=20:300:20, 500 trials",
            sweep_reproduction,
        ),
        ("(CV, S) clouds n=6 m=120, 500 trials", scatter_reproduction),
        (
            "small-cloud certification n=6 m=20, 20 trials x 4",
            small_cloud_certification,
        ),
        ("byte-identical outputs under 1/4/16 workers", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        println!(
            "criterion {} {}: {} ({})",
            k + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            name,
            outcome.detail
        );
        if !outcome.passed {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
