//! `boson-bench`: command-line harness for the correlator benchmark.
//!
//! Exit codes: 0 success, 2 configuration error, 3 domain error,
//! 4 failed check.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boson_bench::experiments::{
    self, predictions, CircuitMode, ExperimentConfig, ModeRange, OracleCheckConfig,
};
use boson_bench::io::{self, Provenance};
use boson_bench::species::parse_species_list;
use boson_bench::stats::{certify, cloud_summary};
use boson_bench::{Error, InputSelection, RngSeed};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "boson-bench",
    version,
    about = "Mode-correlator benchmarks for multiparticle interference"
)]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ensemble moments and NM / CV / S for each species.
    Predict(PredictArgs),
    /// One circuit, every species' C-dataset and its histogram.
    Histogram(HistogramArgs),
    /// Cloud mean and spread of NM / CV / S over a range of mode counts.
    Sweep(SweepArgs),
    /// (CV, S) clouds at one mode count, with certification verdicts.
    Scatter(ScatterArgs),
    /// Certify a (CV, S) cloud CSV against the ensemble predictions.
    Certify(CertifyArgs),
    /// Closed-form correlators versus exact permanent/determinant distributions.
    OracleCheck(OracleCheckArgs),
    /// Draw a Haar-random unitary (or its input-mode submatrix) as JSON.
    HaarGen(HaarGenArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Particle count.
    #[arg(short = 'n', long = "particles", default_value_t = 6)]
    n: usize,
    /// Species: boson, fermion, dist, simboson, a comma list, or all.
    #[arg(long, default_value = "all")]
    species: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "boson-bench-out")]
    out: PathBuf,
    /// Reuse one circuit per mode count and vary the input modes per trial.
    #[arg(long)]
    reuse_circuit: bool,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(short = 'n', long = "particles", default_value_t = 6)]
    n: usize,
    /// Mode count, or start:stop:step.
    #[arg(short = 'm', long = "modes", default_value = "120")]
    modes: String,
    #[arg(long, default_value = "all")]
    species: String,
    /// Also write predict.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    #[command(flatten)]
    common: Common,
    #[arg(short = 'm', long = "modes", default_value = "120")]
    modes: String,
    /// Fixed bin count instead of Freedman–Diaconis.
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(short = 'm', long = "modes", default_value = "20:300:20")]
    modes: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(short = 'm', long = "modes", default_value = "120")]
    modes: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Certification thresholds in standard errors.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0])]
    k: Vec<f64>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// Cloud CSV (`trial,cv,s`).
    #[arg(long)]
    cloud: PathBuf,
    #[arg(short = 'n', long = "particles", default_value_t = 6)]
    n: usize,
    #[arg(short = 'm', long = "modes")]
    modes: usize,
    #[arg(long, default_value = "all")]
    species: String,
    #[arg(long, default_value_t = 4.0)]
    k: f64,
    /// Also write verdict.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleCheckArgs {
    #[arg(long, default_value_t = 3)]
    max_n: usize,
    #[arg(long, default_value_t = 6)]
    max_m: usize,
    /// Haar draws per (n, m).
    #[arg(long, default_value_t = 50)]
    draws: usize,
    #[arg(long, default_value_t = 100_000)]
    phase_samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HaarGenArgs {
    #[arg(short = 'm', long = "modes")]
    modes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emit only the rows of these 1-based input modes (comma list).
    #[arg(long, value_delimiter = ',')]
    select: Option<Vec<usize>>,
    /// Emit only input modes 1..=n.
    #[arg(short = 'n', long = "particles", conflicts_with = "select")]
    n: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialises");
    text.push('\n');
    write(path, &text)
}

fn prepare_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn experiment_config(
    common: &Common,
    modes: &str,
    trials: usize,
    k: Vec<f64>,
) -> Result<ExperimentConfig, Error> {
    let modes: ModeRange = modes.parse()?;
    let mut config = ExperimentConfig::new(common.n, modes, trials, common.seed);
    config.species = parse_species_list(&common.species)?;
    config.k = k;
    config.circuit = if common.reuse_circuit {
        CircuitMode::ReuseCircuit
    } else {
        CircuitMode::FreshCircuit
    };
    config.validate()?;
    Ok(config)
}

fn provenance(command: &str, config: &ExperimentConfig) -> Provenance {
    Provenance::new(
        command,
        config.seed,
        serde_json::to_value(config).expect("config serialises"),
    )
}

fn cmd_predict(args: &PredictArgs) -> CliResult {
    let species = parse_species_list(&args.species)?;
    let modes: ModeRange = args.modes.parse()?;
    let mut records = Vec::new();
    for m in modes.values() {
        for &s in &species {
            let record = io::prediction_json(&experiments::predict(s, args.n, m)?);
            println!(
                "{}",
                serde_json::to_string(&record).expect("JSON serialises")
            );
            records.push(record);
        }
    }
    if let Some(dir) = &args.out {
        prepare_dir(dir)?;
        let prov = Provenance::new(
            "predict",
            0,
            json!({"n": args.n, "modes": modes, "species": species}),
        );
        write_json(
            &dir.join("predict.json"),
            &json!({"provenance": prov, "records": records}),
        )?;
    }
    Ok(())
}

fn cmd_histogram(args: &HistogramArgs) -> CliResult {
    let config = experiment_config(&args.common, &args.modes, 1, vec![4.0])?;
    let report = experiments::run_histogram(&config, args.bins)?;
    let prov = provenance("histogram", &config);
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let mut stats = serde_json::Map::new();
    for ((ds, h), (s, st)) in report
        .datasets
        .iter()
        .zip(&report.histograms)
        .zip(&report.statistics)
    {
        write(
            &dir.join(format!("histogram_{s}.csv")),
            &io::histogram_csv(h, Some(&prov)),
        )?;
        write(
            &dir.join(format!("dataset_{s}.csv")),
            &io::dataset_csv(ds, Some(&prov)),
        )?;
        write_json(
            &dir.join(format!("dataset_{s}.json")),
            &io::dataset_sidecar_json(ds, config.seed, Some(&prov)),
        )?;
        stats.insert(
            s.to_string(),
            json!({"nm": st.nm, "cv": st.cv, "s": st.s, "values": ds.len()}),
        );
        println!(
            "{s}: {} values, NM {:.6}, CV {:.6}, S {:.6}",
            ds.len(),
            st.nm,
            st.cv,
            st.s
        );
    }
    write_json(
        &dir.join("histogram_summary.json"),
        &json!({"n": report.n, "m": report.m, "input_modes": report.selection.modes(), "statistics": stats, "provenance": prov}),
    )
}

fn cmd_sweep(args: &SweepArgs) -> CliResult {
    let config = experiment_config(&args.common, &args.modes, args.trials, vec![4.0])?;
    let rows = experiments::run_sweep(&config)?;
    let prov = provenance("sweep", &config);
    prepare_dir(&args.common.out)?;
    write(
        &args.common.out.join("sweep.csv"),
        &io::sweep_csv(&rows, Some(&prov)),
    )?;
    for r in &rows {
        println!(
            "m={:>4} {:<16} NM {:>9.5} ({:>9.5})  CV {:>9.5} ({:>9.5})  S {:>9.5} ({:>9.5})",
            r.m, r.species, r.nm.mean, r.rmt.nm, r.cv.mean, r.rmt.cv, r.s.mean, r.rmt.s
        );
    }
    Ok(())
}

fn k_label(k: f64) -> String {
    format!("{k}")
}

fn cmd_scatter(args: &ScatterArgs) -> CliResult {
    let config = experiment_config(&args.common, &args.modes, args.trials, args.k.clone())?;
    let report = experiments::run_scatter(&config)?;
    let prov = provenance("scatter", &config);
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let mut clouds = serde_json::Map::new();
    for cloud in &report.clouds {
        let s = cloud.species;
        write(
            &dir.join(format!("cloud_{s}.csv")),
            &io::cloud_csv(&cloud.points, Some(&prov)),
        )?;
        if cloud.verdicts.iter().any(|v| v.low_confidence) {
            eprintln!(
                "warning: {s} cloud has only {} trials; verdicts are low-confidence",
                report.trials
            );
        }
        for v in &cloud.verdicts {
            write_json(
                &dir.join(format!("verdict_{s}_k{}.json", k_label(v.k))),
                &io::verdict_json(v, Some(&prov)),
            )?;
            println!(
                "{s} cloud, k={}: accepted {:?}",
                v.k,
                v.accepted.iter().map(|s| s.name()).collect::<Vec<_>>()
            );
        }
        clouds.insert(
            s.to_string(),
            json!({"summary": cloud.summary, "prediction": cloud.prediction}),
        );
    }
    let separations: Vec<Value> = report
        .separations()
        .into_iter()
        .map(|(a, b, d)| json!({"a": a, "b": b, "distance": d}))
        .collect();
    write_json(
        &dir.join("scatter_summary.json"),
        &json!({"n": report.n, "m": report.m, "trials": report.trials, "clouds": clouds, "separations": separations, "provenance": prov}),
    )
}

fn cmd_certify(args: &CertifyArgs) -> CliResult {
    let text = fs::read_to_string(&args.cloud)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.cloud.display())))?;
    let points = io::parse_cloud_csv(&text)?;
    let species = parse_species_list(&args.species)?;
    let cloud = cloud_summary(&points)?;
    let verdict = certify(&cloud, &predictions(&species, args.n, args.modes)?, args.k)?;
    if verdict.low_confidence {
        eprintln!(
            "warning: cloud has only {} points; verdict is low-confidence",
            cloud.t
        );
    }
    let prov = Provenance::new(
        "certify",
        0,
        json!({"cloud": args.cloud.display().to_string(), "n": args.n, "m": args.modes, "species": species, "k": args.k}),
    );
    let value = io::verdict_json(&verdict, Some(&prov));
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("JSON serialises")
    );
    if let Some(dir) = &args.out {
        prepare_dir(dir)?;
        write_json(&dir.join("verdict.json"), &value)?;
    }
    Ok(())
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> CliResult {
    let config = OracleCheckConfig {
        max_n: args.max_n,
        max_m: args.max_m,
        draws: args.draws,
        seed: args.seed,
        phase_samples: args.phase_samples,
        inject_fault: args.inject_fault,
        ..OracleCheckConfig::default()
    };
    let report = experiments::run_oracle_check(&config)?;
    for c in &report.checks {
        println!(
            "{} {:<28} worst {:.3e} (tolerance {:.1e}, {} cases)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.cases
        );
    }
    if let Some(dir) = &args.out {
        prepare_dir(dir)?;
        let prov = Provenance::new(
            "oracle-check",
            config.seed,
            serde_json::to_value(&config).expect("config serialises"),
        );
        write_json(
            &dir.join("oracle_check.json"),
            &json!({"checks": report.checks, "passed": report.passed(), "provenance": prov}),
        )?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check("oracle consistency checks failed".into()))
    }
}

fn cmd_haar_gen(args: &HaarGenArgs) -> CliResult {
    let u = boson_bench::haar_unitary::<f64>(args.modes, &RngSeed::new(args.seed, "haar-gen"))?;
    let selection = match (&args.select, args.n) {
        (Some(modes), _) => Some(InputSelection::new(modes.clone())?),
        (None, Some(n)) => Some(InputSelection::first(n)?),
        (None, None) => None,
    };
    let prov = Provenance::new(
        "haar-gen",
        args.seed,
        json!({"m": args.modes, "select": selection.as_ref().map(|s| s.modes().to_vec())}),
    );
    if let Some(sel) = &selection {
        if sel.n() >= args.modes {
            return Err(Error::Domain(format!(
                "submatrix needs m > n, got n={}, m={}",
                sel.n(),
                args.modes
            ))
            .into());
        }
    }
    let value = match &selection {
        Some(sel) => io::submatrix_json(&boson_bench::extract_submatrix(&u, sel)?, Some(&prov)),
        None => io::unitary_json(&u, Some(&prov)),
    };
    let mut text = serde_json::to_string(&value).expect("JSON serialises");
    text.push('\n');
    match &args.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Predict(a) => cmd_predict(a),
        Command::Histogram(a) => cmd_histogram(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Scatter(a) => cmd_scatter(a),
        Command::Certify(a) => cmd_certify(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
        Command::HaarGen(a) => cmd_haar_gen(a),
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Lib(e) if e.is_domain() => EXIT_DOMAIN,
        Failure::Lib(_) | Failure::Io(_) => EXIT_CONFIG,
        Failure::Check(_) => EXIT_CHECK,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(0) => Err(Failure::Lib(Error::Parse(
            "--threads must be positive".into(),
        ))),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Io(e.to_string())),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Check(e) => eprintln!("check failed: {e}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
