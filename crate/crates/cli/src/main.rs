//! `hermite`: simulate Hermite-process paths and run the validation suites.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or parameter error,
//! 3 numerical failure.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hermite_core::hermite_paths::{atoms_for_replicate, simulate, DriftMode, Route, SimConfig};
use hermite_core::interval_set::IntervalSet;
use hermite_core::rng::GENERATOR_NAME;
use hermite_core::specfun::derive_params;
use hermite_core::validation::{run_suite, Options, Suite, SuiteReport};
use hermite_core::Error;
use serde::{Deserialize, Serialize};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hermite",
    version,
    about = "Hermite process simulation and validation"
)]
struct Cli {
    /// Worker threads (default: available cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(
        long,
        global = true,
        env = "HERMITE_OUT_DIR",
        default_value = "hermite-out"
    )]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an ensemble of paths and write CSV, JSON and a manifest.
    Simulate(SimulateArgs),
    /// Run a validation suite and write a JSON report.
    Validate(ValidateArgs),
    /// Re-run the job recorded in a manifest.
    Replay {
        /// Path to a manifest.json written by an earlier run.
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    beta: f64,
    /// Hermite order.
    #[arg(long)]
    p: u32,
    /// chaos, atoms, timedomain or fbm_exact.
    #[arg(long)]
    route: Route,
    /// Number of replicates.
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    /// Covering scale ε (chaos, atoms).
    #[arg(long)]
    eps: Option<f64>,
    /// Grid step Δ (chaos, timedomain).
    #[arg(long)]
    delta: Option<f64>,
    /// Number of atoms M (atoms).
    #[arg(long)]
    atoms: Option<usize>,
    /// Noise cutoff X (timedomain).
    #[arg(long)]
    xcut: Option<f64>,
    /// Simulation horizon T.
    #[arg(long)]
    horizon: Option<f64>,
    /// Comma-separated output times, e.g. `0,0.25,0.5,1`.
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// Drift constant for the chaos route: asymptotic or exact.
    #[arg(long, default_value = "asymptotic", value_parser = parse_drift)]
    drift_mode: DriftMode,
    /// Rescale so the sample variance at t = 1 equals 1.
    #[arg(long)]
    normalize: bool,
    /// Also write the atoms of the first K replicates to sets.json (atoms route).
    #[arg(long, value_name = "K")]
    dump_sets: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// covering, moments, covariance, cross-route or all.
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Reduced sample sizes with widened budgets.
    #[arg(long)]
    quick: bool,
}

fn parse_drift(s: &str) -> Result<DriftMode, String> {
    match s {
        "asymptotic" => Ok(DriftMode::Asymptotic),
        "exact" => Ok(DriftMode::Exact),
        _ => Err(format!(
            "unknown drift mode '{s}' (expected asymptotic or exact)"
        )),
    }
}

/// What was run; enough to reproduce every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
enum Job {
    Simulate {
        config: SimConfig,
        dump_sets: Option<usize>,
    },
    /// The seed lives in the manifest's top-level `seed` field.
    Validate { suite: String, quick: bool },
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    #[serde(flatten)]
    job: Job,
    seed: u64,
    version: String,
    generator: String,
    workers: usize,
    outputs: Vec<String>,
    elapsed_seconds: f64,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

fn build_config(a: &SimulateArgs) -> Result<SimConfig, Failure> {
    let params = derive_params(a.beta, a.p)?;
    let mut cfg = SimConfig::preset(params, a.route);
    let given = |flag: &str, set: bool, allowed: &[Route]| {
        if set && !allowed.contains(&a.route) {
            Err(Failure::Usage(format!(
                "--{flag} does not apply to route {}",
                a.route
            )))
        } else {
            Ok(())
        }
    };
    given("eps", a.eps.is_some(), &[Route::Chaos, Route::Atoms])?;
    given(
        "delta",
        a.delta.is_some(),
        &[Route::Chaos, Route::Timedomain],
    )?;
    given("atoms", a.atoms.is_some(), &[Route::Atoms])?;
    given("xcut", a.xcut.is_some(), &[Route::Timedomain])?;
    given("dump-sets", a.dump_sets.is_some(), &[Route::Atoms])?;
    cfg.eps = a.eps.or(cfg.eps);
    cfg.delta = a.delta.or(cfg.delta);
    cfg.atoms = a.atoms.or(cfg.atoms);
    cfg.x_cut = a.xcut.or(cfg.x_cut);
    if let Some(h) = a.horizon {
        cfg.horizon = h;
        if a.t_grid.is_none() {
            cfg.t_grid.retain(|&t| t <= h);
        }
    }
    if let Some(g) = &a.t_grid {
        cfg.t_grid = g.clone();
    }
    cfg.replicates = a.reps;
    cfg.seed = a.seed;
    cfg.drift_mode = a.drift_mode;
    cfg.normalize = a.normalize;
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_failure(&path, e))
}

fn json_pretty<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_vec_pretty(v)
        .map_err(|e| Failure::Numerical(format!("JSON encoding failed: {e}")))?;
    s.push(b'\n');
    Ok(s)
}

/// One atom as written by `--dump-sets`: the uncovered set, its shift and the shifted set.
#[derive(Serialize)]
struct DumpedAtom<'a> {
    shift: f64,
    uncovered: &'a IntervalSet,
    shifted: &'a IntervalSet,
}

#[derive(Serialize)]
struct DumpedReplicate<'a> {
    replicate: u64,
    atoms: Vec<DumpedAtom<'a>>,
}

fn run_simulate(
    cfg: &SimConfig,
    dump_sets: Option<usize>,
    dir: &Path,
) -> Result<Vec<String>, Failure> {
    let ens = simulate(cfg)?;
    let mut outputs = Vec::new();
    let csv_path = dir.join("paths.csv");
    let file = fs::File::create(&csv_path).map_err(|e| io_failure(&csv_path, e))?;
    ens.write_csv(BufWriter::new(file))
        .map_err(|e| io_failure(&csv_path, e))?;
    outputs.push("paths.csv".to_string());
    write_file(dir, "paths.json", ens.to_json()?.as_bytes())?;
    outputs.push("paths.json".to_string());
    if let Some(k) = dump_sets {
        let drawn = (0..k.min(cfg.replicates) as u64)
            .map(|i| atoms_for_replicate(cfg, i))
            .collect::<Result<Vec<_>, Error>>()?;
        let dumped: Vec<DumpedReplicate> = drawn
            .iter()
            .enumerate()
            .map(|(i, atoms)| DumpedReplicate {
                replicate: i as u64,
                atoms: atoms
                    .iter()
                    .map(|a| DumpedAtom {
                        shift: a.shift,
                        uncovered: &a.set.uncovered,
                        shifted: &a.shifted_set,
                    })
                    .collect(),
            })
            .collect();
        write_file(dir, "sets.json", &json_pretty(&dumped)?)?;
        outputs.push("sets.json".to_string());
    }
    for w in &ens.meta.warnings {
        log::warn!("{w}");
    }
    println!(
        "wrote {} replicates x {} times to {}",
        ens.replicates(),
        ens.t_grid.len(),
        dir.display()
    );
    Ok(outputs)
}

fn print_report(report: &SuiteReport) {
    for c in &report.criteria {
        let failed: Vec<&str> = c
            .checks
            .iter()
            .filter(|k| !k.pass)
            .map(|k| k.quantity.as_str())
            .collect();
        let tail = if failed.is_empty() {
            String::new()
        } else {
            format!(" (failed: {})", failed.join(", "))
        };
        println!(
            "criterion {:>2} {}: {} [{} checks]{tail}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.title,
            c.checks.len()
        );
        for n in &c.notes {
            println!("    note: {n}");
        }
    }
    println!(
        "suite {}: {}",
        report.suite.name(),
        if report.pass { "PASS" } else { "FAIL" }
    );
}

/// Runs a job, writing outputs and the manifest. Returns whether validation passed.
fn execute(job: &Job, seed: u64, dir: &Path, workers: usize) -> Result<bool, Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let start = Instant::now();
    let (outputs, pass) = match job {
        Job::Simulate { config, dump_sets } => (run_simulate(config, *dump_sets, dir)?, true),
        Job::Validate { suite, quick } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(
                suite,
                Options {
                    seed,
                    quick: *quick,
                },
            )?;
            write_file(dir, "report.json", &json_pretty(&report)?)?;
            print_report(&report);
            (vec!["report.json".to_string()], report.pass)
        }
    };
    let manifest = RunManifest {
        job: job.clone(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        generator: GENERATOR_NAME.to_string(),
        workers,
        outputs,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    write_file(dir, "manifest.json", &json_pretty(&manifest)?)?;
    Ok(pass)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start worker pool: {e}")))?;
    let (job, seed) = match &cli.command {
        Command::Simulate(a) => (
            Job::Simulate {
                config: build_config(a)?,
                dump_sets: a.dump_sets,
            },
            a.seed,
        ),
        Command::Validate(a) => (
            Job::Validate {
                suite: a.suite.name().to_string(),
                quick: a.quick,
            },
            a.seed,
        ),
        Command::Replay { manifest } => {
            let text = fs::read_to_string(manifest)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", manifest.display())))?;
            let m: RunManifest = serde_json::from_str(&text).map_err(|e| {
                Failure::Usage(format!("invalid manifest {}: {e}", manifest.display()))
            })?;
            let mut job = m.job;
            if let Job::Simulate { config, .. } = &mut job {
                // Derived constants are recomputed so an edited manifest cannot desynchronize them.
                config.params = derive_params(config.params.beta, config.params.p)?;
                config.validate()?;
            }
            let seed = match &job {
                Job::Simulate { config, .. } => config.seed,
                Job::Validate { .. } => m.seed,
            };
            (job, seed)
        }
    };
    execute(&job, seed, &cli.out_dir, workers)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
