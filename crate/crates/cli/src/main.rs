//! Batch front end for the quasi-Hermitian evolution toolkit.
//!
//! One JSON config describes one run: a model, a scenario, a time window,
//! and optional threshold overrides. Every run writes `<stem>.csv` (the
//! time series) and `<stem>.summary.json` (spectrum, residual maxima,
//! pass/fail per invariant, and the echoed config). Both files are
//! byte-deterministic for a given config; timing is printed to stdout only.
//!
//! Exit codes: 0 success, 1 tolerance failure (files still written),
//! 2 config error, 3 physics rejection (e.g. broken phase), 4 I/O error.

// Negated comparisons like `!(x > 0.0)` are NaN-rejecting validation guards:
// the rejection branch must trigger for NaN, which `x <= 0.0` would miss.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod report;
mod runner;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, Scenario};
use crate::error::{io_err, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "nhh",
    version,
    about = "Metric construction, Dyson maps, and Heisenberg-representation \
             evolution for quasi-Hermitian Hamiltonians"
)]
struct Cli {
    /// Suppress stdout progress (output files are still written).
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JobArgs {
    /// Run config (strict JSON; unknown keys are rejected).
    config: PathBuf,
    /// Output stem override: writes <stem>.csv and <stem>.summary.json.
    /// Relative stems are rooted at NHH_OUTPUT_DIR when that is set.
    #[arg(long)]
    output: Option<String>,
    /// Integrator sub-step override (must not exceed the output grid step).
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scenario named in the config.
    Run(JobArgs),
    /// Run the full invariant battery, whatever the config's scenario says.
    Verify(JobArgs),
    /// Report the spectrum of H(t0) only — legal even in the broken phase.
    Spectrum(JobArgs),
    /// Run every *.json config in a directory concurrently.
    Sweep {
        /// Directory holding run configs.
        dir: PathBuf,
        /// Integrator sub-step override applied to every config.
        #[arg(long)]
        dt: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => job(args, None, "run", cli.quiet),
        Command::Verify(args) => job(args, Some(Scenario::Verify), "verify", cli.quiet),
        Command::Spectrum(args) => job(args, Some(Scenario::Spectrum), "spectrum", cli.quiet),
        Command::Sweep { dir, dt } => sweep(dir, *dt, cli.quiet),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn job(args: &JobArgs, forced: Option<Scenario>, command: &str, quiet: bool) -> CliResult<()> {
    let mut log = String::new();
    let result = single(
        &args.config,
        args.output.as_deref(),
        args.dt,
        forced,
        command,
        &mut log,
    );
    if !quiet {
        print!("{log}");
    }
    result
}

/// Loads, runs, and writes one config; progress lines are appended to `log`
/// so a sweep can buffer them per worker. Output files are written even
/// when invariants fail — the tolerance error is raised afterwards.
fn single(
    config_path: &Path,
    output: Option<&str>,
    dt: Option<f64>,
    forced: Option<Scenario>,
    command: &str,
    log: &mut String,
) -> CliResult<()> {
    use std::fmt::Write;

    let started = Instant::now();
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(dt) = dt {
        cfg.integrator_dt = dt;
    }
    if let Some(scenario) = forced {
        cfg.scenario = scenario;
    }
    if let Some(stem) = output {
        cfg.output_path = Some(stem.to_string());
    }
    cfg.validate()?;

    let out = runner::execute(&cfg, command)?;

    let stem = resolve_stem(cfg.output_path.as_deref(), config_path);
    let csv_path = PathBuf::from(format!("{}.csv", stem.display()));
    let json_path = PathBuf::from(format!("{}.summary.json", stem.display()));
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| io_err(&format!("creating {}", parent.display()), e))?;
        }
    }
    report::write_csv(&csv_path, &out.rows)?;
    report::write_summary(&json_path, &out.summary)?;

    let _ = writeln!(log, "wrote {}", csv_path.display());
    let _ = writeln!(log, "wrote {}", json_path.display());
    for inv in &out.summary.invariants {
        if !inv.pass {
            let _ = writeln!(
                log,
                "FAIL {}: {:.3e} > {:.3e}",
                inv.name, inv.max_residual, inv.threshold
            );
        }
    }
    let verdict = if out.summary.overall_pass {
        "PASS"
    } else {
        "FAIL"
    };
    let _ = writeln!(log, "overall: {verdict}");
    let _ = writeln!(log, "wall time: {:.3}s", started.elapsed().as_secs_f64());

    let failed = out.summary.failed();
    if failed > 0 {
        return Err(CliError::Tolerance {
            failed,
            total: out.summary.invariants.len(),
        });
    }
    Ok(())
}

/// Output stem: explicit `output_path` if configured, else the config file's
/// own stem. Relative stems are rooted at NHH_OUTPUT_DIR when set, so a
/// batch can be redirected without touching any config.
fn resolve_stem(configured: Option<&str>, config_path: &Path) -> PathBuf {
    let stem = match configured {
        Some(s) => PathBuf::from(s),
        None => PathBuf::from(config_path.file_stem().unwrap_or_default()),
    };
    if stem.is_absolute() {
        return stem;
    }
    match std::env::var_os("NHH_OUTPUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(stem),
        _ => stem,
    }
}

/// Runs every config in `dir` on its own thread, prints the buffered logs
/// in filename order, and exits with the most severe per-config code.
fn sweep(dir: &Path, dt: Option<f64>, quiet: bool) -> CliResult<()> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| io_err(&format!("reading {}", dir.display()), e))?;
    let mut configs: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| path.extension().is_some_and(|ext| ext == "json"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err(CliError::Config(format!(
            "no *.json configs in {}",
            dir.display()
        )));
    }

    let results: Vec<(String, CliResult<()>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let mut log = String::new();
                    let result = single(path, None, dt, None, "sweep", &mut log);
                    (log, result)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut worst: Option<CliError> = None;
    for (path, (log, result)) in configs.iter().zip(results) {
        if !quiet {
            println!("=== {}", path.display());
            print!("{log}");
        }
        if let Err(e) = result {
            eprintln!("{}: error: {e}", path.display());
            let more_severe = worst.as_ref().is_none_or(|w| severity(&e) > severity(w));
            if more_severe {
                worst = Some(e);
            }
        }
    }
    match worst {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn severity(e: &CliError) -> u8 {
    match e {
        CliError::Io(_) => 4,
        CliError::Physics(_) => 3,
        CliError::Config(_) => 2,
        CliError::Tolerance { .. } => 1,
    }
}
