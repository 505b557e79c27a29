//! `ttd` — experiments, checks, and curve exports for the truncated
//! temporal-difference toolkit.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ttd_core::env::{shortest_success_depth, CarGeometry};
use ttd_core::harness::specfile::{
    aggregate_csv, build_spec, csv_to_plot_columns, parse_key_values, run_csv, SPEC_KEYS,
};
use ttd_core::harness::{equivalence_report, run_experiment, ExperimentResult};

#[derive(Parser)]
#[command(
    name = "ttd",
    about = "Truncated temporal-difference learning: experiments and checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a learning experiment and write per-run and aggregate metric CSVs.
    Run(RunArgs),
    /// Randomized equivalence and invariant checks; exits nonzero on failure.
    Check {
        /// Sample count scaling every check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 24_181)]
        seed: u64,
    },
    /// Exhaustive car-parking shortest-path verification.
    Oracle {
        /// Expected minimal number of steps to a successful park.
        #[arg(long, default_value_t = 21)]
        expect: usize,
        /// Search horizon.
        #[arg(long, default_value_t = 25)]
        max_depth: usize,
    },
    /// Convert an aggregate metrics CSV to gnuplot-ready columns.
    Curves {
        /// Aggregate CSV produced by `run`.
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Experiment settings. Precedence: flag, then `TTD_*` environment variable,
/// then the spec file, then the preset, then built-in defaults.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` experiment file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Named parameter preset (see the README for the list).
    #[arg(long)]
    preset: Option<String>,
    /// Environment: car-parking or cart-pole.
    #[arg(long)]
    env: Option<String>,
    /// Algorithm: ahc, q-learning, or advantage-updating.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Truncation period (experience-window length).
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    temperature: Option<String>,
    #[arg(long)]
    episodes: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<String>,
    /// Return engine: iterative or incremental.
    #[arg(long)]
    engine: Option<String>,
    /// Total step budget per run.
    #[arg(long)]
    step_cap: Option<String>,
    #[arg(long)]
    metric_window: Option<String>,
    /// Output directory for metric CSVs.
    #[arg(long, default_value = "ttd-out")]
    out: PathBuf,
}

/// Environment variables mirror the run flags with a `TTD_` prefix
/// (TTD_LAMBDA, TTD_STEP_CAP, ...).
const ENV_PREFIX: &str = "TTD_";

fn collect_settings(args: &RunArgs) -> Result<BTreeMap<String, String>, String> {
    let mut settings = BTreeMap::new();
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        settings = parse_key_values(&text).map_err(|e| e.to_string())?;
    }
    for key in SPEC_KEYS {
        let var = format!("{ENV_PREFIX}{}", key.to_uppercase());
        if let Ok(value) = std::env::var(&var) {
            settings.insert(key.to_string(), value);
        }
    }
    let flag_values: [(&str, Option<&String>); 15] = [
        ("preset", args.preset.as_ref()),
        ("env", args.env.as_ref()),
        ("algo", args.algo.as_ref()),
        ("lambda", args.lambda.as_ref()),
        ("m", args.m.as_ref()),
        ("gamma", args.gamma.as_ref()),
        ("alpha", args.alpha.as_ref()),
        ("beta", args.beta.as_ref()),
        ("temperature", args.temperature.as_ref()),
        ("episodes", args.episodes.as_ref()),
        ("runs", args.runs.as_ref()),
        ("seed", args.seed.as_ref()),
        ("engine", args.engine.as_ref()),
        ("step_cap", args.step_cap.as_ref()),
        ("metric_window", args.metric_window.as_ref()),
    ];
    for (key, value) in flag_values {
        if let Some(value) = value {
            settings.insert(key.to_string(), value.clone());
        }
    }
    Ok(settings)
}

fn cmd_run(args: &RunArgs) -> Result<(), String> {
    let settings = collect_settings(args)?;
    let spec = build_spec(&settings).map_err(|e| e.to_string())?;
    eprintln!(
        "running {} x {} episodes x {} runs ({}, lambda={}, m={}, gamma={}, alpha={}, beta={}, T={})",
        spec.environment,
        spec.episodes,
        spec.runs,
        spec.learner.algorithm,
        spec.learner.td.lambda,
        spec.learner.td.m,
        spec.learner.td.gamma,
        spec.learner.alpha,
        spec.learner.beta,
        spec.learner.temperature,
    );
    let result = run_experiment(&spec).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    for run in &result.runs {
        let path = args.out.join(format!("run_{}.csv", run.seed));
        std::fs::write(&path, run_csv(run))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let aggregate_path = args.out.join("aggregate.csv");
    std::fs::write(&aggregate_path, aggregate_csv(&result))
        .map_err(|e| format!("cannot write {}: {e}", aggregate_path.display()))?;

    print_summary(&result);
    eprintln!("metrics written to {}", args.out.display());
    Ok(())
}

fn print_summary(result: &ExperimentResult) {
    let window = result.metric_window;
    let final_reward =
        ExperimentResult::final_window_mean(&result.mean_avg_reward_per_step, window);
    let final_duration = ExperimentResult::final_window_mean(&result.mean_duration, window);
    println!("runs: {}", result.runs.len());
    println!("final {window}-episode mean avg reward/step: {final_reward:.6}");
    println!("final {window}-episode mean duration: {final_duration:.1}");
    println!(
        "mean first-success episode: {:.2} (never-succeeding runs count as {})",
        result.mean_first_success_episode(),
        result.spec_episodes + 1
    );
    let longest = result
        .runs
        .iter()
        .map(|r| r.episodes.iter().map(|e| e.duration).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    println!("longest episode across runs: {longest} steps");
}

fn cmd_check(trials: usize, seed: u64) -> ExitCode {
    let report = equivalence_report(trials, seed);
    let mut all_passed = true;
    for check in &report {
        println!(
            "{:<26} {}  max deviation {:>12.3e} (tolerance {:.0e})  [{}]",
            check.name,
            if check.passed { "PASS" } else { "FAIL" },
            check.max_deviation,
            check.tolerance,
            check.detail
        );
        all_passed &= check.passed;
    }
    if report.is_empty() {
        println!("no trials requested; nothing to check");
    }
    if all_passed {
        println!("check: all {} checks passed", report.len());
        ExitCode::SUCCESS
    } else {
        println!("check: FAILURES present");
        ExitCode::FAILURE
    }
}

fn cmd_oracle(expect: usize, max_depth: usize) -> ExitCode {
    let geometry = CarGeometry::default();
    let start = std::time::Instant::now();
    let report = shortest_success_depth(&geometry, max_depth);
    let elapsed = start.elapsed();
    match report.success_depth {
        Some(depth) => {
            println!(
                "shortest successful parking sequence: {depth} steps \
                 ({} goal poses, {} poses visited, {:.1?})",
                report.successes, report.visited, elapsed
            );
            if depth == expect {
                println!("oracle: PASS (expected {expect})");
                ExitCode::SUCCESS
            } else {
                println!("oracle: FAIL (expected {expect})");
                ExitCode::FAILURE
            }
        }
        None => {
            println!(
                "no success within {max_depth} steps ({} poses visited, {:.1?})",
                report.visited, elapsed
            );
            println!("oracle: FAIL (expected {expect})");
            ExitCode::FAILURE
        }
    }
}

fn cmd_curves(input: &PathBuf, output: Option<&PathBuf>) -> Result<(), String> {
    let csv = std::fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let plot = csv_to_plot_columns(&csv).map_err(|e| e.to_string())?;
    match output {
        Some(path) => std::fs::write(path, plot)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{plot}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match cmd_run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::FAILURE
            }
        },
        Command::Check { trials, seed } => cmd_check(trials, seed),
        Command::Oracle { expect, max_depth } => cmd_oracle(expect, max_depth),
        Command::Curves { input, output } => match cmd_curves(&input, output.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::FAILURE
            }
        },
    }
}
