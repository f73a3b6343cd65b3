//! Command-line front end: single decodes, sweeps, sample-complexity curves
//! and the built-in verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crowd_cluster::experiment::{
    calibrate, decode_trial, estimate_sample_complexity, point_seed, run_selftest, run_trials, verify_appendix_c, ExperimentPlan,
    RunOptions,
};
use crowd_cluster::partition::correct_partition;
use crowd_cluster::rng::derive_seed;

#[derive(Parser)]
#[command(name = "crowd-cluster", version, about = "Universal clustering of crowdsourced responses")]
struct Cli {
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PlanArgs {
    /// Experiment plan (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the plan's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one seeded trial at the first grid point and print the partitions as JSON.
    Simulate {
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Run every grid point of a plan and write CSV (plus a `.meta.json` sidecar with --out).
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        /// Record per-row wall time (output is then no longer byte-reproducible).
        #[arg(long)]
        wall_clock: bool,
    },
    /// Bisect the plan's n_grid for the smallest n meeting a target error.
    Complexity {
        #[command(flatten)]
        plan: PlanArgs,
        /// Target block-error rate.
        #[arg(long, default_value_t = 0.1)]
        target: f64,
    },
    /// Check the inertial hypothesis closed forms against brute-force enumeration.
    VerifyAppendixC {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.4])]
        epsilons: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6, 7, 8, 9, 10, 11, 12])]
        ells: Vec<usize>,
        /// Write the JSON report here; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites.
    Selftest,
}

/// Failure kinds, mapped to exit codes.
enum Failure {
    Usage(String),
    Check,
}

impl From<crowd_cluster::Error> for Failure {
    fn from(e: crowd_cluster::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(args: &PlanArgs) -> Result<ExperimentPlan, Failure> {
    let mut plan = ExperimentPlan::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        plan.master_seed = seed;
    }
    Ok(plan)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(args: &PlanArgs) -> Result<(), Failure> {
    let plan = load(args)?;
    let point = plan.point(plan.sweep.values[0])?;
    let (constants, _) = calibrate(&plan, std::slice::from_ref(&point))?;
    let seed = derive_seed(point_seed(&plan, plan.master_seed, 0), &[0]);
    let (labels, estimate) = decode_trial(&plan, &point, constants, seed)?;
    let truth = correct_partition(&labels);
    let report = serde_json::json!({
        "ell": point.ell,
        "n": point.n,
        "seed": seed,
        "constants": constants,
        "labels": labels.labels(),
        "estimate": estimate,
        "truth": truth,
        "correct": estimate == truth,
    });
    emit(args.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")))
}

fn sweep(args: &PlanArgs, wall_clock: bool) -> Result<(), Failure> {
    let plan = load(args)?;
    let result = run_trials(&plan, RunOptions { wall_clock })?;
    emit(args.out.as_deref(), &result.to_csv())?;
    match &args.out {
        Some(path) => emit(Some(&path.with_extension("meta.json")), &result.metadata_json()),
        None => {
            eprintln!("{}", result.metadata_json());
            Ok(())
        }
    }
}

fn complexity(args: &PlanArgs, target: f64) -> Result<(), Failure> {
    let plan = load(args)?;
    let result = estimate_sample_complexity(&plan, target)?;
    if result.points.iter().any(|p| p.non_monotone) {
        eprintln!("warning: non-monotone error estimates; see the evaluated column");
    }
    emit(args.out.as_deref(), &result.to_csv())
}

fn appendix(epsilons: &[f64], ells: &[usize], out: Option<&Path>) -> Result<(), Failure> {
    if let Some(&ell) = ells.iter().find(|&&l| l > 12) {
        return Err(Failure::Usage(format!("ℓ = {ell} exceeds 12")));
    }
    let report = verify_appendix_c(epsilons, ells)?;
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")))?;
    eprintln!("{} (max deviation {:e})", if report.pass { "PASS" } else { "FAIL" }, report.max_deviation);
    if report.pass { Ok(()) } else { Err(Failure::Check) }
}

fn selftest() -> Result<(), Failure> {
    let checks = run_selftest()?;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().all(|c| c.pass) { Ok(()) } else { Err(Failure::Check) }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Simulate { plan } => simulate(plan),
        Command::Sweep { plan, wall_clock } => sweep(plan, *wall_clock),
        Command::Complexity { plan, target } => complexity(plan, *target),
        Command::VerifyAppendixC { epsilons, ells, out } => appendix(epsilons, ells, out.as_deref()),
        Command::Selftest => selftest(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check) => ExitCode::from(2),
    }
}
