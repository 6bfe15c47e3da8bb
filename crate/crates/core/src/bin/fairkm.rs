use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use fairkm::experiment::{run_experiment, Algorithm, DeltaMode, ExperimentConfig};
use fairkm::flloyd::ZoneConstraint;
use fairkm::lspp::IterationBudget;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Lspp,
    Greedy,
    Vanilla,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstraintArg {
    /// Only zones the center covers alone restrict its move.
    Sole,
    /// Every zone the center covers restricts its move.
    All,
}

fn parse_iterations(s: &str) -> Result<IterationBudget, String> {
    if s == "theory" {
        return Ok(IterationBudget::Theoretical);
    }
    s.parse().map(IterationBudget::Fixed).map_err(|e| format!("{e}"))
}

/// Individually fair k-means experiments.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// CSV file with one point per row.
    #[arg(long)]
    input: PathBuf,
    /// Zero-based column indices to read, e.g. 0,2,4 (default: all).
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<usize>>,
    /// The first row is a header.
    #[arg(long)]
    header: bool,
    /// Scale every column to zero mean and unit standard deviation.
    #[arg(long)]
    normalize: bool,
    /// Run on a uniform subsample of this many points.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Local-search steps, or "theory" for ceil(k ln(n Δ)).
    #[arg(long, default_value = "500", value_parser = parse_iterations)]
    iterations: IterationBudget,
    /// Refinement rounds after local search (0 disables).
    #[arg(long, default_value_t = 20)]
    flloyd_iters: usize,
    #[arg(long, value_enum, default_value_t = ConstraintArg::Sole)]
    flloyd_constraint: ConstraintArg,
    /// exact, sampled:<m>, or auto (exact up to 50,000 points).
    #[arg(long, default_value = "auto")]
    delta_mode: String,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Lspp)]
    algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// With --sample, score solutions on the full dataset.
    #[arg(long)]
    eval_on_full: bool,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let delta_mode: DeltaMode = match args.delta_mode.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cfg = ExperimentConfig {
        input: args.input,
        columns: args.columns,
        has_header: args.header,
        normalize: args.normalize,
        sample: args.sample,
        k: args.k,
        gamma: args.gamma,
        iterations: args.iterations,
        flloyd_iters: args.flloyd_iters,
        flloyd_constraint: match args.flloyd_constraint {
            ConstraintArg::Sole => ZoneConstraint::SoleCoverer,
            ConstraintArg::All => ZoneConstraint::AllCovered,
        },
        delta_mode,
        algorithm: match args.algorithm {
            AlgorithmArg::Lspp => Algorithm::Lspp,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::Vanilla => Algorithm::Vanilla,
        },
        trials: args.trials,
        seed: args.seed,
        restarts: args.restarts,
        eval_on_full: args.eval_on_full,
        out: args.out,
    };
    match run_experiment(&cfg) {
        Ok(report) => {
            print!("{}", report.table());
            if report.all_infeasible() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
