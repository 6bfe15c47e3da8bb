//! Repeated seeded trials over one prepared dataset, with a JSON report.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{greedy_baseline, vanilla_kmeans};
use crate::centers::CenterPositions;
use crate::dataset::{compute_radii, load_points, normalize, subsample, CsvSchema, Dataset, RadiusBounds, RadiusMode};
use crate::error::{Error, Result};
use crate::fairness::DEFAULT_GAMMA;
use crate::flloyd::{flloyd_run, FlConfig, ZoneConstraint};
use crate::lspp::{self, IterationBudget, LsConfig};
use crate::metrics::{bound_ratio, cost, Objective};

/// Datasets above this size default to sampled radii.
pub const EXACT_RADII_LIMIT: usize = 50_000;
pub const DEFAULT_RADIUS_SAMPLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Lspp,
    Greedy,
    Vanilla,
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lspp" => Ok(Self::Lspp),
            "greedy" => Ok(Self::Greedy),
            "vanilla" => Ok(Self::Vanilla),
            other => Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lspp => "lspp",
            Self::Greedy => "greedy",
            Self::Vanilla => "vanilla",
        })
    }
}

/// How radii are computed for the prepared dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Exact up to [`EXACT_RADII_LIMIT`] points, otherwise sampled over 1000.
    #[default]
    Auto,
    Exact,
    Sampled(usize),
}

impl DeltaMode {
    fn resolve(self, n: usize, seed: u64) -> RadiusMode {
        match self {
            Self::Exact => RadiusMode::Exact,
            Self::Sampled(sample_size) => RadiusMode::Sampled { sample_size, seed },
            Self::Auto if n <= EXACT_RADII_LIMIT => RadiusMode::Exact,
            Self::Auto => RadiusMode::Sampled {
                sample_size: DEFAULT_RADIUS_SAMPLE,
                seed,
            },
        }
    }
}

impl FromStr for DeltaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Self::Exact);
        }
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.strip_prefix("sampled:")
            .and_then(|m| m.parse().ok())
            .filter(|&m| m > 0)
            .map(Self::Sampled)
            .ok_or_else(|| Error::InvalidArgument(format!("bad delta mode {s:?}; use exact or sampled:<m>")))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub columns: Option<Vec<usize>>,
    pub has_header: bool,
    pub normalize: bool,
    pub sample: Option<usize>,
    pub k: usize,
    pub gamma: f64,
    pub iterations: IterationBudget,
    pub flloyd_iters: usize,
    pub flloyd_constraint: ZoneConstraint,
    pub delta_mode: DeltaMode,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Score solutions on the whole (prepared but not subsampled) dataset.
    pub eval_on_full: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(input: impl Into<PathBuf>, k: usize) -> Self {
        Self {
            input: input.into(),
            columns: None,
            has_header: false,
            normalize: false,
            sample: None,
            k,
            gamma: DEFAULT_GAMMA,
            iterations: IterationBudget::Fixed(500),
            flloyd_iters: 20,
            flloyd_constraint: ZoneConstraint::SoleCoverer,
            delta_mode: DeltaMode::Auto,
            algorithm: Algorithm::Lspp,
            trials: 10,
            seed: 0,
            restarts: 1,
            eval_on_full: false,
            out: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.sample == Some(0) {
            return Err(Error::InvalidArgument("sample size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub status: TrialStatus,
    pub error: Option<String>,
    pub kmeans_cost: Option<f64>,
    pub kmedian_cost: Option<f64>,
    /// `null` in JSON when unbounded (a zero radius left unserved).
    pub bound_ratio: Option<f64>,
    pub wall_time_secs: f64,
    pub cost_trace: Vec<f64>,
    pub accepted_swaps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub completed: usize,
    pub failed: usize,
    pub kmeans_cost: Option<Summary>,
    pub kmedian_cost: Option<Summary>,
    pub bound_ratio: Option<Summary>,
    pub wall_time_secs: Option<Summary>,
    pub accepted_swaps: Option<Summary>,
}

impl Aggregate {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let ok: Vec<&TrialRecord> = trials.iter().filter(|t| t.status == TrialStatus::Ok).collect();
        let collect = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<Summary> {
            let v: Option<Vec<f64>> = ok.iter().map(|t| f(t)).collect();
            v.and_then(|v| Summary::of(&v))
        };
        Self {
            completed: ok.len(),
            failed: trials.len() - ok.len(),
            kmeans_cost: collect(&|t| t.kmeans_cost),
            kmedian_cost: collect(&|t| t.kmedian_cost),
            bound_ratio: collect(&|t| t.bound_ratio),
            wall_time_secs: collect(&|t| Some(t.wall_time_secs)),
            accepted_swaps: collect(&|t| Some(t.accepted_swaps as f64)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    /// True when at least one trial ran and none succeeded.
    pub fn all_infeasible(&self) -> bool {
        self.aggregate.completed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "algorithm={} n={} d={} k={}\n{:>6} {:>10} {:>16} {:>16} {:>8} {:>10} {:>8}\n",
            self.algorithm, self.n, self.d, self.k, "trial", "seed", "kmeans", "kmedian", "ratio", "time(s)", "swaps"
        );
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        for (i, t) in self.trials.iter().enumerate() {
            if t.status == TrialStatus::Ok {
                out += &format!(
                    "{:>6} {:>10} {:>16} {:>16} {:>8} {:>10.3} {:>8}\n",
                    i,
                    t.seed,
                    opt(t.kmeans_cost),
                    opt(t.kmedian_cost),
                    t.bound_ratio.map_or_else(|| "inf".into(), |r| format!("{r:.3}")),
                    t.wall_time_secs,
                    t.accepted_swaps
                );
            } else {
                out += &format!("{:>6} {:>10} infeasible: {}\n", i, t.seed, t.error.as_deref().unwrap_or(""));
            }
        }
        let a = &self.aggregate;
        let s = |v: Option<Summary>| v.map_or_else(|| "-".into(), |s| format!("{:.4} ({:.4})", s.mean, s.std));
        out += &format!(
            "mean (std) over {} completed, {} failed: kmeans {} | kmedian {} | ratio {} | time {}\n",
            a.completed,
            a.failed,
            s(a.kmeans_cost),
            s(a.kmedian_cost),
            s(a.bound_ratio),
            s(a.wall_time_secs)
        );
        out
    }
}

/// The dataset the algorithm runs on, and the one solutions are scored on.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub solve: Dataset,
    pub solve_delta: RadiusBounds,
    pub eval: Option<(Dataset, RadiusBounds)>,
}

/// Loads the input and applies normalization, subsampling and radii.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let schema = CsvSchema {
        columns: cfg.columns.clone(),
        has_header: cfg.has_header,
    };
    let ds = load_points(&cfg.input, &schema)?;
    prepare_dataset(ds, cfg)
}

pub fn prepare_dataset(ds: Dataset, cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let full = if cfg.normalize { normalize(&ds)? } else { ds };
    let solve = match cfg.sample {
        Some(m) => subsample(&full, m, cfg.seed)?,
        None => full.clone(),
    };
    let solve_delta = compute_radii(&solve, cfg.k, cfg.delta_mode.resolve(solve.len(), cfg.seed))?;
    let eval = if cfg.eval_on_full && cfg.sample.is_some() {
        let delta = compute_radii(&full, cfg.k, cfg.delta_mode.resolve(full.len(), cfg.seed))?;
        Some((full, delta))
    } else {
        None
    };
    Ok(Prepared {
        solve,
        solve_delta,
        eval,
    })
}

struct TrialRun {
    centers: CenterPositions,
    trace: Vec<f64>,
    accepted: usize,
}

fn solve_once(prep: &Prepared, cfg: &ExperimentConfig, seed: u64) -> Result<TrialRun> {
    let (ds, delta) = (&prep.solve, &prep.solve_delta);
    match cfg.algorithm {
        Algorithm::Lspp => {
            let ls = LsConfig {
                k: cfg.k,
                gamma: cfg.gamma,
                iterations: cfg.iterations,
                seed,
                restarts: cfg.restarts,
            };
            let out = lspp::run(ds, delta, &ls)?;
            let mut trace = vec![out.trace.initial_cost];
            trace.extend(&out.trace.costs);
            let centers = if cfg.flloyd_iters > 0 {
                let fl = FlConfig {
                    iterations: cfg.flloyd_iters,
                    constraint: cfg.flloyd_constraint,
                    ..FlConfig::default()
                };
                let refined = flloyd_run(ds, &out.solution, &out.anchors, &fl)?;
                trace.extend(&refined.costs[1..]);
                refined.centers
            } else {
                out.solution.positions(ds)
            };
            Ok(TrialRun {
                centers,
                trace,
                accepted: out.trace.accepted_swaps(),
            })
        }
        Algorithm::Greedy => {
            let (sol, _) = greedy_baseline(ds, delta, cfg.gamma, cfg.k, seed)?;
            Ok(TrialRun {
                centers: sol.positions(ds),
                trace: vec![sol.total_cost()],
                accepted: 0,
            })
        }
        Algorithm::Vanilla => {
            let out = vanilla_kmeans(ds, cfg.k, seed)?;
            Ok(TrialRun {
                centers: out.centers,
                trace: out.costs,
                accepted: 0,
            })
        }
    }
}

fn run_trial(prep: &Prepared, cfg: &ExperimentConfig, seed: u64) -> Result<TrialRecord> {
    let started = Instant::now();
    let solved = solve_once(prep, cfg, seed);
    let wall_time_secs = started.elapsed().as_secs_f64();
    let run = match solved {
        Ok(run) => run,
        Err(e @ Error::Infeasible { .. }) => {
            return Ok(TrialRecord {
                seed,
                status: TrialStatus::Infeasible,
                error: Some(e.to_string()),
                kmeans_cost: None,
                kmedian_cost: None,
                bound_ratio: None,
                wall_time_secs,
                cost_trace: Vec::new(),
                accepted_swaps: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let (eval_ds, eval_delta) = match &prep.eval {
        Some((ds, delta)) => (ds, delta),
        None => (&prep.solve, &prep.solve_delta),
    };
    let ratio = bound_ratio(eval_ds, eval_delta, &run.centers)?.ratio;
    Ok(TrialRecord {
        seed,
        status: TrialStatus::Ok,
        error: None,
        kmeans_cost: Some(cost(eval_ds, &run.centers, Objective::KMeans)?),
        kmedian_cost: Some(cost(eval_ds, &run.centers, Objective::KMedian)?),
        bound_ratio: ratio.is_finite().then_some(ratio),
        wall_time_secs,
        cost_trace: run.trace,
        accepted_swaps: run.accepted,
    })
}

/// Runs `cfg.trials` trials with seeds `seed, seed + 1, ...` on a prepared dataset.
pub fn run_prepared(prep: &Prepared, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let trials = (0..cfg.trials as u64)
        .map(|i| run_trial(prep, cfg, cfg.seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let aggregate = Aggregate::from_trials(&trials);
    Ok(ExperimentReport {
        algorithm: cfg.algorithm,
        n: prep.solve.len(),
        d: prep.solve.dim(),
        k: cfg.k,
        trials,
        aggregate,
    })
}

/// Full pipeline: load, prepare, run, and write the JSON report if requested.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let prep = prepare(cfg)?;
    let report = run_prepared(&prep, cfg)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, report.to_json()?).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(report)
}
