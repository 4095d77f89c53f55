//! Experiment harness: JSON configuration, seeded (horizon, seed) grids run on
//! a worker pool, and deterministic CSV emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    run_algorithm, AlgoParams, AlgorithmId, RecordOptions, RoundStatus, RunRecord,
};
use crate::diagnostics::{build_alpha_benchmark, AlphaMode};
use crate::env::{
    build_instance, compute_corruption, CorruptionPreset, CorruptionSchedule, EnvConfig,
    LossPattern, ProblemInstance,
};
use crate::error::{Error, Result};
use crate::metrics::{fit_scaling_with_transient_drop, ScalingFit};
use crate::offline::{solve_opt, OfflineSolution};
use crate::strategy::RngStream;

pub const SUMMARY_HEADER: &str =
    "algorithm,T,seed,C_realized,rho,opt,regret,violation,fallbacks,wall_ms";
pub const FITS_HEADER: &str = "algorithm,C_target,metric,slope,intercept,r2,n_points";
pub const SEED_OFFSET_VAR: &str = "CONBANDIT_SEED_OFFSET";

/// Corruption budget, possibly horizon-dependent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorruptionTarget {
    Fixed { value: f64 },
    SqrtT,
    PowT { exponent: f64 },
}

impl CorruptionTarget {
    pub fn realize(&self, horizon: u64) -> f64 {
        match self {
            CorruptionTarget::Fixed { value } => *value,
            CorruptionTarget::SqrtT => (horizon as f64).sqrt().floor(),
            CorruptionTarget::PowT { exponent } => (horizon as f64).powf(*exponent).floor(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CorruptionTarget::Fixed { value } => format!("{value}"),
            CorruptionTarget::SqrtT => "sqrt_T".to_string(),
            CorruptionTarget::PowT { exponent } => format!("T^{exponent}"),
        }
    }
}

/// Shape of the injected corruption; the budget itself comes from the run
/// coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionShape {
    pub preset: CorruptionPreset,
    pub constraint: usize,
    pub delta: Vec<f64>,
    #[serde(default)]
    pub target: Option<CorruptionTarget>,
}

/// Environment block of a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub arms: usize,
    pub constraints: usize,
    pub loss_pattern: LossPattern,
    pub constraint_base: Vec<Vec<f64>>,
    #[serde(default)]
    pub corruption: Option<CorruptionShape>,
    #[serde(default = "default_rho_min")]
    pub rho_min: f64,
}

fn default_rho_min() -> f64 {
    0.05
}

impl EnvSpec {
    /// Materializes the instance for one `(horizon, corruption budget)` cell.
    pub fn instance(&self, horizon: u64, target: Option<f64>) -> Result<ProblemInstance> {
        let schedule = match (&self.corruption, target) {
            (Some(shape), Some(budget)) => CorruptionSchedule::from_preset(
                self.constraint_base.clone(),
                shape.preset,
                budget,
                horizon,
                shape.constraint,
                shape.delta.clone(),
            )?,
            (Some(shape), None) => {
                let budget = shape
                    .target
                    .as_ref()
                    .map(|t| t.realize(horizon))
                    .unwrap_or(0.0);
                CorruptionSchedule::from_preset(
                    self.constraint_base.clone(),
                    shape.preset,
                    budget,
                    horizon,
                    shape.constraint,
                    shape.delta.clone(),
                )?
            }
            (None, _) => CorruptionSchedule::stationary(self.constraint_base.clone()),
        };
        let config = EnvConfig {
            horizon,
            arms: self.arms,
            constraints: self.constraints,
            loss_pattern: self.loss_pattern.clone(),
            schedule,
            rho_min: self.rho_min,
        };
        let mut rng = RngStream::new(0);
        build_instance(&config, &mut rng)
    }
}

/// Algorithm block of a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub id: AlgorithmId,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub eta_override: Option<f64>,
    #[serde(default)]
    pub gamma_override: Option<f64>,
    #[serde(default)]
    pub known_c: Option<f64>,
}

fn default_delta() -> f64 {
    0.1
}

fn default_beta() -> f64 {
    0.5
}

impl AlgorithmSpec {
    pub fn params(&self, record: RecordOptions) -> AlgoParams {
        AlgoParams {
            delta: self.delta,
            beta: self.beta,
            eta_override: self.eta_override,
            gamma_override: self.gamma_override,
            known_c: self.known_c,
            record,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SeedSpec {
    Count { count: u64 },
    List { list: Vec<u64> },
}

impl SeedSpec {
    pub fn resolve(&self, offset: u64) -> Vec<u64> {
        match self {
            SeedSpec::Count { count } => (1..=*count).map(|s| s + offset).collect(),
            SeedSpec::List { list } => list.iter().map(|s| s + offset).collect(),
        }
    }
}

/// Single-algorithm experiment over a list of horizons and seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub env: EnvSpec,
    pub algorithm: AlgorithmSpec,
    pub horizons: Vec<u64>,
    pub seeds: SeedSpec,
    pub output_dir: PathBuf,
}

pub const EXPERIMENT_SCHEMA: &str = "conbandit-experiment-v1";
pub const SWEEP_SCHEMA: &str = "conbandit-sweep-v1";

/// Grid sweep over horizons, corruption budgets, exploration exponents, and
/// algorithms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema: String,
    pub env: EnvSpec,
    pub grid: GridSpec,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub seeds: SeedSpec,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub horizons: Vec<u64>,
    pub c_targets: Vec<CorruptionTarget>,
    pub betas: Vec<f64>,
    pub algorithms: Vec<AlgorithmId>,
}

/// One summary row; the CSV key is `(algorithm, T, seed, C_target, beta)`.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub algorithm: AlgorithmId,
    pub horizon: u64,
    pub seed: u64,
    pub c_target_label: String,
    pub beta: f64,
    pub c_realized: f64,
    pub rho: f64,
    pub opt: f64,
    pub regret: f64,
    pub violation: f64,
    pub fallbacks: u64,
    pub wall_ms: u64,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.horizon,
            self.seed,
            self.c_realized,
            self.rho,
            self.opt,
            self.regret,
            self.violation,
            self.fallbacks,
            self.wall_ms
        )
    }

    /// CSV line with the timing column zeroed; every other field is
    /// deterministic for a fixed config and seed.
    pub fn csv_line_stable(&self) -> String {
        let mut row = self.clone();
        row.wall_ms = 0;
        row.csv_line()
    }

    fn sort_key(&self) -> (String, String, u64, u64, u64) {
        (
            self.algorithm.as_str().to_string(),
            self.c_target_label.clone(),
            self.beta.to_bits(),
            self.horizon,
            self.seed,
        )
    }
}

/// One cell of work for the pool.
#[derive(Debug, Clone)]
struct Task {
    algorithm: AlgorithmId,
    horizon: u64,
    seed: u64,
    c_target: Option<CorruptionTarget>,
    beta: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub traces: bool,
    pub diagnostics: bool,
    pub jobs: Option<usize>,
}

/// Everything produced by one task, kept for optional post-processing.
pub struct CompletedRun {
    pub row: ResultRow,
    pub record: RunRecord,
    pub offline: OfflineSolution,
}

pub fn seed_offset_from_env() -> Result<u64> {
    match std::env::var(SEED_OFFSET_VAR) {
        Ok(text) => text.parse::<u64>().map_err(|_| {
            Error::InvalidConfig(format!("{SEED_OFFSET_VAR} must be an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn run_task(
    env: &EnvSpec,
    spec: &AlgorithmSpec,
    task: &Task,
    record: RecordOptions,
) -> Result<CompletedRun> {
    let budget = task.c_target.as_ref().map(|t| t.realize(task.horizon));
    let inst = env.instance(task.horizon, budget)?;
    let offline = solve_opt(&inst)?;
    let corruption = compute_corruption(&inst);
    let mut params = spec.params(record);
    params.beta = task.beta;
    let start = Instant::now();
    let run = run_algorithm(task.algorithm, &inst, &params, RngStream::new(task.seed))?;
    let wall_ms = start.elapsed().as_millis() as u64;
    let row = ResultRow {
        algorithm: task.algorithm,
        horizon: task.horizon,
        seed: task.seed,
        c_target_label: task
            .c_target
            .as_ref()
            .map(|t| t.label())
            .unwrap_or_else(|| "0".to_string()),
        beta: task.beta,
        c_realized: corruption.level,
        rho: offline.rho,
        opt: offline.opt_value,
        regret: run.summary.regret,
        violation: run.summary.violation,
        fallbacks: run.summary.fallbacks,
        wall_ms,
    };
    Ok(CompletedRun {
        row,
        record: run,
        offline,
    })
}

fn run_pool(
    env: &EnvSpec,
    spec: &AlgorithmSpec,
    tasks: &[Task],
    record: RecordOptions,
    jobs: usize,
) -> Result<Vec<CompletedRun>> {
    let jobs = jobs.max(1).min(tasks.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<CompletedRun>>>> =
        (0..tasks.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= tasks.len() {
                    break;
                }
                let outcome = run_task(env, spec, &tasks[idx], record);
                *slots[idx].lock().expect("result slot") = Some(outcome);
            });
        }
    });
    let mut completed = Vec::with_capacity(tasks.len());
    for slot in slots {
        let outcome = slot
            .into_inner()
            .expect("result slot")
            .expect("task executed");
        completed.push(outcome?);
    }
    Ok(completed)
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
    }
    fs::rename(&tmp, path)
}

/// Deterministically sorted summary CSV. Rewriting the full file keyed on the
/// run coordinates makes re-runs idempotent.
pub fn write_summary(path: &Path, rows: &mut [ResultRow]) -> std::io::Result<()> {
    rows.sort_by_key(|r| r.sort_key());
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows.iter() {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    write_atomically(path, &out)
}

fn write_trace(dir: &Path, row: &ResultRow, record: &RunRecord) -> std::io::Result<()> {
    let name = format!(
        "{}_T{}_C{}_b{}_s{}.csv",
        record.algorithm, record.horizon, row.c_target_label, row.beta, record.seed
    );
    let mut out = String::from("t,arm,realized_loss,status");
    for a in 0..record.arms {
        out.push_str(&format!(",x_{a}"));
    }
    for i in 0..record.constraints {
        out.push_str(&format!(",mean_violation_{i}"));
    }
    for i in 0..record.constraints {
        out.push_str(&format!(",realized_violation_{i}"));
    }
    out.push('\n');
    for r in &record.rows {
        let status = match r.status {
            RoundStatus::Explore => "explore",
            RoundStatus::Interior => "interior",
            RoundStatus::Boundary => "boundary",
            RoundStatus::Fallback => "fallback",
        };
        out.push_str(&format!("{},{},{},{status}", r.t, r.arm, r.realized_loss));
        for p in r.strategy.probs() {
            out.push_str(&format!(",{p}"));
        }
        for v in &r.expected_violations {
            out.push_str(&format!(",{v}"));
        }
        for v in &r.realized_violations {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    write_atomically(&dir.join(name), &out)
}

/// Per-round comparator membership rows: `seed,t,alpha,member,worst_row_slack`.
fn diagnostics_rows(completed: &CompletedRun) -> Result<Vec<String>> {
    let record = &completed.record;
    let mode = match record.algorithm {
        AlgorithmId::ConomdFs | AlgorithmId::ConomdFsIx => AlphaMode::Full,
        AlgorithmId::Expopt => AlphaMode::Bandit {
            beta: beta_from_exploration(record),
        },
        AlgorithmId::KnownC => return Ok(Vec::new()),
    };
    let sets = record
        .decision_sets
        .as_ref()
        .ok_or(Error::MissingGroundTruth("decision sets"))?;
    let c_realized = completed.row.c_realized;
    let benchmark = build_alpha_benchmark(&completed.offline, c_realized, mode, record.horizon)?;
    let mut out = Vec::new();
    for (idx, ds) in sets.iter().enumerate() {
        let t = record.optimization_start + idx as u64;
        let comparator = &benchmark.comparators[(t - 1) as usize];
        let slack = ds.max_residual(comparator);
        out.push(format!(
            "{},{},{},{},{}",
            record.seed,
            t,
            benchmark.alphas[(t - 1) as usize],
            (slack <= 1e-6) as u8,
            slack
        ));
    }
    Ok(out)
}

fn beta_from_exploration(record: &RunRecord) -> f64 {
    // Invert pulls = ceil(T^beta); exact enough for the alpha formula.
    let pulls = record
        .exploration_pulls
        .as_ref()
        .and_then(|p| p.first().copied())
        .unwrap_or(1);
    (pulls as f64).ln() / (record.horizon as f64).ln()
}

pub struct RunOutputs {
    pub rows: Vec<ResultRow>,
    pub summary_path: PathBuf,
}

/// Executes every `(horizon, seed)` cell of an experiment config.
pub fn execute_run(config: &ExperimentConfig, options: RunOptions) -> Result<RunOutputs> {
    if config.schema != EXPERIMENT_SCHEMA {
        return Err(Error::InvalidConfig(format!(
            "unknown schema {:?}, expected {EXPERIMENT_SCHEMA:?}",
            config.schema
        )));
    }
    if config.horizons.is_empty() {
        return Err(Error::InvalidConfig("horizons list is empty".into()));
    }
    let offset = seed_offset_from_env()?;
    let seeds = config.seeds.resolve(offset);
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("seed list is empty".into()));
    }
    let c_target = config
        .env
        .corruption
        .as_ref()
        .and_then(|shape| shape.target.clone());
    let mut tasks = Vec::new();
    for &horizon in &config.horizons {
        for &seed in &seeds {
            tasks.push(Task {
                algorithm: config.algorithm.id,
                horizon,
                seed,
                c_target: c_target.clone(),
                beta: config.algorithm.beta,
            });
        }
    }
    let record = RecordOptions {
        decision_sets: options.diagnostics,
        ..RecordOptions::default()
    };
    let jobs = options.jobs.unwrap_or_else(default_jobs);
    let completed = run_pool(&config.env, &config.algorithm, &tasks, record, jobs)?;

    if options.traces {
        let dir = config.output_dir.join("traces");
        for done in &completed {
            write_trace(&dir, &done.row, &done.record)
                .map_err(|e| Error::InvalidConfig(format!("cannot write trace: {e}")))?;
        }
    }
    if options.diagnostics {
        let mut out = String::from("seed,t,alpha,member,worst_row_slack\n");
        for done in &completed {
            for line in diagnostics_rows(done)? {
                out.push_str(&line);
                out.push('\n');
            }
        }
        write_atomically(&config.output_dir.join("diagnostics.csv"), &out)
            .map_err(|e| Error::InvalidConfig(format!("cannot write diagnostics: {e}")))?;
    }

    let mut rows: Vec<ResultRow> = completed.into_iter().map(|c| c.row).collect();
    let summary_path = config.output_dir.join("summary.csv");
    write_summary(&summary_path, &mut rows)
        .map_err(|e| Error::InvalidConfig(format!("cannot write summary: {e}")))?;
    Ok(RunOutputs { rows, summary_path })
}

#[derive(Debug, Clone)]
pub struct FitRow {
    pub algorithm: AlgorithmId,
    pub c_target_label: String,
    pub metric: &'static str,
    pub fit: ScalingFit,
}

impl FitRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.algorithm,
            self.c_target_label,
            self.metric,
            self.fit.slope,
            self.fit.intercept,
            self.fit.r_squared,
            self.fit.points
        )
    }
}

pub struct SweepOutputs {
    pub rows: Vec<ResultRow>,
    pub fits: Vec<FitRow>,
    pub summary_path: PathBuf,
    pub fits_path: PathBuf,
}

/// Executes a sweep grid and fits scaling exponents of the seed-mean metrics
/// per `(algorithm, corruption target)`.
pub fn execute_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepOutputs> {
    if config.schema != SWEEP_SCHEMA {
        return Err(Error::InvalidConfig(format!(
            "unknown schema {:?}, expected {SWEEP_SCHEMA:?}",
            config.schema
        )));
    }
    let grid = &config.grid;
    if grid.horizons.is_empty()
        || grid.c_targets.is_empty()
        || grid.betas.is_empty()
        || grid.algorithms.is_empty()
    {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    let offset = seed_offset_from_env()?;
    let seeds = config.seeds.resolve(offset);
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("seed list is empty".into()));
    }
    let mut tasks = Vec::new();
    for &algorithm in &grid.algorithms {
        for c_target in &grid.c_targets {
            for &beta in &grid.betas {
                for &horizon in &grid.horizons {
                    for &seed in &seeds {
                        tasks.push(Task {
                            algorithm,
                            horizon,
                            seed,
                            c_target: Some(c_target.clone()),
                            beta,
                        });
                    }
                }
            }
        }
    }
    let spec = AlgorithmSpec {
        id: grid.algorithms[0],
        delta: config.delta,
        beta: grid.betas[0],
        eta_override: None,
        gamma_override: None,
        known_c: None,
    };
    let completed = run_pool(
        &config.env,
        &spec,
        &tasks,
        RecordOptions::default(),
        jobs.unwrap_or_else(default_jobs),
    )?;
    let mut rows: Vec<ResultRow> = completed.into_iter().map(|c| c.row).collect();

    // Seed-mean metric per (algorithm, target, beta, horizon), then a fit over
    // horizons per (algorithm, target, beta).
    let mut fits = Vec::new();
    let multi_beta = grid.betas.len() > 1;
    for &algorithm in &grid.algorithms {
        for c_target in &grid.c_targets {
            for &beta in &grid.betas {
                for (metric, pick) in [
                    ("regret", (|r: &ResultRow| r.regret) as fn(&ResultRow) -> f64),
                    ("violation", |r: &ResultRow| r.violation),
                ] {
                    let mut points = Vec::new();
                    for &horizon in &grid.horizons {
                        let values: Vec<f64> = rows
                            .iter()
                            .filter(|r| {
                                r.algorithm == algorithm
                                    && r.horizon == horizon
                                    && r.beta == beta
                                    && r.c_target_label == c_target.label()
                            })
                            .map(pick)
                            .collect();
                        if !values.is_empty() {
                            let mean = values.iter().sum::<f64>() / values.len() as f64;
                            if mean > 0.0 {
                                points.push((horizon as f64, mean));
                            }
                        }
                    }
                    if points.len() >= 3 {
                        let fit = fit_scaling_with_transient_drop(&points)?;
                        let label = if multi_beta {
                            format!("{}|beta={beta}", c_target.label())
                        } else {
                            c_target.label()
                        };
                        fits.push(FitRow {
                            algorithm,
                            c_target_label: label,
                            metric,
                            fit,
                        });
                    }
                }
            }
        }
    }

    let summary_path = config.output_dir.join("summary.csv");
    write_summary(&summary_path, &mut rows)
        .map_err(|e| Error::InvalidConfig(format!("cannot write summary: {e}")))?;
    let fits_path = config.output_dir.join("fits.csv");
    let mut out = String::from(FITS_HEADER);
    out.push('\n');
    for fit in &fits {
        out.push_str(&fit.csv_line());
        out.push('\n');
    }
    write_atomically(&fits_path, &out)
        .map_err(|e| Error::InvalidConfig(format!("cannot write fits: {e}")))?;
    Ok(SweepOutputs {
        rows,
        fits,
        summary_path,
        fits_path,
    })
}

pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            schema: EXPERIMENT_SCHEMA.to_string(),
            env: EnvSpec {
                arms: 2,
                constraints: 1,
                loss_pattern: LossPattern::Constant {
                    means: vec![0.2, 0.7],
                },
                constraint_base: vec![vec![0.3, -0.6]],
                corruption: None,
                rho_min: 0.05,
            },
            algorithm: AlgorithmSpec {
                id: AlgorithmId::ConomdFs,
                delta: 0.1,
                beta: 0.5,
                eta_override: None,
                gamma_override: None,
                known_c: None,
            },
            horizons: vec![100],
            seeds: SeedSpec::List { list: vec![1] },
            output_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn minimal_run_emits_one_row() {
        let dir = std::env::temp_dir().join("conbandit_harness_test_min");
        let _ = fs::remove_dir_all(&dir);
        let config = minimal_config(&dir);
        let outputs = execute_run(&config, RunOptions::default()).unwrap();
        assert_eq!(outputs.rows.len(), 1);
        let text = fs::read_to_string(&outputs.summary_path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines.len(), 2);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn rerun_is_deterministic_modulo_timing() {
        let dir = std::env::temp_dir().join("conbandit_harness_test_det");
        let _ = fs::remove_dir_all(&dir);
        let mut config = minimal_config(&dir);
        config.horizons = vec![64, 128];
        config.seeds = SeedSpec::Count { count: 3 };
        let first = execute_run(&config, RunOptions::default()).unwrap();
        let second = execute_run(&config, RunOptions::default()).unwrap();
        let a: Vec<String> = first.rows.iter().map(|r| r.csv_line_stable()).collect();
        let b: Vec<String> = second.rows.iter().map(|r| r.csv_line_stable()).collect();
        assert_eq!(a, b);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"schema":"conbandit-experiment-v1","typo_key":1}"#;
        assert!(parse_experiment_config(text).is_err());
    }

    #[test]
    fn corruption_targets_realize() {
        assert_eq!(CorruptionTarget::SqrtT.realize(16384), 128.0);
        assert_eq!(
            CorruptionTarget::PowT { exponent: 0.75 }.realize(16384),
            1448.0
        );
        assert_eq!(CorruptionTarget::Fixed { value: 7.0 }.realize(10), 7.0);
    }
}
