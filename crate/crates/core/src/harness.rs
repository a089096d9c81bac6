//! Repeated seeded runs over a batch of instances, aggregated into one row
//! per instance.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{ProblemInstance, ShiftMode};
use crate::ea::{run_ea, EaParams, RunResult};
use crate::error::{Error, Result};
use crate::io::{list_batch, load_instance, CATALOG_FILE, ROSTER_FILE};
use crate::rng::run_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Solver parameters; the seed field is replaced per run.
    pub params: EaParams,
    pub repeats: usize,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    pub master_seed: u64,
    pub shift_mode: ShiftMode,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            params: EaParams::default(),
            repeats: 10,
            workers: 0,
            master_seed: 0,
            shift_mode: ShiftMode::default(),
        }
    }
}

/// Outcome of one run, reduced to what the tables need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub fitness: f64,
    pub uncovered: usize,
    pub late: usize,
    pub last_improvement: usize,
    pub evaluations: usize,
    pub pct_evals: f64,
}

impl RunSummary {
    pub fn from_result(run: usize, r: &RunResult) -> Self {
        Self {
            run,
            seed: r.seed,
            fitness: r.best_fitness(),
            uncovered: r.best.report.uncovered,
            late: r.best.report.late,
            last_improvement: r.last_improvement,
            evaluations: r.evaluations,
            pct_evals: r.pct_evals(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    /// Lowest best-fitness over the runs.
    pub best: f64,
    /// Mean best-fitness over the runs.
    pub avg: f64,
    /// Mean uncovered slots of each run's best.
    pub missing_staff: f64,
    /// Mean late aircraft of each run's best.
    pub late: f64,
    /// Mean share of the budget used before each run's final improvement.
    pub pct_evals: f64,
    pub runs: Vec<RunSummary>,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn from_runs(instance: String, runs: Vec<RunSummary>) -> Self {
        let n = runs.len().max(1) as f64;
        let mean = |f: fn(&RunSummary) -> f64| runs.iter().map(f).sum::<f64>() / n;
        Self {
            best: runs.iter().map(|r| r.fitness).fold(f64::INFINITY, f64::min),
            avg: mean(|r| r.fitness),
            missing_staff: mean(|r| r.uncovered as f64),
            late: mean(|r| r.late as f64),
            pct_evals: mean(|r| r.pct_evals),
            instance,
            runs,
            error: None,
        }
    }

    fn failed(instance: String, error: String) -> Self {
        Self {
            instance,
            best: f64::NAN,
            avg: f64::NAN,
            missing_staff: f64::NAN,
            late: f64::NAN,
            pct_evals: f64::NAN,
            runs: Vec::new(),
            error: Some(error),
        }
    }

    pub fn all_runs_zero(&self) -> bool {
        self.error.is_none() && !self.runs.is_empty() && self.runs.iter().all(|r| r.fitness == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub failed: usize,
    /// Share of instances where some run reached fitness zero.
    pub best_zero_fraction: f64,
    /// Share of instances where every run reached fitness zero.
    pub all_zero_fraction: f64,
    pub mean_avg: f64,
    pub mean_pct_evals: f64,
}

impl BenchSummary {
    pub fn from_rows(rows: &[BenchRow]) -> Self {
        let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.error.is_none()).collect();
        let n = rows.len().max(1) as f64;
        let m = ok.len().max(1) as f64;
        Self {
            instances: rows.len(),
            failed: rows.len() - ok.len(),
            best_zero_fraction: ok.iter().filter(|r| r.best == 0.0).count() as f64 / n,
            all_zero_fraction: ok.iter().filter(|r| r.all_runs_zero()).count() as f64 / n,
            mean_avg: ok.iter().map(|r| r.avg).sum::<f64>() / m,
            mean_pct_evals: ok.iter().map(|r| r.pct_evals).sum::<f64>() / m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
}

/// Runs the benchmark over every `instance_<k>.csv` in `batch_dir`, which
/// must also hold `catalog.csv` and `roster.csv`. An instance that fails to
/// load yields an error row; the others still run.
pub fn run_benchmark(batch_dir: &Path, config: &BenchConfig) -> Result<BenchReport> {
    let files = list_batch(batch_dir)?;
    if files.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let catalog = batch_dir.join(CATALOG_FILE);
    let roster = batch_dir.join(ROSTER_FILE);
    let instances = files
        .into_iter()
        .map(|(id, path)| {
            let loaded = load_instance(&path, &catalog, &roster, config.shift_mode);
            (id, loaded)
        })
        .collect();
    run_benchmark_instances(instances, config)
}

/// Same as [`run_benchmark`] over instances already in memory.
pub fn run_benchmark_instances(
    instances: Vec<(String, Result<ProblemInstance>)>,
    config: &BenchConfig,
) -> Result<BenchReport> {
    config.params.validate()?;
    if config.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let jobs: Vec<(usize, usize)> = instances
        .iter()
        .enumerate()
        .filter(|(_, (_, inst))| inst.is_ok())
        .flat_map(|(i, _)| (0..config.repeats).map(move |r| (i, r)))
        .collect();
    // Indexed parallel collect keeps job order whatever the completion order.
    let outcomes: Vec<Result<RunSummary>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, r)| {
                let (id, inst) = &instances[i];
                let inst = inst.as_ref().expect("filtered to loaded instances");
                let params = EaParams {
                    seed: run_seed(config.master_seed, id, r),
                    ..config.params.clone()
                };
                run_ea(inst, &params).map(|res| RunSummary::from_result(r, &res))
            })
            .collect()
    });

    let mut outcomes = jobs.iter().zip(outcomes).peekable();
    let mut rows = Vec::with_capacity(instances.len());
    for (i, (id, inst)) in instances.into_iter().enumerate() {
        if let Err(e) = inst {
            rows.push(BenchRow::failed(id, e.to_string()));
            continue;
        }
        let mut runs = Vec::with_capacity(config.repeats);
        let mut error = None;
        while let Some((_, outcome)) = outcomes.next_if(|((j, _), _)| *j == i) {
            match outcome {
                Ok(run) => runs.push(run),
                Err(e) => error = error.or(Some(e.to_string())),
            }
        }
        rows.push(match error {
            Some(e) => BenchRow::failed(id, e),
            None => BenchRow::from_runs(id, runs),
        });
    }
    let summary = BenchSummary::from_rows(&rows);
    Ok(BenchReport { rows, summary })
}

/// Writes the results table: `instance,best,avg,missing_staff,late,pct_evals`.
/// Rows of instances that failed carry empty numeric fields.
pub fn write_results<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "best", "avg", "missing_staff", "late", "pct_evals"])?;
    for row in rows {
        if row.error.is_some() {
            w.write_record([row.instance.as_str(), "", "", "", "", ""])?;
            continue;
        }
        w.write_record([
            row.instance.clone(),
            format_number(row.best),
            format_number(row.avg),
            format_number(row.missing_staff),
            format_number(row.late),
            format_number(row.pct_evals),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn format_number(x: f64) -> String {
    format!("{x:.2}")
}
