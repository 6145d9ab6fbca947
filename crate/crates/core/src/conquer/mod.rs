//! Parallel cube solving, reports, histograms and the parameter sweep.

mod pipeline;
mod sweep;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cube::{CubeSet, EnrichedFormula};
use crate::error::{Error, Result};
use crate::formula::{Clause, CnfFormula, Cube, ProjectedModel};
use crate::solver::{ExternalPropagator, Solver, SolverConfig, Stats};

pub use pipeline::{make_cubes, run_pipeline, write_models, PipelineConfig, PipelineOutcome};
pub use sweep::{sensitivity_sweep, Metric, Param, SweepReport, SweepRow, SweepSpec};

/// Builds fresh propagators for one job.
pub type PropsFactory<'a> = dyn Fn() -> Result<Vec<Box<dyn ExternalPropagator>>> + Sync + 'a;

pub const DEFAULT_BUCKET_EDGES_MIN: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobStatus {
    Done,
    TimedOut,
    Failed(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeResult {
    pub id: usize,
    /// DIMACS literals of the cube; empty for the remainder job.
    pub cube: Vec<i64>,
    pub remainder: bool,
    pub status: JobStatus,
    pub models: Vec<ProjectedModel>,
    pub time_ns: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo_min: f64,
    /// `None` for the overflow bucket.
    pub hi_min: Option<f64>,
    pub total_ns: u64,
    pub cube_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub results: Vec<CubeResult>,
    pub sum_ns: u64,
    pub max_ns: u64,
    pub max_conflicts: u64,
    pub total_conflicts: u64,
    pub histogram: Vec<Bucket>,
    pub prerun_models: usize,
    pub model_count: usize,
    /// Union of prerun and per-cube models, sorted.
    #[serde(skip)]
    pub models: Vec<ProjectedModel>,
    pub cubing_complete: bool,
    /// Every job finished.
    pub complete: bool,
    pub config: serde_json::Value,
}

impl PipelineReport {
    pub fn sum_s(&self) -> f64 {
        self.sum_ns as f64 * 1e-9
    }

    pub fn max_s(&self) -> f64 {
        self.max_ns as f64 * 1e-9
    }
}

struct Job<'a> {
    cube: &'a [crate::formula::Lit],
    extra: &'a [Clause],
}

fn run_job(
    f: &CnfFormula,
    job: &Job<'_>,
    factory: &PropsFactory<'_>,
    cfg: &SolverConfig,
    proj: &[u32],
) -> Result<(Vec<ProjectedModel>, bool, Stats)> {
    let owned;
    let f = if job.extra.is_empty() {
        f
    } else {
        let mut g = f.clone();
        for c in job.extra {
            g.add_clause(c.clone())?;
        }
        owned = g;
        &owned
    };
    let mut s = Solver::new(f, factory()?, cfg.clone())?;
    let (models, complete) = s.enumerate(job.cube, proj)?;
    Ok((models, complete, s.stats().clone()))
}

/// Solves every cube (plus the remainder job of an incomplete CDCL cube set)
/// with a fresh solver and fresh propagators, on `workers` threads. A job that
/// panics is retried once. `timeout` bounds each job's wall time.
pub fn conquer(
    ef: &EnrichedFormula,
    cs: &CubeSet,
    factory: &PropsFactory<'_>,
    cfg: &SolverConfig,
    workers: usize,
    timeout: Option<Duration>,
) -> Result<PipelineReport> {
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    cfg.validate()?;
    let f = ef.formula();
    let proj = ef.projection();
    let cfg = SolverConfig {
        time_budget: timeout.or(cfg.time_budget),
        ..cfg.clone()
    };
    let mut jobs: Vec<Job<'_>> = cs
        .cubes
        .iter()
        .map(|c| Job {
            cube: c.lits(),
            extra: &[],
        })
        .collect();
    if let Some(rest) = cs.remainder.as_ref().filter(|r| !r.is_empty()) {
        jobs.push(Job { cube: &[], extra: rest });
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<CubeResult>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let id = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(id) else {
                    break;
                };
                let start = Instant::now();
                let mut attempts = 0;
                let outcome = loop {
                    attempts += 1;
                    match catch_unwind(AssertUnwindSafe(|| run_job(&f, job, factory, &cfg, &proj))) {
                        Ok(r) => break r.map_err(|e| e.to_string()),
                        Err(_) if attempts < 2 => continue,
                        Err(p) => {
                            let msg = p
                                .downcast_ref::<&str>()
                                .map(|s| s.to_string())
                                .or_else(|| p.downcast_ref::<String>().cloned())
                                .unwrap_or_else(|| "worker panicked".into());
                            break Err(msg);
                        }
                    }
                };
                let time_ns = start.elapsed().as_nanos() as u64;
                let (status, models, stats) = match outcome {
                    Ok((m, true, st)) => (JobStatus::Done, m, st),
                    Ok((m, false, st)) => (JobStatus::TimedOut, m, st),
                    Err(e) => (JobStatus::Failed(e), Vec::new(), Stats::default()),
                };
                let r = CubeResult {
                    id,
                    cube: job.cube.iter().map(|l| l.to_dimacs()).collect(),
                    remainder: !job.extra.is_empty(),
                    status,
                    models,
                    time_ns,
                    conflicts: stats.conflicts,
                    decisions: stats.decisions,
                    propagations: stats.propagations,
                    attempts,
                };
                slots.lock().unwrap()[id] = Some(r);
            });
        }
    });
    let results: Vec<CubeResult> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();
    Ok(aggregate(
        ef,
        cs,
        results,
        &DEFAULT_BUCKET_EDGES_MIN,
        serde_json::json!({ "solver": cfg, "workers": workers }),
    ))
}

fn aggregate(
    ef: &EnrichedFormula,
    cs: &CubeSet,
    results: Vec<CubeResult>,
    edges: &[f64],
    config: serde_json::Value,
) -> PipelineReport {
    let mut models: BTreeSet<ProjectedModel> = ef.blocked_models.iter().cloned().collect();
    for r in &results {
        models.extend(r.models.iter().cloned());
    }
    let times: Vec<u64> = results.iter().map(|r| r.time_ns).collect();
    PipelineReport {
        sum_ns: times.iter().sum(),
        max_ns: times.iter().copied().max().unwrap_or(0),
        max_conflicts: results.iter().map(|r| r.conflicts).max().unwrap_or(0),
        total_conflicts: results.iter().map(|r| r.conflicts).sum(),
        histogram: histogram(&times, edges).expect("bucket edges validated"),
        prerun_models: ef.blocked_models.len(),
        model_count: models.len(),
        models: models.into_iter().collect(),
        cubing_complete: cs.complete,
        complete: results.iter().all(|r| r.status == JobStatus::Done),
        results,
        config,
    }
}

impl PipelineReport {
    /// Rebuilds the histogram with other bucket edges.
    pub fn rebucket(&mut self, edges_min: &[f64]) -> Result<()> {
        let times: Vec<u64> = self.results.iter().map(|r| r.time_ns).collect();
        self.histogram = histogram(&times, edges_min)?;
        Ok(())
    }
}

fn check_edges(edges_min: &[f64]) -> Result<()> {
    if edges_min.iter().any(|e| !e.is_finite() || *e <= 0.0) || edges_min.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "histogram edges must be positive and strictly increasing, got {edges_min:?}"
        )));
    }
    Ok(())
}

/// Total time per bucket `[0,e1), [e1,e2), ..., [ek, ∞)`, edges in minutes.
pub fn histogram(times_ns: &[u64], edges_min: &[f64]) -> Result<Vec<Bucket>> {
    check_edges(edges_min)?;
    let mut buckets: Vec<Bucket> = std::iter::once(0.0)
        .chain(edges_min.iter().copied())
        .enumerate()
        .map(|(i, lo)| Bucket {
            lo_min: lo,
            hi_min: edges_min.get(i).copied(),
            total_ns: 0,
            cube_count: 0,
        })
        .collect();
    for &t in times_ns {
        let minutes = t as f64 / 60e9;
        let i = edges_min.iter().take_while(|&&e| minutes >= e).count();
        buckets[i].total_ns += t;
        buckets[i].cube_count += 1;
    }
    Ok(buckets)
}

/// `bucket_lo_min,bucket_hi_min,total_time_s,cube_count`; the overflow
/// bucket's upper edge is `inf`.
pub fn histogram_csv(buckets: &[Bucket]) -> String {
    let mut s = String::from("bucket_lo_min,bucket_hi_min,total_time_s,cube_count\n");
    for b in buckets {
        let hi = b.hi_min.map_or("inf".to_string(), |h| h.to_string());
        s.push_str(&format!(
            "{},{},{}.{:09},{}\n",
            b.lo_min,
            hi,
            b.total_ns / 1_000_000_000,
            b.total_ns % 1_000_000_000,
            b.cube_count
        ));
    }
    s
}

/// Solves one cube without threads; used by the sweep.
pub(crate) fn solve_cube(
    f: &CnfFormula,
    cube: &Cube,
    factory: &PropsFactory<'_>,
    cfg: &SolverConfig,
    proj: &[u32],
) -> Result<(bool, Stats, u64)> {
    let start = Instant::now();
    let (_, complete, stats) = run_job(
        f,
        &Job {
            cube: cube.lits(),
            extra: &[],
        },
        factory,
        cfg,
        proj,
    )?;
    Ok((complete, stats, start.elapsed().as_nanos() as u64))
}
