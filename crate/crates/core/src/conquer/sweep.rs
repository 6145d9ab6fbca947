use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cube::{CubeSet, EnrichedFormula};
use crate::error::{Error, Result};
use crate::solver::SolverConfig;

use super::{solve_cube, PropsFactory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    Restarts,
    ChronologicalBacktracking,
    PropagatorFrequency,
    DecisionPhase,
}

impl Param {
    pub const ALL: [Param; 4] = [
        Param::Restarts,
        Param::ChronologicalBacktracking,
        Param::PropagatorFrequency,
        Param::DecisionPhase,
    ];

    fn get(self, cfg: &SolverConfig) -> u64 {
        match self {
            Param::Restarts => u64::from(cfg.restarts_enabled),
            Param::ChronologicalBacktracking => u64::from(cfg.chronological_backtracking_enabled),
            Param::PropagatorFrequency => u64::from(cfg.propagator_frequency),
            Param::DecisionPhase => u64::from(cfg.decision_phase_default),
        }
    }

    fn set(self, cfg: &SolverConfig, value: u64) -> Result<SolverConfig> {
        let mut c = cfg.clone();
        let flag = || match value {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::Config(format!("{self:?} takes 0 or 1, got {value}"))),
        };
        match self {
            Param::Restarts => c.restarts_enabled = flag()?,
            Param::ChronologicalBacktracking => c.chronological_backtracking_enabled = flag()?,
            Param::DecisionPhase => c.decision_phase_default = flag()?,
            Param::PropagatorFrequency => {
                c.propagator_frequency = u32::try_from(value)
                    .ok()
                    .filter(|&f| f >= 1)
                    .ok_or_else(|| Error::Config(format!("propagator frequency {value} out of range")))?
            }
        }
        Ok(c)
    }

    /// The extremes of the admissible range (flags: the other value).
    fn extremes(self, baseline: u64) -> Vec<u64> {
        let range = match self {
            Param::PropagatorFrequency => [1, u64::from(u32::MAX)],
            _ => [0, 1],
        };
        range.into_iter().filter(|&v| v != baseline).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: Param,
    pub baseline: u64,
    pub probes: Vec<u64>,
}

impl SweepSpec {
    /// One spec per parameter, probing the extremes away from `baseline`.
    pub fn defaults(baseline: &SolverConfig) -> Vec<SweepSpec> {
        Param::ALL
            .iter()
            .map(|&p| SweepSpec {
                param: p,
                baseline: p.get(baseline),
                probes: p.extremes(p.get(baseline)),
            })
            .collect()
    }
}

/// Cost of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Time,
    /// Deterministic alternative to wall time.
    Conflicts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: Param,
    pub value: u64,
    /// Summed cost per hardness class, then over all cubes.
    pub class_costs: Vec<f64>,
    pub total_cost: f64,
    /// `probe / baseline` per class; below 1 is an improvement.
    pub class_ratios: Vec<f64>,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metric: Metric,
    /// Upper bounds (inclusive) on baseline per-cube cost for each class but
    /// the last.
    pub class_bounds: Vec<f64>,
    pub class_sizes: Vec<usize>,
    pub baseline_class_costs: Vec<f64>,
    pub rows: Vec<SweepRow>,
    /// Per class: `(param, best ratio, rank)` with competition ranking.
    pub ranking: Vec<Vec<(Param, f64, usize)>>,
}

/// Ranks by ascending value; ties share the rank of their first member.
pub(crate) fn competition_ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|&&w| w < *v).count())
        .collect()
}

/// Per-cube costs under `cfg`, censored at `timeout`.
fn costs(
    ef: &EnrichedFormula,
    cs: &CubeSet,
    factory: &PropsFactory<'_>,
    cfg: &SolverConfig,
    metric: Metric,
    timeout: Option<Duration>,
) -> Result<(Vec<f64>, usize)> {
    let f = ef.formula();
    let proj = ef.projection();
    let cfg = SolverConfig {
        time_budget: timeout,
        ..cfg.clone()
    };
    let mut out = Vec::with_capacity(cs.len());
    let mut censored = 0;
    for c in &cs.cubes {
        let (done, stats, ns) = solve_cube(&f, c, factory, &cfg, &proj)?;
        censored += usize::from(!done);
        out.push(match metric {
            Metric::Conflicts => stats.conflicts as f64,
            Metric::Time if !done => timeout.map_or(ns as f64, |t| t.as_nanos() as f64) * 1e-9,
            Metric::Time => ns as f64 * 1e-9,
        });
    }
    Ok((out, censored))
}

fn ratio(probe: f64, base: f64) -> f64 {
    if base == 0.0 {
        if probe == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        probe / base
    }
}

/// Switches each parameter to each probe value, solves the cube set, and
/// ranks parameters per baseline-hardness class by their best cost ratio.
/// Classes split the cubes into `classes` equal-count groups by baseline cost.
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    specs: &[SweepSpec],
    ef: &EnrichedFormula,
    cs: &CubeSet,
    factory: &PropsFactory<'_>,
    baseline: &SolverConfig,
    metric: Metric,
    classes: usize,
    timeout: Option<Duration>,
) -> Result<SweepReport> {
    if cs.is_empty() {
        return Err(Error::Config("the sweep needs a nonempty cube set".into()));
    }
    let classes = classes.clamp(1, cs.len());
    let (base, _) = costs(ef, cs, factory, baseline, metric, timeout)?;
    let mut sorted = base.clone();
    sorted.sort_by(f64::total_cmp);
    let class_bounds: Vec<f64> = (1..classes).map(|i| sorted[i * sorted.len() / classes - 1]).collect();
    let class_of = |cost: f64| class_bounds.iter().take_while(|&&b| cost > b).count();
    let mut class_sizes = vec![0; classes];
    for &c in &base {
        class_sizes[class_of(c)] += 1;
    }
    let by_class = |cs: &[f64]| {
        let mut sums = vec![0.0; classes];
        for (i, &c) in cs.iter().enumerate() {
            sums[class_of(base[i])] += c;
        }
        sums
    };
    let baseline_class_costs = by_class(&base);

    let mut rows = Vec::new();
    for spec in specs {
        for &value in &spec.probes {
            let cfg = spec.param.set(baseline, value)?;
            let (probe, censored) = costs(ef, cs, factory, &cfg, metric, timeout)?;
            let class_costs = by_class(&probe);
            let class_ratios = class_costs
                .iter()
                .zip(&baseline_class_costs)
                .map(|(&p, &b)| ratio(p, b))
                .collect();
            rows.push(SweepRow {
                param: spec.param,
                value,
                total_cost: probe.iter().sum(),
                class_costs,
                class_ratios,
                censored,
            });
        }
    }

    let params: Vec<Param> = specs.iter().map(|s| s.param).collect();
    let ranking = (0..classes)
        .map(|k| {
            let best: Vec<f64> = params
                .iter()
                .map(|&p| {
                    rows.iter()
                        .filter(|r| r.param == p)
                        .map(|r| r.class_ratios[k])
                        .fold(1.0, f64::min)
                })
                .collect();
            let ranks = competition_ranks(&best);
            params
                .iter()
                .zip(best)
                .zip(ranks)
                .map(|((&p, b), r)| (p, b, r))
                .collect()
        })
        .collect();
    Ok(SweepReport {
        metric,
        class_bounds,
        class_sizes,
        baseline_class_costs,
        rows,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_share_a_rank() {
        assert_eq!(competition_ranks(&[0.5, 1.0, 0.5, 0.9]), vec![1, 4, 1, 3]);
        assert_eq!(competition_ranks(&[]), Vec::<usize>::new());
    }

    #[test]
    fn probes_are_extremes() {
        let specs = SweepSpec::defaults(&SolverConfig::default());
        let freq = specs.iter().find(|s| s.param == Param::PropagatorFrequency).unwrap();
        assert_eq!(freq.probes, vec![u64::from(u32::MAX)]);
        let restarts = specs.iter().find(|s| s.param == Param::Restarts).unwrap();
        assert_eq!((restarts.baseline, restarts.probes.clone()), (1, vec![0]));
        assert!(Param::Restarts.set(&SolverConfig::default(), 2).is_err());
        assert!(Param::PropagatorFrequency.set(&SolverConfig::default(), 0).is_err());
    }
}
