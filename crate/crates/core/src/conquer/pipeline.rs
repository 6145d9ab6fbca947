use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cube::{
    cube_cdcl_cutoff, cube_lookahead, cube_march_style, prerun, to_icnf_string, CubeSet, Cuber, EnrichedFormula, Scope,
    Scoring,
};
use crate::encode::{encode, Encoding, EncodingSpec};
use crate::error::{Error, Result};
use crate::formula::ProjectedModel;
use crate::graph::{to_edge_list, to_graph6, PartialGraph};
use crate::solver::{ExternalPropagator, SolverConfig};

use super::{conquer, histogram_csv, PipelineReport, DEFAULT_BUCKET_EDGES_MIN};

fn default_cutoff() -> usize {
    3
}
fn default_workers() -> usize {
    1
}
fn default_edges() -> Vec<f64> {
    DEFAULT_BUCKET_EDGES_MIN.to_vec()
}

/// Everything one encode → prerun → cube → conquer run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(flatten)]
    pub encoding: EncodingSpec,
    pub cuber: Cuber,
    #[serde(default)]
    pub sigma: Scoring,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default)]
    pub prerun_conflicts: u64,
    /// Conflicts for the CDCL cuber, probes for the look-ahead cubers.
    #[serde(default)]
    pub cube_budget: Option<u64>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Per-cube wall-time limit.
    #[serde(default)]
    pub timeout_s: Option<f64>,
    #[serde(default = "default_edges")]
    pub histogram_edges_min: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl PipelineConfig {
    pub fn new(encoding: EncodingSpec, cuber: Cuber) -> PipelineConfig {
        PipelineConfig {
            encoding,
            cuber,
            sigma: Scoring::Default,
            cutoff: default_cutoff(),
            prerun_conflicts: 0,
            cube_budget: None,
            workers: default_workers(),
            timeout_s: None,
            histogram_edges_min: default_edges(),
            output_dir: None,
            solver: SolverConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<PipelineConfig> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reports every problem at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for r in [
            self.encoding.validate(),
            self.solver.validate(),
            super::check_edges(&self.histogram_edges_min),
        ] {
            if let Err(Error::Config(m)) = r {
                errs.push(m);
            }
        }
        if self.cutoff == 0 {
            errs.push("cutoff must be at least 1".into());
        }
        if self.workers == 0 {
            errs.push("workers must be at least 1".into());
        }
        if self.timeout_s.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            errs.push("timeout_s must be positive".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs.join("; ")))
        }
    }

    pub fn timeout(&self) -> Option<Duration> {
        self.timeout_s.map(Duration::from_secs_f64)
    }

    /// File name stem, e.g. `triangle-free-n5-k3`.
    pub fn stem(&self) -> String {
        let e = &self.encoding;
        let mut s = format!(
            "{}-n{}",
            serde_json::to_value(e.problem).unwrap().as_str().unwrap(),
            e.n
        );
        if let Some(k) = e.k {
            s.push_str(&format!("-k{k}"));
        }
        if let Some(m) = e.m {
            s.push_str(&format!("-m{m}"));
        }
        s
    }
}

/// Intermediate artifacts of a pipeline run.
pub struct PipelineOutcome {
    pub encoding: Encoding,
    pub enriched: EnrichedFormula,
    pub cubes: CubeSet,
    pub report: PipelineReport,
}

/// Runs the configured cuber on `ef`.
pub fn make_cubes(cfg: &PipelineConfig, enc: &Encoding, ef: &EnrichedFormula) -> Result<CubeSet> {
    let props = || enc.propagators(true);
    let freq = cfg.solver.propagator_frequency;
    match cfg.cuber {
        Cuber::Cdcl => cube_cdcl_cutoff(ef, props()?, cfg.solver.clone(), cfg.cutoff, cfg.cube_budget),
        Cuber::LaAll => cube_lookahead(
            ef,
            props()?,
            freq,
            Scope::AllVars,
            cfg.sigma,
            cfg.cutoff,
            cfg.cube_budget,
        ),
        Cuber::LaEdge => cube_lookahead(
            ef,
            props()?,
            freq,
            Scope::EdgeVars,
            cfg.sigma,
            cfg.cutoff,
            cfg.cube_budget,
        ),
        Cuber::March => cube_march_style(ef, cfg.cutoff, cfg.cube_budget),
    }
}

/// One line per model: edge list, a tab, graph6.
pub fn write_models(n: usize, models: &[ProjectedModel]) -> Result<String> {
    let mut s = String::new();
    for m in models {
        let g = PartialGraph::from_bits(n, &m.0)?;
        s.push_str(&format!("{}\t{}\n", to_edge_list(&g), to_graph6(&g)?));
    }
    Ok(s)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

/// Runs encode → prerun → cube → conquer and, if `output_dir` is set, writes
/// the enriched formula, cubes, models, report and histogram there.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let enc = encode(&cfg.encoding)?;
    let ef = prerun(
        &enc.formula,
        enc.propagators(true)?,
        cfg.solver.clone(),
        cfg.prerun_conflicts,
    )?;
    let cubes = make_cubes(cfg, &enc, &ef)?;
    let factory = || -> Result<Vec<Box<dyn ExternalPropagator>>> { enc.propagators(true) };
    let mut report = conquer(&ef, &cubes, &factory, &cfg.solver, cfg.workers, cfg.timeout())?;
    report.rebucket(&cfg.histogram_edges_min)?;
    report.config = serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)?;
        let stem = cfg.stem();
        write(dir, &format!("{stem}.cnf"), &ef.to_dimacs_string())?;
        write(dir, &format!("{stem}.vars.json"), &enc.vars.to_json())?;
        write(dir, &format!("{stem}.icnf"), &to_icnf_string(&cubes))?;
        write(
            dir,
            &format!("{stem}.models"),
            &write_models(cfg.encoding.n, &report.models)?,
        )?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
        write(dir, "report.json", &json)?;
        write(dir, "histogram.csv", &histogram_csv(&report.histogram))?;
    }
    Ok(PipelineOutcome {
        encoding: enc,
        enriched: ef,
        cubes,
        report,
    })
}
