use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use symcube::conquer::{self, PipelineConfig, PipelineReport};
use symcube::cube::{self, CubeSet, Cuber, Scoring};
use symcube::encode::{EncodingSpec, Problem};
use symcube::formula::{parse_dimacs, Cube};
use symcube::graph::{self, PartialGraph};
use symcube::solver::{enumerate_models, SolverConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| err(format!("unknown {what} {name:?}")))
}

fn spec(
    problem: &str,
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    static_sb: bool,
    maximal: bool,
) -> PyResult<EncodingSpec> {
    let mut s = EncodingSpec::new(parse_enum::<Problem>("problem", problem)?, n);
    s.k = k;
    s.m = m;
    s.include_static_sb = static_sb;
    s.maximal = maximal;
    s.validate().map_err(err)?;
    Ok(s)
}

fn graph_lines(n: usize, models: &[symcube::formula::ProjectedModel]) -> PyResult<Vec<String>> {
    models
        .iter()
        .map(|m| {
            PartialGraph::from_bits(n, &m.0)
                .and_then(|g| graph::to_graph6(&g))
                .map_err(err)
        })
        .collect()
}

/// An encoded graph-search instance.
#[pyclass(frozen)]
struct Encoding(symcube::encode::Encoding);

#[pymethods]
impl Encoding {
    #[getter]
    fn n(&self) -> usize {
        self.0.spec.n
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.0.formula.num_vars()
    }

    #[getter]
    fn num_edge_vars(&self) -> usize {
        self.0.formula.num_edge_vars()
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.0.formula.num_clauses()
    }

    fn dimacs(&self) -> String {
        cube::EnrichedFormula::plain(&self.0.formula).to_dimacs_string()
    }

    fn vars_json(&self) -> String {
        self.0.vars.to_json()
    }

    /// Runs the budgeted prerun and returns the enriched formula.
    #[pyo3(signature = (conflicts=0))]
    fn prerun(&self, conflicts: u64) -> PyResult<EnrichedFormula> {
        let props = self.0.propagators(true).map_err(err)?;
        cube::prerun(&self.0.formula, props, SolverConfig::default(), conflicts)
            .map(EnrichedFormula)
            .map_err(err)
    }

    /// graph6 strings of all canonical solutions, without cubing.
    fn solve_all(&self) -> PyResult<Vec<String>> {
        let proj = cube::projection(&self.0.formula);
        let e = enumerate_models(
            &self.0.formula,
            self.0.propagators(true).map_err(err)?,
            SolverConfig::default(),
            &proj,
        )
        .map_err(err)?;
        graph_lines(self.0.spec.n, &e.models)
    }
}

/// Base formula plus harvested clauses and prerun models.
#[pyclass(frozen)]
struct EnrichedFormula(cube::EnrichedFormula);

#[pymethods]
impl EnrichedFormula {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<EnrichedFormula> {
        cube::EnrichedFormula::parse(text).map(EnrichedFormula).map_err(err)
    }

    #[getter]
    fn num_sigma(&self) -> usize {
        self.0.sigma.len()
    }

    #[getter]
    fn num_pi(&self) -> usize {
        self.0.pi.len()
    }

    #[getter]
    fn num_lambda(&self) -> usize {
        self.0.lambda.len()
    }

    #[getter]
    fn num_blocked(&self) -> usize {
        self.0.blocked_models.len()
    }

    #[getter]
    fn complete(&self) -> bool {
        self.0.complete
    }

    fn dimacs(&self) -> String {
        self.0.to_dimacs_string()
    }

    /// Cubes the formula. `budget` counts conflicts (cdcl) or probes.
    #[pyo3(signature = (encoding, cuber="la-edge", sigma="default", cutoff=3, budget=None, frequency=1))]
    fn cube(
        &self,
        encoding: &Encoding,
        cuber: &str,
        sigma: &str,
        cutoff: usize,
        budget: Option<u64>,
        frequency: u32,
    ) -> PyResult<CubeList> {
        let mut cfg = PipelineConfig::new(encoding.0.spec.clone(), parse_enum::<Cuber>("cuber", cuber)?);
        cfg.sigma = parse_enum::<Scoring>("scoring function", sigma)?;
        cfg.cutoff = cutoff;
        cfg.cube_budget = budget;
        cfg.solver.propagator_frequency = frequency;
        cfg.validate().map_err(err)?;
        conquer::make_cubes(&cfg, &encoding.0, &self.0)
            .map(CubeList)
            .map_err(err)
    }

    /// Solves every cube on `workers` threads.
    #[pyo3(signature = (encoding, cubes, workers=1))]
    fn conquer(&self, py: Python<'_>, encoding: &Encoding, cubes: &CubeList, workers: usize) -> PyResult<Report> {
        let factory = || encoding.0.propagators(true);
        let report = py
            .detach(|| conquer::conquer(&self.0, &cubes.0, &factory, &SolverConfig::default(), workers, None))
            .map_err(err)?;
        Ok(Report {
            n: encoding.0.spec.n,
            inner: report,
        })
    }
}

/// A cube set as produced by one of the cubers.
#[pyclass(frozen)]
struct CubeList(CubeSet);

#[pymethods]
impl CubeList {
    #[staticmethod]
    fn parse_icnf(text: &str) -> PyResult<CubeList> {
        cube::parse_icnf(text).map(CubeList).map_err(err)
    }

    #[staticmethod]
    fn from_lists(origin: &str, cubes: Vec<Vec<i64>>) -> PyResult<CubeList> {
        let cubes = cubes
            .iter()
            .map(|c| Cube::from_dimacs(c))
            .collect::<symcube::Result<Vec<_>>>()
            .map_err(err)?;
        Ok(CubeList(CubeSet::new(origin, cubes)))
    }

    #[getter]
    fn origin(&self) -> String {
        self.0.origin.clone()
    }

    #[getter]
    fn complete(&self) -> bool {
        self.0.complete
    }

    fn cubes(&self) -> Vec<Vec<i64>> {
        self.0
            .cubes
            .iter()
            .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }

    fn icnf(&self) -> String {
        cube::to_icnf_string(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Aggregated conquer results.
#[pyclass(frozen)]
struct Report {
    n: usize,
    inner: PipelineReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn model_count(&self) -> usize {
        self.inner.model_count
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete
    }

    #[getter]
    fn sum_s(&self) -> f64 {
        self.inner.sum_s()
    }

    #[getter]
    fn max_s(&self) -> f64 {
        self.inner.max_s()
    }

    #[getter]
    fn max_conflicts(&self) -> u64 {
        self.inner.max_conflicts
    }

    /// Per-cube conflict counts, in job order.
    fn conflicts(&self) -> Vec<u64> {
        self.inner.results.iter().map(|r| r.conflicts).collect()
    }

    /// graph6 strings of all models, sorted by edge vector.
    fn graph6(&self) -> PyResult<Vec<String>> {
        graph_lines(self.n, &self.inner.models)
    }

    fn models_text(&self) -> PyResult<String> {
        conquer::write_models(self.n, &self.inner.models).map_err(err)
    }

    #[pyo3(signature = (edges_min=None))]
    fn histogram_csv(&self, edges_min: Option<Vec<f64>>) -> PyResult<String> {
        let mut r = self.inner.clone();
        if let Some(e) = edges_min {
            r.rebucket(&e).map_err(err)?;
        }
        Ok(conquer::histogram_csv(&r.histogram))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (problem, n, k=None, m=None, static_sb=false, maximal=true))]
fn encode(
    problem: &str,
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    static_sb: bool,
    maximal: bool,
) -> PyResult<Encoding> {
    symcube::encode::encode(&spec(problem, n, k, m, static_sb, maximal)?)
        .map(Encoding)
        .map_err(err)
}

/// Encode, prerun, cube and conquer in one call.
#[pyfunction]
#[pyo3(signature = (problem, n, k=None, m=None, cuber="la-edge", sigma="default", cutoff=3, prerun_conflicts=0, workers=1, output_dir=None))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    py: Python<'_>,
    problem: &str,
    n: usize,
    k: Option<usize>,
    m: Option<usize>,
    cuber: &str,
    sigma: &str,
    cutoff: usize,
    prerun_conflicts: u64,
    workers: usize,
    output_dir: Option<std::path::PathBuf>,
) -> PyResult<Report> {
    let mut cfg = PipelineConfig::new(
        spec(problem, n, k, m, false, true)?,
        parse_enum::<Cuber>("cuber", cuber)?,
    );
    cfg.sigma = parse_enum::<Scoring>("scoring function", sigma)?;
    cfg.cutoff = cutoff;
    cfg.prerun_conflicts = prerun_conflicts;
    cfg.workers = workers;
    cfg.output_dir = output_dir;
    run_toml_config(py, cfg)
}

/// Runs a pipeline described by a TOML config.
#[pyfunction]
fn run_pipeline_toml(py: Python<'_>, text: &str) -> PyResult<Report> {
    run_toml_config(py, PipelineConfig::from_toml(text).map_err(err)?)
}

fn run_toml_config(py: Python<'_>, cfg: PipelineConfig) -> PyResult<Report> {
    let out = py.detach(|| conquer::run_pipeline(&cfg)).map_err(err)?;
    Ok(Report {
        n: cfg.encoding.n,
        inner: out.report,
    })
}

#[pyfunction]
fn score(sigma: &str, a: f64, b: f64) -> PyResult<f64> {
    Ok(parse_enum::<Scoring>("scoring function", sigma)?.eval(a, b))
}

#[pyfunction]
fn is_canonical(graph6: &str) -> PyResult<bool> {
    let g = graph::from_graph6(graph6).map_err(err)?;
    graph::is_canonical(&g).map(|(c, _)| c).map_err(err)
}

/// All models of a DIMACS formula, as lists of DIMACS literals.
#[pyfunction]
fn enumerate_dimacs(text: &str) -> PyResult<Vec<Vec<i64>>> {
    let f = parse_dimacs(text).map_err(err)?;
    let vars: Vec<u32> = (1..=f.num_vars() as u32).collect();
    let e = enumerate_models(&f, vec![], SolverConfig::default(), &vars).map_err(err)?;
    Ok(e.models
        .iter()
        .map(|m| {
            m.0.iter()
                .zip(&vars)
                .map(|(&b, &v)| if b { i64::from(v) } else { -i64::from(v) })
                .collect()
        })
        .collect())
}

#[pymodule]
fn pysymcube(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Encoding>()?;
    m.add_class::<EnrichedFormula>()?;
    m.add_class::<CubeList>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline_toml, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(is_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_dimacs, m)?)?;
    Ok(())
}
