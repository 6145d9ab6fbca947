use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symcube::conquer::{
    conquer, histogram_csv, make_cubes, run_pipeline, sensitivity_sweep, write_models, Metric, PipelineConfig,
    PipelineReport, SweepSpec,
};
use symcube::cube::{parse_icnf, prerun, to_icnf_string, Cuber, EnrichedFormula, Scoring};
use symcube::encode::{encode, EncodingSpec, Problem};
use symcube::{Error, Result};

#[derive(Parser)]
#[command(
    name = "symcube",
    version,
    about = "Cube-and-conquer graph search modulo isomorphism"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the DIMACS encoding and its variable map.
    Encode(Common),
    /// Run the budgeted prerun and write the enriched formula.
    Prerun(Common),
    /// Cube a formula and write an iCNF file.
    Cube(Files),
    /// Solve a cube set and write models, report and histogram.
    Conquer(Files),
    /// Encode, prerun, cube and conquer in one go.
    Pipeline(Common),
    /// Parameter sensitivity sweep over a cube set.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// TOML pipeline config; flags given alongside it are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all-graphs")]
    problem: Problem,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Add the static lex-leader clauses.
    #[arg(long)]
    static_sb: bool,
    /// Drop the maximality constraint (triangle-free only).
    #[arg(long)]
    non_maximal: bool,
    #[arg(long, value_enum, default_value = "la-edge")]
    cuber: Cuber,
    #[arg(long, value_enum, default_value = "default")]
    sigma: Scoring,
    #[arg(long, default_value_t = 3)]
    cutoff: usize,
    #[arg(long, default_value_t = 0)]
    prerun_conflicts: u64,
    /// Conflict budget (cdcl) or probe budget (look-ahead cubers).
    #[arg(long)]
    cube_budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    frequency: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Per-cube timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Accepted for compatibility; every heuristic is deterministic.
    #[arg(long)]
    seedless: bool,
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct Files {
    #[command(flatten)]
    common: Common,
    /// Enriched formula; defaults to `<out>/<stem>.cnf`.
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Cube file; defaults to `<out>/<stem>.icnf`.
    #[arg(long)]
    icnf: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    files: Files,
    #[arg(long, value_enum, default_value = "time")]
    metric: MetricArg,
    /// Number of baseline-hardness classes.
    #[arg(long, default_value_t = 3)]
    classes: usize,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MetricArg {
    Time,
    Conflicts,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        if let Some(path) = &self.config {
            let mut cfg = PipelineConfig::from_toml(&std::fs::read_to_string(path)?)?;
            cfg.output_dir.get_or_insert_with(|| self.out.clone());
            return Ok(cfg);
        }
        let mut spec = EncodingSpec::new(self.problem, self.n);
        spec.k = self.k;
        spec.m = self.m;
        spec.include_static_sb = self.static_sb;
        spec.maximal = !self.non_maximal;
        let mut cfg = PipelineConfig::new(spec, self.cuber);
        cfg.sigma = self.sigma;
        cfg.cutoff = self.cutoff;
        cfg.prerun_conflicts = self.prerun_conflicts;
        cfg.cube_budget = self.cube_budget;
        cfg.workers = self.workers;
        cfg.timeout_s = self.timeout;
        cfg.solver.propagator_frequency = self.frequency;
        cfg.output_dir = Some(self.out.clone());
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn save(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))
}

fn load_inputs(files: &Files, cfg: &PipelineConfig, dir: &Path) -> Result<(EnrichedFormula, symcube::cube::CubeSet)> {
    let stem = cfg.stem();
    let cnf = files.cnf.clone().unwrap_or_else(|| dir.join(format!("{stem}.cnf")));
    let icnf = files.icnf.clone().unwrap_or_else(|| dir.join(format!("{stem}.icnf")));
    let ef = EnrichedFormula::parse(&std::fs::read_to_string(cnf)?)?;
    let cs = parse_icnf(&std::fs::read_to_string(icnf)?)?;
    Ok((ef, cs))
}

fn write_report(cfg: &PipelineConfig, dir: &Path, report: &PipelineReport) -> Result<()> {
    save(
        &dir.join(format!("{}.models", cfg.stem())),
        &write_models(cfg.encoding.n, &report.models)?,
    )?;
    save(&dir.join("report.json"), &json(report)?)?;
    save(&dir.join("histogram.csv"), &histogram_csv(&report.histogram))
}

fn summary(report: &PipelineReport) -> bool {
    println!(
        "models {}  cubes {}  sum {:.3}s  max {:.3}s  max conflicts {}",
        report.model_count,
        report.results.len(),
        report.sum_s(),
        report.max_s(),
        report.max_conflicts
    );
    report.complete
}

/// Ok(true) when the run finished completely.
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Encode(c) => {
            let cfg = c.config()?;
            let dir = out_dir(&cfg)?;
            let enc = encode(&cfg.encoding)?;
            let stem = cfg.stem();
            save(
                &dir.join(format!("{stem}.cnf")),
                &EnrichedFormula::plain(&enc.formula).to_dimacs_string(),
            )?;
            save(&dir.join(format!("{stem}.vars.json")), &enc.vars.to_json())?;
            Ok(true)
        }
        Cmd::Prerun(c) => {
            let cfg = c.config()?;
            let dir = out_dir(&cfg)?;
            let enc = encode(&cfg.encoding)?;
            let ef = prerun(
                &enc.formula,
                enc.propagators(true)?,
                cfg.solver.clone(),
                cfg.prerun_conflicts,
            )?;
            save(&dir.join(format!("{}.cnf", cfg.stem())), &ef.to_dimacs_string())?;
            println!(
                "sigma {}  pi {}  lambda {}  blocked {}  complete {}",
                ef.sigma.len(),
                ef.pi.len(),
                ef.lambda.len(),
                ef.blocked_models.len(),
                ef.complete
            );
            Ok(true)
        }
        Cmd::Cube(f) => {
            let cfg = f.common.config()?;
            let dir = out_dir(&cfg)?;
            let enc = encode(&cfg.encoding)?;
            let cnf = f.cnf.clone().unwrap_or_else(|| dir.join(format!("{}.cnf", cfg.stem())));
            let ef = if cnf.exists() {
                EnrichedFormula::parse(&std::fs::read_to_string(&cnf)?)?
            } else {
                prerun(
                    &enc.formula,
                    enc.propagators(true)?,
                    cfg.solver.clone(),
                    cfg.prerun_conflicts,
                )?
            };
            let cs = make_cubes(&cfg, &enc, &ef)?;
            let icnf = f
                .icnf
                .clone()
                .unwrap_or_else(|| dir.join(format!("{}.icnf", cfg.stem())));
            save(&icnf, &to_icnf_string(&cs))?;
            println!("cubes {}  complete {}", cs.len(), cs.complete);
            Ok(cs.complete)
        }
        Cmd::Conquer(f) => {
            let cfg = f.common.config()?;
            let dir = out_dir(&cfg)?;
            let enc = encode(&cfg.encoding)?;
            let (ef, cs) = load_inputs(&f, &cfg, &dir)?;
            let factory = || enc.propagators(true);
            let mut report = conquer(&ef, &cs, &factory, &cfg.solver, cfg.workers, cfg.timeout())?;
            report.rebucket(&cfg.histogram_edges_min)?;
            write_report(&cfg, &dir, &report)?;
            Ok(summary(&report))
        }
        Cmd::Pipeline(c) => {
            let cfg = c.config()?;
            let out = run_pipeline(&cfg)?;
            Ok(summary(&out.report))
        }
        Cmd::Sweep(s) => {
            let cfg = s.files.common.config()?;
            let dir = out_dir(&cfg)?;
            let enc = encode(&cfg.encoding)?;
            let (ef, cs) = load_inputs(&s.files, &cfg, &dir)?;
            let factory = || enc.propagators(true);
            let metric = match s.metric {
                MetricArg::Time => Metric::Time,
                MetricArg::Conflicts => Metric::Conflicts,
            };
            let specs = SweepSpec::defaults(&cfg.solver);
            let r = sensitivity_sweep(
                &specs,
                &ef,
                &cs,
                &factory,
                &cfg.solver,
                metric,
                s.classes,
                cfg.timeout(),
            )?;
            for (k, class) in r.ranking.iter().enumerate() {
                for (p, ratio, rank) in class {
                    println!("class {k}  rank {rank}  {p:?}  {ratio:.4}");
                }
            }
            save(&dir.join("sweep.json"), &json(&r)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("incomplete run");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
