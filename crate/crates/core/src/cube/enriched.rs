use std::collections::BTreeSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::formula::{parse_dimacs_sections, write_clause, Clause, CnfFormula, ProjectedModel};
use crate::solver::{enumerate_models, ExternalPropagator, SolverConfig};

const COMPLETE_TAG: &str = "prerun complete";

/// The base formula plus everything the prerun learned about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnrichedFormula {
    pub base: CnfFormula,
    pub sigma: Vec<Clause>,
    pub pi: Vec<Clause>,
    pub lambda: Vec<Clause>,
    pub blocked_models: Vec<ProjectedModel>,
    /// The prerun enumerated every model; no cubing needed.
    pub complete: bool,
}

/// Variables that models are projected onto: the edge variables, or all
/// variables for formulas without a graph.
pub fn projection(f: &CnfFormula) -> Vec<u32> {
    if f.num_edge_vars() > 0 {
        f.edge_vars().collect()
    } else {
        (1..=f.num_vars() as u32).collect()
    }
}

fn dedup(cs: Vec<Clause>) -> Vec<Clause> {
    let mut seen = BTreeSet::new();
    cs.into_iter().filter(|c| seen.insert(c.clone())).collect()
}

impl EnrichedFormula {
    pub fn plain(f: &CnfFormula) -> EnrichedFormula {
        EnrichedFormula {
            base: f.clone(),
            sigma: Vec::new(),
            pi: Vec::new(),
            lambda: Vec::new(),
            blocked_models: Vec::new(),
            complete: false,
        }
    }

    pub fn projection(&self) -> Vec<u32> {
        projection(&self.base)
    }

    pub fn blocking_clauses(&self) -> Vec<Clause> {
        let proj = self.projection();
        self.blocked_models.iter().map(|m| m.blocking_clause(&proj)).collect()
    }

    /// `F ∧ Σ ∧ Π ∧ Λ ∧ blocking clauses`.
    pub fn formula(&self) -> CnfFormula {
        let mut f = self.base.clone();
        for c in self
            .sigma
            .iter()
            .chain(&self.pi)
            .chain(&self.lambda)
            .cloned()
            .chain(self.blocking_clauses())
        {
            f.add_clause(c)
                .expect("harvested clauses stay within the base variables");
        }
        f
    }

    pub fn write_dimacs(&self, w: &mut impl Write) -> std::io::Result<()> {
        let blocked = self.blocking_clauses();
        let total = self.base.num_clauses() + self.sigma.len() + self.pi.len() + self.lambda.len() + blocked.len();
        if self.base.num_edge_vars() > 0 {
            writeln!(w, "c edge-vars {}", self.base.num_edge_vars())?;
        }
        if self.complete {
            writeln!(w, "c {COMPLETE_TAG}")?;
        }
        writeln!(w, "p cnf {} {}", self.base.num_vars(), total)?;
        for c in self.base.clauses() {
            write_clause(w, c)?;
        }
        for (name, cs) in [
            ("sigma", &self.sigma),
            ("pi", &self.pi),
            ("lambda", &self.lambda),
            ("blocked", &blocked),
        ] {
            writeln!(w, "c --- {name} ---")?;
            for c in cs {
                write_clause(w, c)?;
            }
        }
        Ok(())
    }

    pub fn to_dimacs_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("DIMACS output is ASCII")
    }

    pub fn parse(text: &str) -> Result<EnrichedFormula> {
        let s = parse_dimacs_sections(text)?;
        let mut base = CnfFormula::new(s.num_vars);
        let mut ef = EnrichedFormula::plain(&base);
        let mut blocked = Vec::new();
        for (name, cs) in s.sections {
            match name.as_str() {
                "" => {
                    for c in cs {
                        base.add_clause(c)?;
                    }
                }
                "sigma" => ef.sigma = cs,
                "pi" => ef.pi = cs,
                "lambda" => ef.lambda = cs,
                "blocked" => blocked = cs,
                other => return Err(Error::Formula(format!("unknown section {other:?}"))),
            }
        }
        base.set_num_edge_vars(s.num_edge_vars)?;
        ef.base = base;
        ef.complete = s.comments.iter().any(|c| c == COMPLETE_TAG);
        let proj = ef.projection();
        for c in blocked {
            let cube = c.negation();
            let vars: Vec<u32> = cube.iter().map(|l| l.var()).collect();
            if vars != proj {
                return Err(Error::Formula(format!(
                    "blocking clause {c:?} does not cover the projection"
                )));
            }
            ef.blocked_models
                .push(ProjectedModel(cube.iter().map(|l| l.is_positive()).collect()));
        }
        Ok(ef)
    }
}

/// Bounded enumeration that harvests Σ, Π and Λ and blocks the models found.
/// A zero budget returns the formula unchanged.
pub fn prerun<'p>(
    f: &CnfFormula,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    cfg: SolverConfig,
    conflicts: u64,
) -> Result<EnrichedFormula> {
    if conflicts == 0 {
        return Ok(EnrichedFormula::plain(f));
    }
    let cfg = SolverConfig {
        conflict_budget: Some(conflicts),
        ..cfg
    };
    let limit = cfg.learned_clause_size_harvest_limit;
    let e = enumerate_models(f, props, cfg, &projection(f))?;
    debug_assert!(e.harvested.lambda.iter().all(|c| c.len() <= limit));
    Ok(EnrichedFormula {
        base: f.clone(),
        sigma: dedup(e.harvested.sigma),
        pi: dedup(e.harvested.pi),
        lambda: dedup(e.harvested.lambda),
        blocked_models: e.models,
        complete: e.complete,
    })
}
