//! CNF encoders for the benchmark families.
//!
//! Edge variables `1..=C(n,2)` come first. Every auxiliary variable is defined
//! by a biconditional, so distinct models project to distinct graphs.

mod problems;
mod totalizer;
mod varmap;

use serde::{Deserialize, Serialize};

use crate::coloring::{Coloring010Propagator, ColoringPropagator, TriangleVars};
use crate::error::{Error, Result};
use crate::formula::CnfFormula;
use crate::sms::MinimalityPropagator;
use crate::solver::ExternalPropagator;

pub use problems::{encode_all_graphs, encode_diameter2, encode_ks, encode_triangle_free, static_symmetry_clauses};
pub use varmap::{VarBlock, VariableMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    AllGraphs,
    TriangleFree,
    Ks,
    Diameter2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub problem: Problem,
    pub n: usize,
    /// Chromatic bound; graphs must not be `(k-1)`-colourable.
    #[serde(default)]
    pub k: Option<usize>,
    /// Exact edge count.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub include_static_sb: bool,
    #[serde(default = "yes")]
    pub maximal: bool,
}

fn yes() -> bool {
    true
}

impl EncodingSpec {
    pub fn new(problem: Problem, n: usize) -> EncodingSpec {
        EncodingSpec {
            problem,
            n,
            k: None,
            m: None,
            include_static_sb: false,
            maximal: true,
        }
    }

    pub fn all_graphs(n: usize) -> EncodingSpec {
        EncodingSpec::new(Problem::AllGraphs, n)
    }

    pub fn triangle_free(n: usize, k: usize) -> EncodingSpec {
        EncodingSpec {
            k: Some(k),
            ..EncodingSpec::new(Problem::TriangleFree, n)
        }
    }

    pub fn diameter2(n: usize, m: usize) -> EncodingSpec {
        EncodingSpec {
            m: Some(m),
            ..EncodingSpec::new(Problem::Diameter2, n)
        }
    }

    pub fn ks(n: usize) -> EncodingSpec {
        EncodingSpec::new(Problem::Ks, n)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let min_n = if self.problem == Problem::AllGraphs { 1 } else { 3 };
        if self.n < min_n {
            errs.push(format!("n must be at least {min_n} for {:?}", self.problem));
        }
        match self.problem {
            Problem::TriangleFree => match self.k {
                None => errs.push("triangle-free needs k".into()),
                Some(k) if k < 2 => errs.push(format!("k must be at least 2, got {k}")),
                _ => {}
            },
            Problem::Diameter2 => match self.m {
                None => errs.push("diameter2 needs m".into()),
                Some(m) if m > crate::graph::num_pairs(self.n) => errs.push(format!(
                    "m = {m} exceeds the {} vertex pairs",
                    crate::graph::num_pairs(self.n)
                )),
                _ => {}
            },
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs.join("; ")))
        }
    }
}

/// An encoded instance together with what its propagators need.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub spec: EncodingSpec,
    pub formula: CnfFormula,
    pub vars: VariableMap,
    pub triangles: Option<TriangleVars>,
}

impl Encoding {
    /// Minimality propagator (if `symmetry`) followed by the problem's domain
    /// propagator.
    pub fn propagators(&self, symmetry: bool) -> Result<Vec<Box<dyn ExternalPropagator>>> {
        let n = self.spec.n;
        let mut props: Vec<Box<dyn ExternalPropagator>> = Vec::new();
        if symmetry {
            props.push(Box::new(MinimalityPropagator::new(n)));
        }
        match self.spec.problem {
            Problem::TriangleFree => {
                let k = self
                    .spec
                    .k
                    .ok_or_else(|| Error::Config("triangle-free needs k".into()))?;
                props.push(Box::new(ColoringPropagator::new(n, k - 1)));
            }
            Problem::Ks => {
                let t = self
                    .triangles
                    .clone()
                    .ok_or_else(|| Error::Config("encoding has no triangle variables".into()))?;
                props.push(Box::new(Coloring010Propagator::new(n, t)?));
            }
            Problem::AllGraphs | Problem::Diameter2 => {}
        }
        Ok(props)
    }
}

pub fn encode(spec: &EncodingSpec) -> Result<Encoding> {
    spec.validate()?;
    problems::encode_spec(spec)
}
