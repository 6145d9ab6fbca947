//! Search modulo isomorphism: a propagator that restricts the solver to
//! graphs with a lexicographically minimal adjacency matrix.

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Lit};
use crate::graph::{
    edge_var, is_canonical, partial_minimality_check, Entry, MinimalityWitness, PartialGraph, DEFAULT_NODE_BUDGET,
};
use crate::solver::{ExternalPropagator, ModelVerdict, PropagatorKind, SearchState};

/// The clause excluding every completion that agrees with `g` on the entries
/// the witness relies on.
pub fn derive_symmetry_clause(w: &MinimalityWitness, g: &PartialGraph) -> Result<Clause> {
    let mut lits = Vec::new();
    for (p, value) in w.entries() {
        match g.get(p.u, p.v) {
            Entry::Unknown => {
                return Err(Error::PropagatorContract(format!(
                    "witness certificate touches unknown pair {p}"
                )))
            }
            e if e.value() != Some(value) => {
                return Err(Error::PropagatorContract(format!(
                    "witness certificate disagrees with the graph at {p}"
                )))
            }
            _ => lits.push(Lit::new(edge_var(g.n(), p)?, !value)),
        }
    }
    Clause::new(lits)
}

/// Minimality-check propagator over the first `C(n,2)` variables.
#[derive(Debug, Clone)]
pub struct MinimalityPropagator {
    n: usize,
    budget: u64,
    checks: u64,
}

impl MinimalityPropagator {
    pub fn new(n: usize) -> MinimalityPropagator {
        MinimalityPropagator::with_budget(n, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(n: usize, budget: u64) -> MinimalityPropagator {
        MinimalityPropagator { n, budget, checks: 0 }
    }

    /// Partial checks run so far.
    pub fn checks(&self) -> u64 {
        self.checks
    }

    fn clause_for(&self, w: &MinimalityWitness, g: &PartialGraph) -> Clause {
        derive_symmetry_clause(w, g).expect("witnesses from the search only use defined entries")
    }
}

impl ExternalPropagator for MinimalityPropagator {
    fn kind(&self) -> PropagatorKind {
        PropagatorKind::Symmetry
    }

    fn on_fixpoint(&mut self, state: &SearchState<'_>) -> Option<Clause> {
        let g = PartialGraph::from_assignment(self.n, state.assignment);
        if g.entries().iter().all(|&e| e == Entry::Unknown) {
            return None;
        }
        self.checks += 1;
        let w = partial_minimality_check(&g, self.budget)?;
        Some(self.clause_for(&w, &g))
    }

    fn on_model(&mut self, model: &Assignment) -> ModelVerdict {
        let g = PartialGraph::from_assignment(self.n, model);
        match is_canonical(&g).expect("models assign every edge variable") {
            (true, _) => ModelVerdict::Accept,
            (false, w) => ModelVerdict::Reject(self.clause_for(&w.unwrap(), &g)),
        }
    }
}
