use std::cell::RefCell;
use std::rc::Rc;

use crate::error::Result;
use crate::formula::{Assignment, Clause, Cube, Lit};
use crate::solver::{ExternalPropagator, ModelVerdict, PropagatorKind, SearchState, SolveStatus, Solver, SolverConfig};

use super::{CubeSet, EnrichedFormula};

/// Emits the assigned edge literals as a cube once enough are assigned, and
/// blocks the cube with its negation.
struct CutoffCuber {
    edges: Vec<u32>,
    cutoff: usize,
    sink: Rc<RefCell<Vec<Cube>>>,
}

impl CutoffCuber {
    fn edge_cube(&self, a: &Assignment) -> Cube {
        Cube::new(self.edges.iter().filter_map(|&v| a.value(v).map(|b| Lit::new(v, b))))
            .expect("one literal per variable")
    }

    /// A new cube must not overlap an earlier one, so every earlier negation
    /// has to be satisfied already.
    fn disjoint(&self, a: &Assignment) -> bool {
        self.sink
            .borrow()
            .iter()
            .all(|c| c.iter().any(|l| a.lit_value(l) == Some(false)))
    }

    fn emit(&self, a: &Assignment) -> Clause {
        let cube = self.edge_cube(a);
        let neg = cube.negation();
        self.sink.borrow_mut().push(cube);
        neg
    }
}

impl ExternalPropagator for CutoffCuber {
    fn kind(&self) -> PropagatorKind {
        PropagatorKind::Auxiliary
    }

    fn on_fixpoint(&mut self, state: &SearchState<'_>) -> Option<Clause> {
        let a = state.assignment;
        let assigned = self.edges.iter().filter(|&&v| a.value(v).is_some()).count();
        (assigned >= self.cutoff.min(self.edges.len()) && self.disjoint(a)).then(|| self.emit(a))
    }

    fn on_model(&mut self, model: &Assignment) -> ModelVerdict {
        ModelVerdict::Reject(self.emit(model))
    }
}

/// CDCL cubing on `F̂`: whenever at least `cutoff` projection (edge) variables are assigned
/// at a fixpoint, the assigned edge literals become a cube whose negation is
/// added as an irredundant clause. `props` run before the cuber.
///
/// If `conflicts` runs out, the set is incomplete and its remainder is the
/// conjunction of the emitted negations.
pub fn cube_cdcl_cutoff<'p>(
    ef: &EnrichedFormula,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    cfg: SolverConfig,
    cutoff: usize,
    conflicts: Option<u64>,
) -> Result<CubeSet> {
    let origin = format!("cdcl cutoff={cutoff}");
    let f = ef.formula();
    if ef.complete {
        return Ok(CubeSet::new(origin, Vec::new()));
    }
    let sink = Rc::new(RefCell::new(Vec::new()));
    let mut props = props;
    props.push(Box::new(CutoffCuber {
        edges: ef.projection(),
        cutoff: cutoff.max(1),
        sink: Rc::clone(&sink),
    }));
    let cfg = SolverConfig {
        conflict_budget: conflicts,
        ..cfg
    };
    let mut s = Solver::new(&f, props, cfg)?;
    let status = s.solve_with(&[])?;
    drop(s);
    let cubes = Rc::try_unwrap(sink).expect("solver dropped").into_inner();
    Ok(match status {
        SolveStatus::Unsat => CubeSet::new(origin, cubes),
        SolveStatus::BudgetExhausted => {
            let rest = cubes.iter().map(Cube::negation).collect();
            CubeSet {
                complete: false,
                remainder: Some(rest),
                ..CubeSet::new(origin, cubes)
            }
        }
        SolveStatus::Sat => unreachable!("the cuber rejects every model"),
    })
}
