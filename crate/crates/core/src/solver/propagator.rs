use crate::formula::{Assignment, Clause, Lit};

/// Which harvested clause set a propagator's clauses belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagatorKind {
    /// Symmetry-breaking clauses (collected as Σ).
    Symmetry,
    /// Problem-semantics clauses (collected as Π).
    Domain,
    /// Search-control clauses that are not harvested.
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Accept,
    /// The clause must be falsified by the rejected model.
    Reject(Clause),
}

/// Read-only view of the solver state handed to propagators.
#[derive(Clone, Copy)]
pub struct SearchState<'a> {
    pub assignment: &'a Assignment,
    pub trail: &'a [Lit],
    pub decision_level: u32,
}

/// Callbacks through which a propagator observes and constrains search.
///
/// Clauses returned from [`on_fixpoint`](Self::on_fixpoint) must be entailed
/// by the formula plus the problem semantics and must not be satisfied by the
/// current assignment.
pub trait ExternalPropagator {
    fn kind(&self) -> PropagatorKind;

    fn on_assignment(&mut self, _lit: Lit) {}

    fn on_backtrack(&mut self, _level: u32) {}

    fn on_fixpoint(&mut self, _state: &SearchState<'_>) -> Option<Clause> {
        None
    }

    fn on_model(&mut self, model: &Assignment) -> ModelVerdict;

    /// Polled after each propagator round; `Some(level)` below the current
    /// decision level makes the engine backtrack there.
    fn request_backtrack(&mut self) -> Option<u32> {
        None
    }
}
