//! CDCL engine: 1-UIP learning, VSIDS decisions with phase saving, optional
//! Luby restarts and chronological backtracking, and an external-propagator
//! interface consulted at every propagation fixpoint.

mod config;
mod engine;
mod heap;
mod propagator;

pub use config::SolverConfig;
pub use engine::{
    enumerate_models, solve, ClauseOrigin, Enumeration, Harvest, RawFixpoint, SolveOutcome, SolveStatus, Solver, Stats,
};
pub use propagator::{ExternalPropagator, ModelVerdict, PropagatorKind, SearchState};
