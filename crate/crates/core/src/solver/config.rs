use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts_enabled: bool,
    pub chronological_backtracking_enabled: bool,
    pub conflict_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// External propagators see every k-th fixpoint.
    pub propagator_frequency: u32,
    /// Polarity of a variable that has never been assigned.
    pub decision_phase_default: bool,
    pub learned_clause_size_harvest_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts_enabled: true,
            chronological_backtracking_enabled: false,
            conflict_budget: None,
            time_budget: None,
            propagator_frequency: 1,
            decision_phase_default: false,
            learned_clause_size_harvest_limit: 5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.propagator_frequency == 0 {
            problems.push("propagator_frequency must be positive");
        }
        if self.learned_clause_size_harvest_limit == 0 {
            problems.push("learned_clause_size_harvest_limit must be positive");
        }
        if self.conflict_budget == Some(0) {
            problems.push("conflict_budget must be positive when present");
        }
        if self.time_budget == Some(Duration::ZERO) {
            problems.push("time_budget must be positive when present");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.learned_clause_size_harvest_limit, 5);
        assert_eq!(c.propagator_frequency, 1);
    }

    #[test]
    fn rejects_zero_parameters() {
        let c = SolverConfig {
            propagator_frequency: 0,
            conflict_budget: Some(0),
            ..Default::default()
        };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("propagator_frequency"));
        assert!(msg.contains("conflict_budget"));
    }
}
