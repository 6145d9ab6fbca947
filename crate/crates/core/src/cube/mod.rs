//! Prerun, cubing strategies, scoring functions and cube files.

mod cdcl;
mod enriched;
mod icnf;
mod lookahead;
mod probe;
mod scoring;

use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::formula::{Clause, Cube};

pub use cdcl::cube_cdcl_cutoff;
pub use enriched::{prerun, projection, EnrichedFormula};
pub use icnf::{parse_icnf, to_icnf_string, write_icnf};
pub use lookahead::{cube_lookahead, cube_march_style, Scope};
pub use scoring::{score_presets, Scoring, EPSILON};

/// Cubing strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Cuber {
    Cdcl,
    LaAll,
    LaEdge,
    March,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSet {
    pub cubes: Vec<Cube>,
    /// Cuber name and parameters, followed by a hash of both.
    pub origin: String,
    /// False when a budget cut cubing short.
    pub complete: bool,
    /// Clauses (added to `F̂`) describing the region no cube covers, when
    /// cubing stopped early.
    pub remainder: Option<Vec<Clause>>,
}

impl CubeSet {
    pub fn new(origin: impl Into<String>, cubes: Vec<Cube>) -> CubeSet {
        let origin = origin.into();
        let mut h = DefaultHasher::new();
        origin.hash(&mut h);
        CubeSet {
            cubes,
            origin: format!("{origin} #{:016x}", h.finish()),
            complete: true,
            remainder: None,
        }
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

#[cfg(test)]
mod tests;
