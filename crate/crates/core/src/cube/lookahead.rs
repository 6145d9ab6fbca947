use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formula::{Cube, Lit};
use crate::solver::ExternalPropagator;

use super::probe::Prober;
use super::{CubeSet, EnrichedFormula, Scoring};

/// Which variables the look-ahead may branch on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    AllVars,
    EdgeVars,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Emit {
    /// Every assigned literal over the scope variables.
    Assigned,
    /// Branching decisions only.
    Decisions,
}

struct Tree<'a, 'p> {
    prober: Prober<'p>,
    scope: Vec<u32>,
    sigma: Scoring,
    cutoff: usize,
    emit: Emit,
    budget: Option<u64>,
    probes: u64,
    exhausted: bool,
    decisions: Vec<Lit>,
    cubes: &'a mut Vec<Cube>,
}

impl Tree<'_, '_> {
    fn leaf(&mut self) {
        let lits: Vec<Lit> = match self.emit {
            Emit::Decisions => self.decisions.clone(),
            Emit::Assigned => self
                .scope
                .iter()
                .filter_map(|&v| self.prober.assignment().value(v).map(|b| Lit::new(v, b)))
                .collect(),
        };
        self.cubes.push(Cube::new(lits).expect("one literal per variable"));
    }

    /// Trail growth beyond `l` itself, or `None` on conflict.
    fn probe(&mut self, l: Lit) -> Result<Option<usize>> {
        self.probes += 1;
        let level = self.prober.level();
        let before = self.prober.trail().len();
        self.prober.decide(l);
        let ok = self.prober.fixpoint()?;
        let grown = self.prober.trail().len() - before - 1;
        self.prober.backtrack(level);
        Ok(ok.then_some(grown))
    }

    /// Expands the node at the current level, which is at a conflict-free
    /// fixpoint.
    fn node(&mut self) -> Result<()> {
        let level = self.prober.level();
        let best = 'lookahead: loop {
            if self.budget.is_some_and(|b| self.probes >= b) {
                self.exhausted = true;
                self.leaf();
                return Ok(());
            }
            if self.prober.assignment().assigned_count() >= self.cutoff {
                self.leaf();
                return Ok(());
            }
            let mut best: Option<(u32, f64)> = None;
            for i in 0..self.scope.len() {
                let v = self.scope[i];
                if self.prober.assignment().value(v).is_some() {
                    continue;
                }
                let a = self.probe(Lit::pos(v))?;
                let b = match a {
                    Some(_) => self.probe(Lit::neg(v))?,
                    None => None,
                };
                let failed = match (a, b) {
                    (None, _) => Some(Lit::neg(v)),
                    (_, None) => Some(Lit::pos(v)),
                    _ => None,
                };
                if let Some(forced) = failed {
                    self.prober.assert(forced);
                    if !self.prober.fixpoint()? {
                        return Ok(());
                    }
                    continue 'lookahead;
                }
                let s = self.sigma.eval(a.unwrap() as f64, b.unwrap() as f64);
                if best.is_none_or(|(_, top)| s > top) {
                    best = Some((v, s));
                }
            }
            break best;
        };
        let Some((v, _)) = best else {
            self.leaf();
            return Ok(());
        };
        for l in [Lit::pos(v), Lit::neg(v)] {
            self.prober.decide(l);
            self.decisions.push(l);
            if self.prober.fixpoint()? {
                self.node()?;
            }
            self.decisions.pop();
            self.prober.backtrack(level);
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn build<'p>(
    ef: &EnrichedFormula,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    frequency: u32,
    scope: Scope,
    sigma: Scoring,
    cutoff: usize,
    budget: Option<u64>,
    emit: Emit,
    origin: String,
) -> Result<CubeSet> {
    let f = ef.formula();
    let mut cubes = Vec::new();
    if ef.complete {
        return Ok(CubeSet::new(origin, cubes));
    }
    let scope = match scope {
        Scope::AllVars => (1..=f.num_vars() as u32).collect(),
        Scope::EdgeVars => ef.projection(),
    };
    let mut tree = Tree {
        prober: Prober::new(&f, props, frequency),
        scope,
        sigma,
        cutoff: cutoff.max(1),
        emit,
        budget,
        probes: 0,
        exhausted: false,
        decisions: Vec::new(),
        cubes: &mut cubes,
    };
    if tree.prober.fixpoint()? {
        tree.node()?;
    }
    let complete = !tree.exhausted;
    Ok(CubeSet {
        complete,
        ..CubeSet::new(origin, cubes)
    })
}

/// Look-ahead cubing with propagators consulted during probing.
///
/// At each node every unassigned scope variable is probed in both polarities
/// (ascending order). A failed polarity asserts the other one and restarts the
/// node; a node where both fail is refuted and emits nothing. Otherwise the
/// node branches on the first variable with the highest `sigma(a, b)`, true
/// first. Leaves are nodes with at least `cutoff` assigned variables or no
/// candidates left; each emits its assigned scope literals.
///
/// `budget` bounds the number of probes; when it runs out, open nodes become
/// leaves and the set is flagged incomplete.
#[allow(clippy::too_many_arguments)]
pub fn cube_lookahead<'p>(
    ef: &EnrichedFormula,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    frequency: u32,
    scope: Scope,
    sigma: Scoring,
    cutoff: usize,
    budget: Option<u64>,
) -> Result<CubeSet> {
    let name = match scope {
        Scope::AllVars => "la-all",
        Scope::EdgeVars => "la-edge",
    };
    let origin = format!("{name} sigma={} cutoff={cutoff}", sigma.name());
    build(
        ef,
        props,
        frequency,
        scope,
        sigma,
        cutoff,
        budget,
        Emit::Assigned,
        origin,
    )
}

/// The same tree over plain `F̂` (no propagators) with `σ_march` on all
/// variables; cubes hold the branching decisions only.
pub fn cube_march_style(ef: &EnrichedFormula, cutoff: usize, budget: Option<u64>) -> Result<CubeSet> {
    let origin = format!("march cutoff={cutoff}");
    build(
        ef,
        Vec::new(),
        1,
        Scope::AllVars,
        Scoring::March,
        cutoff,
        budget,
        Emit::Decisions,
        origin,
    )
}
