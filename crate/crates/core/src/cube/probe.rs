//! A propagation-only engine for look-ahead: decisions, unit propagation
//! with propagator rounds, and backtracking. No learning.

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, CnfFormula, Lit};
use crate::solver::{ExternalPropagator, SearchState};

pub(crate) struct Prober<'p> {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Assignment,
    level: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    /// Units learned above the root; reasserted on return to level 0.
    units: Vec<Lit>,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    frequency: u64,
    fixpoints: u64,
    pub propagations: u64,
    root_conflict: bool,
}

impl<'p> Prober<'p> {
    pub fn new(f: &CnfFormula, props: Vec<Box<dyn ExternalPropagator + 'p>>, frequency: u32) -> Prober<'p> {
        let n = f.num_vars();
        let mut p = Prober {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n + 2],
            assign: Assignment::new(n),
            level: vec![0; n + 1],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            units: Vec::new(),
            props,
            frequency: u64::from(frequency.max(1)),
            fixpoints: 0,
            propagations: 0,
            root_conflict: false,
        };
        for c in f.clauses() {
            if p.add(c.lits().to_vec()) == Added::Conflict {
                p.root_conflict = true;
            }
        }
        p
    }

    pub fn value(&self, l: Lit) -> Option<bool> {
        self.assign.lit_value(l)
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assign
    }

    pub fn level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn decide(&mut self, l: Lit) {
        self.trail_lim.push(self.trail.len());
        self.enqueue(l);
    }

    /// Assigns `l` at the current level; the caller vouches for it.
    pub fn assert(&mut self, l: Lit) {
        self.enqueue(l);
    }

    pub fn backtrack(&mut self, level: u32) {
        if self.level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for l in self.trail.drain(lim..) {
            self.assign.unassign(l.var());
        }
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(self.trail.len());
        for p in &mut self.props {
            p.on_backtrack(level);
        }
        if level == 0 {
            for l in self.units.clone() {
                match self.value(l) {
                    None => self.enqueue(l),
                    Some(false) => self.root_conflict = true,
                    Some(true) => {}
                }
            }
        }
    }

    fn enqueue(&mut self, l: Lit) {
        self.assign.assign(l);
        self.level[l.var() as usize] = self.level();
        self.trail.push(l);
        for p in &mut self.props {
            p.on_assignment(l);
        }
    }

    fn add(&mut self, mut lits: Vec<Lit>) -> Added {
        if lits.iter().any(|&l| self.value(l) == Some(true)) && self.level() == 0 {
            return Added::Stored;
        }
        let key = |l: &Lit| match self.assign.lit_value(*l) {
            None => 0u64,
            Some(true) => 0,
            Some(false) => 1 + u64::from(u32::MAX - self.level[l.var() as usize]),
        };
        lits.sort_by_key(key);
        let open = lits.iter().filter(|&&l| self.value(l) != Some(false)).count();
        match lits.len() {
            0 => return Added::Conflict,
            1 => {
                self.units.push(lits[0]);
                return match self.value(lits[0]) {
                    None => {
                        self.enqueue(lits[0]);
                        Added::Propagated
                    }
                    Some(false) => Added::Conflict,
                    Some(true) => Added::Stored,
                };
            }
            _ => {}
        }
        let c = self.clauses.len();
        self.watches[lits[0].code()].push(c);
        self.watches[lits[1].code()].push(c);
        let first = lits[0];
        self.clauses.push(lits);
        match open {
            0 => Added::Conflict,
            1 if self.value(first).is_none() => {
                self.enqueue(first);
                Added::Propagated
            }
            _ => Added::Stored,
        }
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let fl = !p;
            let ws = std::mem::take(&mut self.watches[fl.code()]);
            let mut keep = Vec::with_capacity(ws.len());
            let mut ok = true;
            let mut it = ws.into_iter();
            for c in it.by_ref() {
                let lits = &mut self.clauses[c];
                if lits[0] == fl {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if self.assign.lit_value(first) == Some(true) {
                    keep.push(c);
                    continue;
                }
                if let Some(k) = (2..lits.len()).find(|&k| self.assign.lit_value(lits[k]) != Some(false)) {
                    lits.swap(1, k);
                    let nw = lits[1];
                    self.watches[nw.code()].push(c);
                    continue;
                }
                keep.push(c);
                if self.assign.lit_value(first) == Some(false) {
                    ok = false;
                    break;
                }
                self.enqueue(first);
            }
            keep.extend(it);
            self.watches[fl.code()].extend(keep);
            if !ok {
                self.qhead = self.trail.len();
                return false;
            }
        }
        true
    }

    /// Propagates to fixpoint with propagator rounds; false on conflict.
    pub fn fixpoint(&mut self) -> Result<bool> {
        if self.root_conflict {
            return Ok(false);
        }
        loop {
            if !self.propagate() {
                if self.level() == 0 {
                    self.root_conflict = true;
                }
                return Ok(false);
            }
            self.fixpoints += 1;
            if self.props.is_empty() || !self.fixpoints.is_multiple_of(self.frequency) {
                return Ok(true);
            }
            let mut changed = false;
            for i in 0..self.props.len() {
                let state = SearchState {
                    assignment: &self.assign,
                    trail: &self.trail,
                    decision_level: self.level(),
                };
                let Some(c) = self.props[i].on_fixpoint(&state) else {
                    continue;
                };
                check(&c, &self.assign)?;
                match self.add(c.lits().to_vec()) {
                    Added::Conflict => {
                        if self.level() == 0 {
                            self.root_conflict = true;
                        }
                        return Ok(false);
                    }
                    Added::Propagated => {
                        changed = true;
                        break;
                    }
                    Added::Stored => {}
                }
            }
            if !changed {
                return Ok(true);
            }
        }
    }
}

fn check(c: &Clause, a: &Assignment) -> Result<()> {
    if c.iter().any(|l| l.var() as usize > a.num_vars()) {
        return Err(Error::PropagatorContract(format!(
            "clause {c:?} mentions unknown variables"
        )));
    }
    if let Some(l) = c.iter().find(|&l| a.lit_value(l) == Some(true)) {
        return Err(Error::PropagatorContract(format!(
            "clause {c:?} returned at fixpoint is satisfied by {l}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Added {
    Stored,
    Propagated,
    Conflict,
}
