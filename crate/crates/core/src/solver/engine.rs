use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, CnfFormula, Cube, Lit, ProjectedModel};

use super::heap::VarHeap;
use super::propagator::{ExternalPropagator, ModelVerdict, PropagatorKind, SearchState};
use super::SolverConfig;

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESCALE_LIMIT: f64 = 1e100;
const LUBY_BASE: u64 = 64;

type CRef = usize;

/// Where a stored clause came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClauseOrigin {
    Original,
    Learned,
    Symmetry,
    Domain,
    Blocking,
    Auxiliary,
}

impl From<PropagatorKind> for ClauseOrigin {
    fn from(k: PropagatorKind) -> Self {
        match k {
            PropagatorKind::Symmetry => ClauseOrigin::Symmetry,
            PropagatorKind::Domain => ClauseOrigin::Domain,
            PropagatorKind::Auxiliary => ClauseOrigin::Auxiliary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Sat,
    Unsat,
    BudgetExhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub learned_clauses: u64,
    pub restarts: u64,
}

/// Clause sets collected during search: Σ from symmetry propagators, Π from
/// domain propagators and Λ from short learned clauses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Harvest {
    pub sigma: Vec<Clause>,
    pub pi: Vec<Clause>,
    pub lambda: Vec<Clause>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub model: Option<Assignment>,
    pub stats: Stats,
    pub harvested: Harvest,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Distinct projected models in the order they were found.
    pub models: Vec<ProjectedModel>,
    /// False when the budget ran out before the search space was exhausted.
    pub complete: bool,
    pub stats: Stats,
    pub harvested: Harvest,
}

/// Result of propagating to fixpoint without resolving conflicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawFixpoint {
    Quiet,
    /// Highest decision level among the literals of the falsified clause.
    Conflict {
        level: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reason {
    /// Decisions, root-level units and asserted literals.
    None,
    Clause(CRef),
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: CRef,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    origin: ClauseOrigin,
    activity: f64,
    deleted: bool,
    protected: bool,
}

enum Added {
    Stored,
    Propagated,
    Conflict(CRef),
    Unsat,
}

enum Fix {
    Quiet,
    Conflict(CRef),
    Unsat,
}

/// A CDCL solver with external propagators.
pub struct Solver<'p> {
    num_vars: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watch>>,
    assign: Assignment,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    cfg: SolverConfig,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    stats: Stats,
    harvest: Harvest,
    unsat: bool,
    fixpoints: u64,
    num_learned: usize,
    max_learned: f64,
    luby_index: u32,
    conflicts_at_restart: u64,
    started: Option<Instant>,
    assumptions: Vec<Lit>,
}

fn luby(mut i: u32) -> u64 {
    // 1 1 2 1 1 2 4 1 1 2 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != u64::from(i) {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    1u64 << seq
}

impl<'p> Solver<'p> {
    pub fn new(f: &CnfFormula, props: Vec<Box<dyn ExternalPropagator + 'p>>, cfg: SolverConfig) -> Result<Solver<'p>> {
        cfg.validate()?;
        let n = f.num_vars();
        let activity = vec![0.0; n + 1];
        let mut order = VarHeap::new(n);
        for v in 1..=n as u32 {
            order.insert(v, &activity);
        }
        let mut s = Solver {
            num_vars: n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n + 2],
            assign: Assignment::new(n),
            level: vec![0; n + 1],
            reason: vec![Reason::None; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            order,
            phase: vec![cfg.decision_phase_default; n + 1],
            seen: vec![false; n + 1],
            max_learned: (f.num_clauses() as f64 / 3.0).max(2000.0),
            cfg,
            props,
            stats: Stats::default(),
            harvest: Harvest::default(),
            unsat: false,
            fixpoints: 0,
            num_learned: 0,
            luby_index: 0,
            conflicts_at_restart: 0,
            started: None,
            assumptions: Vec::new(),
        };
        for c in f.clauses() {
            s.add_root(c.lits().to_vec(), ClauseOrigin::Original);
        }
        Ok(s)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn harvest(&self) -> &Harvest {
        &self.harvest
    }

    pub fn take_harvest(&mut self) -> Harvest {
        std::mem::take(&mut self.harvest)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assign
    }

    pub fn value(&self, l: Lit) -> Option<bool> {
        self.assign.lit_value(l)
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    pub fn activity(&self, v: u32) -> f64 {
        self.activity[v as usize]
    }

    /// Adds a clause at the root level, backtracking there first.
    pub fn add_clause(&mut self, c: &Clause, origin: ClauseOrigin) -> Result<()> {
        self.check_vars(c.lits())?;
        self.backtrack(0);
        self.add_root(c.lits().to_vec(), origin);
        Ok(())
    }

    fn check_vars(&self, lits: &[Lit]) -> Result<()> {
        match lits.iter().find(|l| l.var() as usize > self.num_vars) {
            Some(l) => Err(Error::VarOutOfRange {
                var: l.var(),
                num_vars: self.num_vars,
            }),
            None => Ok(()),
        }
    }

    fn add_root(&mut self, lits: Vec<Lit>, origin: ClauseOrigin) {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return;
        }
        if lits.iter().any(|&l| self.value(l) == Some(true)) {
            return;
        }
        let lits: Vec<Lit> = lits.into_iter().filter(|&l| self.value(l).is_none()).collect();
        match lits.len() {
            0 => self.unsat = true,
            1 => self.enqueue(lits[0], Reason::None),
            _ => {
                self.store(lits, origin);
            }
        }
    }

    fn store(&mut self, lits: Vec<Lit>, origin: ClauseOrigin) -> CRef {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len();
        self.watches[lits[0].code()].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watch { cref, blocker: lits[0] });
        let protected = origin != ClauseOrigin::Learned || lits.len() <= self.cfg.learned_clause_size_harvest_limit;
        if origin == ClauseOrigin::Learned {
            self.num_learned += 1;
        }
        self.clauses.push(ClauseData {
            lits,
            origin,
            activity: 0.0,
            deleted: false,
            protected,
        });
        cref
    }

    /// Adds a clause that contains no true literal in the middle of search.
    fn add_during_search(&mut self, mut lits: Vec<Lit>, origin: ClauseOrigin) -> Added {
        if self.unsat {
            return Added::Unsat;
        }
        if self.decision_level() == 0 {
            let was = self.trail.len();
            self.add_root(lits, origin);
            return if self.unsat {
                Added::Unsat
            } else if self.trail.len() > was {
                Added::Propagated
            } else {
                Added::Stored
            };
        }
        debug_assert!(lits.iter().all(|&l| self.value(l) != Some(true)));
        if lits.len() <= 1 {
            self.backtrack(0);
            let was = self.trail.len();
            self.add_root(lits, origin);
            return if self.unsat {
                Added::Unsat
            } else if self.trail.len() > was {
                Added::Propagated
            } else {
                Added::Stored
            };
        }
        // unassigned first, then false literals by decreasing level
        let key = |l: &Lit| match self.assign.lit_value(*l) {
            None => 0u64,
            _ => 1 + u64::from(u32::MAX - self.level[l.var() as usize]),
        };
        lits.sort_by_key(key);
        let open = lits.iter().filter(|&&l| self.value(l).is_none()).count();
        let first = lits[0];
        let cref = self.store(lits, origin);
        match open {
            0 => Added::Conflict(cref),
            1 => {
                self.enqueue(first, Reason::Clause(cref));
                Added::Propagated
            }
            _ => Added::Stored,
        }
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) {
        let v = l.var() as usize;
        debug_assert!(self.assign.value(l.var()).is_none());
        self.assign.assign(l);
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
        for p in &mut self.props {
            p.on_assignment(l);
        }
    }

    /// Opens a new decision level and assigns `l` there.
    pub fn decide(&mut self, l: Lit) {
        self.trail_lim.push(self.trail.len());
        self.enqueue(l, Reason::None);
    }

    pub fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v as usize] = l.is_positive();
            self.assign.unassign(v);
            self.reason[v as usize] = Reason::None;
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(self.trail.len());
        for p in &mut self.props {
            p.on_backtrack(level);
        }
    }

    /// Boolean constraint propagation; returns a falsified clause if any.
    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            'watches: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.assign.lit_value(w.blocker) == Some(true) {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let kept = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.assign.lit_value(first) == Some(true) {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                for k in 2..c.lits.len() {
                    if self.assign.lit_value(c.lits[k]) != Some(false) {
                        c.lits.swap(1, k);
                        let nl = c.lits[1];
                        self.watches[nl.code()].push(kept);
                        continue 'watches;
                    }
                }
                ws[j] = kept;
                j += 1;
                if self.assign.lit_value(first) == Some(false) {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Reason::Clause(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn harvest_external(&mut self, kind: PropagatorKind, c: &Clause) {
        match kind {
            PropagatorKind::Symmetry => self.harvest.sigma.push(c.clone()),
            PropagatorKind::Domain => self.harvest.pi.push(c.clone()),
            PropagatorKind::Auxiliary => {}
        }
    }

    /// Unit propagation interleaved with the external propagators.
    fn fixpoint(&mut self) -> Result<Fix> {
        if self.unsat {
            return Ok(Fix::Unsat);
        }
        loop {
            if let Some(c) = self.propagate() {
                return Ok(Fix::Conflict(c));
            }
            self.fixpoints += 1;
            if self.props.is_empty() || !self.fixpoints.is_multiple_of(u64::from(self.cfg.propagator_frequency)) {
                return Ok(Fix::Quiet);
            }
            let mut changed = false;
            for i in 0..self.props.len() {
                let state = SearchState {
                    assignment: &self.assign,
                    trail: &self.trail,
                    decision_level: self.trail_lim.len() as u32,
                };
                let Some(clause) = self.props[i].on_fixpoint(&state) else {
                    continue;
                };
                self.check_vars(clause.lits())?;
                if let Some(l) = clause.iter().find(|&l| self.value(l) == Some(true)) {
                    return Err(Error::PropagatorContract(format!(
                        "clause {clause:?} returned at fixpoint is satisfied by {l}"
                    )));
                }
                let kind = self.props[i].kind();
                self.harvest_external(kind, &clause);
                match self.add_during_search(clause.lits().to_vec(), kind.into()) {
                    Added::Stored => {}
                    Added::Propagated => {
                        changed = true;
                        break;
                    }
                    Added::Conflict(c) => return Ok(Fix::Conflict(c)),
                    Added::Unsat => return Ok(Fix::Unsat),
                }
            }
            if !changed {
                for i in 0..self.props.len() {
                    if let Some(l) = self.props[i].request_backtrack() {
                        if l < self.decision_level() {
                            self.backtrack(l);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return Ok(Fix::Quiet);
            }
        }
    }

    /// Propagates to fixpoint, reporting conflicts without resolving them.
    pub fn propagate_raw(&mut self) -> Result<RawFixpoint> {
        Ok(match self.fixpoint()? {
            Fix::Quiet => RawFixpoint::Quiet,
            Fix::Unsat => RawFixpoint::Conflict { level: 0 },
            Fix::Conflict(c) => RawFixpoint::Conflict {
                level: self.clauses[c]
                    .lits
                    .iter()
                    .map(|l| self.level[l.var() as usize])
                    .max()
                    .unwrap_or(0),
            },
        })
    }

    fn bump_var(&mut self, v: u32) {
        let a = &mut self.activity[v as usize];
        *a += self.var_inc;
        if *a > RESCALE_LIMIT {
            for x in &mut self.activity {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, c: CRef) {
        if self.clauses[c].origin != ClauseOrigin::Learned {
            return;
        }
        self.clauses[c].activity += self.cla_inc;
        if self.clauses[c].activity > RESCALE_LIMIT {
            for cl in &mut self.clauses {
                cl.activity *= 1e-100;
            }
            self.cla_inc *= 1e-100;
        }
    }

    /// First-UIP analysis at the current decision level. Returns the learned
    /// clause with the asserting literal first and the backjump level.
    fn analyze(&mut self, confl: CRef) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![Lit::pos(1)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut cref = confl;
        loop {
            self.bump_clause(cref);
            for k in 0..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                if p.is_some_and(|p| p.var() == q.var()) {
                    continue;
                }
                let v = q.var() as usize;
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump_var(q.var());
                if self.level[v] >= current {
                    path += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var() as usize] = false;
            p = Some(lit);
            path -= 1;
            if path == 0 {
                break;
            }
            cref = match self.reason[lit.var() as usize] {
                Reason::Clause(c) => c,
                Reason::None => unreachable!("non-decision literal without reason in analysis"),
            };
        }
        learnt[0] = !p.unwrap();

        // drop literals whose reason is subsumed by the rest of the clause
        let all = learnt.clone();
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.reason[q.var() as usize] {
                Reason::None => false,
                Reason::Clause(c) => self.clauses[c]
                    .lits
                    .iter()
                    .all(|r| r.var() == q.var() || self.seen[r.var() as usize] || self.level[r.var() as usize] == 0),
            };
            if !redundant {
                keep.push(q);
            }
        }
        for q in &all[1..] {
            self.seen[q.var() as usize] = false;
        }
        let mut learnt = keep;

        let mut bj = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var() as usize] > self.level[learnt[best].var() as usize] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            bj = self.level[learnt[1].var() as usize];
        }
        (learnt, bj)
    }

    /// Learns from a falsified clause and backjumps. Returns false on UNSAT.
    fn resolve_conflict(&mut self, confl: CRef) -> bool {
        let m = self.clauses[confl]
            .lits
            .iter()
            .map(|l| self.level[l.var() as usize])
            .max()
            .unwrap_or(0);
        if m == 0 {
            self.unsat = true;
            return false;
        }
        self.backtrack(m);
        let chrono = self.cfg.chronological_backtracking_enabled;
        {
            // a clause whose first watch is the only literal at level m is
            // already asserting
            let lits = &self.clauses[confl].lits;
            let at_m = lits.iter().filter(|l| self.level[l.var() as usize] == m).count();
            let second = lits
                .iter()
                .skip(1)
                .map(|l| self.level[l.var() as usize])
                .max()
                .unwrap_or(0);
            if at_m == 1 && self.level[lits[0].var() as usize] == m && self.level[lits[1].var() as usize] == second {
                let first = lits[0];
                self.backtrack(if chrono { m - 1 } else { second });
                self.enqueue(first, Reason::Clause(confl));
                return true;
            }
        }
        let (learnt, bj) = self.analyze(confl);
        self.stats.learned_clauses += 1;
        if learnt.len() <= self.cfg.learned_clause_size_harvest_limit {
            self.harvest
                .lambda
                .push(Clause::new(learnt.iter().copied()).expect("learned clauses are not tautologies"));
        }
        if learnt.len() == 1 {
            self.backtrack(0);
            self.enqueue(learnt[0], Reason::None);
        } else {
            self.backtrack(if chrono { m - 1 } else { bj });
            let first = learnt[0];
            let cref = self.store(learnt, ClauseOrigin::Learned);
            self.bump_clause(cref);
            self.enqueue(first, Reason::Clause(cref));
        }
        self.var_inc /= VAR_DECAY;
        self.cla_inc /= CLAUSE_DECAY;
        true
    }

    fn locked(&self, c: CRef) -> bool {
        let l = self.clauses[c].lits[0];
        self.reason[l.var() as usize] == Reason::Clause(c) && self.value(l) == Some(true)
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<CRef> = (0..self.clauses.len())
            .filter(|&c| {
                let cl = &self.clauses[c];
                cl.origin == ClauseOrigin::Learned && !cl.deleted && !cl.protected
            })
            .filter(|&c| !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        for &c in &cands[..cands.len() / 2] {
            self.clauses[c].deleted = true;
            self.clauses[c].lits = Vec::new();
            self.num_learned -= 1;
        }
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref].deleted);
        }
        self.max_learned *= 1.1;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assign.value(v).is_none() {
                return Some(Lit::new(v, self.phase[v as usize]));
            }
        }
        None
    }

    /// The literal the heuristic would branch on next.
    pub fn decide_next(&mut self) -> Option<Lit> {
        let l = self.pick_branch()?;
        self.order.insert(l.var(), &self.activity);
        Some(l)
    }

    /// Bumps a variable's activity as if it took part in a conflict.
    pub fn bump_activity(&mut self, v: u32) {
        self.bump_var(v);
    }

    fn budget_exhausted(&self) -> bool {
        if self.cfg.conflict_budget.is_some_and(|b| self.stats.conflicts >= b) {
            return true;
        }
        match (self.cfg.time_budget, self.started) {
            (Some(t), Some(s)) => s.elapsed() >= t,
            _ => false,
        }
    }

    fn check_model(&mut self) -> Result<Option<Added>> {
        for i in 0..self.props.len() {
            let ModelVerdict::Reject(clause) = self.props[i].on_model(&self.assign) else {
                continue;
            };
            self.check_vars(clause.lits())?;
            if clause.iter().any(|l| self.value(l) != Some(false)) {
                return Err(Error::PropagatorContract(format!(
                    "clause {clause:?} rejecting a model does not exclude it"
                )));
            }
            let kind = self.props[i].kind();
            self.harvest_external(kind, &clause);
            return Ok(Some(self.add_during_search(clause.lits().to_vec(), kind.into())));
        }
        Ok(None)
    }

    fn search(&mut self) -> Result<SolveStatus> {
        self.started.get_or_insert_with(Instant::now);
        loop {
            if self.unsat {
                return Ok(SolveStatus::Unsat);
            }
            match self.fixpoint()? {
                Fix::Unsat => {
                    self.unsat = true;
                    return Ok(SolveStatus::Unsat);
                }
                Fix::Conflict(c) => {
                    if !self.on_conflict(c) {
                        return Ok(SolveStatus::Unsat);
                    }
                    if self.budget_exhausted() {
                        return Ok(SolveStatus::BudgetExhausted);
                    }
                    continue;
                }
                Fix::Quiet => {}
            }
            if self.budget_exhausted() {
                return Ok(SolveStatus::BudgetExhausted);
            }
            if self.cfg.restarts_enabled
                && self.stats.conflicts - self.conflicts_at_restart >= LUBY_BASE * luby(self.luby_index)
            {
                self.luby_index += 1;
                self.conflicts_at_restart = self.stats.conflicts;
                self.stats.restarts += 1;
                self.backtrack(0);
                continue;
            }
            if self.num_learned as f64 >= self.max_learned {
                self.reduce_db();
            }

            let mut decided = false;
            while (self.decision_level() as usize) < self.assumptions.len() {
                let a = self.assumptions[self.decision_level() as usize];
                match self.value(a) {
                    Some(true) => self.trail_lim.push(self.trail.len()),
                    Some(false) => return Ok(SolveStatus::Unsat),
                    None => {
                        self.decide(a);
                        decided = true;
                        break;
                    }
                }
            }
            if decided {
                continue;
            }
            match self.pick_branch() {
                Some(l) => {
                    self.stats.decisions += 1;
                    self.decide(l);
                }
                None => match self.check_model()? {
                    None => return Ok(SolveStatus::Sat),
                    Some(Added::Conflict(c)) => {
                        if !self.on_conflict(c) {
                            return Ok(SolveStatus::Unsat);
                        }
                    }
                    Some(Added::Unsat) => return Ok(SolveStatus::Unsat),
                    Some(Added::Stored | Added::Propagated) => {}
                },
            }
        }
    }

    fn on_conflict(&mut self, c: CRef) -> bool {
        self.stats.conflicts += 1;
        self.resolve_conflict(c)
    }

    fn set_assumptions(&mut self, assumptions: &[Lit]) -> Result<()> {
        self.check_vars(assumptions)?;
        Cube::new(assumptions.iter().copied())?;
        self.backtrack(0);
        self.assumptions = assumptions.to_vec();
        Ok(())
    }

    /// Solves under `assumptions`, which are decided first in order.
    pub fn solve_with(&mut self, assumptions: &[Lit]) -> Result<SolveStatus> {
        self.set_assumptions(assumptions)?;
        self.search()
    }

    /// Enumerates models under `assumptions`, blocking each projection.
    pub fn enumerate(&mut self, assumptions: &[Lit], projection: &[u32]) -> Result<(Vec<ProjectedModel>, bool)> {
        self.check_vars(&projection.iter().map(|&v| Lit::pos(v)).collect::<Vec<_>>())?;
        self.set_assumptions(assumptions)?;
        let mut models = Vec::new();
        loop {
            match self.search()? {
                SolveStatus::Sat => {
                    let m = ProjectedModel::from_assignment(&self.assign, projection);
                    let block = m.blocking_clause(projection);
                    models.push(m);
                    if projection.is_empty() {
                        return Ok((models, true));
                    }
                    match self.add_during_search(block.lits().to_vec(), ClauseOrigin::Blocking) {
                        Added::Conflict(c) => {
                            if !self.resolve_conflict(c) {
                                return Ok((models, true));
                            }
                        }
                        Added::Unsat => return Ok((models, true)),
                        Added::Stored | Added::Propagated => {}
                    }
                }
                SolveStatus::Unsat => return Ok((models, true)),
                SolveStatus::BudgetExhausted => return Ok((models, false)),
            }
        }
    }

    pub fn propagators_mut(&mut self) -> &mut [Box<dyn ExternalPropagator + 'p>] {
        &mut self.props
    }
}

/// Solves `f` under the assumption cube.
pub fn solve<'p>(
    f: &CnfFormula,
    assumptions: &Cube,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    cfg: SolverConfig,
) -> Result<SolveOutcome> {
    let mut s = Solver::new(f, props, cfg)?;
    let status = s.solve_with(assumptions.lits())?;
    Ok(SolveOutcome {
        status,
        model: (status == SolveStatus::Sat).then(|| s.assign.clone()),
        stats: s.stats.clone(),
        harvested: s.take_harvest(),
    })
}

/// Enumerates all models of `f` projected onto `projection`.
pub fn enumerate_models<'p>(
    f: &CnfFormula,
    props: Vec<Box<dyn ExternalPropagator + 'p>>,
    cfg: SolverConfig,
    projection: &[u32],
) -> Result<Enumeration> {
    let mut s = Solver::new(f, props, cfg)?;
    let (models, complete) = s.enumerate(&[], projection)?;
    Ok(Enumeration {
        models,
        complete,
        stats: s.stats.clone(),
        harvested: s.take_harvest(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{models_bruteforce, reduce};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn cnf(n: usize, cls: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(n, cls).unwrap()
    }

    fn no_props() -> Vec<Box<dyn ExternalPropagator>> {
        Vec::new()
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_unsat_and_assumptions() {
        let f = cnf(2, &[&[1, 2], &[-1], &[-2]]);
        let o = solve(&f, &Cube::default(), no_props(), SolverConfig::default()).unwrap();
        assert_eq!(o.status, SolveStatus::Unsat);
        assert!(o.model.is_none());

        let f = cnf(2, &[&[1, 2]]);
        let o = solve(
            &f,
            &Cube::from_dimacs(&[-1]).unwrap(),
            no_props(),
            SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(o.status, SolveStatus::Sat);
        assert_eq!(o.model.unwrap().value(2), Some(true));
    }

    #[test]
    fn decision_tie_break_and_bump() {
        let f = CnfFormula::new(3);
        let mut s = Solver::new(&f, no_props(), SolverConfig::default()).unwrap();
        assert_eq!(s.decide_next(), Some(Lit::neg(1)));
        s.bump_activity(2);
        assert_eq!(s.decide_next(), Some(Lit::neg(2)));
        s.decide(Lit::neg(2));
        s.decide(Lit::neg(1));
        assert_eq!(s.decide_next(), Some(Lit::neg(3)));
    }

    #[test]
    fn single_decision_conflict_learns_unit() {
        let f = cnf(2, &[&[-1, 2], &[-1, -2]]);
        let mut s = Solver::new(&f, no_props(), SolverConfig::default()).unwrap();
        s.decide(Lit::pos(1));
        let Fix::Conflict(c) = s.fixpoint().unwrap() else {
            panic!("expected a conflict");
        };
        let (learnt, bj) = s.analyze(c);
        assert_eq!(learnt, vec![Lit::neg(1)]);
        assert_eq!(bj, 0);
    }

    #[test]
    fn two_level_conflict_is_asserting() {
        // x1@1, x2@2; (¬x2 ∨ x3), (¬x1 ∨ ¬x2 ∨ ¬x3)
        let f = cnf(3, &[&[-2, 3], &[-1, -2, -3]]);
        let mut s = Solver::new(&f, no_props(), SolverConfig::default()).unwrap();
        s.decide(Lit::pos(1));
        assert!(matches!(s.fixpoint().unwrap(), Fix::Quiet));
        s.decide(Lit::pos(2));
        let Fix::Conflict(c) = s.fixpoint().unwrap() else {
            panic!("expected a conflict");
        };
        let (learnt, bj) = s.analyze(c);
        let at_max = learnt.iter().filter(|l| s.level[l.var() as usize] == 2).count();
        assert_eq!(at_max, 1);
        assert_eq!(learnt[0], Lit::neg(2));
        assert_eq!(bj, 1);
        assert!(learnt.contains(&Lit::neg(1)));
    }

    #[test]
    fn conflict_at_root_is_unsat() {
        let f = cnf(1, &[&[1], &[-1]]);
        let mut s = Solver::new(&f, no_props(), SolverConfig::default()).unwrap();
        assert!(s.is_unsat());
        assert_eq!(s.solve_with(&[]).unwrap(), SolveStatus::Unsat);
    }

    #[test]
    fn enumeration_of_tautology() {
        let e = enumerate_models(&CnfFormula::new(2), no_props(), SolverConfig::default(), &[1, 2]).unwrap();
        assert!(e.complete);
        assert_eq!(e.models.len(), 4);
        let e = enumerate_models(&CnfFormula::new(2), no_props(), SolverConfig::default(), &[]).unwrap();
        assert_eq!(e.models.len(), 1);
    }

    #[test]
    fn conflict_budget_stops_search() {
        // pigeonhole 4 into 3 needs many conflicts
        let mut cls: Vec<Vec<i64>> = Vec::new();
        let var = |p: i64, h: i64| p * 3 + h + 1;
        for p in 0..4 {
            cls.push((0..3).map(|h| var(p, h)).collect());
        }
        for h in 0..3 {
            for p in 0..4 {
                for q in p + 1..4 {
                    cls.push(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        let refs: Vec<&[i64]> = cls.iter().map(|c| c.as_slice()).collect();
        let f = cnf(12, &refs);
        let cfg = SolverConfig {
            conflict_budget: Some(2),
            ..Default::default()
        };
        let o = solve(&f, &Cube::default(), no_props(), cfg).unwrap();
        assert_eq!(o.status, SolveStatus::BudgetExhausted);
        let o = solve(&f, &Cube::default(), no_props(), SolverConfig::default()).unwrap();
        assert_eq!(o.status, SolveStatus::Unsat);
        assert!(o.harvested.lambda.iter().all(|c| c.len() <= 5));
    }

    struct RejectAll;

    impl ExternalPropagator for RejectAll {
        fn kind(&self) -> PropagatorKind {
            PropagatorKind::Domain
        }
        fn on_model(&mut self, model: &Assignment) -> ModelVerdict {
            ModelVerdict::Reject(Cube::new(model.lits()).unwrap().negation())
        }
    }

    struct SatisfiedClause;

    impl ExternalPropagator for SatisfiedClause {
        fn kind(&self) -> PropagatorKind {
            PropagatorKind::Symmetry
        }
        fn on_fixpoint(&mut self, s: &SearchState<'_>) -> Option<Clause> {
            s.trail.first().map(|&l| Clause::new([l]).unwrap())
        }
        fn on_model(&mut self, _: &Assignment) -> ModelVerdict {
            ModelVerdict::Accept
        }
    }

    #[test]
    fn rejecting_propagator_makes_unsat() {
        let props: Vec<Box<dyn ExternalPropagator>> = vec![Box::new(RejectAll)];
        let o = solve(&CnfFormula::new(3), &Cube::default(), props, SolverConfig::default()).unwrap();
        assert_eq!(o.status, SolveStatus::Unsat);
        assert_eq!(o.harvested.pi.len(), 8);
    }

    #[test]
    fn satisfied_propagator_clause_is_a_contract_violation() {
        let props: Vec<Box<dyn ExternalPropagator>> = vec![Box::new(SatisfiedClause)];
        let err = solve(&CnfFormula::new(2), &Cube::default(), props, SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::PropagatorContract(_)));
    }

    fn arb_cnf() -> impl Strategy<Value = CnfFormula> {
        (1usize..=10).prop_flat_map(|nv| {
            let clause = proptest::collection::btree_map(1..=nv as u32, any::<bool>(), 1..4);
            proptest::collection::vec(clause, 0..40).prop_map(move |cls| {
                CnfFormula::with_clauses(
                    nv,
                    cls.into_iter()
                        .map(|c| Clause::new(c.into_iter().map(|(v, s)| Lit::new(v, s))).unwrap()),
                )
                .unwrap()
            })
        })
    }

    fn all_configs() -> Vec<SolverConfig> {
        let mut out = Vec::new();
        for restarts in [true, false] {
            for chrono in [true, false] {
                for phase in [true, false] {
                    out.push(SolverConfig {
                        restarts_enabled: restarts,
                        chronological_backtracking_enabled: chrono,
                        decision_phase_default: phase,
                        ..Default::default()
                    });
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn enumeration_matches_bruteforce(f in arb_cnf()) {
            let oracle = models_bruteforce(&f).unwrap();
            let proj: Vec<u32> = (1..=f.num_vars() as u32).collect();
            for cfg in all_configs() {
                let e = enumerate_models(&f, no_props(), cfg, &proj).unwrap();
                prop_assert!(e.complete);
                let got: BTreeSet<_> = e.models.iter().map(|m| m.to_cube(&proj)).collect();
                prop_assert_eq!(got.len(), e.models.len());
                let want: BTreeSet<_> = oracle.iter().map(|a| Cube::new(a.lits()).unwrap()).collect();
                prop_assert_eq!(got, want);
            }
        }

        #[test]
        fn learned_clauses_are_entailed(f in arb_cnf()) {
            let o = solve(&f, &Cube::default(), no_props(), SolverConfig::default()).unwrap();
            let models = models_bruteforce(&f).unwrap();
            for c in &o.harvested.lambda {
                for m in &models {
                    prop_assert_eq!(c.eval(m), Some(true));
                }
            }
        }

        #[test]
        fn assumptions_match_reduction(f in arb_cnf(), lits in proptest::collection::btree_map(1u32..=3, any::<bool>(), 0..3)) {
            let cube = Cube::new(lits.into_iter().filter(|&(v, _)| v as usize <= f.num_vars()).map(|(v, s)| Lit::new(v, s))).unwrap();
            let o = solve(&f, &cube, no_props(), SolverConfig::default()).unwrap();
            let sat = !models_bruteforce(&reduce(&f, &cube).unwrap()).unwrap().is_empty();
            prop_assert_eq!(o.status == SolveStatus::Sat, sat);
            if let Some(m) = o.model {
                prop_assert!(f.is_satisfied_by(&m));
                prop_assert!(m.satisfies_cube(&cube));
            }
        }
    }
}
