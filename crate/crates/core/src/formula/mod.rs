//! Propositional data model: literals, clauses, cubes, CNF formulas and
//! (partial) assignments, plus DIMACS I/O and the reference semantics
//! (reduction, unit propagation, exhaustive model enumeration).

mod dimacs;
mod ops;

use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use dimacs::write_clause;
pub use dimacs::{parse_dimacs, parse_dimacs_sections, to_dimacs_string, write_dimacs, DimacsSections};
pub use ops::{models_bruteforce, reduce, unit_propagate, Propagation, BRUTE_FORCE_VAR_LIMIT};

/// A literal over a 1-based variable index.
///
/// Encoded as `var << 1 | negated`, so the derived ordering sorts by variable
/// first and puts the positive literal before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        assert!(var >= 1, "variables are 1-based");
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn pos(var: u32) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: u32) -> Lit {
        Lit::new(var, false)
    }

    /// Parses a non-zero DIMACS integer.
    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 || x.unsigned_abs() > u64::from(u32::MAX >> 1) {
            return None;
        }
        Some(Lit::new(x.unsigned_abs() as u32, x > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var());
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables (`2 * var + negated`).
    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl Serialize for Lit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = i64::deserialize(d)?;
        Lit::from_dimacs(x).ok_or_else(|| serde::de::Error::custom("literal must be non-zero"))
    }
}

fn dedup_in_order(lits: impl IntoIterator<Item = Lit>) -> Vec<Lit> {
    let mut out: Vec<Lit> = Vec::new();
    for l in lits {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// A disjunction of literals. Duplicates are removed on construction and
/// tautologies are rejected. The empty clause is falsum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause> {
        let lits = dedup_in_order(lits);
        for (i, &a) in lits.iter().enumerate() {
            if lits[i + 1..].contains(&!a) {
                return Err(Error::Formula(format!(
                    "tautological clause contains both {} and {}",
                    a, !a
                )));
            }
        }
        Ok(Clause { lits })
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Clause> {
        let lits = lits
            .iter()
            .map(|&x| Lit::from_dimacs(x).ok_or_else(|| Error::Formula(format!("bad literal {x}"))))
            .collect::<Result<Vec<_>>>()?;
        Clause::new(lits)
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    /// `Some(true)` if satisfied, `Some(false)` if every literal is false,
    /// `None` if undecided under the partial assignment.
    pub fn eval(&self, a: &Assignment) -> Option<bool> {
        let mut undecided = false;
        for &l in &self.lits {
            match a.lit_value(l) {
                Some(true) => return Some(true),
                None => undecided = true,
                Some(false) => {}
            }
        }
        if undecided {
            None
        } else {
            Some(false)
        }
    }

    /// The cube of the negated literals.
    pub fn negation(&self) -> Cube {
        Cube {
            lits: self.lits.iter().map(|&l| !l).collect(),
        }
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lits)
    }
}

/// A conjunction of literals over distinct variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Cube {
    lits: Vec<Lit>,
}

impl Cube {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Cube> {
        let lits = dedup_in_order(lits);
        for (i, &a) in lits.iter().enumerate() {
            if lits[i + 1..].iter().any(|b| b.var() == a.var()) {
                return Err(Error::Formula(format!("cube assigns variable {} twice", a.var())));
            }
        }
        Ok(Cube { lits })
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Cube> {
        let lits = lits
            .iter()
            .map(|&x| Lit::from_dimacs(x).ok_or_else(|| Error::Formula(format!("bad literal {x}"))))
            .collect::<Result<Vec<_>>>()?;
        Cube::new(lits)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    /// The clause of the negated literals (the blocking clause of the cube).
    pub fn negation(&self) -> Clause {
        Clause {
            lits: self.lits.iter().map(|&l| !l).collect(),
        }
    }

    /// True if both cubes can hold at once (no complementary literal).
    pub fn is_consistent_with(&self, other: &Cube) -> bool {
        !self.lits.iter().any(|&l| other.lits.contains(&!l))
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lits)
    }
}

/// A CNF formula. Variables `1..=num_edge_vars` are the designated edge
/// variables of a graph problem.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    num_edge_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> CnfFormula {
        CnfFormula {
            num_vars,
            num_edge_vars: 0,
            clauses: Vec::new(),
        }
    }

    pub fn with_clauses(num_vars: usize, clauses: impl IntoIterator<Item = Clause>) -> Result<CnfFormula> {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.add_clause(c)?;
        }
        Ok(f)
    }

    /// Convenience constructor from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<CnfFormula> {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.add_clause(Clause::from_dimacs(c)?)?;
        }
        Ok(f)
    }

    pub fn set_num_edge_vars(&mut self, num_edge_vars: usize) -> Result<()> {
        if num_edge_vars > self.num_vars {
            return Err(Error::Formula(format!(
                "{num_edge_vars} edge variables exceed {} variables",
                self.num_vars
            )));
        }
        self.num_edge_vars = num_edge_vars;
        Ok(())
    }

    pub fn add_clause(&mut self, c: Clause) -> Result<()> {
        let mv = c.max_var();
        if mv as usize > self.num_vars {
            return Err(Error::VarOutOfRange {
                var: mv,
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(c);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_edge_vars(&self) -> usize {
        self.num_edge_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn edge_vars(&self) -> impl Iterator<Item = u32> {
        1..=self.num_edge_vars as u32
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.eval(a) == Some(true))
    }
}

/// A partial assignment, identified with the set of literals it makes true.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assignment {
    // index 0 unused
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(num_vars: usize) -> Assignment {
        Assignment {
            values: vec![None; num_vars + 1],
        }
    }

    pub fn from_lits(num_vars: usize, lits: impl IntoIterator<Item = Lit>) -> Result<Assignment> {
        let mut a = Assignment::new(num_vars);
        for l in lits {
            if l.var() as usize > num_vars {
                return Err(Error::VarOutOfRange { var: l.var(), num_vars });
            }
            match a.lit_value(l) {
                Some(false) => {
                    return Err(Error::Formula(format!(
                        "inconsistent assignment: both {} and {}",
                        l, !l
                    )))
                }
                _ => a.assign(l),
            }
        }
        Ok(a)
    }

    pub fn num_vars(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn value(&self, var: u32) -> Option<bool> {
        self.values[var as usize]
    }

    #[inline]
    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.values[l.var() as usize].map(|v| v == l.is_positive())
    }

    #[inline]
    pub fn assign(&mut self, l: Lit) {
        self.values[l.var() as usize] = Some(l.is_positive());
    }

    #[inline]
    pub fn unassign(&mut self, var: u32) {
        self.values[var as usize] = None;
    }

    pub fn assigned_count(&self) -> usize {
        self.values[1..].iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.values[1..].iter().all(|v| v.is_some())
    }

    /// The literals mapped to true, in variable order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(v, val)| val.map(|b| Lit::new(v as u32, b)))
    }

    /// `self` extends `other` (agrees on every variable `other` assigns).
    pub fn extends(&self, other: &Assignment) -> bool {
        other.lits().all(|l| self.lit_value(l) == Some(true))
    }

    pub fn satisfies_cube(&self, c: &Cube) -> bool {
        c.iter().all(|l| self.lit_value(l) == Some(true))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.lits()).finish()
    }
}

/// A model restricted to a set of projection variables, stored as the
/// truth values in projection order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ProjectedModel(pub Vec<bool>);

impl ProjectedModel {
    pub fn from_assignment(a: &Assignment, projection: &[u32]) -> ProjectedModel {
        ProjectedModel(projection.iter().map(|&v| a.value(v).unwrap_or(false)).collect())
    }

    /// The cube fixing every projection variable to its value.
    pub fn to_cube(&self, projection: &[u32]) -> Cube {
        Cube {
            lits: projection.iter().zip(&self.0).map(|(&v, &b)| Lit::new(v, b)).collect(),
        }
    }

    /// The clause excluding this projected model.
    pub fn blocking_clause(&self, projection: &[u32]) -> Clause {
        self.to_cube(projection).negation()
    }
}
