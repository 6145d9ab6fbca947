use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formula::{Clause, CnfFormula, Lit};

/// A contiguous range of variables with a role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarBlock {
    pub name: String,
    pub start: u32,
    pub len: u32,
}

/// Variable layout of an encoding; edge variables come first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VariableMap {
    pub n: usize,
    pub num_vars: u32,
    pub blocks: Vec<VarBlock>,
}

impl VariableMap {
    pub fn new(n: usize) -> VariableMap {
        let mut m = VariableMap {
            n,
            num_vars: 0,
            blocks: Vec::new(),
        };
        m.alloc("edges", crate::graph::num_pairs(n) as u32);
        m
    }

    /// Reserves `len` fresh variables and returns the first.
    pub fn alloc(&mut self, name: &str, len: u32) -> u32 {
        let start = self.num_vars + 1;
        if len > 0 {
            match self.blocks.last_mut() {
                Some(b) if b.name == name && b.start + b.len == start => b.len += len,
                _ => self.blocks.push(VarBlock {
                    name: name.to_string(),
                    start,
                    len,
                }),
            }
        }
        self.num_vars += len;
        start
    }

    pub fn block(&self, name: &str) -> Option<&VarBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn num_edge_vars(&self) -> usize {
        crate::graph::num_pairs(self.n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("variable maps serialize")
    }
}

/// Clause collector that allocates auxiliaries as it goes.
#[derive(Debug, Clone)]
pub(crate) struct CnfBuilder {
    pub vars: VariableMap,
    pub clauses: Vec<Clause>,
}

impl CnfBuilder {
    pub fn new(n: usize) -> CnfBuilder {
        CnfBuilder {
            vars: VariableMap::new(n),
            clauses: Vec::new(),
        }
    }

    pub fn fresh(&mut self, block: &str) -> Lit {
        Lit::pos(self.vars.alloc(block, 1))
    }

    pub fn add(&mut self, lits: impl IntoIterator<Item = Lit>) {
        self.clauses
            .push(Clause::new(lits).expect("encoders never emit tautologies"));
    }

    /// `out ↔ ∧ ins`.
    pub fn define_and(&mut self, out: Lit, ins: &[Lit]) {
        for &x in ins {
            self.add([!out, x]);
        }
        self.add(ins.iter().map(|&x| !x).chain([out]));
    }

    pub fn finish(self) -> Result<(CnfFormula, VariableMap)> {
        let mut f = CnfFormula::with_clauses(self.vars.num_vars as usize, self.clauses)?;
        f.set_num_edge_vars(self.vars.num_edge_vars())?;
        Ok((f, self.vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_are_contiguous_and_disjoint() {
        let mut m = VariableMap::new(4);
        assert_eq!(m.block("edges").unwrap().len, 6);
        assert_eq!(m.alloc("t", 2), 7);
        assert_eq!(m.alloc("t", 1), 9);
        assert_eq!(m.alloc("c", 3), 10);
        assert_eq!(m.num_vars, 12);
        assert_eq!(
            m.block("t").unwrap(),
            &VarBlock {
                name: "t".into(),
                start: 7,
                len: 3
            }
        );
        let back: VariableMap = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
