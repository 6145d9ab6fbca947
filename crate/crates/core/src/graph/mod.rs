//! Graphs over the edge-variable convention: pair `{u, v}` with `u < v` maps
//! to its 1-based rank in the row-major upper triangle of the adjacency
//! matrix. Vertices are 1-based throughout.

mod canon;
mod io;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Lit};

pub use canon::{
    compare_lex, is_canonical, partial_minimality_check, Comparison, MinimalityWitness, DEFAULT_NODE_BUDGET,
};
pub use io::{from_edge_list, from_graph6, to_edge_list, to_graph6};

pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexPair {
    pub u: usize,
    pub v: usize,
}

impl VertexPair {
    /// The unordered pair `{a, b}`; requires `a != b`.
    pub fn new(a: usize, b: usize) -> VertexPair {
        assert_ne!(a, b, "a vertex pair needs two distinct vertices");
        VertexPair {
            u: a.min(b),
            v: a.max(b),
        }
    }
}

impl fmt::Display for VertexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

#[inline]
fn rank(n: usize, u: usize, v: usize) -> usize {
    // 0-based position of (u, v), u < v, both 1-based
    (u - 1) * n - (u - 1) * u / 2 + (v - u) - 1
}

/// The edge variable of `p` in a graph on `n` vertices.
pub fn edge_var(n: usize, p: VertexPair) -> Result<u32> {
    if p.u < 1 || p.u >= p.v || p.v > n {
        return Err(Error::Graph(format!("pair {p} out of range for n = {n}")));
    }
    Ok(rank(n, p.u, p.v) as u32 + 1)
}

/// The vertex pair of an edge variable.
pub fn pair_of_var(n: usize, var: u32) -> Result<VertexPair> {
    let var = var as usize;
    if var == 0 || var > num_pairs(n) {
        return Err(Error::Graph(format!(
            "variable {var} is not an edge variable for n = {n}"
        )));
    }
    let mut rest = var - 1;
    for u in 1..n {
        let row = n - u;
        if rest < row {
            return Ok(VertexPair { u, v: u + 1 + rest });
        }
        rest -= row;
    }
    unreachable!()
}

/// Every labelled graph on `n` vertices, in increasing adjacency-vector order.
pub fn all_graphs(n: usize) -> impl Iterator<Item = PartialGraph> {
    let m = num_pairs(n);
    assert!(m < 64, "too many graphs to list");
    (0u64..1 << m).map(move |x| {
        let bits: Vec<bool> = (0..m).map(|i| x >> (m - 1 - i) & 1 == 1).collect();
        PartialGraph::from_bits(n, &bits).unwrap()
    })
}

/// All pairs in edge-variable order.
pub fn pairs(n: usize) -> impl Iterator<Item = VertexPair> {
    (1..=n).flat_map(move |u| (u + 1..=n).map(move |v| VertexPair { u, v }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entry {
    Absent,
    Present,
    Unknown,
}

impl Entry {
    pub fn from_value(v: Option<bool>) -> Entry {
        match v {
            Some(true) => Entry::Present,
            Some(false) => Entry::Absent,
            None => Entry::Unknown,
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            Entry::Present => Some(true),
            Entry::Absent => Some(false),
            Entry::Unknown => None,
        }
    }
}

/// Adjacency state per vertex pair, stored on the upper triangle.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialGraph {
    n: usize,
    entries: Vec<Entry>,
}

impl PartialGraph {
    pub fn unknown(n: usize) -> PartialGraph {
        PartialGraph {
            n,
            entries: vec![Entry::Unknown; num_pairs(n)],
        }
    }

    pub fn empty(n: usize) -> PartialGraph {
        PartialGraph {
            n,
            entries: vec![Entry::Absent; num_pairs(n)],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<PartialGraph> {
        let mut g = PartialGraph::empty(n);
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Graph(format!("loop at vertex {a}")));
            }
            let var = edge_var(n, VertexPair::new(a, b))?;
            g.entries[var as usize - 1] = Entry::Present;
        }
        Ok(g)
    }

    /// A total graph from its adjacency bits in edge-variable order.
    pub fn from_bits(n: usize, bits: &[bool]) -> Result<PartialGraph> {
        if bits.len() != num_pairs(n) {
            return Err(Error::Graph(format!(
                "expected {} adjacency bits for n = {n}, got {}",
                num_pairs(n),
                bits.len()
            )));
        }
        Ok(PartialGraph {
            n,
            entries: bits.iter().map(|&b| Entry::from_value(Some(b))).collect(),
        })
    }

    /// Decodes the first `C(n,2)` variables of `a`.
    pub fn from_assignment(n: usize, a: &Assignment) -> PartialGraph {
        PartialGraph {
            n,
            entries: (1..=num_pairs(n) as u32)
                .map(|v| Entry::from_value(if (v as usize) <= a.num_vars() { a.value(v) } else { None }))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Entry {
        debug_assert!(a != b);
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.entries[rank(self.n, u, v)]
    }

    pub fn set(&mut self, a: usize, b: usize, e: Entry) {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.entries[rank(self.n, u, v)] = e;
    }

    pub fn is_total(&self) -> bool {
        !self.entries.contains(&Entry::Unknown)
    }

    pub fn adjacency_vector(&self) -> Result<Vec<bool>> {
        self.entries
            .iter()
            .map(|e| {
                e.value()
                    .ok_or_else(|| Error::Graph("adjacency vector of a partial graph".into()))
            })
            .collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.get(a, b) == Entry::Present
    }

    pub fn edges(&self) -> Vec<VertexPair> {
        pairs(self.n)
            .zip(&self.entries)
            .filter(|(_, &e)| e == Entry::Present)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.entries.iter().filter(|&&e| e == Entry::Present).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (1..=self.n).filter(|&w| self.has_edge(v, w)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        (1..=self.n).filter(|&w| self.has_edge(v, w)).count()
    }

    /// The edge literal asserting this pair's current (defined) entry.
    pub fn entry_lit(&self, p: VertexPair) -> Option<Lit> {
        let var = rank(self.n, p.u, p.v) as u32 + 1;
        self.get(p.u, p.v).value().map(|b| Lit::new(var, b))
    }

    /// `π(G)`: entry `{π(u), π(v)}` of the result is entry `{u, v}` of `self`.
    pub fn apply_permutation(&self, pi: &Permutation) -> Result<PartialGraph> {
        if pi.len() != self.n {
            return Err(Error::Graph(format!(
                "permutation on {} points applied to a graph on {} vertices",
                pi.len(),
                self.n
            )));
        }
        let mut out = PartialGraph::unknown(self.n);
        for p in pairs(self.n) {
            out.set(pi.apply(p.u), pi.apply(p.v), self.get(p.u, p.v));
        }
        Ok(out)
    }

    pub fn compare_lex(&self, other: &PartialGraph) -> Result<Ordering> {
        compare_lex(self, other)
    }
}

impl fmt::Debug for PartialGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .entries
            .iter()
            .map(|e| match e {
                Entry::Present => '1',
                Entry::Absent => '0',
                Entry::Unknown => '?',
            })
            .collect();
        write!(f, "PartialGraph({}: {s})", self.n)
    }
}

/// A bijection on `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    // image[i - 1] = π(i)
    image: Vec<usize>,
}

impl Permutation {
    /// Builds `π` from its images `π(1), ..., π(n)`.
    pub fn new(image: Vec<usize>) -> Result<Permutation> {
        let n = image.len();
        let mut hit = vec![false; n + 1];
        for &x in &image {
            if x < 1 || x > n || hit[x] {
                return Err(Error::Graph(format!("{image:?} is not a permutation of 1..={n}")));
            }
            hit[x] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Permutation {
        let mut p = Permutation::identity(n);
        p.image.swap(a - 1, b - 1);
        p
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.image[v - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Permutation { image: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Permutation) -> Permutation {
        Permutation {
            image: first.image.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    /// Every permutation of `1..=n` in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { image: cur.clone() });
                return;
            }
            for x in 1..=n {
                if !used[x] {
                    used[x] = true;
                    cur.push(x);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(n, &mut Vec::with_capacity(n), &mut vec![false; n + 1], &mut out);
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(u: usize, v: usize) -> VertexPair {
        VertexPair::new(u, v)
    }

    #[test]
    fn edge_var_matches_matrix_layout() {
        assert_eq!(edge_var(4, pair(1, 2)).unwrap(), 1);
        assert_eq!(edge_var(4, pair(1, 4)).unwrap(), 3);
        assert_eq!(edge_var(4, pair(2, 3)).unwrap(), 4);
        assert_eq!(edge_var(4, pair(3, 4)).unwrap(), 6);
        assert_eq!(edge_var(3, pair(2, 3)).unwrap(), 3);
        assert_eq!(edge_var(5, pair(4, 5)).unwrap(), 10);
        assert!(edge_var(3, pair(2, 4)).is_err());
        for n in 2..8 {
            for (i, p) in pairs(n).enumerate() {
                assert_eq!(edge_var(n, p).unwrap() as usize, i + 1);
                assert_eq!(pair_of_var(n, i as u32 + 1).unwrap(), p);
            }
        }
    }

    #[test]
    fn decode_assignment() {
        let a = Assignment::from_lits(3, [Lit::pos(3)]).unwrap();
        let g = PartialGraph::from_assignment(3, &a);
        assert_eq!(g.get(2, 3), Entry::Present);
        assert_eq!(g.get(1, 2), Entry::Unknown);
        assert_eq!(g.get(1, 3), Entry::Unknown);

        let a = Assignment::from_lits(3, [Lit::neg(1), Lit::neg(2), Lit::neg(3)]).unwrap();
        assert_eq!(PartialGraph::from_assignment(3, &a), PartialGraph::empty(3));

        let a = Assignment::from_lits(3, [Lit::neg(1), Lit::pos(2)]).unwrap();
        let g = PartialGraph::from_assignment(3, &a);
        assert_eq!(g.get(1, 2), Entry::Absent);
        assert_eq!(g.get(1, 3), Entry::Present);
        assert_eq!(g.get(2, 3), Entry::Unknown);
    }

    #[test]
    fn adjacency_vectors() {
        // the 2-vertex matrix (0 1 / 0 0) read row-wise is (0,1,0,0); its
        // upper triangle is the single bit 1
        let g = PartialGraph::from_edges(2, &[(1, 2)]).unwrap();
        assert_eq!(g.adjacency_vector().unwrap(), vec![true]);
        let g = PartialGraph::from_edges(3, &[(2, 3)]).unwrap();
        assert_eq!(g.adjacency_vector().unwrap(), vec![false, false, true]);
        let g = PartialGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(g.adjacency_vector().unwrap(), vec![true, true, true]);
        assert!(PartialGraph::unknown(3).adjacency_vector().is_err());
    }

    #[test]
    fn permutation_action() {
        let g = PartialGraph::from_edges(3, &[(1, 2)]).unwrap();
        let pi = Permutation::transposition(3, 1, 3);
        let h = g.apply_permutation(&pi).unwrap();
        assert_eq!(h, PartialGraph::from_edges(3, &[(2, 3)]).unwrap());
        assert_eq!(g.apply_permutation(&Permutation::identity(3)).unwrap(), g);

        let mut g = PartialGraph::empty(3);
        g.set(1, 2, Entry::Unknown);
        let h = g.apply_permutation(&Permutation::transposition(3, 1, 2)).unwrap();
        assert_eq!(h.get(1, 2), Entry::Unknown);
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
    }

    fn arb_graph(n: usize) -> impl Strategy<Value = PartialGraph> {
        proptest::collection::vec(0u8..3, num_pairs(n)).prop_map(move |es| PartialGraph {
            n,
            entries: es
                .into_iter()
                .map(|e| match e {
                    0 => Entry::Absent,
                    1 => Entry::Present,
                    _ => Entry::Unknown,
                })
                .collect(),
        })
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((1..=n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn permutation_action_composes((g, pi, rho) in (1usize..7).prop_flat_map(|n| (arb_graph(n), arb_perm(n), arb_perm(n)))) {
            let lhs = g.apply_permutation(&pi).unwrap().apply_permutation(&rho).unwrap();
            let rhs = g.apply_permutation(&rho.after(&pi)).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(pi.after(&pi.inverse()), Permutation::identity(g.n()));
        }
    }
}
