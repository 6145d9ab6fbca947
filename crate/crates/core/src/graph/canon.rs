use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{PartialGraph, Permutation, VertexPair};

/// Node budget of the partial minimality check.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000;

/// Lexicographic order of two total graphs' adjacency vectors.
pub fn compare_lex(g1: &PartialGraph, g2: &PartialGraph) -> Result<Ordering> {
    if g1.n() != g2.n() {
        return Err(Error::Graph(format!(
            "cannot compare graphs on {} and {} vertices",
            g1.n(),
            g2.n()
        )));
    }
    Ok(g1.adjacency_vector()?.cmp(&g2.adjacency_vector()?))
}

/// One matrix position compared between `π(G)` and `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub position: VertexPair,
    /// The pair of `G` that `π` moves onto `position`.
    pub image: VertexPair,
    pub image_value: bool,
    pub value: bool,
}

/// Proof that `π(G') <lex G'` for every completion `G'` of a partial graph.
///
/// The certificate lists, in row-major order, every compared position whose
/// image pair differs from the position itself; all but the last are equal and
/// the last is smaller in `π(G)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityWitness {
    pub perm: Permutation,
    pub certificate: Vec<Comparison>,
}

impl MinimalityWitness {
    /// The defined entries the proof relies on, without repetition.
    pub fn entries(&self) -> Vec<(VertexPair, bool)> {
        let mut out: Vec<(VertexPair, bool)> = Vec::new();
        for c in &self.certificate {
            for e in [(c.position, c.value), (c.image, c.image_value)] {
                if !out.iter().any(|(p, _)| *p == e.0) {
                    out.push(e);
                }
            }
        }
        out
    }

    /// Replays the certificate against `g`.
    pub fn verify(&self, g: &PartialGraph) -> bool {
        let n = g.n();
        if self.perm.len() != n || self.certificate.is_empty() {
            return false;
        }
        let sigma = self.perm.inverse();
        let mut cert = self.certificate.iter().peekable();
        for i in 1..=n {
            for j in i + 1..=n {
                let pos = VertexPair { u: i, v: j };
                let image = VertexPair::new(sigma.apply(i), sigma.apply(j));
                if image == pos {
                    continue;
                }
                let Some(c) = cert.next() else {
                    return false;
                };
                if c.position != pos
                    || c.image != image
                    || g.get(i, j).value() != Some(c.value)
                    || g.get(image.u, image.v).value() != Some(c.image_value)
                {
                    return false;
                }
                if cert.peek().is_none() {
                    return !c.image_value && c.value;
                }
                if c.image_value != c.value {
                    return false;
                }
            }
        }
        false
    }
}

#[derive(PartialEq, Eq)]
enum Cmp {
    Less,
    Equal,
    Greater,
    Unknown,
}

struct Search<'g> {
    g: &'g PartialGraph,
    n: usize,
    // sigma[i] = σ(i) = π⁻¹(i), the vertex of G placed at position i
    sigma: Vec<usize>,
    used: Vec<bool>,
    path: Vec<Comparison>,
    budget: Option<u64>,
    nodes: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn compare(&self, i: usize, j: usize) -> (Cmp, Option<Comparison>) {
        let image = VertexPair::new(self.sigma[i], self.sigma[j]);
        let pos = VertexPair { u: i, v: j };
        if image == pos {
            return (Cmp::Equal, None);
        }
        let (Some(a), Some(b)) = (self.g.get(image.u, image.v).value(), self.g.get(i, j).value()) else {
            return (Cmp::Unknown, None);
        };
        let c = Comparison {
            position: pos,
            image,
            image_value: a,
            value: b,
        };
        let ord = match a.cmp(&b) {
            Ordering::Less => Cmp::Less,
            Ordering::Equal => Cmp::Equal,
            Ordering::Greater => Cmp::Greater,
        };
        (ord, Some(c))
    }

    fn witness(&self, mut certificate: Vec<Comparison>, last: Comparison) -> MinimalityWitness {
        certificate.push(last);
        let mut image: Vec<usize> = self.sigma[1..].to_vec();
        let mut rest = (1..=self.n).filter(|&x| !self.used[x]);
        for s in image.iter_mut().filter(|s| **s == 0) {
            *s = rest.next().unwrap();
        }
        let sigma = Permutation { image };
        MinimalityWitness {
            perm: sigma.inverse(),
            certificate,
        }
    }

    /// Compares the rows below the first once σ is complete.
    fn finish(&self) -> Option<MinimalityWitness> {
        let mut cert = self.path.clone();
        for i in 2..=self.n {
            for j in i + 1..=self.n {
                match self.compare(i, j) {
                    (Cmp::Equal, Some(c)) => cert.push(c),
                    (Cmp::Equal, None) => {}
                    (Cmp::Less, Some(c)) => return Some(self.witness(cert, c)),
                    _ => return None,
                }
            }
        }
        None
    }

    fn dfs(&mut self, k: usize) -> Option<MinimalityWitness> {
        if k > self.n {
            return self.finish();
        }
        for x in 1..=self.n {
            if self.used[x] {
                continue;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                self.exhausted = true;
                return None;
            }
            self.sigma[k] = x;
            self.used[x] = true;
            let mut pushed = false;
            let mut proceed = true;
            if k >= 2 {
                match self.compare(1, k) {
                    (Cmp::Less, Some(c)) => {
                        let w = self.witness(self.path.clone(), c);
                        self.used[x] = false;
                        self.sigma[k] = 0;
                        return Some(w);
                    }
                    (Cmp::Equal, c) => {
                        if let Some(c) = c {
                            self.path.push(c);
                            pushed = true;
                        }
                    }
                    _ => proceed = false,
                }
            }
            if proceed {
                if let Some(w) = self.dfs(k + 1) {
                    return Some(w);
                }
            }
            if pushed {
                self.path.pop();
            }
            self.used[x] = false;
            self.sigma[k] = 0;
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

fn search(g: &PartialGraph, budget: Option<u64>) -> Option<MinimalityWitness> {
    let n = g.n();
    let mut s = Search {
        g,
        n,
        sigma: vec![0; n + 1],
        used: vec![false; n + 1],
        path: Vec::new(),
        budget,
        nodes: 0,
        exhausted: false,
    };
    s.dfs(1)
}

/// Decides whether a total graph has the lexicographically minimal adjacency
/// matrix in its isomorphism class. A non-canonical graph comes with the
/// first witness found by the search.
pub fn is_canonical(g: &PartialGraph) -> Result<(bool, Option<MinimalityWitness>)> {
    if !g.is_total() {
        return Err(Error::Graph("canonicity of a partial graph".into()));
    }
    let w = search(g, None);
    Ok((w.is_none(), w))
}

/// Looks for a permutation proving that no completion of `g` is canonical.
/// `None` means nothing was found within `budget` search nodes.
pub fn partial_minimality_check(g: &PartialGraph, budget: u64) -> Option<MinimalityWitness> {
    search(g, Some(budget))
}
