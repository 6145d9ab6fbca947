//! Colouring checks for the benchmark propagators: proper k-colourings for
//! the triangle-free family and 010-colourings for Kochen-Specker candidates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Lit};
use crate::graph::{edge_var, PartialGraph, VertexPair};
use crate::solver::{ExternalPropagator, ModelVerdict, PropagatorKind};

/// Vertices by descending degree, ties by index.
fn search_order(g: &PartialGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// A proper colouring with colours `1..=k`, indexed by vertex - 1.
pub fn find_k_coloring(g: &PartialGraph, k: usize) -> Option<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    assert!(k <= 64, "at most 64 colours");
    let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let order = search_order(g);
    let adj: Vec<Vec<usize>> = (0..=n)
        .map(|v| if v == 0 { Vec::new() } else { g.neighbors(v) })
        .collect();
    let mut color = vec![0usize; n + 1];
    let mut domain = vec![full; n + 1];

    fn rec(i: usize, order: &[usize], adj: &[Vec<usize>], color: &mut [usize], domain: &mut [u64], k: usize) -> bool {
        let Some(&v) = order.get(i) else {
            return true;
        };
        for c in 1..=k {
            let bit = 1u64 << (c - 1);
            if domain[v] & bit == 0 {
                continue;
            }
            color[v] = c;
            let mut removed = Vec::new();
            let mut wipeout = false;
            for &w in &adj[v] {
                if color[w] == 0 && domain[w] & bit != 0 {
                    domain[w] &= !bit;
                    removed.push(w);
                    if domain[w] == 0 {
                        wipeout = true;
                    }
                }
            }
            if !wipeout && rec(i + 1, order, adj, color, domain, k) {
                return true;
            }
            for w in removed {
                domain[w] |= bit;
            }
            color[v] = 0;
        }
        false
    }

    rec(0, &order, &adj, &mut color, &mut domain, k).then(|| color[1..].to_vec())
}

/// Disjunction of `e_uv` over the monochromatic pairs of `colors`.
pub fn coloring_clause(colors: &[usize], n: usize) -> Clause {
    let mut lits = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if colors[u - 1] == colors[v - 1] {
                lits.push(Lit::pos(edge_var(n, VertexPair::new(u, v)).unwrap()));
            }
        }
    }
    Clause::new(lits).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color010 {
    Red,
    Blue,
}

/// A red/blue colouring with no adjacent reds and no all-blue triangle.
pub fn find_010_coloring(g: &PartialGraph) -> Option<Vec<Color010>> {
    let n = g.n();
    let order = search_order(g);
    let adj: Vec<Vec<usize>> = (0..=n)
        .map(|v| if v == 0 { Vec::new() } else { g.neighbors(v) })
        .collect();
    let mut color: Vec<Option<Color010>> = vec![None; n + 1];

    fn allowed(g: &PartialGraph, adj: &[Vec<usize>], color: &[Option<Color010>], v: usize, c: Color010) -> bool {
        match c {
            Color010::Red => adj[v].iter().all(|&w| color[w] != Some(Color010::Red)),
            Color010::Blue => {
                let blue: Vec<usize> = adj[v]
                    .iter()
                    .copied()
                    .filter(|&w| color[w] == Some(Color010::Blue))
                    .collect();
                blue.iter()
                    .enumerate()
                    .all(|(i, &a)| blue[i + 1..].iter().all(|&b| !g.has_edge(a, b)))
            }
        }
    }

    fn rec(g: &PartialGraph, i: usize, order: &[usize], adj: &[Vec<usize>], color: &mut [Option<Color010>]) -> bool {
        let Some(&v) = order.get(i) else {
            return true;
        };
        for c in [Color010::Blue, Color010::Red] {
            if allowed(g, adj, color, v, c) {
                color[v] = Some(c);
                if rec(g, i + 1, order, adj, color) {
                    return true;
                }
                color[v] = None;
            }
        }
        false
    }

    rec(g, 0, &order, &adj, &mut color).then(|| color[1..].iter().map(|c| c.unwrap()).collect())
}

/// Triangle variables `t_uvw` keyed by `(u, v, w)` with `u < v < w`.
pub type TriangleVars = BTreeMap<(usize, usize, usize), u32>;

/// `∨ e_uv` over red-red pairs `∨ t_uvw` over all-blue triples.
pub fn coloring_clause_010(c: &[Color010], n: usize, triangles: &TriangleVars) -> Result<Clause> {
    let mut lits = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if c[u - 1] == Color010::Red && c[v - 1] == Color010::Red {
                lits.push(Lit::pos(edge_var(n, VertexPair::new(u, v))?));
            }
        }
    }
    for u in 1..=n {
        for v in u + 1..=n {
            for w in v + 1..=n {
                if [u, v, w].iter().all(|&x| c[x - 1] == Color010::Blue) {
                    let t = triangles
                        .get(&(u, v, w))
                        .ok_or_else(|| Error::Config(format!("no triangle variable for {{{u},{v},{w}}}")))?;
                    lits.push(Lit::pos(*t));
                }
            }
        }
    }
    Clause::new(lits)
}

/// Rejects every model whose graph has a proper colouring with `colors`
/// colours.
#[derive(Debug, Clone)]
pub struct ColoringPropagator {
    n: usize,
    colors: usize,
}

impl ColoringPropagator {
    pub fn new(n: usize, colors: usize) -> ColoringPropagator {
        ColoringPropagator { n, colors }
    }
}

impl ExternalPropagator for ColoringPropagator {
    fn kind(&self) -> PropagatorKind {
        PropagatorKind::Domain
    }

    fn on_model(&mut self, model: &Assignment) -> ModelVerdict {
        let g = PartialGraph::from_assignment(self.n, model);
        match find_k_coloring(&g, self.colors) {
            Some(c) => ModelVerdict::Reject(coloring_clause(&c, self.n)),
            None => ModelVerdict::Accept,
        }
    }
}

/// Rejects every model whose graph is 010-colourable.
#[derive(Debug, Clone)]
pub struct Coloring010Propagator {
    n: usize,
    triangles: TriangleVars,
}

impl Coloring010Propagator {
    pub fn new(n: usize, triangles: TriangleVars) -> Result<Coloring010Propagator> {
        for u in 1..=n {
            for v in u + 1..=n {
                for w in v + 1..=n {
                    if !triangles.contains_key(&(u, v, w)) {
                        return Err(Error::Config(format!(
                            "010 propagator needs a triangle variable for {{{u},{v},{w}}}"
                        )));
                    }
                }
            }
        }
        Ok(Coloring010Propagator { n, triangles })
    }
}

impl ExternalPropagator for Coloring010Propagator {
    fn kind(&self) -> PropagatorKind {
        PropagatorKind::Domain
    }

    fn on_model(&mut self, model: &Assignment) -> ModelVerdict {
        let g = PartialGraph::from_assignment(self.n, model);
        match find_010_coloring(&g) {
            Some(c) => ModelVerdict::Reject(
                coloring_clause_010(&c, self.n, &self.triangles).expect("triangle variables checked at construction"),
            ),
            None => ModelVerdict::Accept,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_graphs;

    fn cycle(n: usize) -> PartialGraph {
        let edges: Vec<(usize, usize)> = (1..=n).map(|i| (i, i % n + 1)).collect();
        PartialGraph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> PartialGraph {
        let edges: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        PartialGraph::from_edges(n, &edges).unwrap()
    }

    fn proper(g: &PartialGraph, c: &[usize]) -> bool {
        g.edges().iter().all(|p| c[p.u - 1] != c[p.v - 1])
    }

    fn valid_010(g: &PartialGraph, c: &[Color010]) -> bool {
        let n = g.n();
        let red = |x: usize| c[x - 1] == Color010::Red;
        g.edges().iter().all(|p| !(red(p.u) && red(p.v)))
            && (1..=n).all(|u| {
                (u + 1..=n).all(|v| {
                    (v + 1..=n).all(|w| {
                        !(g.has_edge(u, v) && g.has_edge(u, w) && g.has_edge(v, w) && !red(u) && !red(v) && !red(w))
                    })
                })
            })
    }

    fn brute_k(g: &PartialGraph, k: usize) -> bool {
        let n = g.n();
        (0..k.pow(n as u32)).any(|mut x| {
            let c: Vec<usize> = (0..n)
                .map(|_| {
                    let d = x % k;
                    x /= k;
                    d + 1
                })
                .collect();
            proper(g, &c)
        })
    }

    #[test]
    fn k_coloring_examples() {
        assert!(find_k_coloring(&cycle(5), 2).is_none());
        let c = find_k_coloring(&cycle(5), 3).unwrap();
        assert!(proper(&cycle(5), &c));
        assert!(find_k_coloring(&complete(3), 2).is_none());
    }

    #[test]
    fn k_coloring_matches_brute_force() {
        for n in 1..=5 {
            for g in all_graphs(n) {
                for k in 1..=3 {
                    let found = find_k_coloring(&g, k);
                    assert_eq!(found.is_some(), brute_k(&g, k));
                    if let Some(c) = found {
                        assert!(proper(&g, &c) && c.iter().all(|&x| (1..=k).contains(&x)));
                    }
                }
            }
        }
    }

    #[test]
    fn coloring_clause_examples() {
        assert_eq!(coloring_clause(&[1, 1, 2], 3), Clause::from_dimacs(&[1]).unwrap());
        assert!(coloring_clause(&[1, 2, 3], 3).is_empty());
        assert_eq!(coloring_clause(&[1, 1, 2, 2], 4), Clause::from_dimacs(&[1, 6]).unwrap());
    }

    #[test]
    fn coloring_010_examples() {
        let c = find_010_coloring(&complete(3)).unwrap();
        assert_eq!(c.iter().filter(|&&x| x == Color010::Red).count(), 1);
        assert_eq!(
            find_010_coloring(&PartialGraph::empty(4)).unwrap(),
            vec![Color010::Blue; 4]
        );
        let e = PartialGraph::from_edges(2, &[(1, 2)]).unwrap();
        assert_eq!(find_010_coloring(&e).unwrap(), vec![Color010::Blue; 2]);
    }

    #[test]
    fn coloring_010_matches_brute_force() {
        for n in 1..=5 {
            for g in all_graphs(n) {
                let brute = (0u32..1 << n).any(|x| {
                    let c: Vec<Color010> = (0..n)
                        .map(|i| if x >> i & 1 == 1 { Color010::Red } else { Color010::Blue })
                        .collect();
                    valid_010(&g, &c)
                });
                let found = find_010_coloring(&g);
                assert_eq!(found.is_some(), brute);
                if let Some(c) = found {
                    assert!(valid_010(&g, &c));
                }
            }
        }
    }

    #[test]
    fn clause_010_examples() {
        let mut t = TriangleVars::new();
        t.insert((1, 2, 3), 4);
        use Color010::*;
        assert_eq!(
            coloring_clause_010(&[Blue, Blue, Blue], 3, &t).unwrap(),
            Clause::from_dimacs(&[4]).unwrap()
        );
        // a single red vertex leaves no red-red pair and no all-blue triple
        assert!(coloring_clause_010(&[Red, Blue, Blue], 3, &t).unwrap().is_empty());
        let all_red = coloring_clause_010(&[Red; 4], 4, &TriangleVars::new()).unwrap();
        assert_eq!(all_red, Clause::from_dimacs(&[1, 2, 3, 4, 5, 6]).unwrap());
        assert!(matches!(
            coloring_clause_010(&[Blue; 3], 3, &TriangleVars::new()),
            Err(Error::Config(_))
        ));
        assert!(Coloring010Propagator::new(3, TriangleVars::new()).is_err());
    }

    #[test]
    fn coloring_clauses_only_exclude_colorable_graphs() {
        // a graph falsifying the clause of colouring c is still properly coloured by c
        for n in 2..=5 {
            for g in all_graphs(n) {
                if let Some(c) = find_k_coloring(&g, 2) {
                    let cl = coloring_clause(&c, n);
                    for h in all_graphs(n) {
                        let bits = h.adjacency_vector().unwrap();
                        let falsified = cl.iter().all(|l| !bits[l.var() as usize - 1]);
                        if falsified {
                            assert!(proper(&h, &c));
                        }
                    }
                }
            }
        }
    }
}
