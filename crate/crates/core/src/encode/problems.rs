use std::collections::BTreeMap;

use crate::coloring::TriangleVars;
use crate::error::Result;
use crate::formula::{Clause, Lit};
use crate::graph::{edge_var, VertexPair};

use super::totalizer::cardinality;
use super::varmap::CnfBuilder;
use super::{Encoding, EncodingSpec, Problem};

fn e(n: usize, a: usize, b: usize) -> Lit {
    Lit::pos(edge_var(n, VertexPair::new(a, b)).expect("vertices in range"))
}

fn others(n: usize, a: usize, b: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |&x| x != a && x != b)
}

fn finish(spec: EncodingSpec, b: CnfBuilder, triangles: Option<TriangleVars>) -> Result<Encoding> {
    let (formula, vars) = b.finish()?;
    Ok(Encoding {
        spec,
        formula,
        vars,
        triangles,
    })
}

pub(super) fn encode_spec(spec: &EncodingSpec) -> Result<Encoding> {
    let n = spec.n;
    let mut b = CnfBuilder::new(n);
    let mut triangles = None;
    match spec.problem {
        Problem::AllGraphs => {}
        Problem::TriangleFree => triangle_free(&mut b, spec.maximal),
        Problem::Diameter2 => diameter2(&mut b, spec.m.expect("validated")),
        Problem::Ks => triangles = Some(ks(&mut b)),
    }
    if spec.include_static_sb {
        static_sb(&mut b);
    }
    finish(spec.clone(), b, triangles)
}

/// `C(n,2)` edge variables and no clauses.
pub fn encode_all_graphs(n: usize) -> Result<Encoding> {
    super::encode(&EncodingSpec::all_graphs(n))
}

/// Triangle-free graphs, optionally maximal. Non-`(k-1)`-colourability is left
/// to the colouring propagator.
pub fn encode_triangle_free(n: usize, k: usize, maximal: bool) -> Result<Encoding> {
    super::encode(&EncodingSpec {
        maximal,
        ..EncodingSpec::triangle_free(n, k)
    })
}

/// Diameter-2-critical graphs with exactly `m` edges.
pub fn encode_diameter2(n: usize, m: usize) -> Result<Encoding> {
    super::encode(&EncodingSpec::diameter2(n, m))
}

/// Partial Kochen-Specker candidate encoding: triangle variables, minimum
/// degree 2 and every vertex on a triangle. Non-010-colourability is left to
/// the 010 propagator.
pub fn encode_ks(n: usize) -> Result<Encoding> {
    super::encode(&EncodingSpec::ks(n))
}

/// Lex-leader constraints for the adjacent transpositions, over the edge
/// variables of an `n`-vertex graph plus chain auxiliaries numbered from
/// `C(n,2) + 1`.
pub fn static_symmetry_clauses(n: usize) -> Vec<Clause> {
    let mut b = CnfBuilder::new(n);
    static_sb(&mut b);
    b.clauses
}

impl Encoding {
    /// Adds a totalizer bounding the number of edges.
    pub fn with_edge_count(self, min: Option<usize>, max: Option<usize>) -> Result<Encoding> {
        let n = self.spec.n;
        let mut b = CnfBuilder {
            vars: self.vars,
            clauses: self.formula.clauses().to_vec(),
        };
        let edges: Vec<Lit> = crate::graph::pairs(n).map(|p| e(n, p.u, p.v)).collect();
        cardinality(&mut b, &edges, min, max);
        finish(self.spec, b, self.triangles)
    }
}

fn triangle_free(b: &mut CnfBuilder, maximal: bool) {
    let n = b.vars.n;
    for u in 1..=n {
        for v in u + 1..=n {
            for w in v + 1..=n {
                b.add([!e(n, u, v), !e(n, u, w), !e(n, v, w)]);
            }
        }
    }
    if !maximal {
        return;
    }
    for u in 1..=n {
        for v in u + 1..=n {
            let mut c = vec![e(n, u, v)];
            for w in others(n, u, v) {
                let a = b.fresh("common_neighbor");
                b.define_and(a, &[e(n, u, w), e(n, v, w)]);
                c.push(a);
            }
            b.add(c);
        }
    }
}

fn diameter2(b: &mut CnfBuilder, m: usize) {
    let n = b.vars.n;
    // c[(i,j,k)] ↔ e_ik ∧ e_jk
    let mut c = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in others(n, i, j) {
                let x = b.fresh("common_neighbor");
                b.define_and(x, &[e(n, i, k), e(n, j, k)]);
                c.insert((i, j, k), x);
            }
        }
    }
    let cn = |i: usize, j: usize, k: usize| c[&(i.min(j), i.max(j), k)];
    for i in 1..=n {
        for j in i + 1..=n {
            b.add(std::iter::once(e(n, i, j)).chain(others(n, i, j).map(|k| cn(i, j, k))));
        }
    }
    // u[(i,j)]: no common neighbour
    let mut none = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let u = b.fresh("no_common_neighbor");
            let negs: Vec<Lit> = others(n, i, j).map(|k| !cn(i, j, k)).collect();
            b.define_and(u, &negs);
            none.insert((i, j), u);
        }
    }
    // x[(p,q,w)]: p,q nonadjacent with w as the only common neighbour
    let mut only = BTreeMap::new();
    for p in 1..=n {
        for q in p + 1..=n {
            for w in others(n, p, q) {
                let x = b.fresh("unique_common_neighbor");
                let mut conj = vec![!e(n, p, q), cn(p, q, w)];
                conj.extend(others(n, p, q).filter(|&k| k != w).map(|k| !cn(p, q, k)));
                b.define_and(x, &conj);
                only.insert((p, q, w), x);
            }
        }
    }
    let un = |p: usize, q: usize, w: usize| only[&(p.min(q), p.max(q), w)];
    // removing edge ij separates i from j, or some i-q (j-q) pair whose only
    // common neighbour is j (i)
    for i in 1..=n {
        for j in i + 1..=n {
            let mut cl = vec![!e(n, i, j), none[&(i, j)]];
            cl.extend(others(n, i, j).map(|q| un(i, q, j)));
            cl.extend(others(n, i, j).map(|q| un(j, q, i)));
            b.add(cl);
        }
    }
    let edges: Vec<Lit> = crate::graph::pairs(n).map(|p| e(n, p.u, p.v)).collect();
    cardinality(b, &edges, Some(m), Some(m));
}

fn ks(b: &mut CnfBuilder) -> TriangleVars {
    let n = b.vars.n;
    let mut t = TriangleVars::new();
    for u in 1..=n {
        for v in u + 1..=n {
            for w in v + 1..=n {
                let x = b.fresh("triangle");
                b.define_and(x, &[e(n, u, v), e(n, u, w), e(n, v, w)]);
                t.insert((u, v, w), x.var());
            }
        }
    }
    // minimum degree 2: v has a neighbour besides any u
    for v in 1..=n {
        for u in others(n, v, v) {
            b.add(others(n, u, v).map(|w| e(n, v, w)));
        }
    }
    for v in 1..=n {
        let on: Vec<Lit> = t
            .iter()
            .filter(|((a, bb, c), _)| [a, bb, c].contains(&&v))
            .map(|(_, &x)| Lit::pos(x))
            .collect();
        b.add(on);
    }
    t
}

fn static_sb(b: &mut CnfBuilder) {
    let n = b.vars.n;
    for i in 1..n {
        let cols: Vec<usize> = others(n, i, i + 1).collect();
        let row: Vec<(Lit, Lit)> = cols.iter().map(|&k| (e(n, i, k), e(n, i + 1, k))).collect();
        lex_leq(b, &row);
    }
}

/// `a ≤lex b` for the pairs `(a_t, b_t)`; `eq_t` means the first `t`
/// positions agree. The final `eq` is never needed and is not allocated.
fn lex_leq(b: &mut CnfBuilder, row: &[(Lit, Lit)]) {
    let mut eq: Option<Lit> = None;
    for (t, &(x, y)) in row.iter().enumerate() {
        let guard: Vec<Lit> = eq.map(|q| !q).into_iter().collect();
        b.add(guard.iter().copied().chain([!x, y]));
        if t + 1 == row.len() {
            break;
        }
        let next = b.fresh("lex_chain");
        if let Some(q) = eq {
            b.add([!next, q]);
        }
        b.add([!next, x, !y]);
        b.add([!next, !x, y]);
        b.add(guard.iter().copied().chain([x, y, next]));
        b.add(guard.iter().copied().chain([!x, !y, next]));
        eq = Some(next);
    }
}
