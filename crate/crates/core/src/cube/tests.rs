use std::collections::BTreeSet;

use super::*;
use crate::coloring::find_k_coloring;
use crate::encode::{encode, encode_all_graphs, encode_triangle_free, Encoding, EncodingSpec};
use crate::formula::{unit_propagate, Assignment, CnfFormula, Lit, ProjectedModel};
use crate::graph::{all_graphs, edge_var, is_canonical, pairs, PartialGraph};
use crate::solver::{Solver, SolverConfig};

fn graph_assignment(f: &CnfFormula, g: &PartialGraph) -> Option<Assignment> {
    let n = g.n();
    let lits = pairs(n).map(|p| Lit::new(edge_var(n, p).unwrap(), g.has_edge(p.u, p.v)));
    let p = unit_propagate(f, &Assignment::from_lits(f.num_vars(), lits).unwrap());
    (!p.conflict && f.is_satisfied_by(&p.assignment)).then_some(p.assignment)
}

/// Per-cube projected models, each cube solved by a fresh solver.
fn per_cube(enc: &Encoding, ef: &EnrichedFormula, cs: &CubeSet) -> Vec<BTreeSet<ProjectedModel>> {
    let f = ef.formula();
    let proj = ef.projection();
    cs.cubes
        .iter()
        .map(|c| {
            let mut s = Solver::new(&f, enc.propagators(true).unwrap(), SolverConfig::default()).unwrap();
            let (ms, done) = s.enumerate(c.lits(), &proj).unwrap();
            assert!(done);
            ms.into_iter().collect()
        })
        .collect()
}

fn direct(enc: &Encoding) -> BTreeSet<ProjectedModel> {
    let proj = projection(&enc.formula);
    let e = crate::solver::enumerate_models(
        &enc.formula,
        enc.propagators(true).unwrap(),
        SolverConfig::default(),
        &proj,
    )
    .unwrap();
    e.models.into_iter().collect()
}

/// Model preservation and pairwise disjointness.
fn check_cover(enc: &Encoding, ef: &EnrichedFormula, cs: &CubeSet) {
    assert!(cs.complete);
    let parts = per_cube(enc, ef, cs);
    let mut union: BTreeSet<ProjectedModel> = ef.blocked_models.iter().cloned().collect();
    let mut total = ef.blocked_models.len();
    for p in &parts {
        total += p.len();
        union.extend(p.iter().cloned());
    }
    assert_eq!(union, direct(enc), "{}", cs.origin);
    assert_eq!(total, union.len(), "overlapping cubes from {}", cs.origin);
}

fn all_cubers(enc: &Encoding, ef: &EnrichedFormula, cutoff: usize) -> Vec<CubeSet> {
    let freq = 1;
    vec![
        cube_cdcl_cutoff(
            ef,
            enc.propagators(true).unwrap(),
            SolverConfig::default(),
            cutoff,
            None,
        )
        .unwrap(),
        cube_lookahead(
            ef,
            enc.propagators(true).unwrap(),
            freq,
            Scope::AllVars,
            Scoring::Default,
            cutoff,
            None,
        )
        .unwrap(),
        cube_lookahead(
            ef,
            enc.propagators(true).unwrap(),
            freq,
            Scope::EdgeVars,
            Scoring::March,
            cutoff,
            None,
        )
        .unwrap(),
        cube_march_style(ef, cutoff, None).unwrap(),
    ]
}

#[test]
fn zero_budget_prerun_is_identity() {
    let enc = encode_all_graphs(4).unwrap();
    let ef = prerun(&enc.formula, enc.propagators(true).unwrap(), SolverConfig::default(), 0).unwrap();
    assert_eq!(ef, EnrichedFormula::plain(&enc.formula));
    assert_eq!(ef.formula(), enc.formula);
}

#[test]
fn ample_prerun_completes() {
    let enc = encode_all_graphs(4).unwrap();
    let ef = prerun(
        &enc.formula,
        enc.propagators(true).unwrap(),
        SolverConfig::default(),
        100_000,
    )
    .unwrap();
    assert!(ef.complete);
    assert_eq!(ef.blocked_models.len(), 11);
    for cs in all_cubers(&enc, &ef, 2) {
        assert!(cs.is_empty());
    }
}

#[test]
fn enriched_dump_roundtrips() {
    let enc = encode_triangle_free(5, 3, true).unwrap();
    for budget in [0, 3, 30, 100_000] {
        let ef = prerun(
            &enc.formula,
            enc.propagators(true).unwrap(),
            SolverConfig::default(),
            budget,
        )
        .unwrap();
        let text = ef.to_dimacs_string();
        for name in ["sigma", "pi", "lambda", "blocked"] {
            assert!(text.contains(&format!("c --- {name} ---")));
        }
        assert_eq!(EnrichedFormula::parse(&text).unwrap(), ef);
        assert_eq!(crate::formula::parse_dimacs(&text).unwrap(), ef.formula());
    }
    let k1 = encode_all_graphs(1).unwrap();
    let ef = prerun(&k1.formula, k1.propagators(true).unwrap(), SolverConfig::default(), 10).unwrap();
    assert!(ef.complete && ef.blocked_models.len() == 1);
    assert_eq!(EnrichedFormula::parse(&ef.to_dimacs_string()).unwrap(), ef);
}

#[test]
fn harvested_clauses_are_entailed() {
    let n = 6;
    let enc = encode_triangle_free(n, 3, true).unwrap();
    let cfg = SolverConfig::default();
    let limit = cfg.learned_clause_size_harvest_limit;
    for budget in [3, 10, 1000] {
        let ef = prerun(&enc.formula, enc.propagators(true).unwrap(), cfg.clone(), budget).unwrap();
        assert!(!ef.sigma.is_empty(), "budget {budget}");
        assert!(ef.lambda.iter().all(|c| c.len() <= limit));
        check_entailment(&enc, &ef);
    }
}

fn check_entailment(enc: &Encoding, ef: &EnrichedFormula) {
    let n = enc.spec.n;
    let proj = ef.projection();
    let blocked: BTreeSet<&ProjectedModel> = ef.blocked_models.iter().collect();
    for g in all_graphs(n) {
        let Some(a) = graph_assignment(&enc.formula, &g) else {
            continue;
        };
        let canonical = is_canonical(&g).unwrap().0;
        let in_domain = find_k_coloring(&g, 2).is_none();
        let sat = |c: &crate::formula::Clause| c.eval(&a) == Some(true);
        if canonical {
            assert!(ef.sigma.iter().all(sat), "a symmetry clause excludes canonical {g:?}");
        }
        if in_domain {
            assert!(ef.pi.iter().all(sat), "a propagator clause excludes {g:?}");
        }
        if canonical && in_domain && !blocked.contains(&ProjectedModel::from_assignment(&a, &proj)) {
            assert!(ef.lambda.iter().all(sat), "a learned clause excludes {g:?}");
        }
    }
}

#[test]
fn cubers_preserve_models_on_small_instances() {
    let specs = [
        EncodingSpec::all_graphs(4),
        EncodingSpec::all_graphs(5),
        EncodingSpec::triangle_free(5, 3),
        EncodingSpec::diameter2(5, 6),
    ];
    for spec in specs {
        let enc = encode(&spec).unwrap();
        for budget in [0, 5] {
            let ef = prerun(
                &enc.formula,
                enc.propagators(true).unwrap(),
                SolverConfig::default(),
                budget,
            )
            .unwrap();
            for cutoff in [1, 3, 6] {
                for cs in all_cubers(&enc, &ef, cutoff) {
                    check_cover(&enc, &ef, &cs);
                }
            }
        }
    }
}

#[test]
fn cdcl_cuber_examples() {
    let enc = encode_all_graphs(4).unwrap();
    let ef = EnrichedFormula::plain(&enc.formula);
    let cs = cube_cdcl_cutoff(&ef, enc.propagators(true).unwrap(), SolverConfig::default(), 2, None).unwrap();
    assert_eq!(per_cube(&enc, &ef, &cs).iter().map(BTreeSet::len).sum::<usize>(), 11);
    let full = cube_cdcl_cutoff(&ef, enc.propagators(true).unwrap(), SolverConfig::default(), 6, None).unwrap();
    assert!(full.cubes.iter().all(|c| c.len() == 6));
    assert_eq!(full.len(), 11);

    let unsat = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1]]).unwrap();
    let cs = cube_cdcl_cutoff(
        &EnrichedFormula::plain(&unsat),
        vec![],
        SolverConfig::default(),
        1,
        None,
    )
    .unwrap();
    assert!(cs.is_empty() && cs.complete);
}

#[test]
fn cdcl_cuber_budget_leaves_a_remainder() {
    let enc = encode_triangle_free(6, 3, true).unwrap();
    let ef = EnrichedFormula::plain(&enc.formula);
    let cs = cube_cdcl_cutoff(&ef, enc.propagators(true).unwrap(), SolverConfig::default(), 4, Some(3)).unwrap();
    assert!(!cs.complete);
    let rest = cs.remainder.as_ref().unwrap();
    assert_eq!(rest.len(), cs.len());
    // cubes plus the remainder job still cover every model
    let mut covered: BTreeSet<ProjectedModel> = per_cube(&enc, &ef, &cs).into_iter().flatten().collect();
    let mut f = ef.formula();
    for c in rest {
        f.add_clause(c.clone()).unwrap();
    }
    let e = crate::solver::enumerate_models(
        &f,
        enc.propagators(true).unwrap(),
        SolverConfig::default(),
        &ef.projection(),
    )
    .unwrap();
    covered.extend(e.models);
    assert_eq!(covered, direct(&enc));
}

#[test]
fn failed_literal_is_asserted() {
    // x1 = true conflicts, so ¬x1 is forced before branching
    let f = CnfFormula::from_dimacs_clauses(4, &[&[-1, 2], &[-1, -2], &[3, 4], &[1, 3, -4]]).unwrap();
    let ef = EnrichedFormula::plain(&f);
    let cs = cube_lookahead(&ef, vec![], 1, Scope::AllVars, Scoring::Default, 4, None).unwrap();
    assert!(!cs.is_empty());
    assert!(cs.cubes.iter().all(|c| c.lits().contains(&Lit::neg(1))));
    // both polarities failing refutes the node
    let g = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
    assert!(cube_lookahead(
        &EnrichedFormula::plain(&g),
        vec![],
        1,
        Scope::AllVars,
        Scoring::Default,
        2,
        None
    )
    .unwrap()
    .is_empty());
}

#[test]
fn march_cubes_hold_decisions_only() {
    let f = CnfFormula::new(3);
    let cs = cube_march_style(&EnrichedFormula::plain(&f), 2, None).unwrap();
    let got: Vec<Vec<i64>> = cs
        .cubes
        .iter()
        .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
        .collect();
    assert_eq!(got, vec![vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2]]);

    // the march tree matches look-ahead with σ_march and no propagators
    let enc = encode_triangle_free(5, 3, true).unwrap();
    let ef = EnrichedFormula::plain(&enc.formula);
    let m = cube_march_style(&ef, 40, None).unwrap();
    let la = cube_lookahead(&ef, vec![], 1, Scope::AllVars, Scoring::March, 40, None).unwrap();
    assert_eq!(m.len(), la.len());
    for (a, b) in m.cubes.iter().zip(&la.cubes) {
        assert!(a.iter().all(|l| b.lits().contains(&l)));
    }
}

#[test]
fn lookahead_budget_flags_incomplete() {
    let enc = encode_all_graphs(5).unwrap();
    let ef = EnrichedFormula::plain(&enc.formula);
    let cs = cube_lookahead(
        &ef,
        enc.propagators(true).unwrap(),
        1,
        Scope::EdgeVars,
        Scoring::Default,
        8,
        Some(10),
    )
    .unwrap();
    assert!(!cs.complete);
    // open nodes became cubes, so coverage still holds
    let parts = per_cube(&enc, &ef, &cs);
    let union: BTreeSet<ProjectedModel> = parts.iter().flatten().cloned().collect();
    assert_eq!(union, direct(&enc));
}

#[test]
fn cubing_is_deterministic() {
    let enc = encode_triangle_free(6, 3, true).unwrap();
    let ef = prerun(
        &enc.formula,
        enc.propagators(true).unwrap(),
        SolverConfig::default(),
        20,
    )
    .unwrap();
    let a = all_cubers(&enc, &ef, 5);
    let b = all_cubers(&enc, &ef, 5);
    assert_eq!(a, b);
}
