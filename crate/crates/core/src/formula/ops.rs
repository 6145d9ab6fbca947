use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

use super::{Assignment, Clause, CnfFormula, Cube, Lit};

/// Exhaustive enumeration refuses formulas with more variables than this.
pub const BRUTE_FORCE_VAR_LIMIT: usize = 30;

/// Returns `F[c]`: clauses satisfied by `c` are dropped and literals
/// falsified by `c` are removed.
pub fn reduce(f: &CnfFormula, c: &Cube) -> Result<CnfFormula> {
    let mv = c.max_var();
    if mv as usize > f.num_vars() {
        return Err(Error::VarOutOfRange {
            var: mv,
            num_vars: f.num_vars(),
        });
    }
    let a = Assignment::from_lits(f.num_vars(), c.iter())?;
    let mut out = CnfFormula::new(f.num_vars());
    out.set_num_edge_vars(f.num_edge_vars())?;
    for cl in f.clauses() {
        if cl.iter().any(|l| a.lit_value(l) == Some(true)) {
            continue;
        }
        let rest = Clause::new(cl.iter().filter(|&l| a.lit_value(l).is_none()))?;
        out.add_clause(rest)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub assignment: Assignment,
    pub conflict: bool,
    /// Variables newly assigned by propagation.
    pub implied: usize,
}

/// Unit propagation to fixpoint, starting from `a`.
///
/// Stops at the first falsified clause; the assignment returned in that
/// case is the one reached when the conflict was detected.
pub fn unit_propagate(f: &CnfFormula, a: &Assignment) -> Propagation {
    let n = f.num_vars().max(a.num_vars());
    let mut asg = Assignment::new(n);
    for l in a.lits() {
        asg.assign(l);
    }
    // occurrence lists keyed by literal code
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    for (i, c) in f.clauses().iter().enumerate() {
        for l in c.iter() {
            occ[l.code()].push(i);
        }
    }
    let mut queue: VecDeque<usize> = (0..f.num_clauses()).collect();
    let mut queued = vec![true; f.num_clauses()];
    let mut implied = 0;

    while let Some(ci) = queue.pop_front() {
        queued[ci] = false;
        let mut unit: Option<Lit> = None;
        let mut open = 0;
        let mut sat = false;
        for l in f.clauses()[ci].iter() {
            match asg.lit_value(l) {
                Some(true) => {
                    sat = true;
                    break;
                }
                None => {
                    open += 1;
                    unit = Some(l);
                }
                Some(false) => {}
            }
        }
        if sat || open > 1 {
            continue;
        }
        let Some(l) = unit else {
            return Propagation {
                assignment: asg,
                conflict: true,
                implied,
            };
        };
        asg.assign(l);
        implied += 1;
        for &cj in &occ[(!l).code()] {
            if !queued[cj] {
                queued[cj] = true;
                queue.push_back(cj);
            }
        }
    }
    Propagation {
        assignment: asg,
        conflict: false,
        implied,
    }
}

/// All total models of `f`, by exhaustive enumeration.
pub fn models_bruteforce(f: &CnfFormula) -> Result<BTreeSet<Assignment>> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_VAR_LIMIT {
        return Err(Error::TooManyVars {
            num_vars: n,
            limit: BRUTE_FORCE_VAR_LIMIT,
        });
    }
    // bit (v-1) of a mask stands for variable v
    let masks: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(p, q), l| {
                let bit = 1u64 << (l.var() - 1);
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let mut out = BTreeSet::new();
    for x in 0u64..(1u64 << n) {
        if masks.iter().all(|&(p, q)| x & p != 0 || !x & q != 0) {
            let mut a = Assignment::new(n);
            for v in 1..=n as u32 {
                a.assign(Lit::new(v, x >> (v - 1) & 1 == 1));
            }
            out.insert(a);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cnf(n: usize, cls: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(n, cls).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let f = cnf(3, &[&[1, 2], &[-1, 3]]);
        let r = reduce(&f, &Cube::from_dimacs(&[1]).unwrap()).unwrap();
        assert_eq!(r, cnf(3, &[&[3]]));

        let f = cnf(1, &[&[1]]);
        let r = reduce(&f, &Cube::from_dimacs(&[-1]).unwrap()).unwrap();
        assert_eq!(r.clauses(), &[Clause::empty()]);

        let f = cnf(3, &[&[1, 2]]);
        assert_eq!(reduce(&f, &Cube::from_dimacs(&[3]).unwrap()).unwrap(), f);
        assert!(reduce(&f, &Cube::from_dimacs(&[4]).unwrap()).is_err());
    }

    #[test]
    fn propagation_examples() {
        let p = unit_propagate(&cnf(1, &[&[1]]), &Assignment::new(1));
        assert!(!p.conflict);
        assert_eq!(p.implied, 1);
        assert_eq!(p.assignment.value(1), Some(true));

        assert!(unit_propagate(&cnf(1, &[&[1], &[-1]]), &Assignment::new(1)).conflict);

        let f = cnf(3, &[&[-1, 2], &[-2, 3]]);
        let a = Assignment::from_lits(3, [Lit::pos(1)]).unwrap();
        let p = unit_propagate(&f, &a);
        assert!(!p.conflict);
        assert_eq!(p.implied, 2);
        assert!(p.assignment.is_total());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(models_bruteforce(&cnf(2, &[&[1, 2]])).unwrap().len(), 3);
        assert!(models_bruteforce(&cnf(1, &[&[1], &[-1]])).unwrap().is_empty());
        assert_eq!(models_bruteforce(&CnfFormula::new(3)).unwrap().len(), 8);
        assert_eq!(models_bruteforce(&CnfFormula::new(0)).unwrap().len(), 1);
        assert!(matches!(
            models_bruteforce(&CnfFormula::new(31)),
            Err(Error::TooManyVars { .. })
        ));
    }

    fn arb_cnf(max_vars: usize) -> impl Strategy<Value = CnfFormula> {
        (1..=max_vars).prop_flat_map(|nv| {
            let clause = proptest::collection::btree_map(1..=nv as u32, any::<bool>(), 1..4);
            proptest::collection::vec(clause, 0..10).prop_map(move |cls| {
                CnfFormula::with_clauses(
                    nv,
                    cls.into_iter()
                        .map(|c| Clause::new(c.into_iter().map(|(v, s)| Lit::new(v, s))).unwrap()),
                )
                .unwrap()
            })
        })
    }

    fn arb_cube(nv: usize) -> impl Strategy<Value = Cube> {
        proptest::collection::btree_map(1..=nv as u32, any::<bool>(), 0..=nv.min(4))
            .prop_map(|m| Cube::new(m.into_iter().map(|(v, s)| Lit::new(v, s))).unwrap())
    }

    proptest! {
        #[test]
        fn reduce_matches_model_filter((f, c) in arb_cnf(10).prop_flat_map(|f| {
            let nv = f.num_vars();
            (Just(f), arb_cube(nv))
        })) {
            let r = reduce(&f, &c).unwrap();
            // models of F[c] that agree with c are exactly the models of F extending c
            let lhs: BTreeSet<_> = models_bruteforce(&r)
                .unwrap()
                .into_iter()
                .filter(|m| m.satisfies_cube(&c))
                .collect();
            let rhs: BTreeSet<_> = models_bruteforce(&f)
                .unwrap()
                .into_iter()
                .filter(|m| m.satisfies_cube(&c))
                .collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn propagation_is_monotone_and_idempotent((f, c) in arb_cnf(10).prop_flat_map(|f| {
            let nv = f.num_vars();
            (Just(f), arb_cube(nv))
        })) {
            let a = Assignment::from_lits(f.num_vars(), c.iter()).unwrap();
            let p = unit_propagate(&f, &a);
            prop_assert!(p.assignment.extends(&a));
            prop_assert_eq!(p.assignment.assigned_count(), a.assigned_count() + p.implied);
            if !p.conflict {
                let q = unit_propagate(&f, &p.assignment);
                prop_assert!(!q.conflict);
                prop_assert_eq!(q.implied, 0);
                prop_assert_eq!(q.assignment, p.assignment);
            }
        }
    }
}
