use std::io::Write;

use crate::error::{Error, Result};

use super::{Clause, CnfFormula, Lit};

const EDGE_VARS_TAG: &str = "edge-vars";

/// Clauses of a DIMACS file split at `c --- <name> ---` marker comments.
///
/// Clauses before the first marker belong to the unnamed leading section.
#[derive(Debug, Clone, Default)]
pub struct DimacsSections {
    pub num_vars: usize,
    pub num_edge_vars: usize,
    /// `(section name, clauses)`; the first entry has an empty name.
    pub sections: Vec<(String, Vec<Clause>)>,
    /// Plain comment lines (without the leading `c `), in order.
    pub comments: Vec<String>,
}

fn section_marker(comment: &str) -> Option<&str> {
    let rest = comment.strip_prefix("---")?.trim();
    let name = rest.strip_suffix("---")?.trim();
    (!name.is_empty()).then_some(name)
}

/// Parses DIMACS CNF, keeping track of `c --- name ---` sections.
pub fn parse_dimacs_sections(text: &str) -> Result<DimacsSections> {
    let mut out = DimacsSections {
        sections: vec![(String::new(), Vec::new())],
        ..Default::default()
    };
    let mut header: Option<(usize, usize)> = None;
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut count = 0usize;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(Error::parse(line_no, format!("unexpected token {line:?}")));
            }
            let comment = rest.trim();
            if let Some(val) = comment.strip_prefix(EDGE_VARS_TAG) {
                out.num_edge_vars = val
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, "malformed edge-vars comment"))?;
            } else if let Some(name) = section_marker(comment) {
                if !pending.is_empty() {
                    return Err(Error::parse(line_no, "section marker inside an open clause"));
                }
                out.sections.push((name.to_string(), Vec::new()));
            } else {
                out.comments.push(comment.to_string());
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::parse(line_no, format!("malformed header {line:?}")));
            }
            let v = parts[2]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, "malformed variable count"))?;
            let c = parts[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, "malformed clause count"))?;
            header = Some((v, c));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::parse(line_no, "clause before the p cnf header"));
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal {tok:?}")))?;
            if x == 0 {
                let clause = Clause::new(pending.drain(..)).map_err(|e| Error::parse(line_no, e.to_string()))?;
                out.sections.last_mut().unwrap().1.push(clause);
                count += 1;
                continue;
            }
            if x.unsigned_abs() as usize > num_vars {
                return Err(Error::parse(
                    line_no,
                    format!("literal {x} exceeds declared {num_vars} variables"),
                ));
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(Lit::from_dimacs(x).unwrap());
        }
    }

    let Some((num_vars, num_clauses)) = header else {
        return Err(Error::parse(last_line.max(1), "missing p cnf header"));
    };
    if !pending.is_empty() {
        return Err(Error::parse(pending_line, "clause is missing its terminating 0"));
    }
    if count != num_clauses {
        return Err(Error::parse(
            last_line.max(1),
            format!("header declares {num_clauses} clauses but {count} were read"),
        ));
    }
    if out.num_edge_vars > num_vars {
        return Err(Error::parse(1, "edge-vars exceeds the variable count"));
    }
    out.num_vars = num_vars;
    Ok(out)
}

/// Parses a DIMACS CNF document.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let s = parse_dimacs_sections(text)?;
    let mut f = CnfFormula::new(s.num_vars);
    for (_, clauses) in s.sections {
        for c in clauses {
            f.add_clause(c)?;
        }
    }
    f.set_num_edge_vars(s.num_edge_vars)?;
    Ok(f)
}

pub(crate) fn write_clause(w: &mut impl Write, c: &Clause) -> std::io::Result<()> {
    for l in c.iter() {
        write!(w, "{} ", l.to_dimacs())?;
    }
    writeln!(w, "0")
}

pub fn write_dimacs(f: &CnfFormula, w: &mut impl Write) -> std::io::Result<()> {
    if f.num_edge_vars() > 0 {
        writeln!(w, "c {EDGE_VARS_TAG} {}", f.num_edge_vars())?;
    }
    writeln!(w, "p cnf {} {}", f.num_vars(), f.num_clauses())?;
    for c in f.clauses() {
        write_clause(w, c)?;
    }
    Ok(())
}

pub fn to_dimacs_string(f: &CnfFormula) -> String {
    let mut buf = Vec::new();
    write_dimacs(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("DIMACS output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_simple_formula() {
        let f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(
            f.clauses(),
            &[
                Clause::from_dimacs(&[1, -2]).unwrap(),
                Clause::from_dimacs(&[2]).unwrap()
            ]
        );
    }

    #[test]
    fn parses_empty_formula() {
        let f = parse_dimacs("p cnf 1 0\n").unwrap();
        assert_eq!(f.num_vars(), 1);
        assert_eq!(f.num_clauses(), 0);
    }

    #[test]
    fn rejects_literal_out_of_range() {
        let err = parse_dimacs("p cnf 3 1\n1 2 4 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(err.to_string().contains("literal 4 exceeds declared 3"));
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(matches!(
            parse_dimacs("p cnf x 1\n1 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("c hi\np cnf 2 2\n1 2 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("").is_err());
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_dimacs("p cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(f.clauses()[0].len(), 3);
        assert_eq!(f.clauses()[1].lits(), &[Lit::neg(1)]);
    }

    #[test]
    fn serializes_exact_format() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, -2]]).unwrap();
        assert_eq!(to_dimacs_string(&f), "p cnf 2 1\n1 -2 0\n");
        assert_eq!(to_dimacs_string(&CnfFormula::new(0)), "p cnf 0 0\n");
        let mut g = CnfFormula::new(3);
        g.set_num_edge_vars(3).unwrap();
        assert!(to_dimacs_string(&g).starts_with("c edge-vars 3\np cnf "));
    }

    #[test]
    fn sections_are_tracked() {
        let text = "p cnf 3 3\n1 0\nc --- sigma ---\n-2 0\nc --- pi ---\nc plain\n3 -1 0\n";
        let s = parse_dimacs_sections(text).unwrap();
        let names: Vec<_> = s.sections.iter().map(|(n, c)| (n.as_str(), c.len())).collect();
        assert_eq!(names, vec![("", 1), ("sigma", 1), ("pi", 1)]);
        assert_eq!(s.comments, vec!["plain".to_string()]);
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (0usize..12, 0usize..4).prop_flat_map(|(nv, ne)| {
            let clause = proptest::collection::btree_map(1..=nv.max(1) as u32, any::<bool>(), 0..5);
            proptest::collection::vec(clause, 0..12).prop_map(move |cls| {
                let mut f = CnfFormula::new(nv);
                for c in cls {
                    if nv == 0 && !c.is_empty() {
                        continue;
                    }
                    f.add_clause(Clause::new(c.into_iter().map(|(v, s)| Lit::new(v, s))).unwrap())
                        .unwrap();
                }
                f.set_num_edge_vars(ne.min(nv)).unwrap();
                f
            })
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(f in arb_formula()) {
            let text = to_dimacs_string(&f);
            prop_assert_eq!(parse_dimacs(&text).unwrap(), f);
        }
    }
}
