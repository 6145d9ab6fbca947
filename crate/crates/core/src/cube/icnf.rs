use std::io::Write;

use crate::error::{Error, Result};
use crate::formula::{write_clause, Clause, Cube, Lit};

use super::CubeSet;

const ORIGIN_TAG: &str = "origin";
const INCOMPLETE_TAG: &str = "incomplete";

/// `p inccnf`, then one `a <lits> 0` line per cube. An incomplete set also
/// carries `c incomplete` and its remainder clauses as plain clause lines.
pub fn write_icnf(cs: &CubeSet, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "p inccnf")?;
    writeln!(w, "c {ORIGIN_TAG} {}", cs.origin)?;
    if !cs.complete {
        writeln!(w, "c {INCOMPLETE_TAG}")?;
    }
    for c in cs.remainder.iter().flatten() {
        write_clause(w, c)?;
    }
    for cube in &cs.cubes {
        write!(w, "a ")?;
        for l in cube.iter() {
            write!(w, "{} ", l.to_dimacs())?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

pub fn to_icnf_string(cs: &CubeSet) -> String {
    let mut buf = Vec::new();
    write_icnf(cs, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("iCNF output is ASCII")
}

fn lits(line_no: usize, toks: &[&str]) -> Result<Vec<Lit>> {
    let (last, body) = toks.split_last().ok_or_else(|| Error::parse(line_no, "empty line"))?;
    if *last != "0" {
        return Err(Error::parse(line_no, "line is missing its terminating 0"));
    }
    body.iter()
        .map(|t| {
            let x: i64 = t
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal {t:?}")))?;
            Lit::from_dimacs(x).ok_or_else(|| Error::parse(line_no, "0 inside a line"))
        })
        .collect()
}

pub fn parse_icnf(text: &str) -> Result<CubeSet> {
    let mut header = false;
    let mut cs = CubeSet {
        cubes: Vec::new(),
        origin: String::new(),
        complete: true,
        remainder: None,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let comment = rest.trim();
            if let Some(o) = comment.strip_prefix(ORIGIN_TAG) {
                cs.origin = o.trim().to_string();
            } else if comment == INCOMPLETE_TAG {
                cs.complete = false;
            }
            continue;
        }
        if line.starts_with('p') {
            if header || line.split_whitespace().collect::<Vec<_>>() != ["p", "inccnf"] {
                return Err(Error::parse(line_no, format!("malformed header {line:?}")));
            }
            header = true;
            continue;
        }
        if !header {
            return Err(Error::parse(line_no, "content before the p inccnf header"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "a" {
            let cube = Cube::new(lits(line_no, &toks[1..])?).map_err(|e| Error::parse(line_no, e.to_string()))?;
            cs.cubes.push(cube);
        } else {
            let c = Clause::new(lits(line_no, &toks)?).map_err(|e| Error::parse(line_no, e.to_string()))?;
            cs.remainder.get_or_insert_with(Vec::new).push(c);
        }
    }
    if !header {
        return Err(Error::parse(1, "missing p inccnf header"));
    }
    if !cs.complete && cs.remainder.is_none() {
        cs.remainder = Some(Vec::new());
    }
    Ok(cs)
}
