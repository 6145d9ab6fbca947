use crate::error::{Error, Result};

use super::{Entry, PartialGraph};

/// `"n: u-v u-v ..."` with edges in edge-variable order.
pub fn to_edge_list(g: &PartialGraph) -> String {
    let mut s = format!("{}:", g.n());
    for p in g.edges() {
        s.push_str(&format!(" {p}"));
    }
    s
}

pub fn from_edge_list(line: &str) -> Result<PartialGraph> {
    let bad = || Error::Graph(format!("malformed edge list {line:?}"));
    let (n, rest) = line.split_once(':').ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let mut edges = Vec::new();
    for tok in rest.split_whitespace() {
        let (a, b) = tok.split_once('-').ok_or_else(bad)?;
        edges.push((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    PartialGraph::from_edges(n, &edges)
}

/// graph6 encoding of a total graph.
pub fn to_graph6(g: &PartialGraph) -> Result<String> {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        return Err(Error::Graph(format!("graph6 does not support n = {n}")));
    }
    // upper triangle column by column: (0,1), (0,2), (1,2), (0,3), ...
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 2..=n {
        for i in 1..j {
            match g.get(i, j) {
                Entry::Present => bits.push(true),
                Entry::Absent => bits.push(false),
                Entry::Unknown => return Err(Error::Graph("graph6 of a partial graph".into())),
            }
        }
    }
    for chunk in bits.chunks(6) {
        let mut byte = 0u8;
        for (k, &b) in chunk.iter().enumerate() {
            if b {
                byte |= 1 << (5 - k);
            }
        }
        out.push(byte + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 is printable ASCII"))
}

pub fn from_graph6(s: &str) -> Result<PartialGraph> {
    let s = s.trim().strip_prefix(">>graph6<<").unwrap_or(s.trim());
    let bytes = s.as_bytes();
    let bad = || Error::Graph(format!("malformed graph6 string {s:?}"));
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) || bytes.is_empty() {
        return Err(bad());
    }
    let (n, body) = if bytes[0] < 126 {
        (usize::from(bytes[0] - 63), &bytes[1..])
    } else {
        if bytes.len() < 4 || bytes[1] == 126 {
            return Err(bad());
        }
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |acc, &b| acc << 6 | usize::from(b - 63));
        (n, &bytes[4..])
    };
    let m = n * n.saturating_sub(1) / 2;
    if body.len() != m.div_ceil(6) {
        return Err(bad());
    }
    let mut g = PartialGraph::empty(n);
    let mut k = 0;
    for j in 2..=n {
        for i in 1..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.set(i, j, Entry::Present);
            }
            k += 1;
        }
    }
    Ok(g)
}
