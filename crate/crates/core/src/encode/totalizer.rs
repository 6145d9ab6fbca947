use crate::formula::Lit;

use super::varmap::CnfBuilder;

/// Builds a totalizer over `inputs` whose output `k` (1-based) is true iff at
/// least `k` inputs are true, for `k` up to `cap`. Both directions are encoded,
/// so the outputs are functionally determined by the inputs.
pub(crate) fn totalizer(b: &mut CnfBuilder, inputs: &[Lit], cap: usize) -> Vec<Lit> {
    let cap = cap.min(inputs.len());
    if inputs.len() <= 1 || cap == 0 {
        return inputs[..cap].to_vec();
    }
    let (l, r) = inputs.split_at(inputs.len() / 2);
    let left = totalizer(b, l, cap);
    let right = totalizer(b, r, cap);
    let out: Vec<Lit> = (0..cap).map(|_| b.fresh("totalizer")).collect();
    let (p, q) = (left.len(), right.len());
    // out_{i+j} ⇐ left_i ∧ right_j, with left_0 = right_0 = true
    for i in 0..=p {
        for j in 0..=q {
            if i + j == 0 {
                continue;
            }
            let mut c = Vec::new();
            if i > 0 {
                c.push(!left[i - 1]);
            }
            if j > 0 {
                c.push(!right[j - 1]);
            }
            c.push(out[(i + j).min(cap) - 1]);
            b.add(c);
        }
    }
    // out_{i+j+1} ⇒ left_{i+1} ∨ right_{j+1}, with left_{p+1} = right_{q+1} = false
    for i in 0..=p {
        for j in 0..=q {
            if i + j + 1 > cap {
                continue;
            }
            let mut c = vec![!out[i + j]];
            if i < p {
                c.push(left[i]);
            }
            if j < q {
                c.push(right[j]);
            }
            b.add(c);
        }
    }
    out
}

/// Constrains the number of true `inputs` to `[min, max]`.
pub(crate) fn cardinality(b: &mut CnfBuilder, inputs: &[Lit], min: Option<usize>, max: Option<usize>) {
    let cap = max.map_or(0, |m| m + 1).max(min.unwrap_or(0));
    let out = totalizer(b, inputs, cap);
    if let Some(lo) = min.filter(|&lo| lo > 0) {
        match out.get(lo - 1) {
            Some(&o) => b.add([o]),
            None => b.add([]),
        }
    }
    if let Some(hi) = max {
        if let Some(&o) = out.get(hi) {
            b.add([!o]);
        }
    }
}
