//! Design fixtures shared by the benchmarks.

use aberrant_core::{Column, FactorAssignment, SplitTriple};

fn dense_columns(k: u32, m: usize) -> Vec<u32> {
    let mut cols: Vec<u32> = (0..k).map(|i| 1 << i).collect();
    let mut rest: Vec<u32> = (1u32..1 << k).filter(|c| c.count_ones() > 1).collect();
    rest.sort_by_key(|c| (std::cmp::Reverse(c.count_ones()), *c));
    cols.extend(rest.into_iter().take(m.saturating_sub(k as usize)));
    cols
}

/// `m` columns of `H_k`: the `k` basis columns, then the heaviest remaining
/// columns, which keeps short words rare.
pub fn dense_design(k: u32, m: usize) -> FactorAssignment {
    FactorAssignment::treatments(k, &dense_columns(k, m)).expect("distinct nonzero columns")
}

/// [`dense_design`]'s columns as `D1`, the next `s` lightest columns as `D2`.
pub fn dense_split(k: u32, m: usize, s: usize) -> SplitTriple {
    let d1 = dense_columns(k, m);
    let d2: Vec<u32> = (1u32..1 << k).filter(|c| !d1.contains(c)).take(s).collect();
    let to_cols = |v: &[u32]| {
        v.iter()
            .map(|&b| Column::new(b, k).expect("column of H_k"))
            .collect()
    };
    SplitTriple::from_parts(k, to_cols(&d1), to_cols(&d2)).expect("disjoint parts")
}
