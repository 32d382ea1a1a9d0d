//! Bit-level engine shared by every subgroup computation.
//!
//! Letters are addressed by position in a column slice; a word is a `u64`
//! mask whose bit `i` selects the `i`-th column. The defining words of a
//! column set are exactly the kernel of the map `mask -> XOR of columns`.

use rayon::prelude::*;

use crate::error::{DesignError, Result};

pub(crate) const MAX_LETTERS: usize = 64;
pub(crate) const MAX_KERNEL_RANK: usize = 26;

/// Rank of a set of column encodings over GF(2).
pub(crate) fn rank(columns: impl IntoIterator<Item = u32>) -> usize {
    let mut pivots = [0u32; 32];
    let mut rank = 0;
    for mut v in columns {
        for b in (0..32).rev() {
            if v >> b & 1 == 0 {
                continue;
            }
            if pivots[b] == 0 {
                pivots[b] = v;
                rank += 1;
                break;
            }
            v ^= pivots[b];
        }
    }
    rank
}

/// Basis (as letter masks) of the kernel of the column map.
///
/// Each generator contains its own dependent letter plus earlier letters
/// only, so the returned masks are independent.
pub(crate) fn kernel_basis(columns: &[u32]) -> Result<Vec<u64>> {
    if columns.len() > MAX_LETTERS {
        return Err(DesignError::Capacity(format!(
            "{} letters exceed the {MAX_LETTERS}-letter subgroup engine",
            columns.len()
        )));
    }
    let mut pivots: [Option<(u32, u64)>; 32] = [None; 32];
    let mut basis = Vec::new();
    for (i, &c) in columns.iter().enumerate() {
        let mut v = c;
        let mut mask = 1u64 << i;
        for b in (0..32).rev() {
            if v >> b & 1 == 0 {
                continue;
            }
            match pivots[b] {
                Some((pv, pm)) => {
                    v ^= pv;
                    mask ^= pm;
                }
                None => {
                    pivots[b] = Some((v, mask));
                    break;
                }
            }
        }
        if v == 0 {
            basis.push(mask);
        }
    }
    if basis.len() > MAX_KERNEL_RANK {
        return Err(DesignError::Capacity(format!(
            "defining subgroup of size 2^{} exceeds 2^{MAX_KERNEL_RANK}",
            basis.len()
        )));
    }
    Ok(basis)
}

/// Visits every element of the span of `basis` (including 0) in Gray-code order.
#[cfg(test)]
pub(crate) fn for_each_word(basis: &[u64], mut f: impl FnMut(u64)) {
    visit_range(basis, 0, 1u64 << basis.len(), &mut f);
}

fn visit_range(basis: &[u64], start: u64, end: u64, f: &mut impl FnMut(u64)) {
    if start >= end {
        return;
    }
    let gray = start ^ (start >> 1);
    let mut word = basis
        .iter()
        .enumerate()
        .filter(|(b, _)| gray >> b & 1 == 1)
        .fold(0u64, |acc, (_, &m)| acc ^ m);
    let mut i = start;
    loop {
        f(word);
        i += 1;
        if i == end {
            break;
        }
        word ^= basis[i.trailing_zeros() as usize];
    }
}

/// Folds over the span of `basis`, split into `parts` contiguous index ranges
/// that are evaluated independently and merged.
pub(crate) fn fold_words<T, I, F, M>(basis: &[u64], parts: usize, init: I, fold: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, u64) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let total = 1u64 << basis.len();
    let parts = (parts.max(1) as u64).min(total);
    if parts == 1 {
        let mut acc = init();
        visit_range(basis, 0, total, &mut |w| fold(&mut acc, w));
        return acc;
    }
    let step = total.div_ceil(parts);
    (0..parts)
        .into_par_iter()
        .map(|p| {
            let mut acc = init();
            let start = p * step;
            let end = ((p + 1) * step).min(total);
            visit_range(basis, start, end, &mut |w| fold(&mut acc, w));
            acc
        })
        .reduce(&init, &merge)
}

/// Default partition count: sequential for small subgroups.
pub(crate) fn default_parts(rank: usize) -> usize {
    if rank >= 16 {
        rayon::current_num_threads().max(1) * 4
    } else {
        1
    }
}

/// Adds two tally vectors elementwise, growing the left one as needed.
pub(crate) fn merge_tallies(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Word counts by length for a column set (`A_0 = 1` included).
pub(crate) fn length_tally(columns: &[u32]) -> Result<Vec<u64>> {
    let basis = kernel_basis(columns)?;
    let n = columns.len();
    Ok(fold_words(
        &basis,
        default_parts(basis.len()),
        || vec![0u64; n + 1],
        |acc, w| acc[w.count_ones() as usize] += 1,
        merge_tallies,
    ))
}
