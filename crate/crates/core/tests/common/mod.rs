#![allow(dead_code)]

use aberrant_core::{Column, FactorAssignment, Letter, SplitTriple};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn cols(bits: &[u32]) -> Vec<Column> {
    bits.iter().map(|&b| Column::new(b, 16).unwrap()).collect()
}

pub fn rank(bits: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &b in bits {
        let mut v = b;
        for &p in &basis {
            v = v.min(v ^ p);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

pub fn span(gens: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = (1u32..1 << gens.len())
        .map(|s| {
            (0..gens.len())
                .filter(|i| s >> i & 1 == 1)
                .fold(0, |a, i| a ^ gens[i])
        })
        .collect();
    out.sort_unstable();
    out
}

/// Uniform `m`-subset of `H_k` with rank `min(m, k)`, in random order.
pub fn random_design(rng: &mut ChaCha8Rng, k: u32, m: usize) -> Vec<u32> {
    let mut all: Vec<u32> = (1..1 << k).collect();
    loop {
        all.shuffle(rng);
        let pick = all[..m].to_vec();
        if rank(&pick) == m.min(k as usize) {
            return pick;
        }
    }
}

pub fn random_subset(rng: &mut ChaCha8Rng, k: u32) -> Vec<u32> {
    (1u32..1 << k).filter(|_| rng.gen_bool(0.5)).collect()
}

pub fn treatments(k: u32, bits: &[u32]) -> FactorAssignment {
    FactorAssignment::treatments(k, bits).unwrap()
}

pub fn with_blocks(k: u32, t: &[u32], b: &[u32]) -> FactorAssignment {
    let mut a = treatments(k, t);
    for (i, &c) in b.iter().enumerate() {
        a.push(Letter::blocking(i as u32 + 1), Column::new(c, k).unwrap())
            .unwrap();
    }
    a
}

/// Random split with the given part sizes.
pub fn random_split(rng: &mut ChaCha8Rng, k: u32, m: usize, s: usize) -> SplitTriple {
    let mut all: Vec<u32> = (1..1 << k).collect();
    all.shuffle(rng);
    let d1 = cols(&all[..m]);
    let d2 = cols(&all[m..m + s]);
    let d3 = cols(&all[m + s..]);
    SplitTriple::new(k, d1, d2, d3).unwrap()
}

/// All `r`-subsets of `items` (lexicographic).
pub fn combinations<T: Copy>(items: &[T], r: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    if r > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every subset of `H_k` as a sorted list, by bitmask over columns.
pub fn all_subsets(k: u32) -> impl Iterator<Item = Vec<u32>> {
    let n = (1u32 << k) - 1;
    (0u64..1 << n).map(move |mask| (1..=n).filter(|c| mask >> (c - 1) & 1 == 1).collect())
}
