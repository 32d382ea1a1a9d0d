//! Complementary design theory: patterns of a design computed from the
//! columns it leaves out of `H_k`.
//!
//! Coefficients are exact rationals. Binomials use the falling-factorial
//! definition, so `C(t, r)` is meaningful for negative `t`.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::criteria::TwoFiRequirement;
use crate::error::{DesignError, Result};
use crate::gf2::{check_k, Column, FactorAssignment, Letter, LetterKind};
use crate::kernel;
use crate::wlp::{binomial, GeneralWlp, Wlp};

type Q = Ratio<i128>;

fn overflow(what: &str) -> DesignError {
    DesignError::Capacity(format!("{what} overflows 128-bit arithmetic"))
}

/// `C(t, r) = t(t−1)…(t−r+1)/r!` for any integer `t`; zero when `r < 0`.
pub fn generalized_binomial(t: i64, r: i64) -> Result<i128> {
    if r < 0 {
        return Ok(0);
    }
    let mut acc: i128 = 1;
    for i in 0..r as i128 {
        // Products of i + 1 consecutive integers are divisible by (i + 1)!.
        acc = acc
            .checked_mul(t as i128 - i)
            .ok_or_else(|| overflow("binomial"))?
            / (i + 1);
    }
    Ok(acc)
}

/// Arguments of `P_j(x; m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrawtchoukQuery {
    pub degree: usize,
    pub x: i64,
    pub m: i64,
}

/// `P_j(x; m) = Σ_s (−1)^s C(x, s) C(m − x, j − s)`.
pub fn krawtchouk(q: KrawtchoukQuery) -> Result<i128> {
    let j = q.degree as i64;
    (0..=j).try_fold(0i128, |acc, s| {
        let term = generalized_binomial(q.x, s)?
            .checked_mul(generalized_binomial(q.m - q.x, j - s)?)
            .ok_or_else(|| overflow("Krawtchouk term"))?;
        let signed = if s % 2 == 0 { term } else { -term };
        acc.checked_add(signed)
            .ok_or_else(|| overflow("Krawtchouk sum"))
    })
}

fn sign(e: i64) -> i128 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `c_m(i, j)`: the coefficient of `A_i(D̄)` in `A_j(D)` for `|D| = m`, `D ⊂ H_k`.
pub fn complement_coefficient(m: usize, k: u32, i: usize, j: usize) -> Result<Ratio<i128>> {
    check_k(k)?;
    if i > j {
        return Err(DesignError::Domain(format!(
            "coefficient c_m({i}, {j}) needs i ≤ j"
        )));
    }
    let half = 1i64 << (k - 1);
    let top = m as i64 - half;
    let (i, j) = (i as i64, j as i64);
    match i {
        1 | 2 => Ok(Q::zero()),
        0 => {
            let lead = sign(j - j / 2) * generalized_binomial(top, j / 2)?;
            let at = |x| {
                krawtchouk(KrawtchoukQuery {
                    degree: j as usize,
                    x,
                    m: m as i64,
                })
            };
            let diff = at(0)?
                .checked_sub(at(half)?)
                .ok_or_else(|| overflow("Krawtchouk difference"))?;
            Q::from_integer(lead)
                .checked_add(&Q::new(diff, 1i128 << k))
                .ok_or_else(|| overflow("coefficient"))
        }
        _ => {
            let h = (j - i) / 2;
            Ok(Q::from_integer(sign(j - h) * generalized_binomial(top, h)?))
        }
    }
}

fn to_count(q: &Q, what: impl FnOnce() -> String) -> Result<u64> {
    if !q.is_integer() || *q.numer() < 0 {
        return Err(DesignError::IdentityViolation(format!(
            "{} = {q} is not a count",
            what()
        )));
    }
    q.numer().to_u64().ok_or_else(|| overflow("count"))
}

fn weighted_sum(terms: impl IntoIterator<Item = Result<(Q, i128)>>) -> Result<Q> {
    terms.into_iter().try_fold(Q::zero(), |acc, t| {
        let (c, a) = t?;
        c.checked_mul(&Q::from_integer(a))
            .and_then(|x| acc.checked_add(&x))
            .ok_or_else(|| overflow("weighted sum"))
    })
}

/// Pattern of a design `D` with `m` columns from the pattern of its complement `H_k ∖ D`.
pub fn complement_wlp(complement: &Wlp, m: usize, k: u32) -> Result<Wlp> {
    check_k(k)?;
    let total = (1usize << k) - 1;
    if m + complement.factor_count() != total {
        return Err(DesignError::Domain(format!(
            "sizes {m} + {} do not add up to {total}",
            complement.factor_count()
        )));
    }
    if complement.a(0) != 1 {
        return Err(DesignError::Domain(
            "complement pattern must have A_0 = 1".into(),
        ));
    }
    let counts = (0..=m)
        .map(|j| {
            let q = weighted_sum(
                (0..=j).map(|i| Ok((complement_coefficient(m, k, i, j)?, complement.a(i) as i128))),
            )?;
            to_count(&q, || format!("A_{j}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Wlp::new(counts))
}

/// A partition of `H_k` into major columns `D1`, additional columns `D2`
/// and unused columns `D3`. Each part is kept sorted by encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitTriple {
    k: u32,
    d1: Vec<Column>,
    d2: Vec<Column>,
    d3: Vec<Column>,
}

impl SplitTriple {
    pub fn new(k: u32, d1: Vec<Column>, d2: Vec<Column>, d3: Vec<Column>) -> Result<Self> {
        check_k(k)?;
        let mut seen = vec![false; 1 << k];
        for c in d1.iter().chain(&d2).chain(&d3) {
            let b = c.bits() as usize;
            if b == 0 || b >= seen.len() {
                return Err(DesignError::InvalidColumn { bits: c.bits(), k });
            }
            if std::mem::replace(&mut seen[b], true) {
                return Err(DesignError::Domain(format!(
                    "column {c} appears in two parts"
                )));
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(DesignError::Domain("the three parts must cover H_k".into()));
        }
        let sorted = |mut v: Vec<Column>| {
            v.sort_unstable();
            v
        };
        Ok(Self {
            k,
            d1: sorted(d1),
            d2: sorted(d2),
            d3: sorted(d3),
        })
    }

    /// `D3` is whatever `D1` and `D2` leave out.
    pub fn from_parts(k: u32, d1: Vec<Column>, d2: Vec<Column>) -> Result<Self> {
        check_k(k)?;
        let used: std::collections::HashSet<u32> = d1.iter().chain(&d2).map(|c| c.bits()).collect();
        let d3 = (1u32..1 << k)
            .filter(|b| !used.contains(b))
            .map(Column::from_bits_unchecked)
            .collect();
        Self::new(k, d1, d2, d3)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d1(&self) -> &[Column] {
        &self.d1
    }

    pub fn d2(&self) -> &[Column] {
        &self.d2
    }

    pub fn d3(&self) -> &[Column] {
        &self.d3
    }

    pub fn m(&self) -> usize {
        self.d1.len()
    }

    pub fn s(&self) -> usize {
        self.d2.len()
    }

    pub fn m3(&self) -> usize {
        self.d3.len()
    }
}

const MAX_UNION: usize = 24;

/// Defining words of `D2 ∪ D3` by length `i` and number `p` of `D2` letters.
///
/// `p = 0` rows are the words of `D3` alone; the empty word sits at `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EProfile {
    counts: Vec<Vec<u64>>,
}

impl EProfile {
    /// `E_i^{(p)}`, zero outside the table.
    pub fn e(&self, i: usize, p: usize) -> u64 {
        self.counts
            .get(i)
            .and_then(|row| row.get(p))
            .copied()
            .unwrap_or(0)
    }

    /// `E_i = Σ_p p·E_i^{(p)}`: length-`i` words counted once per `D2` letter.
    pub fn e_sum(&self, i: usize) -> u64 {
        self.counts.get(i).map_or(0, |row| {
            row.iter().enumerate().map(|(p, &v)| p as u64 * v).sum()
        })
    }

    /// `A_i(D3)`.
    pub fn a_d3(&self, i: usize) -> u64 {
        self.e(i, 0)
    }

    /// `A_i(D2 ∪ D3)`.
    pub fn a_union(&self, i: usize) -> u64 {
        self.counts.get(i).map_or(0, |row| row.iter().sum())
    }

    pub fn max_len(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn table(&self) -> &[Vec<u64>] {
        &self.counts
    }
}

/// [`e_profile`] with the word enumeration split into `parts` ranges.
pub fn e_profile_partitioned(split: &SplitTriple, parts: usize) -> Result<EProfile> {
    let n = split.s() + split.m3();
    if n > MAX_UNION {
        return Err(DesignError::Capacity(format!(
            "|D2 ∪ D3| = {n} exceeds the enumeration limit {MAX_UNION}"
        )));
    }
    let s = split.s();
    let cols: Vec<u32> = split.d2.iter().chain(&split.d3).map(|c| c.bits()).collect();
    let d2_mask = (1u64 << s) - 1;
    let basis = kernel::kernel_basis(&cols)?;
    let width = s + 1;
    let flat = kernel::fold_words(
        &basis,
        parts,
        || vec![0u64; (n + 1) * width],
        |acc, w| {
            let len = w.count_ones() as usize;
            let p = (w & d2_mask).count_ones() as usize;
            acc[len * width + p] += 1;
        },
        kernel::merge_tallies,
    );
    Ok(EProfile {
        counts: flat.chunks(width).map(<[u64]>::to_vec).collect(),
    })
}

pub fn e_profile(split: &SplitTriple) -> Result<EProfile> {
    let n = split.s() + split.m3();
    e_profile_partitioned(
        split,
        kernel::default_parts(n.saturating_sub(split.k as usize)),
    )
}

/// `(u_{j,·}, v_{j,·})` of [`ComplementEvaluator`].
fn coefficient_row(k: u32, m: usize, s: usize, j: usize) -> Result<(Vec<Q>, Vec<Q>)> {
    let scale = |q: Q, f: i128| {
        q.checked_mul(&Q::from_integer(f))
            .ok_or_else(|| overflow("coefficient"))
    };
    let add = |a: Q, b: Q| a.checked_add(&b).ok_or_else(|| overflow("coefficient"));
    let s_i = s as i128;
    let top = j + 1;
    let mut u = vec![Q::zero(); top + 1];
    let mut v = vec![Q::zero(); top + 1];
    for i in 0..=top {
        let big = complement_coefficient(m + 1, k, i, top)?;
        let own = scale(complement_coefficient(m, k, i, top)?, top as i128 - s_i)?;
        u[i] = add(own, scale(big, s_i)?)?;
        v[i] = big;
    }
    for (i, slot) in u.iter_mut().enumerate().take(j) {
        let lower = scale(complement_coefficient(m, k, i, j - 1)?, (m - j + 1) as i128)?;
        *slot = add(*slot, lower)?;
    }
    Ok((u, v))
}

fn evaluate_row(row: &(Vec<Q>, Vec<Q>), e: &EProfile, j: usize) -> Result<u64> {
    let (u, v) = row;
    let plus = weighted_sum(
        u.iter()
            .enumerate()
            .map(|(i, c)| Ok((*c, e.a_union(i) as i128))),
    )?;
    let minus = weighted_sum(
        v.iter()
            .enumerate()
            .map(|(i, c)| Ok((*c, e.e_sum(i) as i128))),
    )?;
    let n = plus.checked_sub(&minus).ok_or_else(|| overflow("N_j"))?;
    to_count(&n, || format!("N_{j}"))
}

/// The complementary form of `(N_2, …, N_m)` for fixed `k`, `m = |D1|` and
/// `S = |D2|`, with all coefficients precomputed:
/// `N_j = Σ_i u_{j,i}·A_i(D2 ∪ D3) − Σ_i v_{j,i}·E_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementEvaluator {
    k: u32,
    m: usize,
    s: usize,
    rows: Vec<(Vec<Q>, Vec<Q>)>,
}

impl ComplementEvaluator {
    pub fn new(k: u32, m: usize, s: usize) -> Result<Self> {
        check_k(k)?;
        let rows = (2..=m)
            .map(|j| coefficient_row(k, m, s, j))
            .collect::<Result<_>>()?;
        Ok(Self { k, m, s, rows })
    }

    fn check(&self, split: &SplitTriple) -> Result<()> {
        if (split.k, split.m(), split.s()) != (self.k, self.m, self.s) {
            return Err(DesignError::Domain(format!(
                "split sizes (k, m, S) = ({}, {}, {}) do not match ({}, {}, {})",
                split.k,
                split.m(),
                split.s(),
                self.k,
                self.m,
                self.s
            )));
        }
        Ok(())
    }

    fn n_from_profile(&self, e: &EProfile, j: usize) -> Result<u64> {
        if j < 2 || j > self.m {
            return Err(DesignError::Domain(format!(
                "index j = {j} outside 2..={}",
                self.m
            )));
        }
        evaluate_row(&self.rows[j - 2], e, j)
    }

    pub fn n(&self, split: &SplitTriple, j: usize) -> Result<u64> {
        self.check(split)?;
        self.n_from_profile(&e_profile(split)?, j)
    }

    pub fn wlp(&self, split: &SplitTriple) -> Result<GeneralWlp> {
        self.check(split)?;
        let e = e_profile(split)?;
        (2..=self.m)
            .map(|j| self.n_from_profile(&e, j))
            .collect::<Result<Vec<_>>>()
            .map(GeneralWlp::new)
    }
}

/// `N_j(D1, D2)` of the major/minor framework, evaluated from `(D2, D3)` only.
pub fn split_n(split: &SplitTriple, j: usize) -> Result<u64> {
    if j < 2 || j > split.m() {
        return Err(DesignError::Domain(format!(
            "index j = {j} outside 2..={}",
            split.m()
        )));
    }
    evaluate_row(
        &coefficient_row(split.k, split.m(), split.s(), j)?,
        &e_profile(split)?,
        j,
    )
}

/// `(N_2, …, N_m)` through [`split_n`], sharing one profile.
pub fn split_wlp(split: &SplitTriple) -> Result<GeneralWlp> {
    #[cfg(debug_assertions)]
    diagnostics::debug_check_letter_identities(split)?;
    ComplementEvaluator::new(split.k, split.m(), split.s())?.wlp(split)
}

/// Per-letter quantities behind the complementary evaluation.
pub mod diagnostics {
    use super::*;

    /// For a column `d ∈ D2`: the pattern of `D1 ∪ {d}` counted directly
    /// (`A_j(D1) + B_{j−1}(d, D1)`) and through the coefficients applied to
    /// `(D2 ∖ {d}) ∪ D3`, for `j = 0..=m+1`.
    pub fn letter_identity(split: &SplitTriple, d: Column) -> Result<(Vec<u64>, Vec<Q>)> {
        if !split.d2.contains(&d) {
            return Err(DesignError::Domain(format!("{d} is not a D2 column")));
        }
        let m = split.m();
        let mut with_d: Vec<u32> = split.d1.iter().map(|c| c.bits()).collect();
        with_d.push(d.bits());
        let direct = kernel::length_tally(&with_d)?;
        let rest: Vec<u32> = split
            .d2
            .iter()
            .chain(&split.d3)
            .filter(|&&c| c != d)
            .map(|c| c.bits())
            .collect();
        let rest_tally = kernel::length_tally(&rest)?;
        let a = |i: usize| rest_tally.get(i).copied().unwrap_or(0) as i128;
        let via = (0..=m + 1)
            .map(|j| {
                weighted_sum(
                    (0..=j).map(|i| Ok((complement_coefficient(m + 1, split.k, i, j)?, a(i)))),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((direct, via))
    }

    #[cfg(debug_assertions)]
    pub(super) fn debug_check_letter_identities(split: &SplitTriple) -> Result<()> {
        let rank_d1 = split.m().saturating_sub(split.k as usize);
        if split.m() == 0 || rank_d1 > 12 || split.s() + split.m3() > 16 {
            return Ok(());
        }
        for &d in &split.d2 {
            let (direct, via) = letter_identity(split, d)?;
            for (j, v) in via.iter().enumerate() {
                debug_assert_eq!(
                    *v,
                    Q::from_integer(direct.get(j).copied().unwrap_or(0) as i128),
                    "per-letter identity at j = {j}, d = {d}"
                );
            }
        }
        Ok(())
    }
}

/// `g = 3A_3(D3) + 2E_3^{(1)} + E_3^{(2)}`; maximizing it minimizes `N_2`.
pub fn g_value(split: &SplitTriple) -> Result<u64> {
    let e = e_profile(split)?;
    Ok(3 * e.a_d3(3) + 2 * e.e(3, 1) + e.e(3, 2))
}

/// Upper bounds on `g` and its two halves for `|D2| = m2`, `|D3| = m3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GBounds {
    /// `C(m3, 2)`, bounding `3A_3(D3) + E_3^{(1)}`.
    pub d3_pairs: u64,
    /// `m2·m3/2`, bounding `E_3^{(1)} + E_3^{(2)}`.
    pub cross: Ratio<i64>,
    /// `m3(m2 + m3 − 1)/2`, bounding `g`.
    pub total: Ratio<i64>,
}

/// `(3A_3(D3) + E_3^{(1)}, E_3^{(1)} + E_3^{(2)})`; their sum is `g`.
///
/// The first half counts pairs of `D3` columns whose product falls in
/// `D2 ∪ D3`, the second pairs `(c, d) ∈ D2 × D3` doing so, halved.
pub fn g_parts(split: &SplitTriple) -> Result<(u64, u64)> {
    let e = e_profile(split)?;
    Ok((3 * e.a_d3(3) + e.e(3, 1), e.e(3, 1) + e.e(3, 2)))
}

pub fn g_bounds(m2: usize, m3: usize) -> GBounds {
    let (a, b) = (m2 as i64, m3 as i64);
    GBounds {
        d3_pairs: binomial(m3 as u64, 2),
        cross: Ratio::new(a * b, 2),
        total: Ratio::new(b * (a + b - 1).max(0), 2),
    }
}

/// What the additional columns have to carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakRequirement {
    /// `m1` blocking factors.
    Blocks(usize),
    /// Important 2fi's among the major (treatment) factors `1..=m`.
    TwoFi(TwoFiRequirement),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakConstruction {
    pub split: SplitTriple,
    pub assignment: FactorAssignment,
}

const WEAK_NODE_BUDGET: u64 = 50_000_000;

/// Major factors on `H_k ∖ H_r`, additional effects inside `H_r`.
///
/// Factors take the lexicographically smallest feasible columns. When `m`
/// is smaller than `2^k − 2^r` the unused columns of `H_k ∖ H_r` join `D3`.
pub fn construct_weak(
    k: u32,
    r: u32,
    m: usize,
    requirement: &WeakRequirement,
) -> Result<WeakConstruction> {
    check_k(k)?;
    if r == 0 || r >= k {
        return Err(DesignError::Precondition(format!(
            "r = {r} outside 1..={}",
            k - 1
        )));
    }
    let pool: Vec<u32> = ((1u32 << r)..(1u32 << k)).collect();
    if m > pool.len() {
        return Err(DesignError::Infeasible(format!(
            "{m} major factors exceed the {} columns of H_k ∖ H_r",
            pool.len()
        )));
    }
    let small = (1u32 << r) - 1;
    let (major, d2_bits, assignment) = match requirement {
        WeakRequirement::Blocks(m1) => {
            if *m1 == 0 || *m1 > r as usize {
                return Err(DesignError::Infeasible(format!(
                    "{m1} blocking factors do not fit in H_{r}"
                )));
            }
            let major = pool[..m].to_vec();
            let mut a = FactorAssignment::treatments(k, &major)?;
            for i in 0..*m1 as u32 {
                a.push(Letter::blocking(i + 1), Column::basis(i + 1))?;
            }
            (major, (1u32..1 << m1).collect::<Vec<_>>(), a)
        }
        WeakRequirement::TwoFi(req) => {
            if req.len() > small as usize {
                return Err(DesignError::Infeasible(format!(
                    "{} important 2fi's exceed the {small} columns of H_{r}",
                    req.len()
                )));
            }
            let pairs = req
                .pairs()
                .iter()
                .map(|&(a, b)| {
                    let idx = |l: Letter| match l.kind {
                        LetterKind::Treatment if (1..=m as u32).contains(&l.index) => {
                            Ok(l.index as usize - 1)
                        }
                        _ => Err(DesignError::UnknownLetter(l)),
                    };
                    Ok((idx(a)?, idx(b)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let major = assign_pairs(&pool, m, &pairs, small)?;
            let mut d2: Vec<u32> = pairs.iter().map(|&(a, b)| major[a] ^ major[b]).collect();
            d2.sort_unstable();
            (major.clone(), d2, FactorAssignment::treatments(k, &major)?)
        }
    };
    let d1: Vec<Column> = major
        .iter()
        .map(|&b| Column::from_bits_unchecked(b))
        .collect();
    let d2: Vec<Column> = d2_bits
        .iter()
        .map(|&b| Column::from_bits_unchecked(b))
        .collect();
    let split = SplitTriple::from_parts(k, d1, d2)?;
    Ok(WeakConstruction { split, assignment })
}

/// Depth-first search for the lexicographically smallest map of factors to
/// pool columns whose pair products are distinct columns of `H_r`.
fn assign_pairs(pool: &[u32], m: usize, pairs: &[(usize, usize)], small: u32) -> Result<Vec<u32>> {
    struct Dfs<'a> {
        pool: &'a [u32],
        m: usize,
        // For each factor, the earlier factors it is paired with.
        partners: Vec<Vec<usize>>,
        small: u32,
        chosen: Vec<u32>,
        used_col: Vec<bool>,
        used_prod: Vec<bool>,
        nodes: u64,
    }

    impl Dfs<'_> {
        fn go(&mut self) -> Result<bool> {
            let f = self.chosen.len();
            if f == self.m {
                return Ok(true);
            }
            for (ci, &c) in self.pool.iter().enumerate() {
                if self.used_col[ci] {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > WEAK_NODE_BUDGET {
                    return Err(DesignError::Capacity(
                        "assignment search exceeded its node budget".into(),
                    ));
                }
                let prods: Vec<u32> = self.partners[f]
                    .iter()
                    .map(|&g| self.chosen[g] ^ c)
                    .collect();
                let fits = prods.iter().enumerate().all(|(i, &p)| {
                    p != 0
                        && p <= self.small
                        && !self.used_prod[p as usize]
                        && !prods[..i].contains(&p)
                });
                if !fits {
                    continue;
                }
                self.used_col[ci] = true;
                for &p in &prods {
                    self.used_prod[p as usize] = true;
                }
                self.chosen.push(c);
                if self.go()? {
                    return Ok(true);
                }
                self.chosen.pop();
                for &p in &prods {
                    self.used_prod[p as usize] = false;
                }
                self.used_col[ci] = false;
            }
            Ok(false)
        }
    }

    let mut partners = vec![Vec::new(); m];
    for &(a, b) in pairs {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        partners[hi].push(lo);
    }
    let mut dfs = Dfs {
        pool,
        m,
        partners,
        small,
        chosen: Vec::with_capacity(m),
        used_col: vec![false; pool.len()],
        used_prod: vec![false; small as usize + 1],
        nodes: 0,
    };
    if dfs.go()? {
        Ok(dfs.chosen)
    } else {
        Err(DesignError::Infeasible(
            "no assignment puts the important 2fi's on distinct columns of H_r".into(),
        ))
    }
}
