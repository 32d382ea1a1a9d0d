//! Specialized word length patterns: blocked designs, designs with
//! important two-factor interactions, and the major/minor factor framework
//! in which the fitted model is the major-factor main effects plus `S`
//! additional effects carried by auxiliary columns.

use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::gf2::{word_column, Column, FactorAssignment, Letter, LetterKind, Word};
use crate::kernel;
use crate::wlp::{binomial, effects_of_order, EffectGrouping, GeneralWlp, Wlp};

/// True iff no `γ_1` effect is aliased with the mean and no two are aliased
/// with each other.
pub fn estimability_check(assignment: &FactorAssignment, gamma1: &[Word]) -> Result<bool> {
    let mut seen = HashSet::with_capacity(gamma1.len());
    for e in gamma1 {
        let c = word_column(assignment, e)?;
        if c.is_identity() || !seen.insert(c) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn zero_ext(v: &[u64], i: i64) -> i64 {
    if i < 0 {
        0
    } else {
        v.get(i as usize).copied().unwrap_or(0) as i64
    }
}

fn to_general(values: Vec<i64>, what: &str) -> Result<GeneralWlp> {
    if let Some(v) = values.iter().find(|&&v| v < 0) {
        return Err(DesignError::IdentityViolation(format!(
            "{what} produced negative N = {v}"
        )));
    }
    Ok(GeneralWlp::new(
        values.into_iter().map(|v| v as u64).collect(),
    ))
}

// ---------------------------------------------------------------------------
// Blocked designs
// ---------------------------------------------------------------------------

/// Treatment letters plus blocking letters on one assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedDesign {
    assignment: FactorAssignment,
    counts: BlockedCounts,
}

/// `A_j`: words with `j` treatment letters and no blocking letter (`A_0 = 1`
/// is the empty word); `B_j`: words with `j` treatment letters and at least
/// one blocking letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedCounts {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl BlockedCounts {
    pub fn a(&self, j: usize) -> u64 {
        self.a.get(j).copied().unwrap_or(0)
    }

    pub fn b(&self, j: usize) -> u64 {
        self.b.get(j).copied().unwrap_or(0)
    }

    /// Treatment factor count the counts were tallied over.
    pub fn treatments(&self) -> usize {
        self.a.len().saturating_sub(1)
    }
}

fn tally_blocked(assignment: &FactorAssignment) -> Result<BlockedCounts> {
    let tmask = assignment.kind_mask(LetterKind::Treatment);
    let m = assignment.count(LetterKind::Treatment);
    let basis = kernel::kernel_basis(&assignment.bits())?;
    let tally = kernel::fold_words(
        &basis,
        kernel::default_parts(basis.len()),
        || vec![0u64; 2 * (m + 1)],
        |acc, w| {
            let t = (w & tmask).count_ones() as usize;
            let blocked = w & !tmask != 0;
            acc[if blocked { m + 1 + t } else { t }] += 1;
        },
        kernel::merge_tallies,
    );
    Ok(BlockedCounts {
        a: tally[..=m].to_vec(),
        b: tally[m + 1..].to_vec(),
    })
}

impl BlockedDesign {
    pub fn new(assignment: FactorAssignment) -> Result<Self> {
        if let Some(l) = assignment.letters_of(LetterKind::Auxiliary).next() {
            return Err(DesignError::Domain(format!(
                "blocked designs take treatment and blocking letters only, found {l}"
            )));
        }
        if assignment.count(LetterKind::Treatment) == 0 {
            return Err(DesignError::Domain(
                "a blocked design needs treatment factors".into(),
            ));
        }
        let counts = tally_blocked(&assignment)?;
        let violated = [
            ("A_1", counts.a(1)),
            ("A_2", counts.a(2)),
            ("B_0", counts.b(0)),
            ("B_1", counts.b(1)),
        ]
        .into_iter()
        .filter(|(_, v)| *v > 0)
        .map(|(n, v)| format!("{n} = {v}"))
        .collect_vec();
        if !violated.is_empty() {
            return Err(DesignError::NotEstimable(format!(
                "blocked design needs A_1 = A_2 = B_0 = B_1 = 0 ({})",
                violated.join(", ")
            )));
        }
        Ok(Self { assignment, counts })
    }

    pub fn assignment(&self) -> &FactorAssignment {
        &self.assignment
    }

    pub fn treatments(&self) -> usize {
        self.assignment.count(LetterKind::Treatment)
    }

    pub fn blocking_factors(&self) -> usize {
        self.assignment.count(LetterKind::Blocking)
    }

    /// The `2^{m_1} − 1` block-effect columns, in increasing encoding.
    pub fn block_effect_columns(&self) -> Vec<Column> {
        let blocks: Vec<u32> = self
            .assignment
            .iter()
            .filter(|(l, _)| l.kind == LetterKind::Blocking)
            .map(|(_, c)| c.bits())
            .collect();
        span_columns(&blocks)
    }
}

/// Nonzero elements of the span of independent columns, sorted.
pub(crate) fn span_columns(generators: &[u32]) -> Vec<Column> {
    let mut out: Vec<u32> = (1u64..1 << generators.len())
        .map(|s| {
            generators
                .iter()
                .enumerate()
                .filter(|(i, _)| s >> i & 1 == 1)
                .fold(0u32, |acc, (_, &g)| acc ^ g)
        })
        .collect();
    out.sort_unstable();
    out.into_iter().map(Column::from_bits_unchecked).collect()
}

pub fn blocked_counts(design: &BlockedDesign) -> BlockedCounts {
    design.counts.clone()
}

/// `N_j = (j+1)A_{j+1} + (m−j+1)A_{j−1} + B_j` for `j = 2..=m`.
pub fn blocked_n_main(c: &BlockedCounts, m: usize) -> Result<GeneralWlp> {
    for (name, v) in [
        ("A_1", c.a(1)),
        ("A_2", c.a(2)),
        ("B_0", c.b(0)),
        ("B_1", c.b(1)),
    ] {
        if v > 0 {
            return Err(DesignError::Precondition(format!(
                "{name} = {v}, must be 0"
            )));
        }
    }
    let values = (2..=m as i64)
        .map(|j| {
            (j + 1) * zero_ext(&c.a, j + 1)
                + (m as i64 - j + 1) * zero_ext(&c.a, j - 1)
                + zero_ext(&c.b, j)
        })
        .collect();
    to_general(values, "blocked main-effect pattern")
}

/// Pattern when `γ_1` also holds every treatment 2fi; `γ_j` are the
/// `(j+1)`-factor treatment interactions, `j = 2..=m−1`.
///
/// The block term is `B_{j+1}`: a `(j+1)`-factor interaction aliased with a
/// block effect is a word with `j+1` treatment letters.
pub fn blocked_n_twofi(c: &BlockedCounts, m: usize) -> Result<GeneralWlp> {
    let conditions = [
        ("A_1", c.a(1)),
        ("A_2", c.a(2)),
        ("A_3", c.a(3)),
        ("A_4", c.a(4)),
        ("B_0", c.b(0)),
        ("B_1", c.b(1)),
        ("B_2", c.b(2)),
    ];
    for (name, v) in conditions {
        if v > 0 {
            return Err(DesignError::Precondition(format!(
                "{name} = {v}, must be 0"
            )));
        }
    }
    let m = m as i64;
    let c2 = |n: i64| {
        if n < 2 {
            0
        } else {
            binomial(n as u64, 2) as i64
        }
    };
    let values = (2..m)
        .map(|j| {
            (j + 2) * zero_ext(&c.a, j + 2)
                + c2(j + 3) * zero_ext(&c.a, j + 3)
                + zero_ext(&c.b, j + 1)
                + (m - j) * zero_ext(&c.a, j)
                + (m - j - 1) * (j + 1) * zero_ext(&c.a, j + 1)
                + c2(m - j + 1) * zero_ext(&c.a, j - 1)
        })
        .collect();
    to_general(values, "blocked 2fi pattern")
}

/// Literature comparators for blocked designs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RivalVectors {
    /// Treatment and blocked word counts interleaved: `(A_3, B_2, A_4, B_3, …)`.
    pub interleaved: Vec<u64>,
    /// Odd-length counts weighted by their interaction pairs, merged with
    /// blocked counts: `(3A_3 + B_2, A_4, 10A_5 + B_3, A_6, …)`.
    pub weighted: Vec<u64>,
}

pub fn rival_vectors(c: &BlockedCounts) -> RivalVectors {
    let m = c.treatments();
    let mut interleaved = Vec::new();
    for i in 2..=m {
        if i < m {
            interleaved.push(c.a(i + 1));
        }
        interleaved.push(c.b(i));
    }
    let mut weighted = Vec::new();
    for q in 1..m {
        let q64 = q as u64;
        weighted.push(binomial(2 * q64 + 1, q64) * c.a(2 * q + 1) + c.b(q + 1));
        weighted.push(c.a(2 * q + 2));
    }
    RivalVectors {
        interleaved,
        weighted,
    }
}

/// `γ_1` = treatment effects of up to `q` factors plus every block effect;
/// `γ_j` = `(q−1+j)`-factor treatment interactions.
pub fn blocked_grouping(assignment: &FactorAssignment, q: usize) -> Result<EffectGrouping> {
    let treatments: Vec<Letter> = assignment.letters_of(LetterKind::Treatment).collect();
    let blocks: Vec<Letter> = assignment.letters_of(LetterKind::Blocking).collect();
    if q == 0 || q > treatments.len() {
        return Err(DesignError::Domain(format!(
            "interaction order q = {q} out of range"
        )));
    }
    let mut fitted: Vec<Word> = (1..=q)
        .flat_map(|s| effects_of_order(&treatments, s))
        .collect();
    fitted.extend((1..=blocks.len()).flat_map(|s| effects_of_order(&blocks, s)));
    let mut groups = vec![fitted];
    groups.extend((q + 1..=treatments.len()).map(|s| effects_of_order(&treatments, s)));
    EffectGrouping::new(groups)
}

// ---------------------------------------------------------------------------
// Important two-factor interactions
// ---------------------------------------------------------------------------

/// The important 2fi's `(c_1, d_1), …, (c_S, d_S)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoFiRequirement {
    pairs: Vec<(Letter, Letter)>,
}

impl TwoFiRequirement {
    pub fn new(pairs: impl IntoIterator<Item = (Letter, Letter)>) -> Result<Self> {
        let mut out: Vec<(Letter, Letter)> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(DesignError::Domain(format!(
                    "pair ({a}, {b}) repeats a letter"
                )));
            }
            let p = if a < b { (a, b) } else { (b, a) };
            if out.contains(&p) {
                return Err(DesignError::Domain(format!(
                    "pair ({}, {}) listed twice",
                    p.0, p.1
                )));
            }
            out.push(p);
        }
        Ok(Self { pairs: out })
    }

    /// Pairs of treatment letters given by index, e.g. `&[(1, 2), (1, 3)]`.
    pub fn treatments(pairs: &[(u32, u32)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(a, b)| (Letter::treatment(a), Letter::treatment(b))),
        )
    }

    pub fn pairs(&self) -> &[(Letter, Letter)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn words(&self) -> Vec<Word> {
        self.pairs.iter().map(|&(a, b)| Word::new([a, b])).collect()
    }

    /// Distinct letters mentioned by the pairs, sorted.
    pub fn letters(&self) -> Vec<Letter> {
        self.pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .sorted()
            .dedup()
            .collect()
    }
}

/// Multiset counts `A_j^{(2)}`, `A_j^{(1)}`, `A_j^{(0)}` indexed by word length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFiProfile {
    pub both: Vec<u64>,
    pub one: Vec<u64>,
    pub neither: Vec<u64>,
}

impl TwoFiProfile {
    pub fn both(&self, j: i64) -> i64 {
        zero_ext(&self.both, j)
    }

    pub fn one(&self, j: i64) -> i64 {
        zero_ext(&self.one, j)
    }

    pub fn neither(&self, j: i64) -> i64 {
        zero_ext(&self.neither, j)
    }
}

/// Classifies every nonempty defining word against every important pair.
pub fn twofi_profile(
    assignment: &FactorAssignment,
    req: &TwoFiRequirement,
) -> Result<TwoFiProfile> {
    let pair_masks: Vec<(u64, u64)> = req
        .pairs()
        .iter()
        .map(|(a, b)| {
            let pa = assignment
                .position(a)
                .ok_or(DesignError::UnknownLetter(*a))?;
            let pb = assignment
                .position(b)
                .ok_or(DesignError::UnknownLetter(*b))?;
            Ok((1u64 << pa, 1u64 << pb))
        })
        .collect::<Result<_>>()?;
    let n = assignment.len();
    let basis = kernel::kernel_basis(&assignment.bits())?;
    let tally = kernel::fold_words(
        &basis,
        kernel::default_parts(basis.len()),
        || vec![0u64; 3 * (n + 1)],
        |acc, w| {
            if w == 0 {
                return;
            }
            let len = w.count_ones() as usize;
            for &(a, b) in &pair_masks {
                let hits = usize::from(w & a != 0) + usize::from(w & b != 0);
                acc[(2 - hits) * (n + 1) + len] += 1;
            }
        },
        kernel::merge_tallies,
    );
    Ok(TwoFiProfile {
        both: tally[..=n].to_vec(),
        one: tally[n + 1..2 * (n + 1)].to_vec(),
        neither: tally[2 * (n + 1)..].to_vec(),
    })
}

/// `N_j = (j+1)A_{j+1} + (m−j+1)A_{j−1} + A_{j+2}^{(2)} + A_j^{(1)} + A_{j−2}^{(0)}`.
///
/// Only the conditions visible in the counts are checked (`A_1 = A_2 = 0`,
/// no important 2fi aliased with a main effect); use [`estimability_check`]
/// for the full model.
pub fn twofi_n_direct(profile: &TwoFiProfile, wlp: &Wlp, m: usize) -> Result<GeneralWlp> {
    for i in 1..=2 {
        if wlp.a(i) > 0 {
            return Err(DesignError::Precondition(format!(
                "A_{i} = {}, must be 0",
                wlp.a(i)
            )));
        }
    }
    if profile.both(3) > 0 {
        return Err(DesignError::NotEstimable(
            "an important 2fi is aliased with a main effect".into(),
        ));
    }
    let values = (2..=m as i64)
        .map(|j| {
            let zero_term = if j - 2 >= 1 {
                profile.neither(j - 2)
            } else {
                0
            };
            (j + 1) * wlp.a_signed(j + 1)
                + (m as i64 - j + 1) * wlp.a_signed(j - 1)
                + profile.both(j + 2)
                + profile.one(j)
                + zero_term
        })
        .collect();
    to_general(values, "2fi pattern")
}

/// `γ_1` = mains plus the important 2fi's, `γ_2` = the other 2fi's,
/// `γ_j` = `j`-factor interactions for `j ≥ 3`.
pub fn twofi_grouping(
    assignment: &FactorAssignment,
    req: &TwoFiRequirement,
) -> Result<EffectGrouping> {
    let letters = assignment.letters();
    for l in req.letters() {
        if assignment.position(&l).is_none() {
            return Err(DesignError::UnknownLetter(l));
        }
    }
    let important: HashSet<Word> = req.words().into_iter().collect();
    let mut fitted = effects_of_order(letters, 1);
    fitted.extend(req.words());
    let others = effects_of_order(letters, 2)
        .into_iter()
        .filter(|w| !important.contains(w))
        .collect();
    let mut groups = vec![fitted, others];
    groups.extend((3..=letters.len()).map(|s| effects_of_order(letters, s)));
    EffectGrouping::new(groups)
}

// ---------------------------------------------------------------------------
// Major factors plus additional effects
// ---------------------------------------------------------------------------

/// `(D_1, D_2)`: major factors on `D_1` and `S` auxiliary columns `D_2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedDesign {
    combined: FactorAssignment,
    m: usize,
}

impl AugmentedDesign {
    /// `extra` columns get auxiliary letters `x1, …, xS` in order.
    pub fn new(major: &FactorAssignment, extra: &[Column]) -> Result<Self> {
        if let Some(l) = major.letters_of(LetterKind::Auxiliary).next() {
            return Err(DesignError::Domain(format!(
                "major factors may not use auxiliary letter {l}"
            )));
        }
        let mut combined = major.clone();
        for (i, &c) in extra.iter().enumerate() {
            combined.push(Letter::auxiliary(i as u32 + 1), c)?;
        }
        Ok(Self {
            combined,
            m: major.len(),
        })
    }

    /// Block effects as `D_2`: all `2^{m_1} − 1` columns spanned by the blocking factors.
    pub fn from_blocked(design: &BlockedDesign) -> Result<Self> {
        let major = design.assignment().restrict(LetterKind::Treatment);
        Self::new(&major, &design.block_effect_columns())
    }

    /// Important 2fi's as `D_2`: the product column of each pair, in pair order.
    pub fn from_twofi(assignment: &FactorAssignment, req: &TwoFiRequirement) -> Result<Self> {
        let extra = req
            .words()
            .iter()
            .map(|w| {
                word_column(assignment, w)?.column().ok_or_else(|| {
                    DesignError::NotEstimable(format!("interaction {w} is aliased with the mean"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(assignment, &extra).map_err(|e| match e {
            DesignError::DuplicateColumn { .. } => DesignError::NotEstimable(
                "an important 2fi is aliased with a main effect or another important 2fi".into(),
            ),
            other => other,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.combined.len() - self.m
    }

    pub fn combined(&self) -> &FactorAssignment {
        &self.combined
    }

    pub fn major_columns(&self) -> &[Column] {
        &self.combined.columns()[..self.m]
    }

    pub fn extra_columns(&self) -> &[Column] {
        &self.combined.columns()[self.m..]
    }

    pub fn major(&self) -> FactorAssignment {
        FactorAssignment::new(self.combined.k(), self.combined.iter().take(self.m))
            .expect("prefix of a valid assignment")
    }
}

/// `A_j(D_1)` and `B_j(D_1, D_2)` (length-`(j+1)` words with `j` letters
/// from `D_1` and exactly one from `D_2`), both indexed by `j = 0..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedCounts {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

pub fn augmented_counts(aug: &AugmentedDesign) -> Result<AugmentedCounts> {
    let m = aug.m();
    let major_mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let basis = kernel::kernel_basis(&aug.combined().bits())?;
    let tally = kernel::fold_words(
        &basis,
        kernel::default_parts(basis.len()),
        || vec![0u64; 2 * (m + 1)],
        |acc, w| {
            let t = (w & major_mask).count_ones() as usize;
            match (w & !major_mask).count_ones() {
                0 => acc[t] += 1,
                1 => acc[m + 1 + t] += 1,
                _ => {}
            }
        },
        kernel::merge_tallies,
    );
    Ok(AugmentedCounts {
        a: tally[..=m].to_vec(),
        b: tally[m + 1..].to_vec(),
    })
}

/// `N_2 = 3A_3 + B_2 − S`, `N_j = (j+1)A_{j+1} + (m−j+1)A_{j−1} + B_j` for `j ≥ 3`.
pub fn twofi_n_augmented(a: &[u64], b: &[u64], m: usize, s: usize) -> Result<GeneralWlp> {
    for i in 1..=2 {
        if zero_ext(a, i) > 0 {
            return Err(DesignError::Precondition(format!("A_{i} must be 0")));
        }
    }
    let values = (2..=m as i64)
        .map(|j| {
            let base = (j + 1) * zero_ext(a, j + 1)
                + (m as i64 - j + 1) * zero_ext(a, j - 1)
                + zero_ext(b, j);
            if j == 2 {
                base - s as i64
            } else {
                base
            }
        })
        .collect();
    to_general(values, "augmented 2fi pattern")
}

fn general_from_counts(c: &AugmentedCounts, m: usize, j: usize) -> u64 {
    let j = j as i64;
    ((j + 1) * zero_ext(&c.a, j + 1)
        + (m as i64 - j + 1) * zero_ext(&c.a, j - 1)
        + zero_ext(&c.b, j)) as u64
}

/// `N_j(D_1, D_2) = (j+1)A_{j+1}(D_1) + (m−j+1)A_{j−1}(D_1) + B_j(D_1, D_2)`.
///
/// The constant count of additional effects that are themselves `j`-factor
/// major interactions is not subtracted.
pub fn general_n(aug: &AugmentedDesign, j: usize) -> Result<u64> {
    if j < 2 || j > aug.m() {
        return Err(DesignError::Domain(format!(
            "index j = {j} outside 2..={}",
            aug.m()
        )));
    }
    let c = augmented_counts(aug)?;
    Ok(general_from_counts(&c, aug.m(), j))
}

/// `(N_2, …, N_m)` of [`general_n`], sharing one subgroup expansion.
pub fn general_wlp(aug: &AugmentedDesign) -> Result<GeneralWlp> {
    let c = augmented_counts(aug)?;
    Ok(GeneralWlp::new(
        (2..=aug.m())
            .map(|j| general_from_counts(&c, aug.m(), j))
            .collect(),
    ))
}

/// `γ_1` = major mains plus auxiliary mains; `γ_j` = `j`-factor major interactions.
pub fn augmented_grouping(aug: &AugmentedDesign) -> Result<EffectGrouping> {
    let letters = aug.combined().letters();
    let major = &letters[..aug.m()];
    let mut groups = vec![effects_of_order(letters, 1)];
    groups.extend((2..=major.len()).map(|s| effects_of_order(major, s)));
    EffectGrouping::new(groups)
}
