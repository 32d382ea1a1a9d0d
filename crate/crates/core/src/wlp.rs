//! Word length patterns, resolution, and the general aberration criterion.
//!
//! The general criterion ranks designs by sequentially minimizing
//! `(N_2, …, N_J)`, where `N_j` counts effects of group `γ_j` aliased with
//! some effect of the fitted-model group `γ_1`. Two independent oracles
//! compute `N_j` from first principles; the closed forms in terms of the
//! word length pattern are checked against them.

use std::cmp::Ordering;
use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::criteria::estimability_check;
use crate::error::{DesignError, Result};
use crate::gf2::{model_matrix, word_column, DefiningSubgroup, FactorAssignment, Letter, Word};

/// `(A_0, A_1, …, A_m)`: defining-word counts by length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Wlp {
    counts: Vec<u64>,
}

impl Wlp {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `A_i`, zero outside the stored range.
    pub fn a(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    pub(crate) fn a_signed(&self, i: i64) -> i64 {
        if i < 0 {
            0
        } else {
            self.a(i as usize) as i64
        }
    }

    /// Number of letters the pattern was computed over.
    pub fn factor_count(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(A_from, …, A_m)`.
    pub fn tail(&self, from: usize) -> &[u64] {
        self.counts.get(from..).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Finite(u32),
    Unbounded,
}

impl Resolution {
    pub fn at_least(self, r: u32) -> bool {
        match self {
            Resolution::Finite(v) => v >= r,
            Resolution::Unbounded => true,
        }
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        const ROMAN: [&str; 13] = [
            "", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII",
        ];
        match *self {
            Resolution::Finite(v) if (v as usize) < ROMAN.len() => f.write_str(ROMAN[v as usize]),
            Resolution::Finite(v) => write!(f, "{v}"),
            Resolution::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Ordered partition `(γ_1, …, γ_J)` of factorial effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectGrouping {
    groups: Vec<Vec<Word>>,
}

impl EffectGrouping {
    pub fn new(groups: Vec<Vec<Word>>) -> Result<Self> {
        if groups.first().is_none_or(Vec::is_empty) {
            return Err(DesignError::Domain(
                "the fitted-model group γ_1 is empty".into(),
            ));
        }
        let mut seen = HashSet::new();
        for (j, g) in groups.iter().enumerate() {
            for w in g {
                if !seen.insert(w) {
                    return Err(DesignError::Domain(format!(
                        "effect {w} appears more than once (group {})",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[Vec<Word>] {
        &self.groups
    }

    pub fn fitted(&self) -> &[Word] {
        &self.groups[0]
    }

    /// Number of groups `J`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All subsets of `letters` of exactly `size` elements.
pub(crate) fn effects_of_order(letters: &[Letter], size: usize) -> Vec<Word> {
    letters
        .iter()
        .copied()
        .combinations(size)
        .map(Word::new)
        .collect()
}

/// Hierarchical grouping: `γ_1` holds every effect involving up to `q`
/// letters, `γ_j` the `(q − 1 + j)`-letter interactions for `j ≥ 2`.
pub fn hierarchical_grouping(letters: &[Letter], q: usize) -> Result<EffectGrouping> {
    if q == 0 || q > letters.len() {
        return Err(DesignError::Domain(format!(
            "interaction order q = {q} outside 1..={}",
            letters.len()
        )));
    }
    let mut groups = vec![(1..=q).flat_map(|s| effects_of_order(letters, s)).collect()];
    groups.extend((q + 1..=letters.len()).map(|s| effects_of_order(letters, s)));
    EffectGrouping::new(groups)
}

/// `(N_2, …, N_J)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneralWlp {
    counts: Vec<u64>,
}

impl GeneralWlp {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `N_j` for `j ≥ 2`; zero outside the stored range.
    pub fn n(&self, j: usize) -> u64 {
        j.checked_sub(2)
            .and_then(|i| self.counts.get(i))
            .copied()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }
}

/// Counts defining words by length; `A_0 = 1` always.
pub fn word_length_pattern(subgroup: &DefiningSubgroup, m: usize) -> Wlp {
    let longest = subgroup.words().iter().map(Word::len).max().unwrap_or(0);
    let mut counts = vec![0u64; m.max(longest) + 1];
    for w in subgroup.words() {
        counts[w.len()] += 1;
    }
    Wlp::new(counts)
}

/// Word length pattern straight from an assignment, without materializing words.
pub fn assignment_wlp(assignment: &FactorAssignment) -> Result<Wlp> {
    Ok(Wlp::new(crate::kernel::length_tally(&assignment.bits())?))
}

/// Smallest positive `i` with `A_i > 0`.
pub fn resolution(wlp: &Wlp) -> Resolution {
    wlp.counts()
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &a)| a > 0)
        .map_or(Resolution::Unbounded, |(i, _)| Resolution::Finite(i as u32))
}

fn require_estimable(assignment: &FactorAssignment, grouping: &EffectGrouping) -> Result<()> {
    if estimability_check(assignment, grouping.fitted())? {
        Ok(())
    } else {
        Err(DesignError::NotEstimable(
            "γ_1 contains an effect aliased with the mean or with another γ_1 effect".into(),
        ))
    }
}

/// `N_j` by definition: effects of `γ_j` aliased with at least one effect of `γ_1`.
pub fn general_wlp_oracle(
    assignment: &FactorAssignment,
    grouping: &EffectGrouping,
) -> Result<GeneralWlp> {
    require_estimable(assignment, grouping)?;
    let fitted: HashSet<u32> = grouping
        .fitted()
        .iter()
        .map(|f| word_column(assignment, f).map(|c| c.bits()))
        .collect::<Result<_>>()?;
    let counts = grouping.groups()[1..]
        .iter()
        .map(|group| {
            group.iter().try_fold(0u64, |n, e| {
                let c = word_column(assignment, e)?.bits();
                Ok(n + u64::from(fitted.contains(&c)))
            })
        })
        .collect::<Result<_>>()?;
    Ok(GeneralWlp::new(counts))
}

/// `N_j = ‖C_j‖²` with `C_j = n⁻¹ W_1ᵀ W_j` computed from model matrices.
///
/// `j` is 1-based as in `(γ_1, …, γ_J)` and must be at least 2.
pub fn bias_norm_oracle(
    assignment: &FactorAssignment,
    grouping: &EffectGrouping,
    j: usize,
) -> Result<u64> {
    if j < 2 || j > grouping.len() {
        return Err(DesignError::Domain(format!(
            "group index {j} outside 2..={}",
            grouping.len()
        )));
    }
    require_estimable(assignment, grouping)?;
    let w1 = model_matrix(assignment, grouping.fitted())?;
    let wj = model_matrix(assignment, &grouping.groups()[j - 1])?;
    let n = assignment.runs() as i64;
    let sum_sq: i64 = w1.transpose_mul(&wj).iter().flatten().map(|&x| x * x).sum();
    if sum_sq % (n * n) != 0 {
        return Err(DesignError::IdentityViolation(format!(
            "trace(CᵀC) = {sum_sq}/{} is not an integer",
            n * n
        )));
    }
    Ok((sum_sq / (n * n)) as u64)
}

/// All `N_j` of a grouping through [`bias_norm_oracle`].
pub fn bias_norm_wlp(
    assignment: &FactorAssignment,
    grouping: &EffectGrouping,
) -> Result<GeneralWlp> {
    (2..=grouping.len())
        .map(|j| bias_norm_oracle(assignment, grouping, j))
        .collect::<Result<Vec<_>>>()
        .map(GeneralWlp::new)
}

fn require_zero(wlp: &Wlp, upto: usize, why: &str) -> Result<()> {
    match (1..=upto).find(|&i| wlp.a(i) > 0) {
        Some(i) => Err(DesignError::Precondition(format!(
            "{why} requires A_1..A_{upto} = 0 but A_{i} = {}",
            wlp.a(i)
        ))),
        None => Ok(()),
    }
}

/// `N_j = (j+1)A_{j+1} + (m−j+1)A_{j−1}` for main-effect models.
pub fn n_from_wlp_main(wlp: &Wlp, m: usize) -> Result<GeneralWlp> {
    require_zero(wlp, 2, "the main-effect pattern")?;
    let counts = (2..=m)
        .map(|j| (j as u64 + 1) * wlp.a(j + 1) + (m - j + 1) as u64 * wlp.a(j - 1))
        .collect();
    Ok(GeneralWlp::new(counts))
}

/// `N_j` when `γ_1` holds every effect of up to `q` factors and `γ_j` the
/// `(q − 1 + j)`-factor interactions.
///
/// An `L`-factor effect `e` is aliased with an `s`-factor effect `f` that
/// shares `t` letters with it exactly when a word of length
/// `ℓ = L + s − 2t` exists; each such word yields `C(ℓ, s−t)·C(m−ℓ, t)`
/// pairs. Resolution `2q + 1` makes every aliased `e` count once.
pub fn n_from_wlp_q(wlp: &Wlp, m: usize, q: usize) -> Result<GeneralWlp> {
    if q == 0 {
        return Err(DesignError::Precondition(
            "interaction order q must be positive".into(),
        ));
    }
    require_zero(wlp, 2 * q, &format!("the order-{q} pattern"))?;
    let counts = (2..=(m + 1).saturating_sub(q))
        .map(|j| {
            let big_l = (q + j - 1) as i64;
            let mut n = 0u64;
            for s in 1..=q as i64 {
                for t in 0..=s {
                    let len = big_l + s - 2 * t;
                    if len < 0 || len > m as i64 {
                        continue;
                    }
                    n += binomial(len as u64, (s - t) as u64)
                        * binomial(m as u64 - len as u64, t as u64)
                        * wlp.a(len as usize);
                }
            }
            n
        })
        .collect();
    Ok(GeneralWlp::new(counts))
}

pub(crate) fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographic comparison with zero padding; `Less` means strictly better.
pub fn lex_compare(x: &[u64], y: &[u64]) -> Ordering {
    let len = x.len().max(y.len());
    (0..len)
        .map(|i| {
            let a = x.get(i).copied().unwrap_or(0);
            let b = y.get(i).copied().unwrap_or(0);
            a.cmp(&b)
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}
