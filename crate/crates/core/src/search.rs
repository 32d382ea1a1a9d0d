//! Candidate enumeration and sequential lexicographic minimization.
//!
//! Candidates are streamed in a fixed order, scored in parallel batches and
//! merged in stream order, so results do not depend on thread count. All
//! tied optima are kept and reported sorted.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complementary::{g_bounds, g_value, split_n, ComplementEvaluator, SplitTriple};
use crate::criteria::{
    blocked_counts, blocked_n_main, blocked_n_twofi, general_wlp, twofi_n_direct, twofi_profile,
    AugmentedDesign, BlockedDesign, TwoFiRequirement,
};
use crate::error::{DesignError, Result};
use crate::gf2::{check_k, Column, FactorAssignment, Letter, LetterKind};
use crate::kernel;
use crate::wlp::{assignment_wlp, lex_compare, n_from_wlp_main, n_from_wlp_q, GeneralWlp};

/// What accompanies the `m` treatment factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Plain,
    Blocked { blocks: usize },
    TwoFi(TwoFiRequirement),
    General { extra: usize },
}

/// The pattern being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Main-effect model: `N_j` from the word length pattern.
    Main,
    /// All effects of up to `q` factors fitted.
    Interactions(usize),
    /// Blocked design, main-effect model.
    BlockedMain,
    /// Blocked design, all treatment 2fi's fitted.
    BlockedTwoFi,
    /// Important 2fi's fitted alongside the main effects.
    TwoFi,
    /// Major factors plus additional columns.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Self {
            max_nodes: None,
            max_time: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_nodes == Some(0) || self.max_time == Some(Duration::ZERO) {
            return Err(DesignError::Domain(
                "search budgets must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self::unlimited()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub k: u32,
    pub m: usize,
    pub variant: Variant,
    pub criterion: Criterion,
    pub limits: Limits,
    /// Skip column sets that are not lexicographically minimal under
    /// permutations of the basis columns (`k ≤ 6` only).
    pub prune: bool,
}

impl SearchSpec {
    pub fn new(k: u32, m: usize, variant: Variant, criterion: Criterion) -> Self {
        Self {
            k,
            m,
            variant,
            criterion,
            limits: Limits::unlimited(),
            prune: false,
        }
    }

    fn validate(&self) -> Result<()> {
        check_k(self.k)?;
        self.limits.validate()?;
        let total = (1usize << self.k) - 1;
        if self.m == 0 || self.m > total {
            return Err(DesignError::Capacity(format!(
                "{} factors do not fit in the {total} columns of H_{}",
                self.m, self.k
            )));
        }
        let allowed = match &self.variant {
            Variant::Plain => matches!(
                self.criterion,
                Criterion::Main | Criterion::Interactions(_) | Criterion::General
            ),
            Variant::Blocked { .. } => matches!(
                self.criterion,
                Criterion::BlockedMain | Criterion::BlockedTwoFi | Criterion::General
            ),
            Variant::TwoFi(_) => matches!(self.criterion, Criterion::TwoFi | Criterion::General),
            Variant::General { .. } => self.criterion == Criterion::General,
        };
        if !allowed {
            return Err(DesignError::Domain(format!(
                "criterion {:?} does not apply to variant {:?}",
                self.criterion, self.variant
            )));
        }
        match &self.variant {
            Variant::Blocked { blocks } if *blocks == 0 || *blocks as u32 >= self.k => Err(
                DesignError::Domain(format!("{blocks} blocking factors need 1 ≤ m_1 < k")),
            ),
            Variant::TwoFi(req) => {
                for l in req.letters() {
                    if l.kind != LetterKind::Treatment || l.index == 0 || l.index as usize > self.m
                    {
                        return Err(DesignError::UnknownLetter(l));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A design found by a search. Treatment columns are listed in factor
/// order (`1, 2, …`); blocking columns are a basis of the block subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Candidate {
    pub treatments: Vec<Column>,
    pub blocks: Vec<Column>,
    pub extra: Vec<Column>,
}

impl Candidate {
    /// Treatment letters `1..=m` followed by blocking letters `b1, b2, …`.
    pub fn assignment(&self, k: u32) -> Result<FactorAssignment> {
        let mut a = FactorAssignment::new(
            k,
            self.treatments
                .iter()
                .enumerate()
                .map(|(i, &c)| (Letter::treatment(i as u32 + 1), c)),
        )?;
        for (i, &c) in self.blocks.iter().enumerate() {
            a.push(Letter::blocking(i as u32 + 1), c)?;
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult<C> {
    pub best: Vec<C>,
    pub objective: GeneralWlp,
    pub explored: u64,
    pub exhaustive: bool,
}

fn cols(bits: &[u32]) -> Vec<Column> {
    bits.iter()
        .map(|&b| Column::from_bits_unchecked(b))
        .collect()
}

fn full_rank(bits: &[u32], k: u32) -> bool {
    kernel::rank(bits.iter().copied()) == bits.len().min(k as usize)
}

const MAX_PRUNE_K: u32 = 6;

struct Pruner {
    perms: Vec<Vec<u32>>,
}

impl Pruner {
    fn new(k: u32, enabled: bool) -> Option<Self> {
        (enabled && k <= MAX_PRUNE_K).then(|| Self {
            perms: (0..k).permutations(k as usize).collect(),
        })
    }

    fn image(perm: &[u32], c: u32) -> u32 {
        perm.iter()
            .enumerate()
            .filter(|(i, _)| c >> i & 1 == 1)
            .fold(0, |acc, (_, &t)| acc | 1 << t)
    }

    /// True iff the sorted set is no larger than any of its images.
    fn is_minimal(&self, set: &[u32]) -> bool {
        let mut img = Vec::with_capacity(set.len());
        self.perms.iter().all(|p| {
            img.clear();
            img.extend(set.iter().map(|&c| Self::image(p, c)));
            img.sort_unstable();
            img.as_slice() >= set
        })
    }
}

fn subsets(k: u32, size: usize, pruner: Option<Pruner>) -> impl Iterator<Item = Vec<u32>> + Send {
    (1u32..1 << k)
        .combinations(size)
        .filter(move |s| pruner.as_ref().is_none_or(|p| p.is_minimal(s)))
}

/// Full-rank `m`-subsets of `H_k` in lexicographic order of encodings.
pub fn enumerate_designs(k: u32, m: usize) -> Result<impl Iterator<Item = Vec<Column>> + Send> {
    design_stream(k, m, false)
}

/// [`enumerate_designs`] keeping only sets that are minimal under
/// permutations of the basis columns. Sound for every criterion here since
/// relabeling the basis preserves all alias relations.
pub fn enumerate_design_representatives(
    k: u32,
    m: usize,
) -> Result<impl Iterator<Item = Vec<Column>> + Send> {
    design_stream(k, m, true)
}

fn design_stream(
    k: u32,
    m: usize,
    prune: bool,
) -> Result<impl Iterator<Item = Vec<Column>> + Send> {
    check_k(k)?;
    if m > (1usize << k) - 1 {
        return Err(DesignError::Capacity(format!("{m} columns exceed H_{k}")));
    }
    Ok(subsets(k, m, Pruner::new(k, prune))
        .filter(move |s| full_rank(s, k))
        .map(|s| cols(&s)))
}

const BATCH: usize = 2048;

/// Sequential lexicographic minimization over a candidate stream.
///
/// `objective` returns `None` for candidates that are infeasible under the
/// criterion. Ties are kept and sorted.
pub fn minimize_sequential<C, I, F>(
    candidates: I,
    objective: F,
    limits: &Limits,
) -> Result<SearchResult<C>>
where
    C: Send + Ord,
    I: IntoIterator<Item = C>,
    F: Fn(&C) -> Result<Option<GeneralWlp>> + Sync,
{
    limits.validate()?;
    let start = Instant::now();
    let mut stream = candidates.into_iter();
    let mut best: Vec<C> = Vec::new();
    let mut objective_best: Option<GeneralWlp> = None;
    let mut explored = 0u64;
    let mut exhaustive = true;
    loop {
        let room = limits
            .max_nodes
            .map_or(BATCH as u64, |n| (n - explored).min(BATCH as u64));
        let batch: Vec<C> = stream.by_ref().take(room as usize).collect();
        if batch.is_empty() {
            break;
        }
        explored += batch.len() as u64;
        let scored = batch
            .into_par_iter()
            .map(|c| objective(&c).map(|o| (c, o)))
            .collect::<Result<Vec<_>>>()?;
        for (c, o) in scored {
            let Some(o) = o else { continue };
            match objective_best
                .as_ref()
                .map(|b| lex_compare(o.counts(), b.counts()))
            {
                Some(Ordering::Greater) => {}
                Some(Ordering::Equal) => best.push(c),
                _ => {
                    objective_best = Some(o);
                    best = vec![c];
                }
            }
        }
        let out_of_nodes = limits.max_nodes.is_some_and(|n| explored >= n);
        let out_of_time = limits.max_time.is_some_and(|t| start.elapsed() >= t);
        if out_of_nodes || out_of_time {
            let mut rest = stream.by_ref().peekable();
            exhaustive = rest.peek().is_none();
            break;
        }
    }
    let objective = objective_best.ok_or(DesignError::NoCandidate)?;
    best.sort();
    Ok(SearchResult {
        best,
        objective,
        explored,
        exhaustive,
    })
}

/// Nonzero elements of the span of `basis`, sorted.
fn span(basis: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = (1u32..1 << basis.len())
        .map(|s| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| s >> i & 1 == 1)
                .fold(0, |acc, (_, &b)| acc ^ b)
        })
        .collect();
    v.sort_unstable();
    v
}

/// Greedy basis of a sorted span: each element that is independent of the
/// earlier picks.
fn canonical_basis(sorted_span: &[u32], dim: usize) -> Vec<u32> {
    let mut basis = Vec::with_capacity(dim);
    for &c in sorted_span {
        if basis.len() == dim {
            break;
        }
        basis.push(c);
        if kernel::rank(basis.iter().copied()) < basis.len() {
            basis.pop();
        }
    }
    basis
}

/// Distinct `dim`-dimensional subspaces whose nonzero elements all lie in
/// `allowed`, as canonical bases in order of first discovery.
fn subspaces_within(allowed: &[u32], dim: usize) -> Vec<Vec<u32>> {
    let pool: HashSet<u32> = allowed.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for gens in allowed.iter().copied().combinations(dim) {
        if kernel::rank(gens.iter().copied()) < dim {
            continue;
        }
        let sp = span(&gens);
        if !sp.iter().all(|c| pool.contains(c)) || !seen.insert(sp.clone()) {
            continue;
        }
        out.push(canonical_basis(&sp, dim));
    }
    out
}

fn complement_of(k: u32, used: &[u32]) -> Vec<u32> {
    (1u32..1 << k).filter(|c| !used.contains(c)).collect()
}

fn not_estimable_to_none(r: Result<GeneralWlp>) -> Result<Option<GeneralWlp>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(DesignError::NotEstimable(_) | DesignError::Precondition(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Factor-order columns: the required letters take `labelled` (in
/// [`TwoFiRequirement::letters`] order), the others the remaining columns ascending.
fn label_columns(design: &[u32], letters: &[usize], labelled: &[u32], m: usize) -> Vec<u32> {
    let mut out = vec![0u32; m];
    for (&f, &c) in letters.iter().zip(labelled) {
        out[f] = c;
    }
    let mut rest = design.iter().filter(|c| !labelled.contains(c));
    for slot in out.iter_mut().filter(|s| **s == 0) {
        *slot = *rest
            .next()
            .expect("enough columns for the remaining factors");
    }
    out
}

fn requirement_indices(req: &TwoFiRequirement) -> (Vec<usize>, Vec<(usize, usize)>) {
    let letters: Vec<usize> = req.letters().iter().map(|l| l.index as usize - 1).collect();
    let pairs = req
        .pairs()
        .iter()
        .map(|(a, b)| (a.index as usize - 1, b.index as usize - 1))
        .collect();
    (letters, pairs)
}

/// Direct search over designs (and their blocks or additional columns).
pub fn direct_search(spec: &SearchSpec) -> Result<SearchResult<Candidate>> {
    spec.validate()?;
    let (k, m) = (spec.k, spec.m);
    let designs = subsets(k, m, Pruner::new(k, spec.prune)).filter(move |s| full_rank(s, k));
    match &spec.variant {
        Variant::Plain => {
            let criterion = spec.criterion;
            let stream = designs.map(|d| Candidate {
                treatments: cols(&d),
                blocks: vec![],
                extra: vec![],
            });
            minimize_sequential(
                stream,
                |c| {
                    let a = c.assignment(k)?;
                    let wlp = assignment_wlp(&a)?;
                    not_estimable_to_none(match criterion {
                        Criterion::Interactions(q) => n_from_wlp_q(&wlp, m, q),
                        Criterion::General => general_wlp(&AugmentedDesign::new(&a, &[])?),
                        _ => n_from_wlp_main(&wlp, m),
                    })
                },
                &spec.limits,
            )
        }
        Variant::Blocked { blocks } => {
            let dim = *blocks;
            let criterion = spec.criterion;
            let stream = designs.flat_map(move |d| {
                let free = complement_of(k, &d);
                subspaces_within(&free, dim)
                    .into_iter()
                    .map(move |b| Candidate {
                        treatments: cols(&d),
                        blocks: cols(&b),
                        extra: vec![],
                    })
            });
            minimize_sequential(
                stream,
                |c| {
                    let design = match BlockedDesign::new(c.assignment(k)?) {
                        Ok(d) => d,
                        Err(DesignError::NotEstimable(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    };
                    not_estimable_to_none(match criterion {
                        Criterion::BlockedTwoFi => blocked_n_twofi(&blocked_counts(&design), m),
                        Criterion::General => general_wlp(&AugmentedDesign::from_blocked(&design)?),
                        _ => blocked_n_main(&blocked_counts(&design), m),
                    })
                },
                &spec.limits,
            )
        }
        Variant::TwoFi(req) => {
            let (letters, _) = requirement_indices(req);
            let n_labelled = letters.len();
            let stream = designs.flat_map(move |d| {
                let letters = letters.clone();
                d.clone()
                    .into_iter()
                    .permutations(n_labelled)
                    .map(move |lab| {
                        let t = label_columns(&d, &letters, &lab, m);
                        Candidate {
                            treatments: cols(&t),
                            blocks: vec![],
                            extra: vec![],
                        }
                    })
            });
            let criterion = spec.criterion;
            let req = req.clone();
            minimize_sequential(
                stream,
                |c| {
                    let a = c.assignment(k)?;
                    let aug = match AugmentedDesign::from_twofi(&a, &req) {
                        Ok(aug) => aug,
                        Err(DesignError::NotEstimable(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    };
                    not_estimable_to_none(match criterion {
                        Criterion::General => general_wlp(&aug),
                        _ => twofi_n_direct(&twofi_profile(&a, &req)?, &assignment_wlp(&a)?, m),
                    })
                },
                &spec.limits,
            )
            .map(|r| with_extras(r, &req, k))
        }
        Variant::General { extra } => {
            let s = *extra;
            let stream = designs.flat_map(move |d| {
                let free = complement_of(k, &d);
                free.into_iter().combinations(s).map(move |e| Candidate {
                    treatments: cols(&d),
                    blocks: vec![],
                    extra: cols(&e),
                })
            });
            minimize_sequential(
                stream,
                |c| general_wlp(&AugmentedDesign::new(&c.assignment(k)?, &c.extra)?).map(Some),
                &spec.limits,
            )
        }
    }
}

/// Fills in the product columns of the important 2fi's for reporting.
fn with_extras(
    mut r: SearchResult<Candidate>,
    req: &TwoFiRequirement,
    k: u32,
) -> SearchResult<Candidate> {
    for c in &mut r.best {
        if let Ok(aug) = c
            .assignment(k)
            .and_then(|a| AugmentedDesign::from_twofi(&a, req))
        {
            c.extra = aug.extra_columns().to_vec();
        }
    }
    r
}

/// Lexicographically first labelling of the required letters on `d1`
/// whose pair products are exactly the columns of `d2`, each used once.
fn label_onto(
    d1: &[u32],
    d2: &[u32],
    letters: &[usize],
    pairs: &[(usize, usize)],
    m: usize,
) -> Option<Vec<u32>> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        pos: usize,
        d1: &[u32],
        d2: &[u32],
        letters: &[usize],
        partners: &[Vec<usize>],
        chosen: &mut Vec<Option<u32>>,
        used: &mut Vec<u32>,
        hit: &mut Vec<u32>,
    ) -> bool {
        if pos == letters.len() {
            return true;
        }
        let f = letters[pos];
        for &c in d1 {
            if used.contains(&c) {
                continue;
            }
            let prods: Vec<u32> = partners[f]
                .iter()
                .filter_map(|&g| chosen[g].map(|cg| cg ^ c))
                .collect();
            let ok = prods
                .iter()
                .enumerate()
                .all(|(i, p)| d2.contains(p) && !hit.contains(p) && !prods[..i].contains(p));
            if !ok {
                continue;
            }
            chosen[f] = Some(c);
            used.push(c);
            hit.extend(&prods);
            if go(pos + 1, d1, d2, letters, partners, chosen, used, hit) {
                return true;
            }
            hit.truncate(hit.len() - prods.len());
            used.pop();
            chosen[f] = None;
        }
        false
    }

    if pairs.len() != d2.len() {
        return None;
    }
    let mut partners = vec![Vec::new(); m];
    for &(a, b) in pairs {
        partners[a].push(b);
        partners[b].push(a);
    }
    let mut chosen = vec![None; m];
    if !go(
        0,
        d1,
        d2,
        letters,
        &partners,
        &mut chosen,
        &mut Vec::new(),
        &mut Vec::new(),
    ) {
        return None;
    }
    let labelled: Vec<u32> = letters
        .iter()
        .map(|&f| chosen[f].expect("assigned"))
        .collect();
    Some(label_columns(d1, letters, &labelled, m))
}

/// Splits `(D1, D2, D3)` of `H_k` with `|D1| = m`, `|D2| = s`, `D1` of full rank.
fn splits(
    k: u32,
    m: usize,
    s: usize,
    prune: bool,
) -> impl Iterator<Item = (Vec<u32>, Vec<u32>, Vec<u32>)> + Send {
    let total = (1usize << k) - 1;
    let union_size = total - m;
    subsets(k, union_size, Pruner::new(k, prune))
        .filter_map(move |u| {
            let d1 = complement_of(k, &u);
            full_rank(&d1, k).then_some((d1, u))
        })
        .flat_map(move |(d1, u)| {
            u.clone().into_iter().combinations(s).map(move |d2| {
                let d3 = u.iter().copied().filter(|c| !d2.contains(c)).collect();
                (d1.clone(), d2, d3)
            })
        })
}

fn extra_count(spec: &SearchSpec) -> Result<usize> {
    Ok(match &spec.variant {
        Variant::Plain => 0,
        Variant::Blocked { blocks } => (1usize << blocks) - 1,
        Variant::TwoFi(req) => req.len(),
        Variant::General { extra } => *extra,
    })
}

fn check_split_sizes(spec: &SearchSpec, s: usize) -> Result<()> {
    let total = (1usize << spec.k) - 1;
    if spec.m + s > total {
        return Err(DesignError::Infeasible(format!(
            "{} major columns and {s} additional columns exceed H_{}",
            spec.m, spec.k
        )));
    }
    Ok(())
}

/// Search over `(D2, D3)` with `D1 = H_k ∖ (D2 ∪ D3)`, scored from the
/// complement. Supports the main-effect type criteria of every variant.
pub fn complement_search(spec: &SearchSpec) -> Result<SearchResult<Candidate>> {
    spec.validate()?;
    if matches!(
        spec.criterion,
        Criterion::Interactions(_) | Criterion::BlockedTwoFi
    ) {
        return Err(DesignError::Domain(format!(
            "criterion {:?} has no complementary form",
            spec.criterion
        )));
    }
    let s = extra_count(spec)?;
    check_split_sizes(spec, s)?;
    let (k, m) = (spec.k, spec.m);
    let stream = splits(k, m, s, spec.prune);
    let eval = ComplementEvaluator::new(k, m, s)?;
    let score = |c: &Candidate, subtract: usize| score_split(&eval, k, c, subtract).map(Some);
    match &spec.variant {
        Variant::Plain | Variant::General { .. } => minimize_sequential(
            stream.map(|(d1, d2, _)| Candidate {
                treatments: cols(&d1),
                blocks: vec![],
                extra: cols(&d2),
            }),
            |c| score(c, 0),
            &spec.limits,
        ),
        Variant::Blocked { blocks } => {
            let dim = *blocks;
            minimize_sequential(
                stream.filter_map(move |(d1, d2, _)| {
                    let basis = canonical_basis(&d2, dim);
                    (basis.len() == dim && span(&basis) == d2).then(|| Candidate {
                        treatments: cols(&d1),
                        blocks: cols(&basis),
                        extra: cols(&d2),
                    })
                }),
                |c| score(c, 0),
                &spec.limits,
            )
        }
        Variant::TwoFi(req) => {
            let (letters, pairs) = requirement_indices(req);
            let subtract = if spec.criterion == Criterion::TwoFi {
                s
            } else {
                0
            };
            minimize_sequential(
                stream.filter_map(move |(d1, d2, _)| {
                    label_onto(&d1, &d2, &letters, &pairs, m).map(|t| Candidate {
                        treatments: cols(&t),
                        blocks: vec![],
                        extra: cols(&d2),
                    })
                }),
                |c| score(c, subtract),
                &spec.limits,
            )
        }
    }
}

/// Complementary pattern of a candidate, less `subtract` at `j = 2`.
fn score_split(
    eval: &ComplementEvaluator,
    k: u32,
    c: &Candidate,
    subtract: usize,
) -> Result<GeneralWlp> {
    let split = SplitTriple::from_parts(k, c.treatments.clone(), c.extra.clone())?;
    let mut counts = eval.wlp(&split)?.into_counts();
    if let Some(n2) = counts.first_mut() {
        *n2 = n2.checked_sub(subtract as u64).ok_or_else(|| {
            DesignError::IdentityViolation("N_2 smaller than the number of important 2fi's".into())
        })?;
    }
    Ok(GeneralWlp::new(counts))
}

/// Maximizes `g` over splits with `|D1| = m` and `|D2| = S`, which is the
/// same as minimizing `N_2`. The reported objective is `(N_2)`.
pub fn weak_search(spec: &SearchSpec) -> Result<SearchResult<SplitTriple>> {
    spec.validate()?;
    let s = extra_count(spec)?;
    check_split_sizes(spec, s)?;
    let k = spec.k;
    let m3 = (1usize << k) - 1 - spec.m - s;
    let ceiling = g_bounds(s, m3).total.to_integer() as u64;
    let stream = splits(k, spec.m, s, spec.prune).map(move |(d1, d2, d3)| {
        SplitTriple::new(k, cols(&d1), cols(&d2), cols(&d3)).expect("valid split")
    });
    let mut result = minimize_sequential(
        stream,
        |split| {
            let g = g_value(split)?;
            let gap = ceiling.checked_sub(g).ok_or_else(|| {
                DesignError::IdentityViolation(format!("g = {g} exceeds its upper bound {ceiling}"))
            })?;
            Ok(Some(GeneralWlp::new(vec![gap])))
        },
        &spec.limits,
    )?;
    let n2 = if spec.m >= 2 {
        vec![split_n(&result.best[0], 2)?]
    } else {
        vec![]
    };
    result.objective = GeneralWlp::new(n2);
    Ok(result)
}
