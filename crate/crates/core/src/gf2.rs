//! Exact GF(2) algebra for columns, words, defining subgroups and ±1 model
//! matrices.
//!
//! A column of the saturated design `H_k` is encoded as an integer in
//! `1..2^k` whose binary digits are coordinates over the ordered basis
//! `a_1, …, a_k` (bit `i` is `a_{i+1}`). Column products are XORs and the
//! identity column `I` is the zero vector, which never appears as a design
//! column. All fractions are principal: every defining word carries sign +1.

use std::collections::HashMap;
use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::kernel;

/// Largest supported run-size exponent.
pub const MAX_K: u32 = 16;

pub(crate) fn check_k(k: u32) -> Result<()> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(DesignError::Capacity(format!(
            "run-size exponent k = {k} outside 1..={MAX_K}"
        )))
    }
}

/// A nonzero column of `H_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Column(u32);

impl Column {
    pub fn new(bits: u32, k: u32) -> Result<Self> {
        check_k(k)?;
        if bits == 0 || bits >> k != 0 {
            return Err(DesignError::InvalidColumn { bits, k });
        }
        Ok(Self(bits))
    }

    /// The basis column `a_i` (1-based).
    pub fn basis(i: u32) -> Self {
        assert!((1..=MAX_K).contains(&i), "basis index {i} out of range");
        Self(1 << (i - 1))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// True when the column lies in `H_r`, the span of `a_1, …, a_r`.
    pub const fn in_leading_span(self, r: u32) -> bool {
        self.0 >> r == 0
    }

    pub(crate) const fn from_bits_unchecked(bits: u32) -> Self {
        Self(bits)
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in 0..32 {
            if self.0 >> b & 1 == 1 {
                write!(f, "a{}", b + 1)?;
            }
        }
        Ok(())
    }
}

/// A GF(2) column product that may be the identity column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Product(u32);

impl Product {
    pub const IDENTITY: Product = Product(0);

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_identity(self) -> bool {
        self.0 == 0
    }

    pub fn column(self) -> Option<Column> {
        (self.0 != 0).then_some(Column(self.0))
    }
}

impl From<Column> for Product {
    fn from(c: Column) -> Self {
        Product(c.0)
    }
}

impl BitXor for Product {
    type Output = Product;
    fn bitxor(self, rhs: Product) -> Product {
        Product(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column() {
            Some(c) => c.fmt(f),
            None => f.write_str("I"),
        }
    }
}

/// Every column of `H_k`, in increasing encoding.
pub fn saturated_columns(k: u32) -> Result<Vec<Column>> {
    check_k(k)?;
    Ok((1..1u32 << k).map(Column).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterKind {
    Treatment,
    Blocking,
    Auxiliary,
}

/// A factor label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: u32,
}

impl Letter {
    pub const fn treatment(index: u32) -> Self {
        Self {
            kind: LetterKind::Treatment,
            index,
        }
    }

    pub const fn blocking(index: u32) -> Self {
        Self {
            kind: LetterKind::Blocking,
            index,
        }
    }

    pub const fn auxiliary(index: u32) -> Self {
        Self {
            kind: LetterKind::Auxiliary,
            index,
        }
    }

    fn short_name(&self) -> bool {
        self.kind == LetterKind::Treatment && self.index < 10
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LetterKind::Treatment => write!(f, "{}", self.index),
            LetterKind::Blocking => write!(f, "b{}", self.index),
            LetterKind::Auxiliary => write!(f, "x{}", self.index),
        }
    }
}

/// A set of letters. The empty word stands for the identity `I`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut v: Vec<Letter> = letters.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Word over treatment letters, e.g. `Word::treatments(&[1, 2, 3, 5])`.
    pub fn treatments(indices: &[u32]) -> Self {
        Self::new(indices.iter().map(|&i| Letter::treatment(i)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, letter: &Letter) -> bool {
        self.0.binary_search(letter).is_ok()
    }

    /// Number of letters of the given kind.
    pub fn count_kind(&self, kind: LetterKind) -> usize {
        self.0.iter().filter(|l| l.kind == kind).count()
    }

    pub fn symmetric_difference(&self, other: &Word) -> Word {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Word(out)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word::new(iter)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        let sep = if self.0.iter().all(Letter::short_name) {
            ""
        } else {
            "."
        };
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Map from letters to columns of `H_k`.
///
/// Letters keep their insertion order, which is also the bit order used by
/// the subgroup engine. Columns are pairwise distinct and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorAssignment {
    k: u32,
    letters: Vec<Letter>,
    columns: Vec<Column>,
    index: HashMap<Letter, usize>,
}

impl FactorAssignment {
    pub fn new(k: u32, entries: impl IntoIterator<Item = (Letter, Column)>) -> Result<Self> {
        check_k(k)?;
        let mut out = Self {
            k,
            letters: Vec::new(),
            columns: Vec::new(),
            index: HashMap::new(),
        };
        for (letter, column) in entries {
            out.push(letter, column)?;
        }
        Ok(out)
    }

    /// Treatment letters `1..=m` on the given column encodings.
    pub fn treatments(k: u32, bits: &[u32]) -> Result<Self> {
        let entries = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| Ok((Letter::treatment(i as u32 + 1), Column::new(b, k)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, entries)
    }

    pub fn push(&mut self, letter: Letter, column: Column) -> Result<()> {
        if column.bits() >> self.k != 0 {
            return Err(DesignError::InvalidColumn {
                bits: column.bits(),
                k: self.k,
            });
        }
        if self.index.contains_key(&letter) {
            return Err(DesignError::DuplicateLetter(letter));
        }
        if let Some(pos) = self.columns.iter().position(|&c| c == column) {
            return Err(DesignError::DuplicateColumn {
                first: self.letters[pos],
                second: letter,
                bits: column.bits(),
            });
        }
        self.index.insert(letter, self.letters.len());
        self.letters.push(letter);
        self.columns.push(column);
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn runs(&self) -> usize {
        1usize << self.k
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Letter, Column)> + '_ {
        self.letters
            .iter()
            .copied()
            .zip(self.columns.iter().copied())
    }

    pub fn column_of(&self, letter: &Letter) -> Option<Column> {
        self.index.get(letter).map(|&i| self.columns[i])
    }

    pub(crate) fn position(&self, letter: &Letter) -> Option<usize> {
        self.index.get(letter).copied()
    }

    pub fn letters_of(&self, kind: LetterKind) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().copied().filter(move |l| l.kind == kind)
    }

    pub fn count(&self, kind: LetterKind) -> usize {
        self.letters_of(kind).count()
    }

    /// Keeps only letters of the given kind, preserving order.
    pub fn restrict(&self, kind: LetterKind) -> FactorAssignment {
        let entries = self.iter().filter(|(l, _)| l.kind == kind);
        FactorAssignment::new(self.k, entries).expect("a subset of a valid assignment is valid")
    }

    pub fn rank(&self) -> usize {
        kernel::rank(self.columns.iter().map(|c| c.bits()))
    }

    pub(crate) fn bits(&self) -> Vec<u32> {
        self.columns.iter().map(|c| c.bits()).collect()
    }

    /// Letter mask (bit = insertion position) of all letters of a kind.
    pub(crate) fn kind_mask(&self, kind: LetterKind) -> u64 {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == kind)
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    pub(crate) fn word_from_mask(&self, mask: u64) -> Word {
        Word::new(
            (0..self.letters.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.letters[i]),
        )
    }
}

/// GF(2) product of the columns of a word's letters.
pub fn word_column(assignment: &FactorAssignment, word: &Word) -> Result<Product> {
    word.letters().iter().try_fold(Product::IDENTITY, |acc, l| {
        assignment
            .column_of(l)
            .map(|c| acc ^ Product::from(c))
            .ok_or(DesignError::UnknownLetter(*l))
    })
}

/// The full set of defining words, including the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningSubgroup {
    words: Vec<Word>,
    p: usize,
}

impl DefiningSubgroup {
    fn from_words(mut words: Vec<Word>, p: usize) -> Self {
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Self { words, p }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.words.iter().any(|w| w == word)
    }
}

/// Expands `p` independent generators into all `2^p` defining words.
pub fn expand_defining_subgroup(
    generators: &[Word],
    assignment: &FactorAssignment,
) -> Result<DefiningSubgroup> {
    for g in generators {
        if !word_column(assignment, g)?.is_identity() {
            return Err(DesignError::InconsistentGenerator(g.clone()));
        }
    }
    if generators.len() > kernel::MAX_KERNEL_RANK {
        return Err(DesignError::Capacity(format!(
            "{} generators exceed 2^{} words",
            generators.len(),
            kernel::MAX_KERNEL_RANK
        )));
    }
    let mut words = vec![Word::empty()];
    for g in generators {
        let extended: Vec<Word> = words.iter().map(|w| w.symmetric_difference(g)).collect();
        if extended.iter().any(Word::is_empty) {
            return Err(DesignError::DependentGenerators);
        }
        words.extend(extended);
    }
    Ok(DefiningSubgroup::from_words(words, generators.len()))
}

/// Independent generators of the defining relation implied by an assignment.
///
/// There is one generator per letter whose column lies in the span of the
/// earlier letters, so `p = letters − rank`.
pub fn defining_generators(assignment: &FactorAssignment) -> Result<Vec<Word>> {
    let basis = kernel::kernel_basis(&assignment.bits())?;
    Ok(basis
        .iter()
        .map(|&m| assignment.word_from_mask(m))
        .collect())
}

/// The defining relation of the design given by an assignment.
pub fn defining_subgroup(assignment: &FactorAssignment) -> Result<DefiningSubgroup> {
    let generators = defining_generators(assignment)?;
    expand_defining_subgroup(&generators, assignment)
}

/// True iff the two effects have identical model-matrix columns.
pub fn is_aliased(assignment: &FactorAssignment, e1: &Word, e2: &Word) -> Result<bool> {
    Ok((word_column(assignment, e1)? ^ word_column(assignment, e2)?).is_identity())
}

/// A dense ±1 matrix stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl SignMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[i8] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    /// `selfᵀ · other` as exact integers.
    pub fn transpose_mul(&self, other: &SignMatrix) -> Vec<Vec<i64>> {
        assert_eq!(self.rows, other.rows, "row counts differ");
        (0..self.cols)
            .map(|a| {
                let x = self.column(a);
                (0..other.cols)
                    .map(|b| {
                        x.iter()
                            .zip(other.column(b))
                            .map(|(&u, &v)| i64::from(u) * i64::from(v))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Model matrix: row `r` of effect `e` is `+1` when the bit inner product of
/// `r` with `word_column(e)` is even, else `−1`.
pub fn model_matrix(assignment: &FactorAssignment, effects: &[Word]) -> Result<SignMatrix> {
    let rows = assignment.runs();
    let mut data = Vec::with_capacity(rows * effects.len());
    for e in effects {
        let c = word_column(assignment, e)?.bits();
        data.extend((0..rows as u32).map(|r| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 }));
    }
    Ok(SignMatrix {
        rows,
        cols: effects.len(),
        data,
    })
}

/// Rank over GF(2).
pub fn gf2_rank(columns: &[Column]) -> usize {
    kernel::rank(columns.iter().map(|c| c.bits()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_fraction() -> FactorAssignment {
        FactorAssignment::treatments(2, &[1, 2, 3]).unwrap()
    }

    #[test]
    fn saturated_column_counts() {
        let enc: Vec<u32> = saturated_columns(2)
            .unwrap()
            .iter()
            .map(|c| c.bits())
            .collect();
        assert_eq!(enc, vec![1, 2, 3]);
        assert_eq!(saturated_columns(3).unwrap().len(), 7);
        assert_eq!(saturated_columns(4).unwrap().len(), 15);
        assert!(matches!(
            saturated_columns(0),
            Err(DesignError::Capacity(_))
        ));
        assert!(matches!(
            saturated_columns(17),
            Err(DesignError::Capacity(_))
        ));
    }

    #[test]
    fn column_validation() {
        assert!(Column::new(0, 3).is_err());
        assert!(Column::new(8, 3).is_err());
        assert_eq!(Column::new(5, 3).unwrap().to_string(), "a1a3");
    }

    #[test]
    fn word_column_of_half_fraction() {
        let d = half_fraction();
        assert!(word_column(&d, &Word::treatments(&[1, 2, 3]))
            .unwrap()
            .is_identity());
        assert!(word_column(&d, &Word::empty()).unwrap().is_identity());
        assert_eq!(
            word_column(&d, &Word::treatments(&[4])),
            Err(DesignError::UnknownLetter(Letter::treatment(4)))
        );
    }

    #[test]
    fn assignment_rejects_shared_columns() {
        let err = FactorAssignment::treatments(2, &[1, 2, 1]).unwrap_err();
        assert!(matches!(err, DesignError::DuplicateColumn { bits: 1, .. }));
        let err = FactorAssignment::new(
            2,
            [
                (Letter::treatment(1), Column::basis(1)),
                (Letter::treatment(1), Column::basis(2)),
            ],
        )
        .unwrap_err();
        assert_eq!(err, DesignError::DuplicateLetter(Letter::treatment(1)));
    }

    #[test]
    fn expand_two_generators() {
        // 5 = 123, 6 = 124 in 16 runs.
        let d = FactorAssignment::treatments(4, &[1, 2, 4, 8, 7, 11]).unwrap();
        let gens = [
            Word::treatments(&[1, 2, 3, 5]),
            Word::treatments(&[1, 2, 4, 6]),
        ];
        let sub = expand_defining_subgroup(&gens, &d).unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(sub.p(), 2);
        for w in [
            Word::empty(),
            Word::treatments(&[1, 2, 3, 5]),
            Word::treatments(&[1, 2, 4, 6]),
            Word::treatments(&[3, 4, 5, 6]),
        ] {
            assert!(sub.contains(&w), "missing {w}");
        }
        assert_eq!(defining_subgroup(&d).unwrap(), sub);
    }

    #[test]
    fn expand_rejects_bad_generators() {
        let d = FactorAssignment::treatments(4, &[1, 2, 4, 8, 7, 11]).unwrap();
        let g = Word::treatments(&[1, 2, 3, 5]);
        assert_eq!(
            expand_defining_subgroup(&[g.clone(), g.clone()], &d),
            Err(DesignError::DependentGenerators)
        );
        let bad = Word::treatments(&[1, 2]);
        assert_eq!(
            expand_defining_subgroup(std::slice::from_ref(&bad), &d),
            Err(DesignError::InconsistentGenerator(bad))
        );
        assert_eq!(
            expand_defining_subgroup(&[], &d).unwrap().words(),
            &[Word::empty()]
        );
    }

    #[test]
    fn aliasing_in_half_fraction() {
        let d = half_fraction();
        let one = Word::treatments(&[1]);
        assert!(is_aliased(&d, &one, &Word::treatments(&[2, 3])).unwrap());
        assert!(!is_aliased(&d, &one, &Word::treatments(&[2])).unwrap());
    }

    #[test]
    fn model_matrix_conventions() {
        let d = FactorAssignment::treatments(1, &[1]).unwrap();
        let m = model_matrix(&d, &[Word::treatments(&[1]), Word::empty()]).unwrap();
        assert_eq!(m.column(0), &[1, -1]);
        assert_eq!(m.column(1), &[1, 1]);

        let d = half_fraction();
        let effects = [Word::treatments(&[1]), Word::treatments(&[2])];
        let m = model_matrix(&d, &effects).unwrap();
        assert_eq!(m.transpose_mul(&m), vec![vec![4, 0], vec![0, 4]]);
    }

    #[test]
    fn rank_examples() {
        let cols = |v: &[u32]| {
            v.iter()
                .map(|&b| Column::new(b, 4).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(gf2_rank(&cols(&[1, 2, 3])), 2);
        assert_eq!(gf2_rank(&[]), 0);
        assert_eq!(gf2_rank(&saturated_columns(4).unwrap()), 4);
    }

    #[test]
    fn word_display() {
        assert_eq!(Word::treatments(&[3, 1, 2]).to_string(), "123");
        assert_eq!(Word::empty().to_string(), "I");
        let w = Word::new([Letter::treatment(1), Letter::blocking(1)]);
        assert_eq!(w.to_string(), "1.b1");
    }
}
