//! Line-oriented design description files.
//!
//! ```text
//! runs: 16
//! factors: 1 2 3 4 5 6 7 8 9
//! generators:
//!   5 = 123
//!   6 = 124
//! blocks:
//!   b = 13
//! interactions: (1,2) (1,3)
//! ```
//!
//! Factors that never appear on the left of a generator are basic and take
//! the basis columns `a1, a2, …` in order of appearance; generated factors
//! take the product of their right-hand side. A right-hand side is a list of
//! letters joined by `*`, or, when every letter is a single character,
//! simply concatenated as in `123`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use aberrant_core::{Column, DesignError, FactorAssignment, Letter, TwoFiRequirement};
use clap::ValueEnum;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Named effect groupings selectable from the command line or a spec file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionName {
    /// Main effects against interactions of increasing order.
    Main,
    /// Main effects and 2fi's against higher interactions.
    Q2,
    /// Treatment mains plus block effects.
    BlockedMain,
    /// Treatment mains, 2fi's and block effects.
    #[value(name = "blocked-2fi")]
    #[serde(rename = "blocked-2fi")]
    BlockedTwoFi,
    /// Main effects plus the listed interactions.
    Twofi,
    /// Main effects plus the `extra:` columns.
    General,
}

impl CriterionName {
    pub fn name(self) -> &'static str {
        match self {
            Self::Main => "main",
            Self::Q2 => "q2",
            Self::BlockedMain => "blocked-main",
            Self::BlockedTwoFi => "blocked-2fi",
            Self::Twofi => "twofi",
            Self::General => "general",
        }
    }
}

impl fmt::Display for CriterionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

/// `name = rhs` with `rhs` a list of letter names. An empty `rhs` marks a
/// basic blocking factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub rhs: Vec<String>,
}

/// Columns resolved from the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// Treatments `1..=m` then blocking letters `b1, b2, …`.
    pub assignment: FactorAssignment,
    pub extra: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSpecFile {
    pub runs: usize,
    pub k: u32,
    pub factors: Vec<String>,
    pub generators: Vec<Definition>,
    pub blocks: Vec<Definition>,
    pub extra: Vec<Definition>,
    pub interactions: Vec<(String, String)>,
    pub grouping: Option<CriterionName>,
    /// `None` when the file only lists factors without placing them, which
    /// is enough for construction and search.
    pub layout: Option<Layout>,
}

impl DesignSpecFile {
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn layout(&self) -> Result<&Layout, DesignError> {
        self.layout.as_ref().ok_or_else(|| {
            DesignError::Precondition(
                "the spec lists more basic factors than runs allow and no generators".into(),
            )
        })
    }

    /// Display name of a core letter.
    pub fn letter_name(&self, letter: Letter) -> String {
        use aberrant_core::LetterKind;
        let i = letter.index as usize - 1;
        let name = match letter.kind {
            LetterKind::Treatment => self.factors.get(i),
            LetterKind::Blocking => self.blocks.get(i).map(|d| &d.name),
            LetterKind::Auxiliary => self.extra.get(i).map(|d| &d.name),
        };
        name.cloned().unwrap_or_else(|| letter.to_string())
    }

    pub fn requirement(&self) -> Result<Option<TwoFiRequirement>, DesignError> {
        if self.interactions.is_empty() {
            return Ok(None);
        }
        let index = |n: &str| self.factors.iter().position(|f| f == n).unwrap() as u32 + 1;
        let pairs: Vec<(u32, u32)> = self
            .interactions
            .iter()
            .map(|(a, b)| (index(a), index(b)))
            .collect();
        TwoFiRequirement::treatments(&pairs).map(Some)
    }

    /// Product of letters in the file's own notation, e.g. `13` or `A*C`.
    pub fn word_name(&self, letters: &[Letter]) -> String {
        let names: Vec<String> = letters.iter().map(|&l| self.letter_name(l)).collect();
        names.join(if self.compact() { "" } else { "*" })
    }

    fn compact(&self) -> bool {
        self.factors
            .iter()
            .chain(self.blocks.iter().map(|d| &d.name))
            .all(|n| n.chars().count() == 1)
    }

    fn write_rhs(&self, f: &mut fmt::Formatter<'_>, rhs: &[String]) -> fmt::Result {
        let sep = if self.compact() { "" } else { "*" };
        f.write_str(&rhs.join(sep))
    }

    fn write_block(
        &self,
        f: &mut fmt::Formatter<'_>,
        key: &str,
        defs: &[Definition],
    ) -> fmt::Result {
        if defs.is_empty() {
            return Ok(());
        }
        writeln!(f, "{key}:")?;
        for d in defs {
            write!(f, "  {}", d.name)?;
            if !d.rhs.is_empty() {
                f.write_str(" = ")?;
                self.write_rhs(f, &d.rhs)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Canonical text form; parsing it gives back an identical structure.
impl fmt::Display for DesignSpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "runs: {}", self.runs)?;
        writeln!(f, "factors: {}", self.factors.join(" "))?;
        self.write_block(f, "generators", &self.generators)?;
        self.write_block(f, "blocks", &self.blocks)?;
        self.write_block(f, "extra", &self.extra)?;
        if !self.interactions.is_empty() {
            let pairs: Vec<String> = self
                .interactions
                .iter()
                .map(|(a, b)| format!("({a},{b})"))
                .collect();
            writeln!(f, "interactions: {}", pairs.join(" "))?;
        }
        if let Some(g) = self.grouping {
            writeln!(f, "grouping: {g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Generators,
    Blocks,
    Extra,
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    line: usize,
    column: usize,
}

/// Splits on whitespace and commas, keeping `=` as its own token.
fn tokens(text: &str, line: usize, offset: usize) -> Vec<Token> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let flush = |current: &mut String, start: usize, out: &mut Vec<Token>| {
        if !current.is_empty() {
            out.push(Token {
                text: std::mem::take(current),
                line,
                column: offset + start + 1,
            });
        }
    };
    for (i, ch) in text.chars().enumerate() {
        match ch {
            c if c.is_whitespace() || c == ',' => flush(&mut current, start, &mut out),
            '=' => {
                flush(&mut current, start, &mut out);
                out.push(Token {
                    text: "=".into(),
                    line,
                    column: offset + i + 1,
                });
            }
            c => {
                if current.is_empty() {
                    start = i;
                }
                current.push(c);
            }
        }
    }
    flush(&mut current, start, &mut out);
    out
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone)]
struct RawDefinition {
    name: Token,
    rhs: Option<Token>,
}

fn definitions(toks: Vec<Token>, section: Section) -> Result<Vec<RawDefinition>, ParseError> {
    let mut out = Vec::new();
    let mut it = toks.into_iter().peekable();
    while let Some(name) = it.next() {
        if name.text == "=" || !valid_name(&name.text) {
            return Err(ParseError::new(
                name.line,
                name.column,
                format!("expected a letter, found `{}`", name.text),
            ));
        }
        if it.peek().is_some_and(|t| t.text == "=") {
            let eq = it.next().unwrap();
            match it.next() {
                Some(rhs) if rhs.text != "=" => out.push(RawDefinition {
                    name,
                    rhs: Some(rhs),
                }),
                _ => {
                    return Err(ParseError::new(
                        eq.line,
                        eq.column + 1,
                        "missing right-hand side",
                    ))
                }
            }
        } else if section == Section::Blocks {
            out.push(RawDefinition { name, rhs: None });
        } else {
            return Err(ParseError::new(
                name.line,
                name.column,
                format!("expected `{} = …`", name.text),
            ));
        }
    }
    Ok(out)
}

fn split_rhs(tok: &Token, known: &HashMap<String, usize>) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    let mut column = tok.column;
    for piece in tok.text.split(['*', '.']) {
        if piece.is_empty() {
            return Err(ParseError::new(tok.line, column, "empty letter in product"));
        }
        if known.contains_key(piece) {
            out.push(piece.to_string());
        } else {
            for (i, ch) in piece.chars().enumerate() {
                let s = ch.to_string();
                if !known.contains_key(&s) {
                    let msg = if piece.chars().count() == 1 {
                        format!("unknown letter `{piece}`")
                    } else {
                        format!("unknown letter `{ch}` in `{piece}`")
                    };
                    return Err(ParseError::new(tok.line, column + i, msg));
                }
                out.push(s);
            }
        }
        column += piece.chars().count() + 1;
    }
    Ok(out)
}

fn pairs(
    line: usize,
    text: &str,
    offset: usize,
) -> Result<Vec<(String, String, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut rest = text;
    let mut base = offset;
    loop {
        let trimmed = rest.trim_start();
        base += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return Ok(out);
        }
        if !trimmed.starts_with('(') {
            return Err(ParseError::new(line, base + 1, "expected `(a,b)`"));
        }
        let close = trimmed
            .find(')')
            .ok_or_else(|| ParseError::new(line, base + 1, "unclosed `(`"))?;
        let inner = &trimmed[1..close];
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 2 || !parts.iter().all(|p| valid_name(p)) {
            return Err(ParseError::new(
                line,
                base + 1,
                format!("expected two letters in `({inner})`"),
            ));
        }
        out.push((parts[0].to_string(), parts[1].to_string(), base + 1));
        rest = &trimmed[close + 1..];
        base += close + 1;
    }
}

const KEYS: [&str; 7] = [
    "runs",
    "factors",
    "generators",
    "blocks",
    "extra",
    "interactions",
    "grouping",
];

struct Raw {
    runs: Option<(usize, Token)>,
    factors: Vec<Token>,
    factors_line: usize,
    generators: Vec<RawDefinition>,
    blocks: Vec<RawDefinition>,
    extra: Vec<RawDefinition>,
    interactions: Vec<(String, String, usize, usize)>,
    grouping: Option<CriterionName>,
}

fn read_raw(text: &str) -> Result<Raw, ParseError> {
    let mut raw = Raw {
        runs: None,
        factors: Vec::new(),
        factors_line: 0,
        generators: Vec::new(),
        blocks: Vec::new(),
        extra: Vec::new(),
        interactions: Vec::new(),
        grouping: None,
    };
    let mut section: Option<Section> = None;
    let mut seen: Vec<&str> = Vec::new();
    for (n, full) in text.lines().enumerate() {
        let line = n + 1;
        let content = full.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let key = content.split_once(':').and_then(|(k, _)| {
            let k = k.trim();
            KEYS.contains(&k).then_some(k)
        });
        let (body, offset) = match key {
            Some(k) => {
                if seen.contains(&k) {
                    return Err(ParseError::new(line, 1, format!("`{k}:` appears twice")));
                }
                seen.push(k);
                let colon = content.find(':').unwrap();
                (&content[colon + 1..], content[..colon + 1].chars().count())
            }
            None => (content, 0),
        };
        let toks = tokens(body, line, offset);
        match key {
            Some("runs") => {
                section = None;
                let [tok] = toks.as_slice() else {
                    return Err(ParseError::new(
                        line,
                        offset + 1,
                        "expected a single run count",
                    ));
                };
                let runs: usize = tok.text.parse().map_err(|_| {
                    ParseError::new(
                        line,
                        tok.column,
                        format!("`{}` is not a run count", tok.text),
                    )
                })?;
                if runs < 2 || !runs.is_power_of_two() {
                    return Err(ParseError::new(
                        line,
                        tok.column,
                        format!("{runs} runs is not a power of two"),
                    ));
                }
                raw.runs = Some((runs, tok.clone()));
            }
            Some("factors") => {
                section = None;
                raw.factors_line = line;
                raw.factors = toks;
            }
            Some("interactions") => {
                section = None;
                for (a, b, column) in pairs(line, body, offset)? {
                    raw.interactions.push((a, b, line, column));
                }
            }
            Some("grouping") => {
                section = None;
                let [tok] = toks.as_slice() else {
                    return Err(ParseError::new(
                        line,
                        offset + 1,
                        "expected a single grouping name",
                    ));
                };
                raw.grouping = Some(tok.text.parse().map_err(|_| {
                    ParseError::new(line, tok.column, format!("unknown grouping `{}`", tok.text))
                })?);
            }
            Some(k) => {
                let s = match k {
                    "generators" => Section::Generators,
                    "blocks" => Section::Blocks,
                    _ => Section::Extra,
                };
                section = Some(s);
                push_defs(&mut raw, s, definitions(toks, s)?);
            }
            None => match section {
                Some(s) => push_defs(&mut raw, s, definitions(toks, s)?),
                None => {
                    let first = &toks[0];
                    return Err(ParseError::new(
                        line,
                        first.column,
                        format!("unexpected `{}`", first.text),
                    ));
                }
            },
        }
    }
    Ok(raw)
}

fn push_defs(raw: &mut Raw, section: Section, defs: Vec<RawDefinition>) {
    match section {
        Section::Generators => raw.generators.extend(defs),
        Section::Blocks => raw.blocks.extend(defs),
        Section::Extra => raw.extra.extend(defs),
    }
}

fn layout_error(tok: &Token, e: DesignError) -> ParseError {
    ParseError::new(tok.line, tok.column, e.to_string())
}

/// Parses a spec file and resolves its letters to columns.
pub fn parse_spec(text: &str) -> Result<DesignSpecFile, ParseError> {
    let raw = read_raw(text)?;
    let (runs, runs_tok) = raw
        .runs
        .clone()
        .ok_or_else(|| ParseError::new(1, 1, "missing `runs:`"))?;
    let k = runs.trailing_zeros();
    if raw.factors.is_empty() {
        return Err(ParseError::new(
            raw.factors_line.max(1),
            1,
            "missing `factors:`",
        ));
    }

    // Every name, with a tag for its role: 0 treatment, 1 block, 2 extra.
    let mut role: HashMap<String, usize> = HashMap::new();
    let mut claim = |tok: &Token, r: usize| {
        if !valid_name(&tok.text) || tok.text == "=" {
            return Err(ParseError::new(
                tok.line,
                tok.column,
                format!("`{}` is not a valid letter", tok.text),
            ));
        }
        if role.insert(tok.text.clone(), r).is_some() {
            return Err(ParseError::new(
                tok.line,
                tok.column,
                format!("duplicate factor `{}`", tok.text),
            ));
        }
        Ok(())
    };
    for t in &raw.factors {
        claim(t, 0)?;
    }
    for d in &raw.blocks {
        claim(&d.name, 1)?;
    }
    for d in &raw.extra {
        claim(&d.name, 2)?;
    }
    let mut generated: HashMap<&str, usize> = HashMap::new();
    for (i, d) in raw.generators.iter().enumerate() {
        match role.get(&d.name.text) {
            Some(0) => {}
            Some(_) => {
                return Err(ParseError::new(
                    d.name.line,
                    d.name.column,
                    format!("`{}` is not a treatment factor", d.name.text),
                ))
            }
            None => {
                return Err(ParseError::new(
                    d.name.line,
                    d.name.column,
                    format!("unknown letter `{}`", d.name.text),
                ))
            }
        }
        if generated.insert(&d.name.text, i).is_some() {
            return Err(ParseError::new(
                d.name.line,
                d.name.column,
                format!("`{}` is generated twice", d.name.text),
            ));
        }
    }
    for (a, b, line, column) in &raw.interactions {
        for n in [a, b] {
            if role.get(n) != Some(&0) {
                return Err(ParseError::new(
                    *line,
                    *column,
                    format!("`{n}` is not a treatment factor"),
                ));
            }
        }
        if a == b {
            return Err(ParseError::new(
                *line,
                *column,
                format!("`({a},{b})` is not an interaction"),
            ));
        }
    }

    let mut spec = DesignSpecFile {
        runs,
        k,
        factors: raw.factors.iter().map(|t| t.text.clone()).collect(),
        generators: Vec::new(),
        blocks: Vec::new(),
        extra: Vec::new(),
        interactions: raw
            .interactions
            .iter()
            .map(|(a, b, ..)| (a.clone(), b.clone()))
            .collect(),
        grouping: raw.grouping,
        layout: None,
    };
    let known: HashMap<String, usize> = role.clone();
    let resolve_defs = |defs: &[RawDefinition]| -> Result<Vec<(Token, Vec<String>)>, ParseError> {
        defs.iter()
            .map(|d| {
                let rhs = match &d.rhs {
                    Some(t) => split_rhs(t, &known)?,
                    None => Vec::new(),
                };
                Ok((d.rhs.clone().unwrap_or_else(|| d.name.clone()), rhs))
            })
            .collect()
    };
    let generators = resolve_defs(&raw.generators)?;
    let blocks = resolve_defs(&raw.blocks)?;
    let extra = resolve_defs(&raw.extra)?;
    let to_defs = |raw: &[RawDefinition], res: &[(Token, Vec<String>)]| {
        raw.iter()
            .zip(res)
            .map(|(d, (_, rhs))| Definition {
                name: d.name.text.clone(),
                rhs: rhs.clone(),
            })
            .collect::<Vec<_>>()
    };
    spec.generators = to_defs(&raw.generators, &generators);
    spec.blocks = to_defs(&raw.blocks, &blocks);
    spec.extra = to_defs(&raw.extra, &extra);

    let basic_treatments: Vec<&Token> = raw
        .factors
        .iter()
        .filter(|t| !generated.contains_key(t.text.as_str()))
        .collect();
    let basic_blocks = raw.blocks.iter().filter(|d| d.rhs.is_none()).count();
    let basic = basic_treatments.len() + basic_blocks;
    let placed = !raw.generators.is_empty()
        || raw.blocks.iter().any(|d| d.rhs.is_some())
        || !raw.extra.is_empty();
    if basic > k as usize {
        if placed {
            return Err(ParseError::new(
                raw.factors_line,
                1,
                format!("{basic} basic factors do not fit in {runs} runs (rank {k})"),
            ));
        }
        return Ok(spec);
    }
    if basic < k as usize {
        return Err(ParseError::new(
            runs_tok.line,
            runs_tok.column,
            format!("{runs} runs need {k} basic factors, found {basic}"),
        ));
    }

    // Columns by name, filled in as letters are introduced.
    let mut columns: HashMap<String, u32> = HashMap::new();
    let mut next_basis = 0u32;
    for t in &basic_treatments {
        columns.insert(t.text.clone(), 1 << next_basis);
        next_basis += 1;
    }
    let product =
        |tok: &Token, rhs: &[String], columns: &HashMap<String, u32>| -> Result<u32, ParseError> {
            let mut bits = 0;
            for n in rhs {
                let c = columns.get(n).ok_or_else(|| {
                    ParseError::new(
                        tok.line,
                        tok.column,
                        format!("`{n}` is used before it is introduced"),
                    )
                })?;
                bits ^= c;
            }
            if bits == 0 {
                return Err(ParseError::new(
                    tok.line,
                    tok.column,
                    "product is the identity column",
                ));
            }
            Ok(bits)
        };
    for (d, (tok, rhs)) in raw.generators.iter().zip(&generators) {
        let bits = product(tok, rhs, &columns)?;
        columns.insert(d.name.text.clone(), bits);
    }
    let mut assignment = FactorAssignment::new(k, []).map_err(|e| layout_error(&runs_tok, e))?;
    for (i, t) in raw.factors.iter().enumerate() {
        let c = Column::new(columns[&t.text], k).map_err(|e| layout_error(t, e))?;
        let pos = generated
            .get(t.text.as_str())
            .map_or(t, |&g| &raw.generators[g].name);
        assignment
            .push(Letter::treatment(i as u32 + 1), c)
            .map_err(|e| layout_error(pos, e))?;
    }
    for (i, (d, (tok, rhs))) in raw.blocks.iter().zip(&blocks).enumerate() {
        let bits = if d.rhs.is_none() {
            next_basis += 1;
            1 << (next_basis - 1)
        } else {
            product(tok, rhs, &columns)?
        };
        columns.insert(d.name.text.clone(), bits);
        let c = Column::new(bits, k).map_err(|e| layout_error(&d.name, e))?;
        assignment
            .push(Letter::blocking(i as u32 + 1), c)
            .map_err(|e| layout_error(&d.name, e))?;
    }
    let mut extra_cols = Vec::new();
    for (d, (tok, rhs)) in raw.extra.iter().zip(&extra) {
        let bits = product(tok, rhs, &columns)?;
        if let Some(clash) = assignment.iter().find(|(_, c)| c.bits() == bits) {
            return Err(ParseError::new(
                d.name.line,
                d.name.column,
                format!(
                    "`{}` shares its column with `{}`",
                    d.name.text,
                    spec.letter_name(clash.0)
                ),
            ));
        }
        if extra_cols.iter().any(|c: &Column| c.bits() == bits) {
            return Err(ParseError::new(
                d.name.line,
                d.name.column,
                format!("`{}` repeats a column", d.name.text),
            ));
        }
        extra_cols.push(Column::new(bits, k).map_err(|e| layout_error(&d.name, e))?);
    }
    spec.layout = Some(Layout {
        assignment,
        extra: extra_cols,
    });
    Ok(spec)
}
