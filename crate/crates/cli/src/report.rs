use std::fmt;

use serde::Serialize;

/// A letter and its column, e.g. `5 → a1a2a3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assigned {
    pub letter: String,
    pub column: String,
}

/// Counts indexed from `start`, e.g. `A_0, A_1, …` or `N_2, N_3, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vector {
    pub label: String,
    pub start: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSet {
    pub label: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchMeta {
    pub method: String,
    pub criterion: String,
    pub objective: Vec<u64>,
    pub objective_start: usize,
    pub explored: u64,
    pub exhaustive: bool,
    pub optima: usize,
}

/// One optimum found by a search: either a labelled design or a split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Found {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub design: Vec<Assigned>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<ColumnSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    /// The input in canonical form.
    pub spec: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub design: Vec<Assigned>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<Vector>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<Fact>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<ColumnSet>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchMeta>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub found: Vec<Found>,
}

impl Report {
    pub fn new(command: &str, spec: String) -> Self {
        Self {
            command: command.into(),
            spec,
            design: Vec::new(),
            vectors: Vec::new(),
            facts: Vec::new(),
            sets: Vec::new(),
            aliases: Vec::new(),
            checks: Vec::new(),
            search: None,
            found: Vec::new(),
        }
    }

    pub fn vector(&mut self, label: impl Into<String>, start: usize, values: Vec<u64>) {
        self.vectors.push(Vector {
            label: label.into(),
            start,
            values,
        });
    }

    pub fn fact(&mut self, label: impl Into<String>, value: impl ToString) {
        self.facts.push(Fact {
            label: label.into(),
            value: value.to_string(),
        });
    }

    pub fn set(&mut self, label: impl Into<String>, columns: Vec<String>) {
        self.sets.push(ColumnSet {
            label: label.into(),
            columns,
        });
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    /// False when any check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

fn range_label(v: &Vector) -> String {
    if v.values.is_empty() {
        return v.label.clone();
    }
    format!(
        "{} [{}..{}]",
        v.label,
        v.start,
        v.start + v.values.len() - 1
    )
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn write_design(f: &mut fmt::Formatter<'_>, rows: &[Assigned], indent: &str) -> fmt::Result {
    let width = rows.iter().map(|r| r.letter.len()).max().unwrap_or(0);
    for r in rows {
        writeln!(f, "{indent}{:<width$}  {}", r.letter, r.column)?;
    }
    Ok(())
}

fn write_sets(f: &mut fmt::Formatter<'_>, sets: &[ColumnSet], indent: &str) -> fmt::Result {
    let width = sets.iter().map(|s| s.label.len()).max().unwrap_or(0);
    for s in sets {
        let body = if s.columns.is_empty() {
            "(none)".to_string()
        } else {
            join(&s.columns)
        };
        writeln!(f, "{indent}{:<width$}  {body}", s.label)?;
    }
    Ok(())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command: {}", self.command)?;
        writeln!(f, "\ninput:")?;
        for line in self.spec.lines() {
            writeln!(f, "  {line}")?;
        }
        if !self.design.is_empty() {
            writeln!(f, "\ndesign:")?;
            write_design(f, &self.design, "  ")?;
        }
        if !self.vectors.is_empty() {
            writeln!(f, "\npatterns:")?;
            let labels: Vec<String> = self.vectors.iter().map(range_label).collect();
            let width = labels.iter().map(String::len).max().unwrap_or(0);
            for (label, v) in labels.iter().zip(&self.vectors) {
                writeln!(f, "  {label:<width$}  {}", join(&v.values))?;
            }
        }
        if !self.facts.is_empty() {
            writeln!(f, "\nsummary:")?;
            let width = self.facts.iter().map(|x| x.label.len()).max().unwrap_or(0);
            for x in &self.facts {
                writeln!(f, "  {:<width$}  {}", x.label, x.value)?;
            }
        }
        if !self.sets.is_empty() {
            writeln!(f, "\ncolumns:")?;
            write_sets(f, &self.sets, "  ")?;
        }
        if !self.aliases.is_empty() {
            writeln!(f, "\naliases:")?;
            for class in &self.aliases {
                writeln!(f, "  {}", class.join(" = "))?;
            }
        }
        if !self.checks.is_empty() {
            writeln!(f, "\nchecks:")?;
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let tag = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                writeln!(f, "  [{tag}] {:<width$}  {}", c.name, c.detail)?;
            }
        }
        if let Some(s) = &self.search {
            writeln!(f, "\nsearch:")?;
            writeln!(f, "  method      {}", s.method)?;
            writeln!(f, "  criterion   {}", s.criterion)?;
            writeln!(
                f,
                "  objective   {} (from index {})",
                join(&s.objective),
                s.objective_start
            )?;
            writeln!(f, "  explored    {}", s.explored)?;
            writeln!(
                f,
                "  exhaustive  {}",
                if s.exhaustive {
                    "yes"
                } else {
                    "no, budget reached"
                }
            )?;
            writeln!(f, "  optima      {}", s.optima)?;
        }
        for (i, found) in self.found.iter().enumerate() {
            writeln!(f, "\noptimum {}:", i + 1)?;
            write_design(f, &found.design, "  ")?;
            write_sets(f, &found.sets, "  ")?;
        }
        Ok(())
    }
}
