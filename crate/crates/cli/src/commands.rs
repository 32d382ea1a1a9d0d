use std::collections::BTreeMap;
use std::time::Duration;

use aberrant_core::{
    assignment_wlp, augmented_counts, augmented_grouping, bias_norm_wlp, blocked_counts,
    blocked_grouping, blocked_n_main, blocked_n_twofi, complement_search, complement_wlp,
    construct_weak, direct_search, g_bounds, g_parts, g_value, general_wlp, general_wlp_oracle,
    hierarchical_grouping, n_from_wlp_main, n_from_wlp_q, resolution, rival_vectors,
    saturated_columns, split_wlp, twofi_grouping, twofi_n_augmented, twofi_n_direct, twofi_profile,
    weak_search, word_column, AugmentedDesign, BlockedDesign, Candidate, Column, Criterion,
    DesignError, EffectGrouping, FactorAssignment, GeneralWlp, Letter, LetterKind, Limits,
    SearchSpec, SplitTriple, Variant, WeakRequirement, Wlp, Word,
};
use clap::ValueEnum;
use thiserror::Error;

use crate::report::{Assigned, ColumnSet, Found, Report, SearchMeta, Status};
use crate::spec_file::{CriterionName, DesignSpecFile, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Word length pattern, resolution and aliasing of main effects and 2fi's.
    Wlp,
    /// Counts of aliased effects for a chosen effect grouping.
    GeneralWlp,
    /// Treatment and blocked word counts with the blocked patterns.
    BlockedWlp,
    /// Pattern for designs that must estimate the listed 2fi's.
    TwofiWlp,
    /// Patterns computed from the complementary columns.
    Complement,
    /// Build a design optimal for the weak criterion.
    ConstructWeak,
    /// Find the best designs for a criterion.
    Search,
    /// Check every closed form against the definition.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wlp => "wlp",
            Self::GeneralWlp => "general-wlp",
            Self::BlockedWlp => "blocked-wlp",
            Self::TwofiWlp => "twofi-wlp",
            Self::Complement => "complement",
            Self::ConstructWeak => "construct-weak",
            Self::Search => "search",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Enumerate the design columns directly.
    #[default]
    Direct,
    /// Enumerate the complementary columns.
    Complement,
    /// Maximize the complementary pair count for the weak criterion.
    Weak,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub criterion: Option<CriterionName>,
    pub budget_nodes: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub r: Option<u32>,
    pub method: Method,
    pub extra: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Design {
        context: String,
        source: DesignError,
    },
}

impl CliError {
    /// 2 for invalid input, 3 when nothing feasible exists, 4 when an
    /// identity between two computations fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Design { source, .. } => match source {
                DesignError::Infeasible(_) | DesignError::NoCandidate => 3,
                DesignError::IdentityViolation(_) => 4,
                _ => 2,
            },
            _ => 2,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

trait Context<T> {
    fn ctx(self, context: &str) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, DesignError> {
    fn ctx(self, context: &str) -> Result<T> {
        self.map_err(|source| CliError::Design {
            context: context.into(),
            source,
        })
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run_command(command: Command, spec: &DesignSpecFile, opts: &Options) -> Result<Report> {
    let mut report = Report::new(command.name(), spec.to_string());
    match command {
        Command::Wlp => wlp(spec, opts, &mut report)?,
        Command::GeneralWlp => general(spec, opts, &mut report)?,
        Command::BlockedWlp => blocked(spec, opts, &mut report)?,
        Command::TwofiWlp => twofi(spec, &mut report)?,
        Command::Complement => complement(spec, &mut report)?,
        Command::ConstructWeak => weak(spec, opts, &mut report)?,
        Command::Search => search(spec, opts, &mut report)?,
        Command::Verify => verify(spec, &mut report)?,
    }
    Ok(report)
}

fn layout(spec: &DesignSpecFile) -> Result<&crate::spec_file::Layout> {
    spec.layout().ctx("design layout")
}

fn treatments(spec: &DesignSpecFile) -> Result<FactorAssignment> {
    Ok(layout(spec)?.assignment.restrict(LetterKind::Treatment))
}

fn column_names(columns: &[Column]) -> Vec<String> {
    columns.iter().map(Column::to_string).collect()
}

fn design_rows(spec: &DesignSpecFile, assignment: &FactorAssignment) -> Vec<Assigned> {
    assignment
        .iter()
        .map(|(l, c)| Assigned {
            letter: spec.letter_name(l),
            column: c.to_string(),
        })
        .collect()
}

fn default_criterion(spec: &DesignSpecFile, opts: &Options) -> CriterionName {
    opts.criterion
        .or(spec.grouping)
        .unwrap_or(if !spec.blocks.is_empty() {
            CriterionName::BlockedMain
        } else if !spec.interactions.is_empty() {
            CriterionName::Twofi
        } else if !spec.extra.is_empty() || opts.extra.is_some() {
            CriterionName::General
        } else {
            CriterionName::Main
        })
}

/// Classes of two or more aliased effects among main effects and 2fi's.
fn alias_classes(spec: &DesignSpecFile, t: &FactorAssignment) -> Result<Vec<Vec<String>>> {
    let letters = t.letters().to_vec();
    let mut effects: Vec<Word> = letters.iter().map(|&l| Word::new([l])).collect();
    for (i, &a) in letters.iter().enumerate() {
        for &b in &letters[i + 1..] {
            effects.push(Word::new([a, b]));
        }
    }
    let mut classes: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for e in &effects {
        let c = word_column(t, e).ctx("alias classes")?;
        classes
            .entry(c.bits())
            .or_default()
            .push(spec.word_name(e.letters()));
    }
    Ok(classes.into_values().filter(|c| c.len() > 1).collect())
}

fn wlp(spec: &DesignSpecFile, opts: &Options, r: &mut Report) -> Result<()> {
    let t = treatments(spec)?;
    let m = spec.m();
    let pattern = assignment_wlp(&t).ctx("word length pattern")?;
    r.design = design_rows(spec, &layout(spec)?.assignment);
    r.vector("A", 0, pattern.counts().to_vec());
    r.fact("resolution", resolution(&pattern));
    r.fact("defining words", pattern.total() - 1);
    match opts.criterion {
        None => {
            if let Ok(n) = n_from_wlp_main(&pattern, m) {
                r.vector("N main", 2, n.into_counts());
            }
        }
        Some(CriterionName::Main) => {
            let n = n_from_wlp_main(&pattern, m).ctx("main-effect pattern")?;
            r.vector("N main", 2, n.into_counts());
        }
        Some(CriterionName::Q2) => {
            let n = n_from_wlp_q(&pattern, m, 2).ctx("order-2 pattern")?;
            r.vector("N q2", 2, n.into_counts());
        }
        Some(other) => {
            return Err(usage(format!(
                "wlp supports main and q2; use general-wlp for {other}"
            )))
        }
    }
    r.aliases = alias_classes(spec, &t)?;
    Ok(())
}

fn grouping_for(
    spec: &DesignSpecFile,
    c: CriterionName,
) -> Result<(FactorAssignment, EffectGrouping)> {
    let lay = layout(spec)?;
    let t = lay.assignment.restrict(LetterKind::Treatment);
    Ok(match c {
        CriterionName::Main | CriterionName::Q2 => {
            let q = if c == CriterionName::Main { 1 } else { 2 };
            let g = hierarchical_grouping(t.letters(), q).ctx("grouping")?;
            (t, g)
        }
        CriterionName::BlockedMain | CriterionName::BlockedTwoFi => {
            if spec.blocks.is_empty() {
                return Err(usage(format!("criterion {c} needs a blocks: section")));
            }
            let q = if c == CriterionName::BlockedMain {
                1
            } else {
                2
            };
            let g = blocked_grouping(&lay.assignment, q).ctx("grouping")?;
            (lay.assignment.clone(), g)
        }
        CriterionName::Twofi => {
            let req = spec
                .requirement()
                .ctx("interactions")?
                .ok_or_else(|| usage("criterion twofi needs an interactions: line"))?;
            let g = twofi_grouping(&t, &req).ctx("grouping")?;
            (t, g)
        }
        CriterionName::General => {
            if lay.extra.is_empty() {
                return Err(usage("criterion general needs an extra: section"));
            }
            let aug = AugmentedDesign::new(&t, &lay.extra).ctx("augmented design")?;
            let g = augmented_grouping(&aug).ctx("grouping")?;
            (aug.combined().clone(), g)
        }
    })
}

fn general(spec: &DesignSpecFile, opts: &Options, r: &mut Report) -> Result<()> {
    let c = default_criterion(spec, opts);
    let (assignment, grouping) = grouping_for(spec, c)?;
    let n = general_wlp_oracle(&assignment, &grouping).ctx("aliased effect counts")?;
    r.design = design_rows(spec, &assignment);
    r.vector(format!("N {c}"), 2, n.into_counts());
    r.fact("criterion", c);
    r.fact("fitted effects", grouping.fitted().len());
    let sizes: Vec<String> = grouping.groups()[1..]
        .iter()
        .map(|g| g.len().to_string())
        .collect();
    r.fact("group sizes", sizes.join(" "));
    Ok(())
}

fn blocked(spec: &DesignSpecFile, opts: &Options, r: &mut Report) -> Result<()> {
    if spec.blocks.is_empty() {
        return Err(usage("blocked-wlp needs a blocks: section"));
    }
    let m = spec.m();
    let design = BlockedDesign::new(layout(spec)?.assignment.clone()).ctx("blocked design")?;
    let counts = blocked_counts(&design);
    r.design = design_rows(spec, design.assignment());
    r.vector("A", 0, counts.a.clone());
    r.vector("B", 0, counts.b.clone());
    let main = blocked_n_main(&counts, m).ctx("blocked main pattern")?;
    r.vector("N blocked-main", 2, main.into_counts());
    match blocked_n_twofi(&counts, m) {
        Ok(n) => r.vector("N blocked-2fi", 2, n.into_counts()),
        Err(e) if opts.criterion == Some(CriterionName::BlockedTwoFi) => {
            return Err(CliError::Design {
                context: "blocked 2fi pattern".into(),
                source: e,
            })
        }
        Err(e) => r.fact("N blocked-2fi", format!("not available ({e})")),
    }
    let rivals = rival_vectors(&counts);
    r.vector("interleaved A/B", 1, rivals.interleaved);
    r.vector("weighted A/B", 1, rivals.weighted);
    r.set(
        "block effects",
        column_names(&design.block_effect_columns()),
    );
    Ok(())
}

fn twofi(spec: &DesignSpecFile, r: &mut Report) -> Result<()> {
    let req = spec
        .requirement()
        .ctx("interactions")?
        .ok_or_else(|| usage("twofi-wlp needs an interactions: line"))?;
    let t = treatments(spec)?;
    let m = spec.m();
    let pattern = assignment_wlp(&t).ctx("word length pattern")?;
    let profile = twofi_profile(&t, &req).ctx("2fi profile")?;
    r.design = design_rows(spec, &t);
    r.vector("A", 0, pattern.counts().to_vec());
    let row = |f: &dyn Fn(i64) -> i64| (0..=m as i64).map(|j| f(j) as u64).collect::<Vec<_>>();
    r.vector("A both letters", 0, row(&|j| profile.both(j)));
    r.vector("A one letter", 0, row(&|j| profile.one(j)));
    r.vector("A neither letter", 0, row(&|j| profile.neither(j)));
    let direct = twofi_n_direct(&profile, &pattern, m).ctx("2fi pattern from the profile")?;
    let aug = AugmentedDesign::from_twofi(&t, &req).ctx("2fi columns")?;
    let counts = augmented_counts(&aug).ctx("augmented counts")?;
    let via = twofi_n_augmented(&counts.a, &counts.b, m, req.len())
        .ctx("2fi pattern from added columns")?;
    if direct != via {
        return Err(CliError::Design {
            context: "2fi pattern".into(),
            source: DesignError::IdentityViolation(format!(
                "profile form {:?} differs from added-column form {:?}",
                direct.counts(),
                via.counts()
            )),
        });
    }
    r.vector("N twofi", 2, direct.into_counts());
    r.set("2fi columns", column_names(aug.extra_columns()));
    Ok(())
}

fn columns_wlp(k: u32, columns: &[Column]) -> Result<Wlp> {
    if columns.is_empty() {
        return Ok(Wlp::new(vec![1]));
    }
    let a = FactorAssignment::new(
        k,
        columns
            .iter()
            .enumerate()
            .map(|(i, &c)| (Letter::treatment(i as u32 + 1), c)),
    )
    .ctx("column set")?;
    assignment_wlp(&a).ctx("word length pattern")
}

/// Columns playing the role of the additional set for the spec: block
/// effects, requested 2fi columns or the `extra:` columns.
fn additional_columns(spec: &DesignSpecFile) -> Result<Option<(&'static str, Vec<Column>)>> {
    let lay = layout(spec)?;
    if !spec.blocks.is_empty() {
        let d = BlockedDesign::new(lay.assignment.clone()).ctx("blocked design")?;
        return Ok(Some(("block effects", d.block_effect_columns())));
    }
    if let Some(req) = spec.requirement().ctx("interactions")? {
        let t = lay.assignment.restrict(LetterKind::Treatment);
        let aug = AugmentedDesign::from_twofi(&t, &req).ctx("2fi columns")?;
        return Ok(Some(("2fi columns", aug.extra_columns().to_vec())));
    }
    if !lay.extra.is_empty() {
        return Ok(Some(("extra columns", lay.extra.clone())));
    }
    Ok(None)
}

fn split_facts(r: &mut Report, split: &SplitTriple) -> Result<()> {
    let g = g_value(split).ctx("pair count g")?;
    let (d3_part, cross_part) = g_parts(split).ctx("pair count g")?;
    let bounds = g_bounds(split.s(), split.m3());
    r.fact("g", g);
    r.fact("g bound", bounds.total);
    r.fact(
        "g within D3",
        format!("{d3_part} (bound {})", bounds.d3_pairs),
    );
    r.fact(
        "g across D2 and D3",
        format!("{cross_part} (bound {})", bounds.cross),
    );
    Ok(())
}

fn complement(spec: &DesignSpecFile, r: &mut Report) -> Result<()> {
    let t = treatments(spec)?;
    let (k, m) = (spec.k, spec.m());
    let d1 = t.columns().to_vec();
    let rest: Vec<Column> = saturated_columns(k)
        .ctx("columns")?
        .into_iter()
        .filter(|c| !d1.contains(c))
        .collect();
    r.design = design_rows(spec, &t);
    let rest_wlp = columns_wlp(k, &rest)?;
    let via = complement_wlp(&rest_wlp, m, k).ctx("pattern from the complement")?;
    r.vector("A complement", 0, rest_wlp.counts().to_vec());
    r.vector("A from complement", 0, via.counts().to_vec());
    r.set("complement", column_names(&rest));
    if let Some((label, d2)) = additional_columns(spec)? {
        let split = SplitTriple::from_parts(k, d1, d2).ctx("column split")?;
        let n = split_wlp(&split).ctx("general pattern from the complement")?;
        r.vector("N from complement", 2, n.into_counts());
        r.set(label, column_names(split.d2()));
        r.set("remaining", column_names(split.d3()));
        split_facts(r, &split)?;
    }
    Ok(())
}

fn weak(spec: &DesignSpecFile, opts: &Options, r: &mut Report) -> Result<()> {
    let dim = opts.r.ok_or_else(|| usage("construct-weak needs --r"))?;
    let req = match (spec.requirement().ctx("interactions")?, spec.blocks.len()) {
        (Some(_), b) if b > 0 => {
            return Err(usage(
                "construct-weak takes either interactions or blocks, not both",
            ))
        }
        (Some(req), _) => WeakRequirement::TwoFi(req),
        (None, b) if b > 0 => WeakRequirement::Blocks(b),
        (None, _) => {
            return Err(usage(
                "construct-weak needs an interactions: line or a blocks: section",
            ))
        }
    };
    let built = construct_weak(spec.k, dim, spec.m(), &req).ctx("weak construction")?;
    r.design = design_rows(spec, &built.assignment);
    r.set("D1", column_names(built.split.d1()));
    r.set("D2", column_names(built.split.d2()));
    r.set("D3", column_names(built.split.d3()));
    let n = split_wlp(&built.split).ctx("general pattern from the complement")?;
    r.vector("N from complement", 2, n.into_counts());
    split_facts(r, &built.split)
}

fn candidate_rows(spec: &DesignSpecFile, k: u32, c: &Candidate) -> Result<Found> {
    let a = c.assignment(k).ctx("search result")?;
    let sets = if c.extra.is_empty() || !c.blocks.is_empty() {
        Vec::new()
    } else {
        vec![ColumnSet {
            label: "extra".into(),
            columns: column_names(&c.extra),
        }]
    };
    Ok(Found {
        design: design_rows(spec, &a),
        sets,
    })
}

fn search(spec: &DesignSpecFile, opts: &Options, r: &mut Report) -> Result<()> {
    let c = default_criterion(spec, opts);
    let criterion = match c {
        CriterionName::Main => Criterion::Main,
        CriterionName::Q2 => Criterion::Interactions(2),
        CriterionName::BlockedMain => Criterion::BlockedMain,
        CriterionName::BlockedTwoFi => Criterion::BlockedTwoFi,
        CriterionName::Twofi => Criterion::TwoFi,
        CriterionName::General => Criterion::General,
    };
    let extra = opts
        .extra
        .or((!spec.extra.is_empty()).then_some(spec.extra.len()));
    let variant = if !spec.blocks.is_empty() {
        Variant::Blocked {
            blocks: spec.blocks.len(),
        }
    } else if let Some(req) = spec.requirement().ctx("interactions")? {
        Variant::TwoFi(req)
    } else if let Some(extra) = extra {
        Variant::General { extra }
    } else {
        Variant::Plain
    };
    let max_time = match opts.budget_seconds {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(usage("--budget-seconds must be positive"))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let mut s = SearchSpec::new(spec.k, spec.m(), variant, criterion);
    s.limits = Limits {
        max_nodes: opts.budget_nodes,
        max_time,
    };
    s.prune = spec.k <= 6;
    let method = match opts.method {
        Method::Direct => "direct",
        Method::Complement => "complement",
        Method::Weak => "weak",
    };
    let meta = |objective: &GeneralWlp, explored, exhaustive, optima| SearchMeta {
        method: method.into(),
        criterion: c.to_string(),
        objective: objective.counts().to_vec(),
        objective_start: 2,
        explored,
        exhaustive,
        optima,
    };
    match opts.method {
        Method::Direct | Method::Complement => {
            let result = if opts.method == Method::Direct {
                direct_search(&s)
            } else {
                complement_search(&s)
            }
            .ctx("search")?;
            r.search = Some(meta(
                &result.objective,
                result.explored,
                result.exhaustive,
                result.best.len(),
            ));
            r.found = result
                .best
                .iter()
                .map(|cand| candidate_rows(spec, spec.k, cand))
                .collect::<Result<_>>()?;
        }
        Method::Weak => {
            let result = weak_search(&s).ctx("search")?;
            r.search = Some(meta(
                &result.objective,
                result.explored,
                result.exhaustive,
                result.best.len(),
            ));
            r.found = result
                .best
                .iter()
                .map(|split| Found {
                    design: Vec::new(),
                    sets: [("D1", split.d1()), ("D2", split.d2()), ("D3", split.d3())]
                        .into_iter()
                        .map(|(label, cols)| ColumnSet {
                            label: label.into(),
                            columns: column_names(cols),
                        })
                        .collect(),
                })
                .collect();
            if let Some(best) = result.best.first() {
                split_facts(r, best)?;
            }
        }
    }
    Ok(())
}

fn show(n: &GeneralWlp) -> String {
    if n.is_empty() {
        return "(empty)".into();
    }
    n.counts()
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Records whether a closed form matches the definition. Errors that mean
/// the closed form or grouping does not apply are reported as skipped.
fn compare(
    r: &mut Report,
    name: &str,
    closed: std::result::Result<GeneralWlp, DesignError>,
    oracle: std::result::Result<GeneralWlp, DesignError>,
) {
    let not_applicable = |e: &DesignError| {
        matches!(
            e,
            DesignError::Precondition(_)
                | DesignError::NotEstimable(_)
                | DesignError::Capacity(_)
                | DesignError::Domain(_)
        )
    };
    match (closed, oracle) {
        (Ok(a), Ok(b)) if a == b => r.check(name, Status::Pass, show(&a)),
        (Ok(a), Ok(b)) => r.check(
            name,
            Status::Fail,
            format!("{} vs definition {}", show(&a), show(&b)),
        ),
        (Err(e), _) | (_, Err(e)) if not_applicable(&e) => {
            r.check(name, Status::Skipped, e.to_string())
        }
        (Err(e), _) | (_, Err(e)) => r.check(name, Status::Fail, e.to_string()),
    }
}

fn verify(spec: &DesignSpecFile, r: &mut Report) -> Result<()> {
    let lay = layout(spec)?;
    let t = lay.assignment.restrict(LetterKind::Treatment);
    let (k, m) = (spec.k, spec.m());
    let pattern = assignment_wlp(&t).ctx("word length pattern")?;
    r.design = design_rows(spec, &lay.assignment);
    r.vector("A", 0, pattern.counts().to_vec());

    let q1 = hierarchical_grouping(t.letters(), 1).ctx("grouping")?;
    let q2 = hierarchical_grouping(t.letters(), 2).ctx("grouping")?;
    compare(
        r,
        "bias norm",
        bias_norm_wlp(&t, &q1),
        general_wlp_oracle(&t, &q1),
    );
    compare(
        r,
        "main-effect pattern",
        n_from_wlp_main(&pattern, m),
        general_wlp_oracle(&t, &q1),
    );
    compare(
        r,
        "order-2 pattern",
        n_from_wlp_q(&pattern, m, 2),
        general_wlp_oracle(&t, &q2),
    );

    if !spec.blocks.is_empty() {
        match BlockedDesign::new(lay.assignment.clone()) {
            Ok(design) => {
                let counts = blocked_counts(&design);
                let main = blocked_n_main(&counts, m);
                let g1 = blocked_grouping(&lay.assignment, 1).ctx("grouping")?;
                let g2 = blocked_grouping(&lay.assignment, 2).ctx("grouping")?;
                compare(
                    r,
                    "blocked main pattern",
                    main.clone(),
                    general_wlp_oracle(&lay.assignment, &g1),
                );
                compare(
                    r,
                    "blocked 2fi pattern",
                    blocked_n_twofi(&counts, m),
                    general_wlp_oracle(&lay.assignment, &g2),
                );
                let embedded =
                    AugmentedDesign::from_blocked(&design).and_then(|aug| general_wlp(&aug));
                compare(r, "block embedding", embedded, main);
            }
            Err(e) => r.check("blocked patterns", Status::Skipped, e.to_string()),
        }
    }

    if let Some(req) = spec.requirement().ctx("interactions")? {
        let oracle = twofi_grouping(&t, &req).and_then(|g| general_wlp_oracle(&t, &g));
        let direct = twofi_profile(&t, &req).and_then(|p| twofi_n_direct(&p, &pattern, m));
        compare(r, "2fi profile pattern", direct, oracle.clone());
        let via = AugmentedDesign::from_twofi(&t, &req)
            .and_then(|aug| augmented_counts(&aug))
            .and_then(|c| twofi_n_augmented(&c.a, &c.b, m, req.len()));
        compare(r, "2fi added-column pattern", via, oracle);
    }

    if !lay.extra.is_empty() {
        let aug = AugmentedDesign::new(&t, &lay.extra);
        let closed = aug.clone().and_then(|a| general_wlp(&a));
        let oracle = aug.and_then(|a| {
            augmented_grouping(&a).and_then(|g| general_wlp_oracle(a.combined(), &g))
        });
        compare(r, "general pattern", closed, oracle);
    }

    let rest: Vec<Column> = saturated_columns(k)
        .ctx("columns")?
        .into_iter()
        .filter(|c| !t.columns().contains(c))
        .collect();
    let via = columns_wlp(k, &rest)?;
    compare(
        r,
        "complement word counts",
        complement_wlp(&via, m, k).map(|w| GeneralWlp::new(w.counts().to_vec())),
        Ok(GeneralWlp::new(pattern.counts().to_vec())),
    );

    if let Some((_, d2)) = additional_columns(spec)? {
        let split = SplitTriple::from_parts(k, t.columns().to_vec(), d2.clone());
        let aug = AugmentedDesign::new(&t, &d2).and_then(|a| general_wlp(&a));
        compare(
            r,
            "complement general pattern",
            split.and_then(|s| split_wlp(&s)),
            aug,
        );
    }
    r.fact(
        "verdict",
        if r.passed() {
            "all checks passed"
        } else {
            "some checks failed"
        },
    );
    Ok(())
}
