//! Minimum aberration theory for regular two-level fractional factorial
//! designs.
//!
//! Designs are sets of columns of the saturated design `H_k` with `2^k`
//! runs. The crate computes defining subgroups, word length patterns and
//! the general aberration pattern `(N_2, …, N_J)` for a grouping of effects
//! into a fitted model `γ_1` and nuisance groups `γ_2, γ_3, …`. Closed forms
//! cover main-effect models, models with all interactions up to a given
//! order, blocked designs, designs with specified important two-factor
//! interactions, and the general major/minor factor framework. The
//! [`complementary`] module evaluates the same patterns from the complement
//! of a design in `H_k`, and [`search`] ranks candidate designs.

pub mod complementary;
pub mod criteria;
pub mod error;
pub mod gf2;
mod kernel;
pub mod search;
pub mod wlp;

pub use complementary::{
    complement_coefficient, complement_wlp, construct_weak, e_profile, e_profile_partitioned,
    g_bounds, g_parts, g_value, generalized_binomial, krawtchouk, split_n, split_wlp,
    ComplementEvaluator, EProfile, GBounds, KrawtchoukQuery, SplitTriple, WeakConstruction,
    WeakRequirement,
};
pub use criteria::{
    augmented_counts, augmented_grouping, blocked_counts, blocked_grouping, blocked_n_main,
    blocked_n_twofi, estimability_check, general_n, general_wlp, rival_vectors, twofi_grouping,
    twofi_n_augmented, twofi_n_direct, twofi_profile, AugmentedCounts, AugmentedDesign,
    BlockedCounts, BlockedDesign, RivalVectors, TwoFiProfile, TwoFiRequirement,
};
pub use error::{DesignError, Result};
pub use gf2::{
    defining_generators, defining_subgroup, expand_defining_subgroup, gf2_rank, is_aliased,
    model_matrix, saturated_columns, word_column, Column, DefiningSubgroup, FactorAssignment,
    Letter, LetterKind, Product, SignMatrix, Word, MAX_K,
};
pub use search::{
    complement_search, direct_search, enumerate_design_representatives, enumerate_designs,
    minimize_sequential, weak_search, Candidate, Criterion, Limits, SearchResult, SearchSpec,
    Variant,
};
pub use wlp::{
    assignment_wlp, bias_norm_oracle, bias_norm_wlp, general_wlp_oracle, hierarchical_grouping,
    lex_compare, n_from_wlp_main, n_from_wlp_q, resolution, word_length_pattern, EffectGrouping,
    GeneralWlp, Resolution, Wlp,
};
