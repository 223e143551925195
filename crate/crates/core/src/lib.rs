//! Groupwise maximin share (GMMS) fair division of indivisible goods with
//! additive valuations, in exact rational arithmetic.
//!
//! The crate evaluates fairness notions (EF, EF1, EFX, EFL, MMS, PMMS,
//! k-wise fairness, GMMS), computes maximin shares by branch and bound,
//! builds EFL allocations with the envy-graph algorithm, searches for exact
//! GMMS allocations and generates seeded random instances.

pub mod algorithms;
mod combinatorics;
pub mod doc;
mod error;
pub mod experiment;
pub mod fairness;
pub mod fixtures;
pub mod generator;
mod instance;
pub mod maximin;
mod partition;
mod value;

pub use combinatorics::{Assignments, Combinations};
pub use error::{Error, Result};
pub use instance::{bundle_value, Allocation, Bundle, Instance};
pub use value::{Value, ValueError};

pub use algorithms::{
    build_envy_graph, efl_allocate, efl_allocate_traced, exact_gmms_search, lex_dominates, lexmax_allocation,
    resolve_envy_cycles, EflStep, EnvyGraph, SearchOutcome, SearchStatus, TieBreakPolicy,
};
pub use doc::{parse_allocation, parse_instance, parse_policy, serialize_allocation, serialize_instance};
pub use fairness::{
    check, gmms_factor, is_ef1, is_efl, is_efx, is_envy_free, is_gmms, is_kwise_fair, is_mms, is_pmms, Factor,
    FairnessReport, Notion, Violation,
};
pub use fixtures::{paper_fixture, Fixture};
pub use generator::{generate, parse_gen_spec, Distribution, GenSpec};
pub use maximin::{gmms_threshold, maximin_share, maximin_share_naive, mms, GmmsThreshold, MaximinResult};
