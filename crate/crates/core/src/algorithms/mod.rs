//! Constructive procedures.

mod efl;
mod envy;
mod lexmax;
mod search;

pub use efl::{efl_allocate, efl_allocate_traced, EflStep, TieBreakPolicy};
pub use envy::{build_envy_graph, resolve_envy_cycles, EnvyGraph};
pub use lexmax::{lex_dominates, lexmax_allocation, LEXMAX_MAX_PARTITIONS};
pub use search::{exact_gmms_search, exact_gmms_search_with, SearchLimits, SearchOutcome, SearchStatus};
