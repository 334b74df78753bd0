//! Rank aggregation under the Kemeny rule.
//!
//! The crate computes exact Kemeny consensus rankings with a
//! fixed-parameter subset dynamic program whose table size is governed by
//! the average pairwise Kendall-Tau distance of the input, and compares it
//! with Borda count and an adjacent-swap local search.
//!
//! ```
//! use kemeny::{dp_kemeny, Profile, DEFAULT_MEMORY_BUDGET};
//!
//! let profile = Profile::parse("A,B,C\nA,C,B\nB,A,C\n").unwrap();
//! let result = dp_kemeny(&profile, DEFAULT_MEMORY_BUDGET).unwrap();
//! assert_eq!(profile.format_ranking(&result.consensus, ","), "A,B,C");
//! assert_eq!(result.score.value(), 2);
//! ```

pub mod approx;
pub mod cli;
pub mod error;
pub mod exact;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod set;

#[cfg(test)]
mod fixtures;

pub use approx::{borda, borda_tally, heuristic_kemeny, BordaTally};
pub use error::{Error, Result};
pub use exact::{
    brute_force_kemeny, compute_rank_windows, dp_kemeny, estimate_table_size, KemenyResult,
    RankWindows, SolverStats, DEFAULT_MEMORY_BUDGET,
};
pub use metrics::{
    average_kt_distance, average_rank, closest_rankings, kemeny_score, kemeny_score_from_graph,
    kendall_tau, partial_kemeny, AverageRank, Score, WindowParameter,
};
pub use model::{build_preference_graph, validate_profile, Candidate, CandidateId, PreferenceGraph, Profile, Ranking};
pub use set::CandidateSet;
