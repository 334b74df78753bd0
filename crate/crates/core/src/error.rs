use thiserror::Error;

use crate::model::CandidateId;

/// Errors produced while building profiles or running an aggregation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("profile contains no rankings")]
    EmptyProfile,

    #[error("ranking {ranking} is not a permutation: {detail}")]
    NotAPermutation { ranking: usize, detail: String },

    #[error("ranking {ranking} ranks a different set of candidates than ranking 0")]
    InconsistentCandidateSets { ranking: usize },

    #[error("invalid candidate name {name:?}: {reason}")]
    InvalidCandidateName { name: String, reason: &'static str },

    #[error("{m} candidates exceeds the supported maximum of {max}")]
    TooManyCandidates { m: usize, max: usize },

    #[error("rankings are over different candidate sets ({left} vs {right} candidates)")]
    MismatchedCandidates { left: usize, right: usize },

    #[error("unknown candidate id {0}")]
    UnknownCandidate(CandidateId),

    #[error("candidate {0} is a member of the subset it is scored against")]
    CandidateInSubset(CandidateId),

    #[error("rank window {rank} is empty")]
    InfeasibleWindows { rank: usize },

    #[error("estimated table size {estimate} bytes exceeds the memory budget of {budget} bytes")]
    MemoryBudgetExceeded { estimate: u64, budget: u64 },

    #[error("{m} candidates is too many for exhaustive search (limit {max})")]
    InstanceTooLarge { m: usize, max: usize },

    #[error("cannot keep {requested} of {available} candidates")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
