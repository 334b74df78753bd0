//! Candidates, rankings, profiles and the pairwise preference graph.
//!
//! A [`Profile`] is the input to every aggregation rule in this crate. It is
//! built either from name sequences ([`validate_profile`]) or from the text
//! format handled by [`Profile::parse`]: one ranking per line, names
//! comma-separated from best to worst, `#` comment lines ignored.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::set::MAX_CANDIDATES;

/// Dense candidate index in `0..m`.
pub type CandidateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: CandidateId,
    pub name: String,
}

/// A strict total order over `0..m`, best first. Position in `order` is the
/// rank, so the top candidate has rank 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<CandidateId>,
    position: Vec<usize>,
}

impl Ranking {
    /// Builds a ranking from a best-first order, checking it is a permutation
    /// of `0..order.len()`.
    pub fn new(order: Vec<CandidateId>) -> Result<Self> {
        let m = order.len();
        let mut position = vec![usize::MAX; m];
        for (rank, &u) in order.iter().enumerate() {
            if u >= m {
                return Err(Error::NotAPermutation {
                    ranking: 0,
                    detail: format!("candidate id {u} out of range for {m} candidates"),
                });
            }
            if position[u] != usize::MAX {
                return Err(Error::NotAPermutation {
                    ranking: 0,
                    detail: format!("candidate id {u} appears twice"),
                });
            }
            position[u] = rank;
        }
        Ok(Ranking { order, position })
    }

    pub fn identity(m: usize) -> Self {
        Ranking {
            order: (0..m).collect(),
            position: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    /// Number of candidates ranked strictly better than `u`.
    pub fn rank_of(&self, u: CandidateId) -> usize {
        self.position[u]
    }

    pub fn prefers(&self, u: CandidateId, v: CandidateId) -> bool {
        self.position[u] < self.position[v]
    }

    pub fn reversed(&self) -> Ranking {
        let order: Vec<_> = self.order.iter().rev().copied().collect();
        Ranking::new(order).expect("reversal of a permutation")
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranking{:?}", self.order)
    }
}

/// `n >= 1` rankings over the same `m >= 1` named candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    candidates: Vec<Candidate>,
    rankings: Vec<Ranking>,
}

fn check_name(name: &str) -> Result<()> {
    let reason = if name.is_empty() {
        "empty name"
    } else if name.trim() != name {
        "leading or trailing whitespace"
    } else if name.contains(',') {
        "contains a comma"
    } else if name.contains(['\n', '\r']) {
        "contains a line break"
    } else if name.starts_with('#') {
        "starts with '#'"
    } else {
        return Ok(());
    };
    Err(Error::InvalidCandidateName {
        name: name.to_string(),
        reason,
    })
}

/// Validates raw name sequences into a [`Profile`].
///
/// Ids are assigned in order of first appearance in the first ranking, so
/// the first ranking always becomes the identity order.
pub fn validate_profile<S: AsRef<str>>(raw: &[Vec<S>]) -> Result<Profile> {
    let first = raw.first().ok_or(Error::EmptyProfile)?;
    let mut ids: HashMap<&str, CandidateId> = HashMap::with_capacity(first.len());
    let mut candidates = Vec::with_capacity(first.len());
    for name in first {
        let name = name.as_ref();
        check_name(name)?;
        if ids.insert(name, candidates.len()).is_some() {
            return Err(Error::NotAPermutation {
                ranking: 0,
                detail: format!("{name:?} appears twice"),
            });
        }
        candidates.push(Candidate {
            id: candidates.len(),
            name: name.to_string(),
        });
    }
    let m = candidates.len();
    if m == 0 {
        return Err(Error::NotAPermutation {
            ranking: 0,
            detail: "no candidates".into(),
        });
    }
    if m > MAX_CANDIDATES {
        return Err(Error::TooManyCandidates {
            m,
            max: MAX_CANDIDATES,
        });
    }

    let mut rankings = Vec::with_capacity(raw.len());
    for (index, names) in raw.iter().enumerate() {
        let mut order = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        for name in names {
            let name = name.as_ref();
            let Some(&u) = ids.get(name) else {
                check_name(name)?;
                return Err(Error::InconsistentCandidateSets { ranking: index });
            };
            if seen[u] {
                return Err(Error::NotAPermutation {
                    ranking: index,
                    detail: format!("{name:?} appears twice"),
                });
            }
            seen[u] = true;
            order.push(u);
        }
        if order.len() != m {
            return Err(Error::InconsistentCandidateSets { ranking: index });
        }
        rankings.push(Ranking::new(order).map_err(|e| match e {
            Error::NotAPermutation { detail, .. } => Error::NotAPermutation {
                ranking: index,
                detail,
            },
            other => other,
        })?);
    }
    Ok(Profile {
        candidates,
        rankings,
    })
}

impl Profile {
    /// Parses the line-oriented text format.
    pub fn parse(text: &str) -> Result<Profile> {
        let mut raw: Vec<Vec<&str>> = Vec::new();
        let mut lines: Vec<usize> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            raw.push(trimmed.split(',').map(str::trim).collect());
            lines.push(i + 1);
        }
        validate_profile(&raw).map_err(|e| {
            let line = match &e {
                Error::NotAPermutation { ranking, .. }
                | Error::InconsistentCandidateSets { ranking } => lines[*ranking],
                Error::EmptyProfile => 0,
                _ => lines.first().copied().unwrap_or(0),
            };
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })
    }

    /// Serializes to the text format accepted by [`Profile::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rankings {
            out.push_str(&self.format_ranking(r, ","));
            out.push('\n');
        }
        out
    }

    pub fn format_ranking(&self, r: &Ranking, sep: &str) -> String {
        r.order()
            .iter()
            .map(|&u| self.candidates[u].name.as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn name(&self, u: CandidateId) -> &str {
        &self.candidates[u].name
    }

    pub fn id_of(&self, name: &str) -> Option<CandidateId> {
        self.candidates.iter().position(|c| c.name == name)
    }

    /// Number of candidates.
    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    /// Number of rankings (agents).
    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn ranking_names(&self, r: &Ranking) -> Vec<String> {
        r.order().iter().map(|&u| self.name(u).to_string()).collect()
    }

    /// True when every agent submitted the same ranking.
    pub fn is_unanimous(&self) -> bool {
        self.rankings.windows(2).all(|w| w[0] == w[1])
    }
}

/// `weights[u][v]` counts the agents ranking `u` above `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceGraph {
    m: usize,
    n: usize,
    weights: Vec<u64>,
}

impl PreferenceGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: CandidateId, v: CandidateId) -> u64 {
        self.weights[u * self.m + v]
    }

    pub fn row(&self, u: CandidateId) -> &[u64] {
        &self.weights[u * self.m..(u + 1) * self.m]
    }
}

pub fn build_preference_graph(profile: &Profile) -> PreferenceGraph {
    let m = profile.m();
    let mut weights = vec![0u64; m * m];
    for r in profile.rankings() {
        let order = r.order();
        for (i, &u) in order.iter().enumerate() {
            for &v in &order[i + 1..] {
                weights[u * m + v] += 1;
            }
        }
    }
    PreferenceGraph {
        m,
        n: profile.n(),
        weights,
    }
}
