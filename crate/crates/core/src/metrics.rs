//! Distances and scores over rankings.
//!
//! All quantities are exact: scores are integer disagreement counts and the
//! averages are rationals, so the window parameter `d = ceil(d_ave)` never
//! suffers from a float landing just above an integer.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{CandidateId, PreferenceGraph, Profile, Ranking};
use crate::set::CandidateSet;

/// A count of pairwise disagreements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(pub u64);

impl Score {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        Score(self.0 + rhs.0)
    }
}

impl AddAssign for Score {
    fn add_assign(&mut self, rhs: Score) {
        self.0 += rhs.0;
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        Score(iter.map(|s| s.0).sum())
    }
}

/// Mean rank of a candidate over all agents, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AverageRank(pub Ratio<u64>);

impl AverageRank {
    pub fn value(self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        ratio_to_f64(self.0)
    }
}

/// Average pairwise Kendall-Tau distance and its ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowParameter {
    pub d_ave: Ratio<u64>,
    pub d: u64,
}

impl WindowParameter {
    pub fn d_ave_f64(&self) -> f64 {
        ratio_to_f64(self.d_ave)
    }
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Formats a fraction as `p/q`, or `p` when it is whole.
pub fn format_ratio(r: Ratio<u64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn check_same_size(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::MismatchedCandidates { left, right })
    }
}

/// Number of unordered pairs the two rankings order differently.
pub fn kendall_tau(r1: &Ranking, r2: &Ranking) -> Result<Score> {
    check_same_size(r1.len(), r2.len())?;
    let order = r1.order();
    let mut count = 0u64;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            // r1 puts u above v
            if r2.prefers(v, u) {
                count += 1;
            }
        }
    }
    Ok(Score(count))
}

/// Sum of Kendall-Tau distances from `t` to every ranking in the profile.
pub fn kemeny_score(t: &Ranking, profile: &Profile) -> Result<Score> {
    check_same_size(t.len(), profile.m())?;
    profile.rankings().iter().map(|r| kendall_tau(t, r)).sum()
}

/// Kemeny score of `t` read off the preference graph: every pair `t` puts
/// in order `u` above `v` costs the agents preferring `v` to `u`.
pub fn kemeny_score_from_graph(t: &Ranking, g: &PreferenceGraph) -> Result<Score> {
    check_same_size(t.len(), g.m())?;
    let order = t.order();
    let mut total = 0;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            total += g.weight(v, u);
        }
    }
    Ok(Score(total))
}

pub fn average_rank(profile: &Profile, u: CandidateId) -> Result<AverageRank> {
    if u >= profile.m() {
        return Err(Error::UnknownCandidate(u));
    }
    let sum: u64 = profile.rankings().iter().map(|r| r.rank_of(u) as u64).sum();
    Ok(AverageRank(Ratio::new(sum, profile.n() as u64)))
}

/// Average ranks of all candidates in one pass over the profile.
pub fn average_ranks(profile: &Profile) -> Vec<AverageRank> {
    let mut sums = vec![0u64; profile.m()];
    for r in profile.rankings() {
        for (rank, &u) in r.order().iter().enumerate() {
            sums[u] += rank as u64;
        }
    }
    let n = profile.n() as u64;
    sums.into_iter()
        .map(|s| AverageRank(Ratio::new(s, n)))
        .collect()
}

/// Kendall-Tau distance between every pair of agents.
pub fn pairwise_distances(profile: &Profile) -> Vec<Vec<Score>> {
    let rs = profile.rankings();
    let n = rs.len();
    let mut out = vec![vec![Score(0); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let d = kendall_tau(&rs[a], &rs[b]).expect("profile rankings share candidates");
            out[a][b] = d;
            out[b][a] = d;
        }
    }
    out
}

/// Mean Kendall-Tau distance over unordered agent pairs. A single-agent
/// profile has `d_ave = 0`.
pub fn average_kt_distance(profile: &Profile) -> WindowParameter {
    let n = profile.n() as u64;
    if n < 2 {
        return WindowParameter {
            d_ave: Ratio::from_integer(0),
            d: 0,
        };
    }
    let rs = profile.rankings();
    let mut total = 0u64;
    for a in 0..rs.len() {
        for b in a + 1..rs.len() {
            total += kendall_tau(&rs[a], &rs[b])
                .expect("profile rankings share candidates")
                .0;
        }
    }
    let d_ave = Ratio::new(2 * total, n * (n - 1));
    WindowParameter {
        d_ave,
        d: d_ave.ceil().to_integer(),
    }
}

/// Disagreements caused by placing `u` above every member of `below`,
/// counted directly from the agents' rankings.
pub fn partial_kemeny(profile: &Profile, u: CandidateId, below: CandidateSet) -> Result<Score> {
    let m = profile.m();
    if u >= m {
        return Err(Error::UnknownCandidate(u));
    }
    if let Some(bad) = below.iter().find(|&v| v >= m) {
        return Err(Error::UnknownCandidate(bad));
    }
    if below.contains(u) {
        return Err(Error::CandidateInSubset(u));
    }
    let mut count = 0;
    for r in profile.rankings() {
        for v in below {
            if r.prefers(v, u) {
                count += 1;
            }
        }
    }
    Ok(Score(count))
}

/// Same quantity as [`partial_kemeny`], read from the preference graph.
/// Callers guarantee `u` is not in `below`.
pub fn partial_kemeny_from_graph(g: &PreferenceGraph, u: CandidateId, below: CandidateSet) -> Score {
    debug_assert!(!below.contains(u));
    Score(below.iter().map(|v| g.weight(v, u)).sum())
}

/// Every input ranking with its distance to `consensus`, closest first;
/// equal distances keep input order.
pub fn closest_rankings(profile: &Profile, consensus: &Ranking) -> Result<Vec<(usize, Score)>> {
    let mut out = profile
        .rankings()
        .iter()
        .enumerate()
        .map(|(i, r)| kendall_tau(consensus, r).map(|s| (i, s)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|&(i, s)| (s, i));
    Ok(out)
}

/// `sum over pairs of min(a_uv, a_vu)`, a lower bound on every ranking's
/// Kemeny score.
pub fn majority_lower_bound(g: &PreferenceGraph) -> Score {
    let m = g.m();
    let mut total = 0;
    for u in 0..m {
        for v in u + 1..m {
            total += g.weight(u, v).min(g.weight(v, u));
        }
    }
    Score(total)
}
