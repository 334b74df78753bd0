//! Exact Kemeny aggregation.
//!
//! [`dp_kemeny`] is the fixed-parameter subset dynamic program. Every
//! candidate `u` in an optimal consensus sits at a rank strictly within
//! `d` of its average rank, where `d` is the ceiling of the average pairwise
//! Kendall-Tau distance. That restricts rank `i` to a window `R[i]` of
//! candidates, and the table only has to remember which window members are
//! already placed above rank `i`:
//!
//! ```text
//! T(0, u, {})  = pK(u, U \ {u})
//! T(i, u, S)   = min over u' in S + F(i) of T(i-1, u', (S + F(i)) \ {u'})
//!                + pK(u, U \ (S + forgotten(<= i) + {u}))
//! ```
//!
//! where `F(i)` is the set of candidates whose window closes at `i` and
//! `pK(u, B)` counts the agents preferring some member of `B` over `u`.
//! The consensus is recovered by following the stored argmin predecessor
//! back from the best entry at rank `m - 1`.
//!
//! [`brute_force_kemeny`] enumerates every permutation and serves as the
//! correctness oracle for small instances.

use std::collections::HashMap;
use std::mem;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::metrics::{
    average_kt_distance, average_ranks, kemeny_score_from_graph, partial_kemeny_from_graph, Score,
    WindowParameter,
};
use crate::model::{build_preference_graph, CandidateId, PreferenceGraph, Profile, Ranking};
use crate::set::{CandidateSet, MAX_CANDIDATES};

/// Memory budget used when the caller does not pick one (1 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Bytes charged per table entry by [`estimate_table_size`].
pub const ESTIMATE_BYTES_PER_ENTRY: u64 = 2;

/// Largest instance [`brute_force_kemeny`] accepts.
pub const BRUTE_FORCE_MAX_CANDIDATES: usize = 10;

/// Per-rank candidate windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWindows {
    pub param: WindowParameter,
    allowed: Vec<CandidateSet>,
    inserted: Vec<CandidateSet>,
    forgotten: Vec<CandidateSet>,
    forgotten_through: Vec<CandidateSet>,
}

impl RankWindows {
    pub fn m(&self) -> usize {
        self.allowed.len()
    }

    /// `R[i]`: candidates that may take rank `i`.
    pub fn allowed(&self, rank: usize) -> CandidateSet {
        self.allowed[rank]
    }

    /// `I(i)`: candidates whose window opens at rank `i`.
    pub fn inserted(&self, rank: usize) -> CandidateSet {
        self.inserted[rank]
    }

    /// `F(i)`: candidates whose window closed just before rank `i`.
    pub fn forgotten(&self, rank: usize) -> CandidateSet {
        self.forgotten[rank]
    }

    /// Union of `F(0..=i)`; these must all be placed above rank `i`.
    pub fn forgotten_through(&self, rank: usize) -> CandidateSet {
        self.forgotten_through[rank]
    }

    /// Union of `I(i+1..m)`; these must all be placed below rank `i`.
    pub fn inserted_after(&self, rank: usize) -> CandidateSet {
        self.inserted[rank + 1..]
            .iter()
            .fold(CandidateSet::EMPTY, |acc, &s| acc.union(s))
    }

    /// Largest `|R[i]|`.
    pub fn max_width(&self) -> usize {
        self.allowed.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// True when every candidate of `ranking` sits inside its window.
    pub fn admits(&self, ranking: &Ranking) -> bool {
        ranking
            .order()
            .iter()
            .enumerate()
            .all(|(rank, &u)| self.allowed[rank].contains(u))
    }
}

/// Windows for the profile's own `d = ceil(d_ave)`.
pub fn compute_rank_windows(profile: &Profile) -> Result<RankWindows> {
    rank_windows_with(profile, average_kt_distance(profile))
}

/// Windows `R[i] = {u : r_ave(u) - d < i < r_ave(u) + d}` for an explicit
/// parameter.
pub fn rank_windows_with(profile: &Profile, param: WindowParameter) -> Result<RankWindows> {
    let m = profile.m();
    let n = profile.n() as u64;
    // r_ave(u) = sum_u / n, so |i - r_ave(u)| < d  <=>  |i*n - sum_u| < d*n
    let sums: Vec<u64> = average_ranks(profile)
        .iter()
        .map(|r| {
            let v = r.value();
            v.numer() * (n / v.denom())
        })
        .collect();
    let reach = param.d.saturating_mul(n);

    let mut allowed = Vec::with_capacity(m);
    for rank in 0..m {
        let scaled = rank as u64 * n;
        let window: CandidateSet = (0..m)
            .filter(|&u| scaled.abs_diff(sums[u]) < reach)
            .collect();
        if window.is_empty() {
            return Err(Error::InfeasibleWindows { rank });
        }
        allowed.push(window);
    }

    let mut inserted = Vec::with_capacity(m);
    let mut forgotten = Vec::with_capacity(m);
    let mut forgotten_through = Vec::with_capacity(m);
    let mut gone = CandidateSet::EMPTY;
    for rank in 0..m {
        let (ins, fgt) = if rank == 0 {
            (allowed[0], CandidateSet::EMPTY)
        } else {
            (
                allowed[rank].difference(allowed[rank - 1]),
                allowed[rank - 1].difference(allowed[rank]),
            )
        };
        gone = gone.union(fgt);
        inserted.push(ins);
        forgotten.push(fgt);
        forgotten_through.push(gone);
    }
    Ok(RankWindows {
        param,
        allowed,
        inserted,
        forgotten,
        forgotten_through,
    })
}

/// Byte estimate `2^min(4d, m) * max(d, 1) * m * 2` for the subset table,
/// saturating at `u64::MAX`.
pub fn estimate_table_size(m: usize, d: u64) -> u64 {
    let exponent = d.saturating_mul(4).min(m as u64);
    if exponent >= 128 {
        return u64::MAX;
    }
    let subsets = 1u128 << exponent;
    let total = subsets
        .saturating_mul(d.max(1) as u128)
        .saturating_mul(m as u128)
        .saturating_mul(ESTIMATE_BYTES_PER_ENTRY as u128);
    u64::try_from(total).unwrap_or(u64::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpEntry {
    pub score: Score,
    pub predecessor: Option<CandidateId>,
}

type StageKey = (CandidateId, CandidateSet);

/// Rough in-memory size of one stored entry.
pub const TABLE_ENTRY_BYTES: u64 = (mem::size_of::<StageKey>() + mem::size_of::<DpEntry>() + 1) as u64;

/// The subset table, one map per rank keyed by `(u, window members above u)`.
#[derive(Debug, Clone, Default)]
pub struct DpTable {
    stages: Vec<HashMap<StageKey, DpEntry>>,
}

impl DpTable {
    pub fn get(&self, rank: usize, u: CandidateId, above: CandidateSet) -> Option<&DpEntry> {
        self.stages.get(rank)?.get(&(u, above))
    }

    pub fn stage_len(&self, rank: usize) -> usize {
        self.stages.get(rank).map_or(0, HashMap::len)
    }

    pub fn len(&self) -> usize {
        self.stages.iter().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every stored `(rank, u, above, entry)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, CandidateId, CandidateSet, DpEntry)> + '_ {
        self.stages.iter().enumerate().flat_map(|(rank, stage)| {
            stage
                .iter()
                .map(move |(&(u, above), &entry)| (rank, u, above, entry))
        })
    }
}

/// Candidates of `R[rank]` that may already sit above that rank.
fn above_pool(windows: &RankWindows, rank: usize) -> CandidateSet {
    if rank == 0 {
        CandidateSet::EMPTY
    } else {
        windows.allowed(rank).intersection(windows.allowed(rank - 1))
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Number of `(rank, u, subset)` keys the solver will enumerate for these
/// windows; an upper bound on the entries it stores.
pub fn count_table_keys(windows: &RankWindows) -> u64 {
    let mut total = 0u64;
    for rank in 0..windows.m() {
        let gone = windows.forgotten_through(rank).len();
        if gone > rank {
            continue;
        }
        let k = rank - gone;
        let pool = above_pool(windows, rank);
        for u in windows.allowed(rank) {
            total = total.saturating_add(binomial(pool.without(u).len(), k));
        }
    }
    total
}

/// Implementation-true size estimate: enumerated keys times entry size.
pub fn implementation_table_bytes(windows: &RankWindows) -> u64 {
    count_table_keys(windows).saturating_mul(TABLE_ENTRY_BYTES)
}

fn assert_partition(windows: &RankWindows, rank: usize, u: CandidateId) {
    let gone = windows.forgotten_through(rank);
    let open = windows.allowed(rank).without(u);
    let pending = windows.inserted_after(rank);
    debug_assert!(gone.is_disjoint(open) && gone.is_disjoint(pending) && open.is_disjoint(pending));
    debug_assert_eq!(
        gone.union(open).union(pending),
        CandidateSet::full(windows.m()).without(u),
        "rank {rank}, candidate {u}"
    );
}

/// Fills the subset table for the given windows.
pub fn build_dp_table(g: &PreferenceGraph, windows: &RankWindows) -> DpTable {
    let m = windows.m();
    let everyone = CandidateSet::full(m);
    let mut stages: Vec<HashMap<StageKey, DpEntry>> = Vec::with_capacity(m);

    for rank in 0..m {
        let mut stage = HashMap::new();
        let gone = windows.forgotten_through(rank);
        if gone.len() <= rank {
            // exactly `rank` candidates sit above: the forgotten ones plus k
            // members of the current window
            let k = rank - gone.len();
            let pool = above_pool(windows, rank);
            let closing = windows.forgotten(rank);
            for u in windows.allowed(rank) {
                if cfg!(debug_assertions) {
                    assert_partition(windows, rank, u);
                }
                for above in pool.without(u).subsets_of_size(k) {
                    let below = everyone.difference(above.union(gone)).without(u);
                    let cost = partial_kemeny_from_graph(g, u, below);
                    let entry = if rank == 0 {
                        DpEntry {
                            score: cost,
                            predecessor: None,
                        }
                    } else {
                        let prev_above = above.union(closing);
                        let prev = &stages[rank - 1];
                        let mut best: Option<(Score, CandidateId)> = None;
                        for p in prev_above {
                            if let Some(e) = prev.get(&(p, prev_above.without(p))) {
                                if best.is_none_or(|(s, _)| e.score < s) {
                                    best = Some((e.score, p));
                                }
                            }
                        }
                        let Some((score, p)) = best else { continue };
                        DpEntry {
                            score: score + cost,
                            predecessor: Some(p),
                        }
                    };
                    stage.insert((u, above), entry);
                }
            }
        }
        stages.push(stage);
    }
    DpTable { stages }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolverStats {
    /// Entries stored in the subset table (0 for solvers without one).
    pub table_entries: u64,
    /// Pre-flight estimate from [`estimate_table_size`].
    pub estimated_bytes: u64,
    /// Stored entries times [`TABLE_ENTRY_BYTES`].
    pub table_bytes: u64,
    /// Largest rank window, when windows were built.
    pub max_window: Option<usize>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KemenyResult {
    pub consensus: Ranking,
    pub score: Score,
    pub stats: SolverStats,
}

/// Exact Kemeny consensus via the windowed subset DP.
///
/// Ties between equal-score predecessors, and between equal final entries,
/// go to the smallest candidate id.
pub fn dp_kemeny(profile: &Profile, memory_budget: u64) -> Result<KemenyResult> {
    let start = Instant::now();
    let m = profile.m();
    if m > MAX_CANDIDATES {
        return Err(Error::TooManyCandidates {
            m,
            max: MAX_CANDIDATES,
        });
    }

    let param = average_kt_distance(profile);
    if param.d == 0 {
        // every agent agrees; the windows would be empty
        return Ok(KemenyResult {
            consensus: profile.rankings()[0].clone(),
            score: Score(0),
            stats: SolverStats {
                estimated_bytes: estimate_table_size(m, 0),
                elapsed: start.elapsed(),
                ..SolverStats::default()
            },
        });
    }

    let estimate = estimate_table_size(m, param.d);
    if estimate > memory_budget {
        return Err(Error::MemoryBudgetExceeded {
            estimate,
            budget: memory_budget,
        });
    }

    let windows = rank_windows_with(profile, param)?;
    let g = build_preference_graph(profile);
    let table = build_dp_table(&g, &windows);

    let last = m - 1;
    let closing = windows.allowed(last);
    let mut best: Option<(Score, CandidateId)> = None;
    for u in closing {
        if let Some(e) = table.get(last, u, closing.without(u)) {
            if best.is_none_or(|(s, _)| e.score < s) {
                best = Some((e.score, u));
            }
        }
    }
    let Some((score, mut u)) = best else {
        let rank = (0..m).find(|&r| table.stage_len(r) == 0).unwrap_or(last);
        return Err(Error::InfeasibleWindows { rank });
    };

    let mut order = vec![0; m];
    let mut above = closing.without(u);
    for rank in (0..m).rev() {
        order[rank] = u;
        let entry = table
            .get(rank, u, above)
            .expect("traceback follows stored entries");
        if let Some(p) = entry.predecessor {
            above = above.union(windows.forgotten(rank)).without(p);
            u = p;
        }
    }
    let consensus = Ranking::new(order).expect("traceback yields a permutation");
    debug_assert_eq!(kemeny_score_from_graph(&consensus, &g).unwrap(), score);

    let entries = table.len() as u64;
    Ok(KemenyResult {
        consensus,
        score,
        stats: SolverStats {
            table_entries: entries,
            estimated_bytes: estimate,
            table_bytes: entries * TABLE_ENTRY_BYTES,
            max_window: Some(windows.max_width()),
            elapsed: start.elapsed(),
        },
    })
}

/// Rearranges `v` into its lexicographic successor; false once `v` is the
/// last permutation.
fn next_permutation(v: &mut [CandidateId]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Scores all `m!` rankings; the lexicographically first optimum wins.
pub fn brute_force_kemeny(profile: &Profile) -> Result<KemenyResult> {
    let start = Instant::now();
    let m = profile.m();
    if m > BRUTE_FORCE_MAX_CANDIDATES {
        return Err(Error::InstanceTooLarge {
            m,
            max: BRUTE_FORCE_MAX_CANDIDATES,
        });
    }
    let g = build_preference_graph(profile);
    let mut order: Vec<CandidateId> = (0..m).collect();
    let mut best_order = order.clone();
    let mut best = Score(u64::MAX);
    loop {
        let mut score = 0;
        for (i, &u) in order.iter().enumerate() {
            for &v in &order[i + 1..] {
                score += g.weight(v, u);
            }
        }
        if Score(score) < best {
            best = Score(score);
            best_order.copy_from_slice(&order);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(KemenyResult {
        consensus: Ranking::new(best_order).expect("permutation"),
        score: best,
        stats: SolverStats {
            elapsed: start.elapsed(),
            ..SolverStats::default()
        },
    })
}
