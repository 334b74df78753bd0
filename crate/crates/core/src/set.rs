//! Candidate subsets packed into a single machine word.

use std::fmt;

use crate::model::CandidateId;

/// Largest candidate count a [`CandidateSet`] can address.
pub const MAX_CANDIDATES: usize = 64;

/// A set of candidate ids in `0..64`, one bit per id.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateSet(u64);

impl CandidateSet {
    pub const EMPTY: CandidateSet = CandidateSet(0);

    pub fn from_bits(bits: u64) -> Self {
        CandidateSet(bits)
    }

    /// The set `{0, 1, .., m-1}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_CANDIDATES);
        if m == MAX_CANDIDATES {
            CandidateSet(u64::MAX)
        } else {
            CandidateSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(u: CandidateId) -> Self {
        CandidateSet(1u64 << u)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, u: CandidateId) -> bool {
        u < MAX_CANDIDATES && self.0 & (1u64 << u) != 0
    }

    pub fn insert(&mut self, u: CandidateId) {
        self.0 |= 1u64 << u;
    }

    pub fn remove(&mut self, u: CandidateId) {
        self.0 &= !(1u64 << u);
    }

    pub fn with(self, u: CandidateId) -> Self {
        CandidateSet(self.0 | (1u64 << u))
    }

    pub fn without(self, u: CandidateId) -> Self {
        CandidateSet(self.0 & !(1u64 << u))
    }

    pub fn union(self, other: Self) -> Self {
        CandidateSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        CandidateSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        CandidateSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending id order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self` with exactly `k` members.
    pub fn subsets_of_size(self, k: usize) -> SubsetsOfSize {
        let members: Vec<CandidateId> = self.iter().collect();
        let n = members.len();
        let next = if k > n {
            None
        } else if k == 0 {
            Some(0)
        } else if k == 64 {
            Some(u64::MAX)
        } else {
            Some((1u64 << k) - 1)
        };
        SubsetsOfSize { members, next }
    }
}

impl FromIterator<CandidateId> for CandidateSet {
    fn from_iter<I: IntoIterator<Item = CandidateId>>(iter: I) -> Self {
        let mut s = CandidateSet::EMPTY;
        for u in iter {
            s.insert(u);
        }
        s
    }
}

impl IntoIterator for CandidateSet {
    type Item = CandidateId;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = CandidateId;

    fn next(&mut self) -> Option<CandidateId> {
        if self.0 == 0 {
            return None;
        }
        let u = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(u)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

/// Fixed-cardinality subset enumeration: Gosper's hack over the compressed
/// member indices, each pattern expanded back onto the original ids.
pub struct SubsetsOfSize {
    members: Vec<CandidateId>,
    next: Option<u64>,
}

impl Iterator for SubsetsOfSize {
    type Item = CandidateSet;

    fn next(&mut self) -> Option<CandidateSet> {
        let pattern = self.next?;
        let n = self.members.len();
        let mut out = CandidateSet::EMPTY;
        let mut p = pattern;
        while p != 0 {
            let idx = p.trailing_zeros() as usize;
            out.insert(self.members[idx]);
            p &= p - 1;
        }
        self.next = if pattern == 0 {
            None
        } else {
            let c = pattern & pattern.wrapping_neg();
            let r = pattern.wrapping_add(c);
            // overflow of the carry past bit 63 ends the sequence as well
            if r == 0 {
                None
            } else {
                let succ = (((r ^ pattern) >> 2) / c) | r;
                if n < 64 && succ >> n != 0 {
                    None
                } else {
                    Some(succ)
                }
            }
        };
        Some(out)
    }
}
