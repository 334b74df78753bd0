//! Borda count and an adjacent-swap local search seeded from it.

use crate::metrics::{kemeny_score_from_graph, Score};
use crate::model::{build_preference_graph, CandidateId, PreferenceGraph, Profile, Ranking};

/// Per-candidate Borda points: `m - 1 - rank` from every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BordaTally(pub Vec<u64>);

impl BordaTally {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Candidates by descending points, ties to the smaller id.
    pub fn ranking(&self) -> Ranking {
        let mut order: Vec<CandidateId> = (0..self.0.len()).collect();
        order.sort_by(|&a, &b| self.0[b].cmp(&self.0[a]).then(a.cmp(&b)));
        Ranking::new(order).expect("sorted ids form a permutation")
    }
}

pub fn borda_tally(profile: &Profile) -> BordaTally {
    let m = profile.m();
    let mut points = vec![0u64; m];
    for r in profile.rankings() {
        for (rank, &u) in r.order().iter().enumerate() {
            points[u] += (m - 1 - rank) as u64;
        }
    }
    BordaTally(points)
}

/// Borda ranking with its Kemeny score.
pub fn borda(profile: &Profile) -> (Ranking, Score) {
    let g = build_preference_graph(profile);
    let ranking = borda_tally(profile).ranking();
    let score = kemeny_score_from_graph(&ranking, &g).expect("same candidate set");
    (ranking, score)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchOutcome {
    pub ranking: Ranking,
    pub score: Score,
    pub accepted_swaps: u64,
    pub passes: u64,
}

/// Sweeps adjacent pairs, swapping whenever more agents prefer the lower
/// candidate, until a full pass changes nothing. Every accepted swap lowers
/// the Kemeny score by `a[below][above] - a[above][below] >= 1`.
pub fn adjacent_swap_search(start: &Ranking, g: &PreferenceGraph) -> LocalSearchOutcome {
    let mut order = start.order().to_vec();
    let mut accepted_swaps = 0;
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for i in 0..order.len().saturating_sub(1) {
            let (above, below) = (order[i], order[i + 1]);
            if g.weight(below, above) > g.weight(above, below) {
                order.swap(i, i + 1);
                accepted_swaps += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let ranking = Ranking::new(order).expect("swaps keep a permutation");
    let score = kemeny_score_from_graph(&ranking, g).expect("same candidate set");
    LocalSearchOutcome {
        ranking,
        score,
        accepted_swaps,
        passes,
    }
}

/// Local search from the Borda ranking.
pub fn heuristic_kemeny(profile: &Profile) -> (Ranking, Score) {
    let g = build_preference_graph(profile);
    let start = borda_tally(profile).ranking();
    let out = adjacent_swap_search(&start, &g);
    (out.ranking, out.score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{dp_kemeny, DEFAULT_MEMORY_BUDGET};
    use crate::fixtures::{p0, random_ranking, rng, unanimous};
    use crate::model::validate_profile;

    fn random_profile(m: usize, n: usize, seed: u64) -> Profile {
        let mut g = rng(seed);
        let raw: Vec<Vec<String>> = (0..n)
            .map(|_| {
                random_ranking(m, &mut g)
                    .order()
                    .iter()
                    .map(|u| format!("c{u}"))
                    .collect()
            })
            .collect();
        validate_profile(&raw).unwrap()
    }

    #[test]
    fn borda_on_p0() {
        let p = p0();
        assert_eq!(borda_tally(&p), BordaTally(vec![5, 3, 1]));
        let (r, s) = borda(&p);
        assert_eq!((r.order(), s), (&[0, 1, 2][..], Score(2)));
    }

    #[test]
    fn borda_unanimity_and_ties() {
        let u = unanimous(&["x", "y", "z"], 4);
        assert_eq!(borda(&u), (Ranking::identity(3), Score(0)));

        let tie = validate_profile(&[vec!["A", "B"], vec!["B", "A"]]).unwrap();
        assert_eq!(borda_tally(&tie), BordaTally(vec![1, 1]));
        assert_eq!(borda(&tie), (Ranking::identity(2), Score(1)));
    }

    #[test]
    fn heuristic_on_p0_and_unanimity() {
        assert_eq!(heuristic_kemeny(&p0()), (Ranking::identity(3), Score(2)));
        let u = unanimous(&["x", "y", "z", "w"], 3);
        assert_eq!(heuristic_kemeny(&u), (Ranking::identity(4), Score(0)));
    }

    #[test]
    fn heuristic_sits_between_optimum_and_borda() {
        let mut equal = 0;
        for seed in 0..100 {
            let p = random_profile(8, 5, seed);
            let g = build_preference_graph(&p);
            let tally = borda_tally(&p);
            assert_eq!(tally.total(), 5 * 8 * 7 / 2);

            let (_, borda_score) = borda(&p);
            let start = tally.ranking();
            let out = adjacent_swap_search(&start, &g);
            let opt = dp_kemeny(&p, DEFAULT_MEMORY_BUDGET).unwrap().score;
            assert!(opt <= out.score && out.score <= borda_score, "seed {seed}");
            assert!(out.accepted_swaps <= borda_score.0 - out.score.0);
            if out.score == opt {
                equal += 1;
            }

            // no single adjacent transposition improves the result
            let order = out.ranking.order();
            for i in 0..order.len() - 1 {
                let mut o = order.to_vec();
                o.swap(i, i + 1);
                let s = kemeny_score_from_graph(&Ranking::new(o).unwrap(), &g).unwrap();
                assert!(s >= out.score);
            }
        }
        // the local optimum is usually the exact one on small random instances
        assert!(equal > 0);
    }
}
