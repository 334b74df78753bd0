//! Shared profiles for unit tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate_profile, Profile, Ranking};

/// A>B>C, A>C>B, B>A>C.
pub fn p0() -> Profile {
    validate_profile(&[
        vec!["A", "B", "C"],
        vec!["A", "C", "B"],
        vec!["B", "A", "C"],
    ])
    .unwrap()
}

pub fn unanimous(order: &[&str], n: usize) -> Profile {
    validate_profile(&vec![order.to_vec(); n]).unwrap()
}

pub fn random_ranking(m: usize, rng: &mut impl Rng) -> Ranking {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    Ranking::new(order).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
