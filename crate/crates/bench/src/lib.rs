//! Benchmark fixtures shared by the criterion benches.

use epmod::ep::random_commuting_ep_pair;
use epmod::random::{random_with_rank, rng_from_seed};
use epmod::ComplexMatrix;

/// Square matrix of half rank, the typical analysis input.
pub fn half_rank(n: usize, seed: u64) -> ComplexMatrix {
    random_with_rank(&mut rng_from_seed(seed), n, n, (n / 2).max(1), 0.1, 2.0)
}

pub fn commuting_pair(n: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    random_commuting_ep_pair(n, seed).expect("valid dimension")
}
