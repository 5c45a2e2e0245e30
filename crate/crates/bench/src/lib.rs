//! Fixtures shared by the benchmarks.

use ojzj_core::{random_bitstring, Individual, OjzjProblem, RandomSource};

/// `size` uniformly random individuals evaluated on `problem`.
pub fn random_population(problem: &OjzjProblem, size: usize, seed: u64) -> Vec<Individual> {
    let mut rng = RandomSource::new(seed);
    (0..size)
        .map(|_| {
            let x = random_bitstring(problem.n(), &mut rng).expect("n > 0");
            Individual::new(x, problem).expect("matching length")
        })
        .collect()
}

/// A population spread over the inner part of the front, as in the late
/// stages of a run: `copies` individuals per ones-count in `[k, n - k]`.
pub fn inner_front_population(problem: &OjzjProblem, copies: usize) -> Vec<Individual> {
    let (n, k) = (problem.n(), problem.k());
    (k..=n - k)
        .flat_map(|ones| std::iter::repeat_n(ones, copies))
        .map(|ones| {
            Individual::new(ojzj_core::BitString::with_prefix_ones(n, ones), problem)
                .expect("matching length")
        })
        .collect()
}
