//! Parent selection, mutation and crossover.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::genome::{BitString, Individual, RandomSource};

/// How the `N` mutation parents are chosen from the parent population.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionScheme {
    /// Every individual once.
    Fair,
    /// `N` uniform draws with replacement.
    Uniform,
    /// `N` independent binary tournaments between two distinct slots.
    #[serde(rename = "tournament")]
    IndependentTournaments,
    /// Two random permutations, each split into `N/2` tournament pairs.
    #[serde(rename = "two-perm")]
    TwoPermutationTournaments,
}

impl SelectionScheme {
    pub const ALL: [SelectionScheme; 4] = [
        SelectionScheme::Fair,
        SelectionScheme::Uniform,
        SelectionScheme::IndependentTournaments,
        SelectionScheme::TwoPermutationTournaments,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SelectionScheme::Fair => "fair",
            SelectionScheme::Uniform => "uniform",
            SelectionScheme::IndependentTournaments => "tournament",
            SelectionScheme::TwoPermutationTournaments => "two-perm",
        }
    }

    /// Selects `population.len()` parents.
    pub fn select<'a>(
        &self,
        population: &'a [Individual],
        rng: &mut RandomSource,
    ) -> Result<Vec<&'a Individual>> {
        match self {
            SelectionScheme::Fair => Ok(select_fair(population)),
            SelectionScheme::Uniform => select_uniform(population, rng),
            SelectionScheme::IndependentTournaments => {
                select_independent_tournaments(population, rng)
            }
            SelectionScheme::TwoPermutationTournaments => select_two_permutation(population, rng),
        }
    }
}

impl fmt::Display for SelectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SelectionScheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| invalid(format!("unknown selection scheme {s:?}")))
    }
}

pub fn select_fair(population: &[Individual]) -> Vec<&Individual> {
    population.iter().collect()
}

pub fn select_uniform<'a>(
    population: &'a [Individual],
    rng: &mut RandomSource,
) -> Result<Vec<&'a Individual>> {
    let n = population.len();
    if n == 0 {
        return Err(Error::Empty("population to select from"));
    }
    Ok((0..n).map(|_| &population[rng.below(n)]).collect())
}

/// Lower rank wins; then larger crowding distance; then a fair coin.
pub fn binary_tournament<'a>(
    a: &'a Individual,
    b: &'a Individual,
    rng: &mut RandomSource,
) -> Result<&'a Individual> {
    let (ra, ca) = a.rank.zip(a.crowding).ok_or(Error::UnsetRankOrCrowding)?;
    let (rb, cb) = b.rank.zip(b.crowding).ok_or(Error::UnsetRankOrCrowding)?;
    let winner = match ra.cmp(&rb).then_with(|| cb.cmp(&ca)) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if rng.coin() {
                a
            } else {
                b
            }
        }
    };
    Ok(winner)
}

pub fn select_independent_tournaments<'a>(
    population: &'a [Individual],
    rng: &mut RandomSource,
) -> Result<Vec<&'a Individual>> {
    let n = population.len();
    if n < 2 {
        return Err(invalid(
            "independent tournaments need at least 2 individuals",
        ));
    }
    (0..n)
        .map(|_| {
            let i = rng.below(n);
            let mut j = rng.below(n - 1);
            if j >= i {
                j += 1;
            }
            binary_tournament(&population[i], &population[j], rng)
        })
        .collect()
}

pub fn select_two_permutation<'a>(
    population: &'a [Individual],
    rng: &mut RandomSource,
) -> Result<Vec<&'a Individual>> {
    let n = population.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "two-permutation tournaments need an even population of at least 2, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..2 {
        perm.shuffle(rng);
        for pair in perm.chunks_exact(2) {
            out.push(binary_tournament(
                &population[pair[0]],
                &population[pair[1]],
                rng,
            )?);
        }
    }
    Ok(out)
}

/// Mutation operator choice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationOperator {
    /// Flip one uniformly chosen bit.
    OneBitFlip,
    /// Flip every bit independently with probability `1/n`.
    BitwiseStandard,
    /// Heavy-tailed (fast) mutation with power-law exponent `beta > 1`.
    HeavyTailed { beta: f64 },
}

impl MutationOperator {
    pub const DEFAULT_BETA: f64 = 1.5;

    pub fn name(&self) -> &'static str {
        match self {
            MutationOperator::OneBitFlip => "one-bit",
            MutationOperator::BitwiseStandard => "bitwise",
            MutationOperator::HeavyTailed { .. } => "heavy-tailed",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            MutationOperator::HeavyTailed { beta } => Some(beta),
            _ => None,
        }
    }

    /// Parses `one-bit`, `bitwise` or `heavy-tailed` (with `beta`).
    pub fn parse(name: &str, beta: f64) -> Result<Self> {
        let op = match name {
            "one-bit" => MutationOperator::OneBitFlip,
            "bitwise" => MutationOperator::BitwiseStandard,
            "heavy-tailed" => MutationOperator::HeavyTailed { beta },
            other => return Err(invalid(format!("unknown mutation operator {other:?}"))),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        if let MutationOperator::HeavyTailed { beta } = *self {
            if beta.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) || !beta.is_finite() {
                return Err(invalid(format!(
                    "heavy-tailed exponent must exceed 1, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Binds the operator to a problem size, precomputing any tables.
    pub fn prepare(&self, n: usize) -> Result<Mutator> {
        self.validate()?;
        Ok(match *self {
            MutationOperator::OneBitFlip => Mutator::OneBitFlip,
            MutationOperator::BitwiseStandard => Mutator::Bitwise,
            MutationOperator::HeavyTailed { beta } => {
                Mutator::HeavyTailed(HeavyTailedDistribution::new(n, beta)?)
            }
        })
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A mutation operator ready to apply to strings of one length.
#[derive(Clone, Debug)]
pub enum Mutator {
    OneBitFlip,
    Bitwise,
    HeavyTailed(HeavyTailedDistribution),
}

impl Mutator {
    pub fn apply(&self, x: &BitString, rng: &mut RandomSource) -> BitString {
        match self {
            Mutator::OneBitFlip => mutate_one_bit(x, rng),
            Mutator::Bitwise => mutate_bitwise(x, rng),
            Mutator::HeavyTailed(dist) => mutate_heavy_tailed(x, dist, rng),
        }
    }
}

pub fn mutate_one_bit(x: &BitString, rng: &mut RandomSource) -> BitString {
    let mut y = x.clone();
    y.toggle(rng.below(x.len()));
    y
}

/// Flips each bit independently with probability `rate`.
pub fn mutate_with_rate(x: &BitString, rate: f64, rng: &mut RandomSource) -> BitString {
    let mut y = x.clone();
    for i in 0..x.len() {
        if rng.chance(rate) {
            y.toggle(i);
        }
    }
    y
}

pub fn mutate_bitwise(x: &BitString, rng: &mut RandomSource) -> BitString {
    mutate_with_rate(x, 1.0 / x.len() as f64, rng)
}

/// Power-law distribution of mutation strengths on `1..=floor(n/2)`:
/// `Pr[alpha] = alpha^-beta / C` with `C = sum_{i=1}^{floor(n/2)} i^-beta`.
#[derive(Clone, Debug)]
pub struct HeavyTailedDistribution {
    n: usize,
    beta: f64,
    normalizer: f64,
    cumulative: Vec<f64>,
}

impl HeavyTailedDistribution {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!(
                "heavy-tailed mutation needs n >= 2, got {n}"
            )));
        }
        if beta.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) || !beta.is_finite() {
            return Err(invalid(format!(
                "heavy-tailed exponent must exceed 1, got {beta}"
            )));
        }
        let cutoff = n / 2;
        let weights: Vec<f64> = (1..=cutoff).map(|i| (i as f64).powf(-beta)).collect();
        let normalizer: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / normalizer;
                acc
            })
            .collect();
        *cumulative.last_mut().expect("cutoff >= 1") = 1.0;
        Ok(HeavyTailedDistribution {
            n,
            beta,
            normalizer,
            cumulative,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cutoff(&self) -> usize {
        self.cumulative.len()
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `Pr[alpha]`, zero outside the support.
    pub fn probability(&self, alpha: usize) -> f64 {
        if alpha == 0 || alpha > self.cutoff() {
            0.0
        } else {
            (alpha as f64).powf(-self.beta) / self.normalizer
        }
    }

    /// Exact probability that one application changes exactly `j` bits:
    /// `sum_alpha Pr[alpha] * C(n, j) (alpha/n)^j (1 - alpha/n)^(n-j)`.
    pub fn hamming_probability(&self, j: usize) -> f64 {
        if j > self.n {
            return 0.0;
        }
        let n = self.n as f64;
        let log_binom = ln_binomial(self.n, j);
        (1..=self.cutoff())
            .map(|alpha| {
                let p = alpha as f64 / n;
                let log_term = log_binom + j as f64 * p.ln() + (self.n - j) as f64 * (-p).ln_1p();
                self.probability(alpha) * log_term.exp()
            })
            .sum()
    }

    /// Samples a mutation strength.
    pub fn sample(&self, rng: &mut RandomSource) -> usize {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.cumulative.partition_point(|&c| c <= u) + 1
    }
}

pub fn sample_alpha(dist: &HeavyTailedDistribution, rng: &mut RandomSource) -> usize {
    dist.sample(rng)
}

/// Draws a fresh strength `alpha`, then flips each bit with probability
/// `alpha / n`.
pub fn mutate_heavy_tailed(
    x: &BitString,
    dist: &HeavyTailedDistribution,
    rng: &mut RandomSource,
) -> BitString {
    let alpha = dist.sample(rng);
    mutate_with_rate(x, alpha as f64 / x.len() as f64, rng)
}

/// Two-offspring uniform crossover: each position of the first child comes
/// from either parent with probability 1/2, the second child takes the
/// other parent's bit.
pub fn uniform_crossover(
    p1: &BitString,
    p2: &BitString,
    rng: &mut RandomSource,
) -> Result<(BitString, BitString)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            found: p2.len(),
        });
    }
    let mut c1 = Vec::with_capacity(p1.words().len());
    let mut c2 = Vec::with_capacity(p1.words().len());
    for (&a, &b) in p1.words().iter().zip(p2.words()) {
        let take_first = rng.next_u64();
        c1.push((a & take_first) | (b & !take_first));
        c2.push((b & take_first) | (a & !take_first));
    }
    Ok((
        BitString::from_words(c1, p1.len()),
        BitString::from_words(c2, p1.len()),
    ))
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ObjectivePair;
    use crate::ranking::CrowdingValue::{Finite, Infinite};

    fn ranked(rank: u32, crowding: crate::ranking::CrowdingValue, tag: u32) -> Individual {
        let mut ind = Individual::with_objectives(BitString::zeros(1), ObjectivePair::new(tag, 0));
        ind.rank = Some(rank);
        ind.crowding = Some(crowding);
        ind
    }

    fn tag(ind: &Individual) -> u32 {
        ind.objectives().f1
    }

    fn population(size: u32) -> Vec<Individual> {
        (0..size).map(|t| ranked(1, Finite(0.0), t)).collect()
    }

    /// |observed - expected| within `sigmas` binomial standard deviations.
    fn within_sigmas(count: usize, trials: usize, p: f64, sigmas: f64) -> bool {
        let mean = trials as f64 * p;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= sigmas * sd
    }

    #[test]
    fn fair_selection_is_identity() {
        let pop = population(3);
        let sel: Vec<_> = select_fair(&pop).into_iter().map(tag).collect();
        assert_eq!(sel, vec![0, 1, 2]);
    }

    #[test]
    fn uniform_selection_single() {
        let pop = population(1);
        let mut rng = RandomSource::new(0);
        for _ in 0..10 {
            assert_eq!(tag(select_uniform(&pop, &mut rng).unwrap()[0]), 0);
        }
    }

    #[test]
    fn uniform_selection_frequencies() {
        let pop = population(4);
        let mut rng = RandomSource::new(11);
        let mut counts = [0usize; 4];
        let mut draws = 0;
        while draws < 100_000 {
            for ind in select_uniform(&pop, &mut rng).unwrap() {
                counts[tag(ind) as usize] += 1;
                draws += 1;
            }
        }
        for c in counts {
            assert!(within_sigmas(c, draws, 0.25, 3.0), "{counts:?}");
        }
    }

    #[test]
    fn uniform_selection_never_selected_fraction() {
        // Pr[never selected] = (1 - 1/N)^N = 0.99^100 ~ 0.36603.
        let n = 100;
        let pop = population(n);
        let mut rng = RandomSource::new(5);
        let trials = 10_000;
        let mut missed = 0usize;
        for _ in 0..trials {
            let sel = select_uniform(&pop, &mut rng).unwrap();
            if !sel.iter().any(|i| tag(i) == 0) {
                missed += 1;
            }
        }
        let p = 0.99f64.powi(100);
        assert!(within_sigmas(missed, trials, p, 3.0), "missed {missed}");
    }

    #[test]
    fn tournament_rules() {
        let mut rng = RandomSource::new(1);
        let a = ranked(1, Finite(0.0), 0);
        let b = ranked(2, Infinite, 1);
        assert_eq!(tag(binary_tournament(&a, &b, &mut rng).unwrap()), 0);
        assert_eq!(tag(binary_tournament(&b, &a, &mut rng).unwrap()), 0);

        let a = ranked(1, Infinite, 0);
        let b = ranked(1, Finite(2.0), 1);
        assert_eq!(tag(binary_tournament(&a, &b, &mut rng).unwrap()), 0);
        assert_eq!(tag(binary_tournament(&b, &a, &mut rng).unwrap()), 0);
    }

    #[test]
    fn tournament_ties_are_fair_coin() {
        let mut rng = RandomSource::new(2);
        let a = ranked(1, Finite(1.0), 0);
        let b = ranked(1, Finite(1.0), 1);
        let trials = 10_000;
        let wins = (0..trials)
            .filter(|_| tag(binary_tournament(&a, &b, &mut rng).unwrap()) == 0)
            .count();
        assert!(within_sigmas(wins, trials, 0.5, 3.0), "wins {wins}");
    }

    #[test]
    fn tournament_rejects_unranked() {
        let a = Individual::with_objectives(BitString::zeros(1), ObjectivePair::new(0, 0));
        let b = ranked(1, Infinite, 1);
        assert!(matches!(
            binary_tournament(&a, &b, &mut RandomSource::new(0)),
            Err(Error::UnsetRankOrCrowding)
        ));
    }

    #[test]
    fn independent_tournaments_with_two() {
        let pop = vec![ranked(1, Infinite, 0), ranked(2, Infinite, 1)];
        let sel = select_independent_tournaments(&pop, &mut RandomSource::new(3)).unwrap();
        assert_eq!(sel.iter().map(|i| tag(i)).collect::<Vec<_>>(), vec![0, 0]);
        assert!(select_independent_tournaments(&pop[..1], &mut RandomSource::new(3)).is_err());
    }

    #[test]
    fn independent_tournaments_participation_rate() {
        // A unique rank-1 individual wins every tournament it is in, so its
        // selection count equals its participation count (rate 2/N).
        let n = 10;
        let mut pop: Vec<_> = (0..n).map(|t| ranked(2, Infinite, t)).collect();
        pop[0] = ranked(1, Finite(0.0), 0);
        let mut rng = RandomSource::new(4);
        let mut wins = 0;
        let rounds = 5_000;
        for _ in 0..rounds {
            wins += select_independent_tournaments(&pop, &mut rng)
                .unwrap()
                .iter()
                .filter(|i| tag(i) == 0)
                .count();
        }
        assert!(
            within_sigmas(wins, rounds * n as usize, 0.2, 3.0),
            "wins {wins}"
        );
    }

    #[test]
    fn two_permutation_structure() {
        let pop: Vec<_> = (0..8)
            .map(|t| ranked(1 + t % 3, Finite(t as f64), t))
            .collect();
        let mut rng = RandomSource::new(6);
        for _ in 0..100 {
            let sel = select_two_permutation(&pop, &mut rng).unwrap();
            assert_eq!(sel.len(), 8);
        }
        // The best individual always wins both of its tournaments.
        let mut pop = population(6);
        pop[2] = ranked(1, Infinite, 2);
        for ind in pop.iter_mut().filter(|i| tag(i) != 2) {
            ind.rank = Some(2);
        }
        for _ in 0..50 {
            let sel = select_two_permutation(&pop, &mut rng).unwrap();
            assert_eq!(sel.iter().filter(|i| tag(i) == 2).count(), 2);
        }
        assert!(select_two_permutation(&population(5), &mut rng).is_err());
    }

    #[test]
    fn two_permutation_selects_best_with_at_least_three_quarters() {
        // Unique infinite-crowding rank-1 individual among equals that also
        // have infinite crowding: each tournament is a coin flip at worst.
        let mut pop: Vec<_> = (0..20).map(|t| ranked(1, Infinite, t)).collect();
        pop[0] = ranked(1, Infinite, 0);
        let mut rng = RandomSource::new(8);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|_| {
                select_two_permutation(&pop, &mut rng)
                    .unwrap()
                    .iter()
                    .any(|i| tag(i) == 0)
            })
            .count();
        assert!(within_sigmas(hits, trials, 0.75, 3.0), "hits {hits}");
    }

    #[test]
    fn one_bit_mutation() {
        let mut rng = RandomSource::new(9);
        let zero = BitString::zeros(1);
        for _ in 0..10 {
            assert_eq!(mutate_one_bit(&zero, &mut rng), BitString::ones(1));
        }
        let x = BitString::with_prefix_ones(8, 3);
        let mut counts = [0usize; 8];
        let trials = 10_000;
        for _ in 0..trials {
            let y = mutate_one_bit(&x, &mut rng);
            assert_eq!(x.hamming_distance(&y), 1);
            let pos = (0..8).find(|&i| x.get(i) != y.get(i)).unwrap();
            counts[pos] += 1;
        }
        for c in counts {
            assert!(within_sigmas(c, trials, 0.125, 3.0), "{counts:?}");
        }
    }

    #[test]
    fn bitwise_mutation_statistics() {
        let n = 20;
        let x = BitString::with_prefix_ones(n, 7);
        let mut rng = RandomSource::new(10);
        let trials = 100_000;
        let mut unchanged = 0;
        let mut total_flips = 0usize;
        for _ in 0..trials {
            let y = mutate_bitwise(&x, &mut rng);
            assert_eq!(y.len(), n);
            let h = x.hamming_distance(&y);
            unchanged += usize::from(h == 0);
            total_flips += h;
        }
        // (1 - 1/20)^20 = 0.358486
        assert!(within_sigmas(unchanged, trials, 0.95f64.powi(20), 3.0));
        // Hamming distance ~ Bin(20, 1/20): mean 1, variance 0.95.
        let mean = total_flips as f64 / trials as f64;
        assert!(
            (mean - 1.0).abs() <= 3.0 * (0.95f64 / trials as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn bitwise_specific_two_bit_jump() {
        // Pr[flip exactly bits {0,1}] = (1/8)^2 (7/8)^6 = 0.0070466..., >= 1/(e 8^2) = 0.0057483.
        let p = (1.0f64 / 8.0).powi(2) * (7.0f64 / 8.0).powi(6);
        assert!(p >= 1.0 / (std::f64::consts::E * 64.0));
        let x = BitString::with_prefix_ones(8, 2);
        let target = BitString::zeros(8);
        let mut rng = RandomSource::new(12);
        let trials = 1_000_000;
        let hits = (0..trials)
            .filter(|_| mutate_bitwise(&x, &mut rng) == target)
            .count();
        assert!(within_sigmas(hits, trials, p, 3.0), "hits {hits}");
    }

    #[test]
    fn heavy_tailed_table_n4_beta2() {
        let d = HeavyTailedDistribution::new(4, 2.0).unwrap();
        assert_eq!(d.cutoff(), 2);
        assert!((d.normalizer() - 1.25).abs() < 1e-15);
        assert!((d.probability(1) - 0.8).abs() < 1e-15);
        assert!((d.probability(2) - 0.2).abs() < 1e-15);
        assert_eq!(d.probability(3), 0.0);
    }

    #[test]
    fn heavy_tailed_rejects_bad_parameters() {
        assert!(HeavyTailedDistribution::new(10, 1.0).is_err());
        assert!(HeavyTailedDistribution::new(10, f64::NAN).is_err());
        assert!(HeavyTailedDistribution::new(1, 1.5).is_err());
        assert!(MutationOperator::parse("heavy-tailed", 0.5).is_err());
        assert!(MutationOperator::parse("gaussian", 1.5).is_err());
    }

    #[test]
    fn heavy_tailed_odd_n_uses_floor() {
        let d = HeavyTailedDistribution::new(7, 1.5).unwrap();
        assert_eq!(d.cutoff(), 3);
        let mut rng = RandomSource::new(13);
        for _ in 0..10_000 {
            assert!((1..=3).contains(&d.sample(&mut rng)));
        }
    }

    #[test]
    fn heavy_tailed_probabilities_normalized() {
        for (n, beta) in [(4, 2.0), (20, 1.5), (30, 1.5), (101, 1.1), (1000, 3.0)] {
            let d = HeavyTailedDistribution::new(n, beta).unwrap();
            let total: f64 = (1..=d.cutoff()).map(|a| d.probability(a)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(d.normalizer() <= beta / (beta - 1.0));
            let h: f64 = (0..=n).map(|j| d.hamming_probability(j)).sum();
            assert!((h - 1.0).abs() < 1e-9, "{n} {beta} {h}");
        }
    }

    #[test]
    fn uniform_crossover_properties() {
        let mut rng = RandomSource::new(14);
        let x: BitString = "0110100111".parse().unwrap();
        let (a, b) = uniform_crossover(&x, &x, &mut rng).unwrap();
        assert_eq!((a, b), (x.clone(), x.clone()));

        let y: BitString = "1100011010".parse().unwrap();
        for _ in 0..100 {
            let (a, b) = uniform_crossover(&x, &y, &mut rng).unwrap();
            for i in 0..x.len() {
                let mut got = [a.get(i), b.get(i)];
                let mut want = [x.get(i), y.get(i)];
                got.sort();
                want.sort();
                assert_eq!(got, want);
            }
            assert_eq!(
                a.ones_count() + b.ones_count(),
                x.ones_count() + y.ones_count()
            );
        }
        assert!(uniform_crossover(&x, &BitString::zeros(3), &mut rng).is_err());
    }

    #[test]
    fn uniform_crossover_per_position_rate() {
        let p1 = BitString::ones(70);
        let p2 = BitString::zeros(70);
        let mut rng = RandomSource::new(15);
        let trials = 10_000;
        let mut from_first = [0usize; 70];
        for _ in 0..trials {
            let (c1, _) = uniform_crossover(&p1, &p2, &mut rng).unwrap();
            for (i, slot) in from_first.iter_mut().enumerate() {
                *slot += usize::from(c1.get(i));
            }
        }
        for c in from_first {
            assert!(within_sigmas(c, trials, 0.5, 4.0));
        }
    }

    #[test]
    fn selection_names_round_trip() {
        for s in SelectionScheme::ALL {
            assert_eq!(s.name().parse::<SelectionScheme>().unwrap(), s);
        }
    }
}
