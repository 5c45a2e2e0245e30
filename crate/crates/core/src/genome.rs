//! Bit-string genomes, the seeded random source and the [`Individual`]
//! container shared by every algorithm.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objectives::{ObjectivePair, OjzjProblem};
use crate::ranking::CrowdingValue;

const WORD_BITS: usize = 64;

/// A fixed-length binary genome.
///
/// Bits are packed little-endian into `u64` words: index `i` lives in word
/// `i / 64` at bit `i % 64`. Index 0 is the leftmost character of the
/// textual rendering. Unused high bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
            len,
        };
        s.clear_tail();
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        s
    }

    /// A string of length `len` whose first `ones` positions are set.
    pub fn with_prefix_ones(len: usize, ones: usize) -> Self {
        assert!(ones <= len);
        let mut s = BitString::zeros(len);
        for i in 0..ones {
            s.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range");
        self.words[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1
    }

    pub fn ones_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn zeros_count(&self) -> usize {
        self.len - self.ones_count()
    }

    pub fn is_all_zeros(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_all_ones(&self) -> bool {
        self.ones_count() == self.len
    }

    /// Returns a copy of `self` with the bits at `positions` inverted.
    ///
    /// A position listed twice is flipped twice.
    pub fn flip_bits(&self, positions: &[usize]) -> Result<BitString> {
        let mut out = self.clone();
        for &p in positions {
            if p >= self.len {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    len: self.len,
                });
            }
            out.toggle(p);
        }
        Ok(out)
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Bitwise XOR of two equal-length strings.
    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len, other.len);
        BitString {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }

    pub(crate) fn toggle(&mut self, index: usize) {
        self.words[index / WORD_BITS] ^= 1 << (index % WORD_BITS);
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(WORD_BITS));
        let mut s = BitString { words, len };
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidConfig(format!(
                    "bit string contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(&bits))
    }
}

/// Draws a uniformly random bit string of length `n`.
pub fn random_bitstring(n: usize, rng: &mut RandomSource) -> Result<BitString> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "genome length must be positive".into(),
        ));
    }
    let words = (0..n.div_ceil(WORD_BITS)).map(|_| rng.next_u64()).collect();
    Ok(BitString::from_words(words, n))
}

/// Seeded pseudo-random generator used by every stochastic operation.
///
/// Backed by ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded through
/// `SeedableRng::seed_from_u64`. Equal seeds give identical streams on every
/// platform.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The source for repetition `repetition` of grid point `grid_id`.
    pub fn for_run(master_seed: u64, grid_id: u64, repetition: u64) -> Self {
        RandomSource::new(derive_seed(master_seed, grid_id, repetition))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform index in `0..bound`.
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        self.random_range(0..bound)
    }

    /// `true` with probability `p`.
    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.random::<f64>() < p
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u32() & 1 == 1
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed, grid index and repetition index into a run seed.
///
/// `derive_seed(m, g, r) = s(s(s(m) ^ g) ^ r)` where `s` is the SplitMix64
/// step (golden-ratio increment followed by its finalizer).
pub fn derive_seed(master_seed: u64, grid_id: u64, repetition: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ grid_id) ^ repetition)
}

/// A genome together with its cached objective value and, during and after
/// survival selection, its rank and crowding distance.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genome: BitString,
    objectives: ObjectivePair,
    pub rank: Option<u32>,
    pub crowding: Option<CrowdingValue>,
}

impl Individual {
    /// Evaluates `genome` on `problem` and wraps it.
    pub fn new(genome: BitString, problem: &OjzjProblem) -> Result<Self> {
        let objectives = problem.evaluate(&genome)?;
        Ok(Individual {
            genome,
            objectives,
            rank: None,
            crowding: None,
        })
    }

    /// Builds an individual with a given objective value, bypassing
    /// evaluation. Used for ranking arbitrary objective vectors.
    pub fn with_objectives(genome: BitString, objectives: ObjectivePair) -> Self {
        Individual {
            genome,
            objectives,
            rank: None,
            crowding: None,
        }
    }

    pub fn genome(&self) -> &BitString {
        &self.genome
    }

    pub fn objectives(&self) -> ObjectivePair {
        self.objectives
    }

    pub fn clear_ranking(&mut self) {
        self.rank = None;
        self.crowding = None;
    }
}
