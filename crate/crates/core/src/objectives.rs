//! The OneJumpZeroJump bi-objective benchmark and its Pareto front.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::genome::{BitString, Individual};

/// A bi-objective value `(f1, f2)`; both objectives are maximized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub f1: u32,
    pub f2: u32,
}

impl ObjectivePair {
    pub const fn new(f1: u32, f2: u32) -> Self {
        ObjectivePair { f1, f2 }
    }
}

impl fmt::Display for ObjectivePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f1, self.f2)
    }
}

/// `u` strictly dominates `v`: no worse in both objectives, better in one.
#[inline]
pub fn strictly_dominates(u: ObjectivePair, v: ObjectivePair) -> bool {
    u.f1 >= v.f1 && u.f2 >= v.f2 && (u.f1 > v.f1 || u.f2 > v.f2)
}

/// `u` weakly dominates `v`: no worse in both objectives.
#[inline]
pub fn weakly_dominates(u: ObjectivePair, v: ObjectivePair) -> bool {
    u.f1 >= v.f1 && u.f2 >= v.f2
}

/// OneJumpZeroJump with problem size `n` and jump size `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OjzjProblem {
    n: usize,
    k: usize,
}

impl OjzjProblem {
    /// Accepts `1 <= k <= n/4`. `k = 1` is the OneMinMax degenerate case and
    /// is allowed with a warning.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("problem size n must be positive"));
        }
        if k == 0 {
            return Err(invalid("jump size k must be at least 1"));
        }
        if 4 * k > n {
            return Err(invalid(format!("jump size k={k} exceeds n/4 for n={n}")));
        }
        if k == 1 {
            log::warn!("k = 1 reduces OneJumpZeroJump to OneMinMax");
        }
        Ok(OjzjProblem { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of the Pareto front, `n - 2k + 3`.
    pub fn front_size(&self) -> usize {
        self.n - 2 * self.k + 3
    }

    /// Objective value of a string with `ones` one-bits.
    #[inline]
    pub fn evaluate_ones(&self, ones: usize) -> ObjectivePair {
        let (n, k) = (self.n, self.k);
        let zeros = n - ones;
        let f1 = if ones <= n - k || ones == n {
            k + ones
        } else {
            n - ones
        };
        let f2 = if zeros <= n - k || zeros == n {
            k + zeros
        } else {
            n - zeros
        };
        ObjectivePair::new(f1 as u32, f2 as u32)
    }

    pub fn evaluate(&self, x: &BitString) -> Result<ObjectivePair> {
        self.check_len(x)?;
        Ok(self.evaluate_ones(x.ones_count()))
    }

    /// Member of the inner Pareto set: `k <= |x|_1 <= n - k`.
    pub fn in_inner_pareto_set(&self, x: &BitString) -> Result<bool> {
        self.check_len(x)?;
        Ok(self.ones_in_inner_set(x.ones_count()))
    }

    /// Member of the outer Pareto set: `x` is `0^n` or `1^n`.
    pub fn in_outer_pareto_set(&self, x: &BitString) -> Result<bool> {
        self.check_len(x)?;
        let ones = x.ones_count();
        Ok(ones == 0 || ones == self.n)
    }

    pub fn in_pareto_set(&self, x: &BitString) -> Result<bool> {
        Ok(self.in_inner_pareto_set(x)? || self.in_outer_pareto_set(x)?)
    }

    #[inline]
    pub(crate) fn ones_in_inner_set(&self, ones: usize) -> bool {
        self.k <= ones && ones <= self.n - self.k
    }

    /// Exact Pareto front with its inner/outer partition.
    pub fn front_spec(&self) -> FrontSpec {
        FrontSpec::new(self)
    }

    /// Current run stage of a (parent) population.
    pub fn classify_stage(&self, front: &FrontSpec, population: &[Individual]) -> Stage {
        let has_inner = population
            .iter()
            .any(|ind| self.ones_in_inner_set(ind.genome().ones_count()));
        if !has_inner {
            return Stage::Stage1;
        }
        let covered = front.covered_mask(population);
        let inner_done = front.inner_slots().all(|i| covered[i]);
        if !inner_done {
            return Stage::Stage2;
        }
        if front.outer_slots().into_iter().all(|i| covered[i]) {
            Stage::Done
        } else {
            Stage::Stage3
        }
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Phase of a run, ordered by progress.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    /// No inner Pareto-set member in the population.
    Stage1,
    /// Some inner front point is still uncovered.
    Stage2,
    /// Inner front covered, an extremal point is missing.
    Stage3,
    /// Whole front covered.
    Done,
}

/// The Pareto front `{(a, 2k+n-a) | a in [2k..n] ∪ {k, n+k}}`, sorted by
/// ascending `f1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontSpec {
    n: usize,
    k: usize,
    points: Vec<ObjectivePair>,
}

impl FrontSpec {
    fn new(problem: &OjzjProblem) -> Self {
        let (n, k) = (problem.n, problem.k);
        let sum = (2 * k + n) as u32;
        let points = std::iter::once(k)
            .chain(2 * k..=n)
            .chain(std::iter::once(n + k))
            .map(|a| ObjectivePair::new(a as u32, sum - a as u32))
            .collect();
        FrontSpec { n, k, points }
    }

    pub fn all_points(&self) -> &[ObjectivePair] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `F*_I`, the points reachable without a jump.
    pub fn inner(&self) -> &[ObjectivePair] {
        &self.points[1..self.points.len() - 1]
    }

    /// `F*_O`, the two extremal points `(k, n+k)` and `(n+k, k)`.
    pub fn outer(&self) -> [ObjectivePair; 2] {
        [self.points[0], self.points[self.points.len() - 1]]
    }

    /// Position of `v` in [`Self::all_points`], if it is on the front.
    #[inline]
    pub fn index_of(&self, v: ObjectivePair) -> Option<usize> {
        let (n, k) = (self.n as u32, self.k as u32);
        if v.f1 + v.f2 != 2 * k + n {
            return None;
        }
        let a = v.f1;
        if a == k {
            Some(0)
        } else if (2 * k..=n).contains(&a) {
            Some((a - 2 * k) as usize + 1)
        } else if a == n + k {
            Some(self.points.len() - 1)
        } else {
            None
        }
    }

    pub fn contains(&self, v: ObjectivePair) -> bool {
        self.index_of(v).is_some()
    }

    /// `mask[i]` is set iff `all_points()[i]` is held by some individual.
    pub fn covered_mask(&self, population: &[Individual]) -> Vec<bool> {
        let mut mask = vec![false; self.points.len()];
        for ind in population {
            if let Some(i) = self.index_of(ind.objectives()) {
                mask[i] = true;
            }
        }
        mask
    }

    /// Number of distinct front points present in `population`.
    pub fn coverage_count(&self, population: &[Individual]) -> usize {
        self.covered_mask(population)
            .into_iter()
            .filter(|&c| c)
            .count()
    }

    pub fn is_covered(&self, population: &[Individual]) -> bool {
        self.coverage_count(population) == self.points.len()
    }

    fn inner_slots(&self) -> std::ops::Range<usize> {
        1..self.points.len() - 1
    }

    fn outer_slots(&self) -> [usize; 2] {
        [0, self.points.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f1: u32, f2: u32) -> ObjectivePair {
        ObjectivePair::new(f1, f2)
    }

    fn prob(n: usize, k: usize) -> OjzjProblem {
        OjzjProblem::new(n, k).unwrap()
    }

    fn ind(problem: &OjzjProblem, ones: usize) -> Individual {
        Individual::new(BitString::with_prefix_ones(problem.n(), ones), problem).unwrap()
    }

    #[test]
    fn configuration_limits() {
        assert!(OjzjProblem::new(8, 2).is_ok());
        assert!(OjzjProblem::new(4, 1).is_ok());
        assert!(OjzjProblem::new(8, 3).is_err());
        assert!(OjzjProblem::new(8, 0).is_err());
        assert!(OjzjProblem::new(0, 1).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let pr = prob(8, 2);
        assert_eq!(pr.evaluate(&BitString::ones(8)).unwrap(), p(10, 2));
        assert_eq!(pr.evaluate(&BitString::zeros(8)).unwrap(), p(2, 10));
        assert_eq!(
            pr.evaluate(&BitString::with_prefix_ones(8, 3)).unwrap(),
            p(5, 7)
        );
        assert_eq!(
            pr.evaluate(&BitString::with_prefix_ones(8, 7)).unwrap(),
            p(1, 3)
        );
    }

    #[test]
    fn evaluate_rejects_length_mismatch() {
        assert!(matches!(
            prob(8, 2).evaluate(&BitString::zeros(7)),
            Err(Error::LengthMismatch {
                expected: 8,
                found: 7
            })
        ));
    }

    #[test]
    fn front_spec_examples() {
        let front = prob(8, 2).front_spec();
        assert_eq!(
            front.all_points(),
            &[
                p(2, 10),
                p(4, 8),
                p(5, 7),
                p(6, 6),
                p(7, 5),
                p(8, 4),
                p(10, 2)
            ]
        );
        assert_eq!(front.outer(), [p(2, 10), p(10, 2)]);
        assert_eq!(front.inner().len(), 5);
        assert_eq!(prob(4, 1).front_spec().len(), 5);
        for pt in front.all_points() {
            assert_eq!(pt.f1 + pt.f2, 12);
        }
        for (i, &pt) in front.all_points().iter().enumerate() {
            assert_eq!(front.index_of(pt), Some(i));
        }
        assert_eq!(front.index_of(p(3, 9)), None);
        assert_eq!(front.index_of(p(5, 5)), None);
    }

    #[test]
    fn dominance_examples() {
        assert!(!strictly_dominates(p(5, 7), p(5, 7)));
        assert!(strictly_dominates(p(6, 6), p(5, 5)));
        assert!(!strictly_dominates(p(6, 4), p(4, 6)));
        assert!(!strictly_dominates(p(4, 6), p(6, 4)));
        assert!(weakly_dominates(p(5, 7), p(5, 7)));
    }

    #[test]
    fn inner_pareto_set_examples() {
        let pr = prob(8, 2);
        assert!(pr
            .in_inner_pareto_set(&BitString::with_prefix_ones(8, 2))
            .unwrap());
        assert!(!pr
            .in_inner_pareto_set(&BitString::with_prefix_ones(8, 1))
            .unwrap());
        assert!(!pr.in_inner_pareto_set(&BitString::ones(8)).unwrap());
        assert!(pr.in_outer_pareto_set(&BitString::ones(8)).unwrap());
    }

    #[test]
    fn classify_stage_examples() {
        let pr = prob(8, 2);
        let front = pr.front_spec();
        // Gap individuals only.
        let gap: Vec<_> = [1, 7, 1].iter().map(|&o| ind(&pr, o)).collect();
        assert_eq!(pr.classify_stage(&front, &gap), Stage::Stage1);

        let partial: Vec<_> = [1, 3].iter().map(|&o| ind(&pr, o)).collect();
        assert_eq!(pr.classify_stage(&front, &partial), Stage::Stage2);

        let inner: Vec<_> = (2..=6).map(|o| ind(&pr, o)).collect();
        assert_eq!(pr.classify_stage(&front, &inner), Stage::Stage3);

        let mut all = inner.clone();
        all.push(ind(&pr, 0));
        all.push(ind(&pr, 8));
        assert_eq!(pr.classify_stage(&front, &all), Stage::Done);
        assert_eq!(front.coverage_count(&all), front.len());

        // Outer points alone, without an inner member, are still stage 1.
        let outer: Vec<_> = [0, 8].iter().map(|&o| ind(&pr, o)).collect();
        assert_eq!(pr.classify_stage(&front, &outer), Stage::Stage1);
    }

    #[test]
    fn coverage_count_examples() {
        let pr = prob(8, 2);
        let front = pr.front_spec();
        assert_eq!(front.coverage_count(&[ind(&pr, 1), ind(&pr, 7)]), 0);
        assert_eq!(front.coverage_count(&[ind(&pr, 0), ind(&pr, 8)]), 2);
        let all: Vec<_> = (0..=8).map(|o| ind(&pr, o)).collect();
        assert_eq!(front.coverage_count(&all), 7);
        assert_eq!(front.coverage_count(&[]), 0);
    }

    #[test]
    fn stage_order_is_progress_order() {
        assert!(Stage::Stage1 < Stage::Stage2);
        assert!(Stage::Stage2 < Stage::Stage3);
        assert!(Stage::Stage3 < Stage::Done);
    }
}
