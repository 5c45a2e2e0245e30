//! Non-dominated sorting, crowding distance and NSGA-II survivor selection.
//!
//! Ranks are computed on the distinct objective values of a population, so
//! individuals with equal objective values always share a rank. Crowding
//! distances are computed once per front before truncation and never
//! updated while individuals are removed.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::genome::{Individual, RandomSource};
use crate::objectives::{strictly_dominates, ObjectivePair};

/// Crowding distance of an individual within its front.
#[derive(Clone, Copy, Debug)]
pub enum CrowdingValue {
    Finite(f64),
    Infinite,
}

impl CrowdingValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, CrowdingValue::Infinite)
    }

    /// Strictly positive, counting `Infinite` as positive.
    pub fn is_positive(&self) -> bool {
        match *self {
            CrowdingValue::Finite(v) => v > 0.0,
            CrowdingValue::Infinite => true,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            CrowdingValue::Finite(v) => v,
            CrowdingValue::Infinite => f64::INFINITY,
        }
    }
}

impl Ord for CrowdingValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use CrowdingValue::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl PartialOrd for CrowdingValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for CrowdingValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CrowdingValue {}

/// A population with ranks assigned.
///
/// `fronts[i]` lists, in ascending index order, the individuals of rank
/// `i + 1`.
#[derive(Clone, Debug)]
pub struct RankedPopulation {
    individuals: Vec<Individual>,
    fronts: Vec<Vec<usize>>,
}

impl RankedPopulation {
    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn fronts(&self) -> &[Vec<usize>] {
        &self.fronts
    }

    pub fn into_individuals(self) -> Vec<Individual> {
        self.individuals
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Distinct objective values held by rank-1 individuals.
    pub fn rank1_values(&self) -> Vec<ObjectivePair> {
        let mut values: Vec<_> = self.fronts[0]
            .iter()
            .map(|&i| self.individuals[i].objectives())
            .collect();
        values.sort_unstable();
        values.dedup();
        values
    }

    /// Sets the crowding distance of every individual, front by front.
    pub fn assign_crowding(&mut self) {
        for front in &self.fronts {
            let objs: Vec<_> = front
                .iter()
                .map(|&i| self.individuals[i].objectives())
                .collect();
            for (&i, c) in front.iter().zip(crowding_of(&objs)) {
                self.individuals[i].crowding = Some(c);
            }
        }
    }

    /// The largest number of rank-1 individuals that share one objective
    /// value and have positive (or infinite) crowding distance.
    ///
    /// Requires crowding distances to be assigned.
    pub fn positive_crowding_multiplicity(&self) -> usize {
        let mut per_value: HashMap<ObjectivePair, usize> = HashMap::new();
        for &i in &self.fronts[0] {
            let ind = &self.individuals[i];
            if ind.crowding.is_some_and(|c| c.is_positive()) {
                *per_value.entry(ind.objectives()).or_default() += 1;
            }
        }
        per_value.into_values().max().unwrap_or(0)
    }

    /// Marks the `n` survivors: every rank below the critical rank, then the
    /// critical rank in descending crowding order with uniformly random
    /// tie-breaking. Requires crowding distances to be assigned.
    pub fn survivor_mask(&self, n: usize, rng: &mut RandomSource) -> Result<Vec<bool>> {
        if self.individuals.len() < n {
            return Err(Error::InvalidConfig(format!(
                "cannot select {n} survivors from {} individuals",
                self.individuals.len()
            )));
        }
        let mut keep = vec![false; self.individuals.len()];
        let mut kept = 0;
        for front in &self.fronts {
            if kept == n {
                break;
            }
            if kept + front.len() <= n {
                for &i in front {
                    keep[i] = true;
                }
                kept += front.len();
                continue;
            }
            // Critical rank.
            let mut candidates = front.clone();
            candidates.shuffle(rng);
            candidates.sort_by(|&a, &b| {
                let ca = self.individuals[a].crowding.expect("crowding assigned");
                let cb = self.individuals[b].crowding.expect("crowding assigned");
                cb.cmp(&ca)
            });
            for &i in &candidates[..n - kept] {
                keep[i] = true;
            }
            kept = n;
        }
        Ok(keep)
    }

    /// Consumes the population, keeping the masked individuals in their
    /// original order.
    pub fn take_survivors(self, mask: &[bool]) -> Vec<Individual> {
        self.individuals
            .into_iter()
            .zip(mask)
            .filter_map(|(ind, &keep)| keep.then_some(ind))
            .collect()
    }
}

/// Assigns ranks by repeated non-dominated peeling of the distinct
/// objective values.
pub fn non_dominated_sort(mut population: Vec<Individual>) -> Result<RankedPopulation> {
    if population.is_empty() {
        return Err(Error::Empty("population to rank"));
    }
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by_key(|&i| population[i].objectives());

    let mut values: Vec<ObjectivePair> = Vec::new();
    let mut value_of = vec![0usize; population.len()];
    for &i in &order {
        let v = population[i].objectives();
        if values.last() != Some(&v) {
            values.push(v);
        }
        value_of[i] = values.len() - 1;
    }

    let value_rank = rank_distinct(&values);
    let num_fronts = value_rank.iter().copied().max().unwrap_or(0) as usize;
    let mut fronts = vec![Vec::new(); num_fronts];
    for (i, ind) in population.iter_mut().enumerate() {
        let r = value_rank[value_of[i]];
        ind.rank = Some(r);
        ind.crowding = None;
        fronts[r as usize - 1].push(i);
    }
    Ok(RankedPopulation {
        individuals: population,
        fronts,
    })
}

/// Ranks of pairwise-distinct objective values (1 = non-dominated).
fn rank_distinct(values: &[ObjectivePair]) -> Vec<u32> {
    let d = values.len();
    let mut dominated_by = vec![0usize; d];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); d];
    for a in 0..d {
        for b in (a + 1)..d {
            if strictly_dominates(values[a], values[b]) {
                dominates[a].push(b);
                dominated_by[b] += 1;
            } else if strictly_dominates(values[b], values[a]) {
                dominates[b].push(a);
                dominated_by[a] += 1;
            }
        }
    }
    let mut rank = vec![0u32; d];
    let mut current: Vec<usize> = (0..d).filter(|&i| dominated_by[i] == 0).collect();
    let mut r = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &a in &current {
            rank[a] = r;
            for &b in &dominates[a] {
                dominated_by[b] -= 1;
                if dominated_by[b] == 0 {
                    next.push(b);
                }
            }
        }
        current = next;
        r += 1;
    }
    rank
}

/// Crowding distances of the members of one front, in input order.
///
/// Ties in an objective are ordered by position in `front`.
pub fn crowding_distances(front: &[Individual]) -> Vec<CrowdingValue> {
    let objs: Vec<_> = front.iter().map(|ind| ind.objectives()).collect();
    crowding_of(&objs)
}

fn crowding_of(objs: &[ObjectivePair]) -> Vec<CrowdingValue> {
    let m = objs.len();
    if m <= 2 {
        return vec![CrowdingValue::Infinite; m];
    }
    let mut dist = vec![0.0f64; m];
    let mut infinite = vec![false; m];
    let mut order: Vec<usize> = (0..m).collect();
    for key in [|v: ObjectivePair| v.f1, |v: ObjectivePair| v.f2] {
        for (pos, i) in order.iter_mut().enumerate() {
            *i = pos;
        }
        // Stable: equal values keep index order.
        order.sort_by_key(|&i| key(objs[i]));
        infinite[order[0]] = true;
        infinite[order[m - 1]] = true;
        let lo = key(objs[order[0]]);
        let hi = key(objs[order[m - 1]]);
        if hi == lo {
            continue;
        }
        let span = f64::from(hi - lo);
        for w in 1..m - 1 {
            let gap = key(objs[order[w + 1]]) - key(objs[order[w - 1]]);
            dist[order[w]] += f64::from(gap) / span;
        }
    }
    dist.into_iter()
        .zip(infinite)
        .map(|(d, inf)| {
            if inf {
                CrowdingValue::Infinite
            } else {
                CrowdingValue::Finite(d)
            }
        })
        .collect()
}

/// Ranks `population` and assigns crowding distances to every front.
pub fn rank_and_crowd(population: Vec<Individual>) -> Result<RankedPopulation> {
    let mut ranked = non_dominated_sort(population)?;
    ranked.assign_crowding();
    Ok(ranked)
}

/// Selects `n` survivors from `combined`; each carries the rank and
/// crowding distance computed on `combined`.
pub fn survivor_selection(
    combined: Vec<Individual>,
    n: usize,
    rng: &mut RandomSource,
) -> Result<Vec<Individual>> {
    if combined.len() < n {
        return Err(Error::InvalidConfig(format!(
            "cannot select {n} survivors from {} individuals",
            combined.len()
        )));
    }
    let ranked = rank_and_crowd(combined)?;
    let mask = ranked.survivor_mask(n, rng)?;
    Ok(ranked.take_survivors(&mask))
}
