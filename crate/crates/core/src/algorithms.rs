//! The NSGA-II generation loop, the GSEMO baseline, evaluation counting and
//! run instrumentation.
//!
//! Coverage of the Pareto front is checked on the parent population: once
//! after initialization and once after every survival selection (for GSEMO,
//! on the archive after every accepted offspring). Offspring alone never end
//! a run.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::genome::{random_bitstring, Individual, RandomSource};
use crate::objectives::{strictly_dominates, weakly_dominates, FrontSpec, OjzjProblem, Stage};
use crate::operators::{uniform_crossover, MutationOperator, Mutator, SelectionScheme};
use crate::ranking::{rank_and_crowd, RankedPopulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Nsga2,
    Gsemo,
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Nsga2 => "nsga2",
            AlgorithmKind::Gsemo => "gsemo",
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nsga2" => Ok(AlgorithmKind::Nsga2),
            "gsemo" => Ok(AlgorithmKind::Gsemo),
            other => Err(invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// How the initial individuals are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// Uniformly random strings.
    #[default]
    Uniform,
    /// Uniformly random strings, resampled until they lie in the inner
    /// Pareto set. Used to exercise the one-bit-flip failure mode.
    InnerParetoSet,
}

impl InitMode {
    pub fn name(&self) -> &'static str {
        match self {
            InitMode::Uniform => "uniform",
            InitMode::InnerParetoSet => "inner-pareto-set",
        }
    }
}

impl std::str::FromStr for InitMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InitMode::Uniform),
            "inner-pareto-set" => Ok(InitMode::InnerParetoSet),
            other => Err(invalid(format!("unknown initialization {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instrumentation {
    /// Count rank-1 objective values lost during survival selection and
    /// objective values with more than four positive-crowding copies. Only
    /// active when `N >= 4(n - 2k + 3)`.
    pub assert_lemma1: bool,
    /// Record the evaluation counts at which each stage ends.
    pub record_stages: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub problem: OjzjProblem,
    pub algorithm: AlgorithmKind,
    /// Parent population size `N`; ignored by GSEMO.
    pub population_size: usize,
    /// Ignored by GSEMO.
    pub selection: SelectionScheme,
    pub mutation: MutationOperator,
    /// Probability of uniform crossover per parent pair; 0 disables the
    /// crossover pipeline.
    pub crossover_probability: f64,
    pub max_evaluations: u64,
    pub init: InitMode,
    pub instrumentation: Instrumentation,
}

/// Default evaluation cap `1000 * N * n^k`, saturating.
///
/// GSEMO has no population size; callers pass `n - 2k + 3` there.
pub fn default_max_evaluations(problem: &OjzjProblem, population_size: usize) -> u64 {
    let cap = 1000.0 * population_size as f64 * (problem.n() as f64).powi(problem.k() as i32);
    if cap >= u64::MAX as f64 {
        u64::MAX
    } else {
        cap as u64
    }
}

impl AlgorithmConfig {
    /// NSGA-II with bit-wise mutation-only variation and stage recording.
    pub fn nsga2(
        problem: OjzjProblem,
        population_size: usize,
        selection: SelectionScheme,
        mutation: MutationOperator,
    ) -> Self {
        AlgorithmConfig {
            problem,
            algorithm: AlgorithmKind::Nsga2,
            population_size,
            selection,
            mutation,
            crossover_probability: 0.0,
            max_evaluations: default_max_evaluations(&problem, population_size),
            init: InitMode::Uniform,
            instrumentation: Instrumentation {
                assert_lemma1: false,
                record_stages: true,
            },
        }
    }

    pub fn gsemo(problem: OjzjProblem, mutation: MutationOperator) -> Self {
        AlgorithmConfig {
            problem,
            algorithm: AlgorithmKind::Gsemo,
            population_size: 1,
            selection: SelectionScheme::Fair,
            mutation,
            crossover_probability: 0.0,
            max_evaluations: default_max_evaluations(&problem, problem.front_size()),
            init: InitMode::Uniform,
            instrumentation: Instrumentation {
                assert_lemma1: false,
                record_stages: true,
            },
        }
    }

    pub fn with_crossover(mut self, probability: f64) -> Self {
        self.crossover_probability = probability;
        self
    }

    pub fn with_max_evaluations(mut self, cap: u64) -> Self {
        self.max_evaluations = cap;
        self
    }

    pub fn with_lemma1_checks(mut self) -> Self {
        self.instrumentation.assert_lemma1 = true;
        self
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init = init;
        self
    }

    /// Whether the population is large enough for rank-1 value survival
    /// to be guaranteed.
    pub fn lemma1_applies(&self) -> bool {
        self.algorithm == AlgorithmKind::Nsga2
            && self.population_size >= 4 * self.problem.front_size()
    }

    pub fn validate(&self) -> Result<()> {
        self.mutation.validate()?;
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(invalid(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover_probability
            )));
        }
        if self.max_evaluations == 0 {
            return Err(invalid("evaluation cap must be positive"));
        }
        match self.algorithm {
            AlgorithmKind::Gsemo => {
                if self.crossover_probability > 0.0 {
                    return Err(invalid("crossover is only supported for NSGA-II"));
                }
            }
            AlgorithmKind::Nsga2 => {
                let n = self.population_size;
                if n == 0 {
                    return Err(invalid("population size must be positive"));
                }
                let needs_even = self.selection == SelectionScheme::TwoPermutationTournaments
                    || self.crossover_probability > 0.0;
                if needs_even && !n.is_multiple_of(2) {
                    return Err(invalid(format!(
                        "population size {n} must be even for two-permutation selection or crossover"
                    )));
                }
                if self.selection == SelectionScheme::IndependentTournaments && n < 2 {
                    return Err(invalid("tournament selection needs N >= 2"));
                }
                if (self.max_evaluations as u128) < n as u128 {
                    return Err(invalid(format!(
                        "evaluation cap {} is below the population size {n}",
                        self.max_evaluations
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Trace of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Evaluations spent when the front was first covered; `None` when the
    /// cap was reached first.
    pub evaluations_to_cover: Option<u64>,
    /// Total evaluations spent.
    pub evaluations: u64,
    pub stage1_end: Option<u64>,
    pub stage2_end: Option<u64>,
    pub stage3_end: Option<u64>,
    /// NSGA-II generations, or GSEMO iterations.
    pub generations: u64,
    pub lemma1_violations: u64,
    /// Survival selections where some rank-1 objective value had more than
    /// four individuals with positive crowding distance.
    pub crowding_violations: u64,
    /// Coverage checks that found an earlier stage than one already seen.
    pub stage_regressions: u64,
    pub covered: bool,
}

/// Snapshot passed to run observers after each coverage check.
#[derive(Debug)]
pub struct GenerationView<'a> {
    pub generation: u64,
    pub evaluations: u64,
    pub stage: Stage,
    pub coverage: usize,
    pub population: &'a [Individual],
}

/// Objective values of rank 1 in `previous_combined` that no member of
/// `next_parents` holds.
pub fn check_lemma1(previous_combined: &RankedPopulation, next_parents: &[Individual]) -> usize {
    let kept: HashSet<_> = next_parents.iter().map(|i| i.objectives()).collect();
    previous_combined
        .rank1_values()
        .into_iter()
        .filter(|v| !kept.contains(v))
        .count()
}

fn check_lemma1_mask(ranked: &RankedPopulation, mask: &[bool]) -> usize {
    let kept: HashSet<_> = ranked
        .individuals()
        .iter()
        .zip(mask)
        .filter(|(_, &k)| k)
        .map(|(ind, _)| ind.objectives())
        .collect();
    ranked
        .rank1_values()
        .into_iter()
        .filter(|v| !kept.contains(v))
        .count()
}

struct StageTracker {
    enabled: bool,
    furthest: Stage,
    ends: [Option<u64>; 3],
    regressions: u64,
}

impl StageTracker {
    fn new(enabled: bool) -> Self {
        StageTracker {
            enabled,
            furthest: Stage::Stage1,
            ends: [None; 3],
            regressions: 0,
        }
    }

    fn observe(&mut self, stage: Stage, evaluations: u64) {
        if !self.enabled {
            return;
        }
        if stage < self.furthest {
            self.regressions += 1;
        } else if stage > self.furthest {
            for end in &mut self.ends[self.furthest as usize..stage as usize] {
                end.get_or_insert(evaluations);
            }
            self.furthest = stage;
        }
    }
}

struct RunState {
    problem: OjzjProblem,
    front: FrontSpec,
    stages: StageTracker,
    record: RunRecord,
}

impl RunState {
    fn new(config: &AlgorithmConfig, seed: u64) -> Self {
        RunState {
            problem: config.problem,
            front: config.problem.front_spec(),
            stages: StageTracker::new(config.instrumentation.record_stages),
            record: RunRecord {
                seed,
                evaluations_to_cover: None,
                evaluations: 0,
                stage1_end: None,
                stage2_end: None,
                stage3_end: None,
                generations: 0,
                lemma1_violations: 0,
                crowding_violations: 0,
                stage_regressions: 0,
                covered: false,
            },
        }
    }

    /// Classifies `population`, records stage transitions and coverage, and
    /// notifies the observer. Returns whether the front is covered.
    fn check(
        &mut self,
        population: &[Individual],
        observer: &mut impl FnMut(&GenerationView<'_>),
    ) -> bool {
        let evaluations = self.record.evaluations;
        let stage = self.problem.classify_stage(&self.front, population);
        let coverage = self.front.coverage_count(population);
        debug_assert_eq!(stage == Stage::Done, coverage == self.front.len());
        self.stages.observe(stage, evaluations);
        if coverage == self.front.len() && !self.record.covered {
            self.record.covered = true;
            self.record.evaluations_to_cover = Some(evaluations);
        }
        observer(&GenerationView {
            generation: self.record.generations,
            evaluations,
            stage,
            coverage,
            population,
        });
        self.record.covered
    }

    fn finish(mut self) -> RunRecord {
        let [s1, s2, s3] = self.stages.ends;
        self.record.stage1_end = s1;
        self.record.stage2_end = s2;
        self.record.stage3_end = s3;
        self.record.stage_regressions = self.stages.regressions;
        self.record
    }
}

fn initial_individual(
    problem: &OjzjProblem,
    init: InitMode,
    rng: &mut RandomSource,
) -> Result<Individual> {
    loop {
        let x = random_bitstring(problem.n(), rng)?;
        if init == InitMode::Uniform || problem.in_inner_pareto_set(&x)? {
            return Individual::new(x, problem);
        }
    }
}

/// Produces one offspring per selected parent.
///
/// Without crossover every parent is mutated once. With crossover the
/// parents are taken in consecutive pairs; each pair is recombined with
/// the configured probability and both children mutated, otherwise both
/// parents are mutated directly.
fn variation(
    selected: &[&Individual],
    config: &AlgorithmConfig,
    mutator: &Mutator,
    rng: &mut RandomSource,
) -> Result<Vec<Individual>> {
    let problem = &config.problem;
    let mut offspring = Vec::with_capacity(selected.len());
    if config.crossover_probability > 0.0 {
        for pair in selected.chunks_exact(2) {
            let (a, b) = (pair[0].genome(), pair[1].genome());
            if rng.chance(config.crossover_probability) {
                let (c1, c2) = uniform_crossover(a, b, rng)?;
                offspring.push(Individual::new(mutator.apply(&c1, rng), problem)?);
                offspring.push(Individual::new(mutator.apply(&c2, rng), problem)?);
            } else {
                offspring.push(Individual::new(mutator.apply(a, rng), problem)?);
                offspring.push(Individual::new(mutator.apply(b, rng), problem)?);
            }
        }
    } else {
        for parent in selected {
            offspring.push(Individual::new(
                mutator.apply(parent.genome(), rng),
                problem,
            )?);
        }
    }
    Ok(offspring)
}

pub fn nsga2_run(config: &AlgorithmConfig, rng: &mut RandomSource) -> Result<RunRecord> {
    nsga2_run_observed(config, rng, |_| {})
}

/// Runs NSGA-II until the parent population covers the Pareto front or the
/// next generation would exceed the evaluation cap. `observer` sees every
/// parent population, starting with the initial one.
pub fn nsga2_run_observed(
    config: &AlgorithmConfig,
    rng: &mut RandomSource,
    mut observer: impl FnMut(&GenerationView<'_>),
) -> Result<RunRecord> {
    config.validate()?;
    if config.algorithm != AlgorithmKind::Nsga2 {
        return Err(invalid("nsga2_run called with a non-NSGA-II configuration"));
    }
    let problem = config.problem;
    let pop_size = config.population_size;
    let mutator = config.mutation.prepare(problem.n())?;
    let lemma1 = config.instrumentation.assert_lemma1 && config.lemma1_applies();
    if config.instrumentation.assert_lemma1 && !lemma1 {
        log::warn!(
            "rank-1 survival checks disabled: N = {pop_size} < 4(n - 2k + 3) = {}",
            4 * problem.front_size()
        );
    }

    let mut state = RunState::new(config, rng.seed());
    let initial = (0..pop_size)
        .map(|_| initial_individual(&problem, config.init, rng))
        .collect::<Result<Vec<_>>>()?;
    state.record.evaluations = pop_size as u64;
    // Generation-0 tournaments need ranks and crowding distances.
    let mut parents = rank_and_crowd(initial)?.into_individuals();
    let mut covered = state.check(&parents, &mut observer);

    let step = pop_size as u64;
    while !covered && state.record.evaluations + step <= config.max_evaluations {
        let selected = config.selection.select(&parents, rng)?;
        let offspring = variation(&selected, config, &mutator, rng)?;
        state.record.evaluations += step;

        let mut combined = parents;
        combined.extend(offspring);
        let ranked = rank_and_crowd(combined)?;
        if lemma1 && ranked.positive_crowding_multiplicity() > 4 {
            state.record.crowding_violations += 1;
        }
        let mask = ranked.survivor_mask(pop_size, rng)?;
        if lemma1 {
            state.record.lemma1_violations += check_lemma1_mask(&ranked, &mask) as u64;
        }
        parents = ranked.take_survivors(&mask);
        debug_assert_eq!(parents.len(), pop_size);
        state.record.generations += 1;
        covered = state.check(&parents, &mut observer);
    }
    Ok(state.finish())
}

pub fn gsemo_run(config: &AlgorithmConfig, rng: &mut RandomSource) -> Result<RunRecord> {
    gsemo_run_observed(config, rng, |_| {})
}

/// Runs GSEMO. The archive keeps one individual per non-dominated objective
/// value: an offspring enters only if no member strictly dominates it or
/// shares its value, and it evicts every member it weakly dominates.
/// `observer` sees the initial archive and every archive change.
pub fn gsemo_run_observed(
    config: &AlgorithmConfig,
    rng: &mut RandomSource,
    mut observer: impl FnMut(&GenerationView<'_>),
) -> Result<RunRecord> {
    config.validate()?;
    if config.algorithm != AlgorithmKind::Gsemo {
        return Err(invalid("gsemo_run called with a non-GSEMO configuration"));
    }
    let problem = config.problem;
    let mutator = config.mutation.prepare(problem.n())?;

    let mut state = RunState::new(config, rng.seed());
    let mut archive = vec![initial_individual(&problem, config.init, rng)?];
    state.record.evaluations = 1;
    let mut covered = state.check(&archive, &mut observer);

    while !covered && state.record.evaluations < config.max_evaluations {
        let parent = &archive[rng.below(archive.len())];
        let child = Individual::new(mutator.apply(parent.genome(), rng), &problem)?;
        state.record.evaluations += 1;
        state.record.generations += 1;

        let v = child.objectives();
        let rejected = archive
            .iter()
            .any(|a| a.objectives() == v || strictly_dominates(a.objectives(), v));
        if rejected {
            continue;
        }
        archive.retain(|a| !weakly_dominates(v, a.objectives()));
        archive.push(child);
        covered = state.check(&archive, &mut observer);
    }
    Ok(state.finish())
}

/// Dispatches on `config.algorithm`.
pub fn run(config: &AlgorithmConfig, rng: &mut RandomSource) -> Result<RunRecord> {
    run_observed(config, rng, |_| {})
}

pub fn run_observed(
    config: &AlgorithmConfig,
    rng: &mut RandomSource,
    observer: impl FnMut(&GenerationView<'_>),
) -> Result<RunRecord> {
    match config.algorithm {
        AlgorithmKind::Nsga2 => nsga2_run_observed(config, rng, observer),
        AlgorithmKind::Gsemo => gsemo_run_observed(config, rng, observer),
    }
}
