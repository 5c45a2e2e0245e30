//! NSGA-II and GSEMO on the OneJumpZeroJump benchmark.
//!
//! The crate provides the benchmark and its exact Pareto front, the
//! NSGA-II survivor selection (non-dominated sorting and crowding
//! distance), the four parent-selection schemes, bit-wise, one-bit and
//! heavy-tailed mutation, uniform crossover, and an experiment harness that
//! measures the number of fitness evaluations until the parent population
//! covers the whole front.

pub mod algorithms;
pub mod error;
pub mod genome;
pub mod harness;
pub mod objectives;
pub mod operators;
pub mod ranking;

pub use algorithms::{
    gsemo_run, nsga2_run, AlgorithmConfig, AlgorithmKind, InitMode, Instrumentation, RunRecord,
};
pub use error::{Error, Result};
pub use genome::{random_bitstring, BitString, Individual, RandomSource};
pub use objectives::{strictly_dominates, FrontSpec, ObjectivePair, OjzjProblem, Stage};
pub use operators::{HeavyTailedDistribution, MutationOperator, SelectionScheme};
pub use ranking::{non_dominated_sort, CrowdingValue, RankedPopulation};
