//! Experiment grids, repetition management, summary statistics, CSV output
//! and leading-term runtime bounds.
//!
//! Runs are executed in parallel but collected in (grid index, repetition)
//! order, and every run seeds its own [`RandomSource`] from
//! `(master_seed, grid_id, repetition)`, so outputs are byte-identical for a
//! given master seed regardless of scheduling.

use std::f64::consts::E;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{
    default_max_evaluations, run_observed, AlgorithmConfig, AlgorithmKind, RunRecord,
};
use crate::error::{invalid, Error, Result};
use crate::genome::RandomSource;
use crate::objectives::Stage;
use crate::operators::{ln_binomial, HeavyTailedDistribution, MutationOperator, SelectionScheme};

/// Column order of the per-run CSV.
pub const RUN_CSV_HEADER: [&str; 17] = [
    "grid_id",
    "algorithm",
    "n",
    "k",
    "N",
    "selection",
    "mutation",
    "beta",
    "crossover_prob",
    "repetition",
    "seed",
    "covered",
    "evaluations",
    "stage1_end",
    "stage2_end",
    "stage3_end",
    "generations",
];

/// Column order of the summary CSV.
pub const SUMMARY_CSV_HEADER: [&str; 17] = [
    "grid_id",
    "algorithm",
    "n",
    "k",
    "N",
    "selection",
    "mutation",
    "beta",
    "crossover_prob",
    "repetitions",
    "covered",
    "mean",
    "std",
    "min",
    "max",
    "dnf",
    "bound",
];

/// A set of runs: one base configuration swept over population sizes.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub base: AlgorithmConfig,
    /// NSGA-II population sizes to sweep; empty means `base.population_size`.
    /// Ignored for GSEMO.
    pub population_sizes: Vec<usize>,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Evaluation cap applied to every grid point; `None` uses
    /// [`default_max_evaluations`] per grid point.
    pub max_evaluations: Option<u64>,
    /// Collect a per-generation trace.
    pub trace: bool,
}

impl ExperimentSpec {
    pub const DEFAULT_REPETITIONS: usize = 50;

    pub fn new(base: AlgorithmConfig, master_seed: u64) -> Self {
        ExperimentSpec {
            base,
            population_sizes: Vec::new(),
            repetitions: Self::DEFAULT_REPETITIONS,
            master_seed,
            max_evaluations: None,
            trace: false,
        }
    }

    /// Sweeps `N = m * (n - 2k + 3)` for each multiplier `m`.
    pub fn with_multipliers(mut self, multipliers: &[usize]) -> Self {
        let front = self.base.problem.front_size();
        self.population_sizes = multipliers.iter().map(|m| m * front).collect();
        self
    }

    pub fn with_population_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.population_sizes = sizes;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    /// The validated configuration of every grid point, in grid order.
    pub fn grid(&self) -> Result<Vec<AlgorithmConfig>> {
        if self.repetitions == 0 {
            return Err(invalid("repetitions must be at least 1"));
        }
        let sizes = match self.base.algorithm {
            AlgorithmKind::Gsemo => vec![self.base.population_size],
            AlgorithmKind::Nsga2 if self.population_sizes.is_empty() => {
                vec![self.base.population_size]
            }
            AlgorithmKind::Nsga2 => self.population_sizes.clone(),
        };
        sizes
            .into_iter()
            .map(|size| {
                if size == 0 {
                    return Err(invalid("population multipliers and sizes must be positive"));
                }
                let mut config = self.base.clone();
                config.population_size = size;
                config.max_evaluations = self.max_evaluations.unwrap_or_else(|| {
                    let scale = match config.algorithm {
                        AlgorithmKind::Nsga2 => size,
                        AlgorithmKind::Gsemo => config.problem.front_size(),
                    };
                    default_max_evaluations(&config.problem, scale)
                });
                config.validate()?;
                Ok(config)
            })
            .collect()
    }
}

/// One finished run with its grid coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub grid_id: usize,
    pub repetition: usize,
    pub config: AlgorithmConfig,
    pub record: RunRecord,
}

/// Statistics over covered runs; runs that hit the cap are only counted.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStatistics {
    pub runs: usize,
    pub covered: usize,
    pub mean: Option<f64>,
    /// Corrected sample standard deviation (denominator `covered - 1`).
    pub std_dev: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub did_not_finish: usize,
}

/// Mean and corrected standard deviation of the evaluations-to-cover of the
/// covered runs.
pub fn summarize(records: &[RunRecord]) -> Result<RunStatistics> {
    if records.is_empty() {
        return Err(Error::Empty("run records to summarize"));
    }
    let values: Vec<u64> = records
        .iter()
        .filter_map(|r| r.evaluations_to_cover)
        .collect();
    let covered = values.len();
    let mean =
        (covered > 0).then(|| values.iter().map(|&v| v as f64).sum::<f64>() / covered as f64);
    let std_dev = mean.filter(|_| covered > 1).map(|m| {
        let ss: f64 = values.iter().map(|&v| (v as f64 - m).powi(2)).sum();
        (ss / (covered - 1) as f64).sqrt()
    });
    Ok(RunStatistics {
        runs: records.len(),
        covered,
        mean,
        std_dev,
        min: values.iter().copied().min(),
        max: values.iter().copied().max(),
        did_not_finish: records.len() - covered,
    })
}

/// One grid point's summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub grid_id: usize,
    pub config: AlgorithmConfig,
    pub stats: RunStatistics,
    /// Leading term of the proven upper bound, when the configuration is
    /// covered by one.
    pub bound: Option<f64>,
}

/// Leading constant `K` of the expected-runtime bound.
pub fn bound_constant(selection: SelectionScheme, mutation: &MutationOperator) -> Result<f64> {
    use SelectionScheme::*;
    let k = match (mutation, selection) {
        (MutationOperator::BitwiseStandard, Fair) => 2.0 * E,
        (MutationOperator::BitwiseStandard, Uniform | IndependentTournaments) => {
            2.0 * E * E / (E - 1.0)
        }
        (MutationOperator::BitwiseStandard, TwoPermutationTournaments) => 8.0 / 3.0 * E,
        (MutationOperator::HeavyTailed { .. }, Fair) => 2.0,
        (MutationOperator::HeavyTailed { .. }, Uniform | IndependentTournaments) => {
            2.0 * E / (E - 1.0)
        }
        (MutationOperator::HeavyTailed { .. }, TwoPermutationTournaments) => 8.0 / 3.0,
        (MutationOperator::OneBitFlip, _) => {
            return Err(Error::NoBound(
                "one-bit mutation cannot cover the extremal front points".into(),
            ))
        }
    };
    Ok(k)
}

/// Leading term (without the `1 + o(1)` factor) of the expected number of
/// evaluations NSGA-II needs to cover the front:
/// `K N n^k` for bit-wise mutation and `K N C(n, k) / P_k` for heavy-tailed
/// mutation, where `P_k` is the exact probability that one heavy-tailed
/// mutation flips exactly `k` bits.
pub fn theoretical_bound(
    n: usize,
    k: usize,
    population_size: usize,
    selection: SelectionScheme,
    mutation: &MutationOperator,
) -> Result<f64> {
    let constant = bound_constant(selection, mutation)?;
    let pop = population_size as f64;
    match *mutation {
        MutationOperator::BitwiseStandard => Ok(constant * pop * (n as f64).powi(k as i32)),
        MutationOperator::HeavyTailed { beta } => {
            let dist = HeavyTailedDistribution::new(n, beta)?;
            let p_k = dist.hamming_probability(k);
            Ok(constant * pop * ln_binomial(n, k).exp() / p_k)
        }
        MutationOperator::OneBitFlip => unreachable!("rejected by bound_constant"),
    }
}

/// The bound for `config` when one is proven for it: NSGA-II, no crossover,
/// bit-wise or heavy-tailed mutation and `N >= 4(n - 2k + 3)`.
pub fn bound_for(config: &AlgorithmConfig) -> Option<f64> {
    let applies = config.algorithm == AlgorithmKind::Nsga2
        && config.crossover_probability == 0.0
        && config.population_size >= 4 * config.problem.front_size();
    if !applies {
        return None;
    }
    let p = config.problem;
    theoretical_bound(
        p.n(),
        p.k(),
        config.population_size,
        config.selection,
        &config.mutation,
    )
    .ok()
}

#[derive(Serialize)]
struct TraceLine {
    grid_id: usize,
    repetition: usize,
    generation: u64,
    evaluations: u64,
    stage: Stage,
    coverage: usize,
}

/// All runs of an experiment and their per-grid-point summaries.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub runs: Vec<RunRow>,
    pub summaries: Vec<SummaryRow>,
    /// JSON lines, one per coverage check, when tracing was requested.
    pub trace: Vec<String>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let grid = spec.grid()?;
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..spec.repetitions).map(move |r| (g, r)))
        .collect();

    let outcomes = jobs
        .par_iter()
        .map(|&(grid_id, repetition)| {
            let config = &grid[grid_id];
            let mut rng =
                RandomSource::for_run(spec.master_seed, grid_id as u64, repetition as u64);
            let mut trace = Vec::new();
            let record = run_observed(config, &mut rng, |view| {
                if spec.trace {
                    let line = TraceLine {
                        grid_id,
                        repetition,
                        generation: view.generation,
                        evaluations: view.evaluations,
                        stage: view.stage,
                        coverage: view.coverage,
                    };
                    trace.push(serde_json::to_string(&line).expect("trace line serializes"));
                }
            })?;
            Ok((
                RunRow {
                    grid_id,
                    repetition,
                    config: config.clone(),
                    record,
                },
                trace,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut trace = Vec::new();
    for (row, lines) in outcomes {
        runs.push(row);
        trace.extend(lines);
    }

    let summaries = grid
        .iter()
        .enumerate()
        .map(|(grid_id, config)| {
            let records: Vec<RunRecord> = runs
                .iter()
                .filter(|r| r.grid_id == grid_id)
                .map(|r| r.record.clone())
                .collect();
            Ok(SummaryRow {
                grid_id,
                config: config.clone(),
                stats: summarize(&records)?,
                bound: bound_for(config),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentResult {
        runs,
        summaries,
        trace,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn fixed(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.1}")).unwrap_or_default()
}

/// The descriptor columns shared by both CSV files.
fn config_columns(config: &AlgorithmConfig) -> [String; 8] {
    let nsga2 = config.algorithm == AlgorithmKind::Nsga2;
    [
        config.algorithm.name().to_string(),
        config.problem.n().to_string(),
        config.problem.k().to_string(),
        if nsga2 {
            config.population_size.to_string()
        } else {
            String::new()
        },
        if nsga2 {
            config.selection.name().to_string()
        } else {
            String::new()
        },
        config.mutation.name().to_string(),
        opt(config.mutation.beta()),
        config.crossover_probability.to_string(),
    ]
}

impl ExperimentResult {
    pub fn runs_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RUN_CSV_HEADER)?;
        for row in &self.runs {
            let r = &row.record;
            let mut fields = vec![row.grid_id.to_string()];
            fields.extend(config_columns(&row.config));
            fields.extend([
                row.repetition.to_string(),
                r.seed.to_string(),
                r.covered.to_string(),
                r.evaluations.to_string(),
                opt(r.stage1_end),
                opt(r.stage2_end),
                opt(r.stage3_end),
                r.generations.to_string(),
            ]);
            w.write_record(&fields)?;
        }
        w.into_inner()
            .map_err(|e| Error::Csv(e.into_error().into()))
    }

    pub fn summary_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SUMMARY_CSV_HEADER)?;
        for row in &self.summaries {
            let s = &row.stats;
            let mut fields = vec![row.grid_id.to_string()];
            fields.extend(config_columns(&row.config));
            fields.extend([
                s.runs.to_string(),
                s.covered.to_string(),
                fixed(s.mean),
                fixed(s.std_dev),
                opt(s.min),
                opt(s.max),
                s.did_not_finish.to_string(),
                fixed(row.bound),
            ]);
            w.write_record(&fields)?;
        }
        w.into_inner()
            .map_err(|e| Error::Csv(e.into_error().into()))
    }

    /// Aligned plain-text table, one line per grid point.
    pub fn summary_table(&self) -> String {
        let header = [
            "setting",
            "algorithm",
            "selection",
            "mutation",
            "xover",
            "reps",
            "mean",
            "std",
            "min",
            "max",
            "DNF",
            "bound",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for row in &self.summaries {
            let c = &row.config;
            let s = &row.stats;
            let setting = match c.algorithm {
                AlgorithmKind::Gsemo => format!("n={} k={}", c.problem.n(), c.problem.k()),
                AlgorithmKind::Nsga2 => {
                    let front = c.problem.front_size();
                    let size = if c.population_size % front == 0 {
                        format!(
                            "N={}(n-2k+3)={}",
                            c.population_size / front,
                            c.population_size
                        )
                    } else {
                        format!("N={}", c.population_size)
                    };
                    format!("n={} k={} {size}", c.problem.n(), c.problem.k())
                }
            };
            let mutation = match c.mutation.beta() {
                Some(b) => format!("{}(b={b})", c.mutation.name()),
                None => c.mutation.name().to_string(),
            };
            rows.push(vec![
                setting,
                c.algorithm.name().to_string(),
                if c.algorithm == AlgorithmKind::Nsga2 {
                    c.selection.name().to_string()
                } else {
                    "-".to_string()
                },
                mutation,
                c.crossover_probability.to_string(),
                s.runs.to_string(),
                s.mean
                    .map(|v| format!("{v:.0}"))
                    .unwrap_or_else(|| "-".into()),
                s.std_dev
                    .map(|v| format!("{v:.0}"))
                    .unwrap_or_else(|| "-".into()),
                s.min.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                s.max.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                s.did_not_finish.to_string(),
                row.bound
                    .map(|v| format!("{v:.4e}"))
                    .unwrap_or_else(|| "-".into()),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
                let _ = writeln!(out, "{}", "-".repeat(total));
            }
        }
        out
    }

    /// Writes `runs.csv` and `summary.csv` (and `trace.jsonl` if traced)
    /// into `dir`, creating it if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_file(&dir.join("runs.csv"), &self.runs_csv()?)?;
        write_file(&dir.join("summary.csv"), &self.summary_csv()?)?;
        if !self.trace.is_empty() {
            self.write_trace(&dir.join("trace.jsonl"))?;
        }
        Ok(())
    }

    pub fn write_trace(&self, path: &Path) -> Result<()> {
        let mut body = self.trace.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        write_file(path, body.as_bytes())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::OjzjProblem;

    fn record(evals: Option<u64>) -> RunRecord {
        RunRecord {
            seed: 0,
            evaluations_to_cover: evals,
            evaluations: evals.unwrap_or(1000),
            stage1_end: None,
            stage2_end: None,
            stage3_end: None,
            generations: 0,
            lemma1_violations: 0,
            crowding_violations: 0,
            stage_regressions: 0,
            covered: evals.is_some(),
        }
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[record(Some(100)), record(Some(100)), record(Some(100))]).unwrap();
        assert_eq!(s.mean, Some(100.0));
        assert_eq!(s.std_dev, Some(0.0));

        let s = summarize(&[record(Some(90)), record(Some(110))]).unwrap();
        assert_eq!(s.mean, Some(100.0));
        assert!((s.std_dev.unwrap() - 200f64.sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max), (Some(90), Some(110)));

        let s = summarize(&[record(Some(100)), record(None)]).unwrap();
        assert_eq!(s.mean, Some(100.0));
        assert_eq!(s.std_dev, None);
        assert_eq!(s.did_not_finish, 1);

        let s = summarize(&[record(None), record(None)]).unwrap();
        assert_eq!(
            (s.mean, s.std_dev, s.covered, s.did_not_finish),
            (None, None, 0, 2)
        );

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn bound_examples() {
        let b = theoretical_bound(
            20,
            3,
            68,
            SelectionScheme::IndependentTournaments,
            &MutationOperator::BitwiseStandard,
        )
        .unwrap();
        let k = 2.0 * E * E / (E - 1.0);
        assert!((k - 8.60052).abs() < 1e-5);
        assert!((b - k * 68.0 * 8000.0).abs() < 1e-6);
        assert!((b / 4.68e6 - 1.0).abs() < 0.01);

        let fair =
            bound_constant(SelectionScheme::Fair, &MutationOperator::BitwiseStandard).unwrap();
        assert!((fair - 5.43656).abs() < 1e-5);
        let ht = MutationOperator::HeavyTailed { beta: 1.5 };
        assert_eq!(
            bound_constant(SelectionScheme::TwoPermutationTournaments, &ht).unwrap(),
            8.0 / 3.0
        );
        assert!(matches!(
            theoretical_bound(
                20,
                3,
                68,
                SelectionScheme::Fair,
                &MutationOperator::OneBitFlip
            ),
            Err(Error::NoBound(_))
        ));
    }

    #[test]
    fn heavy_tailed_bound_beats_bitwise() {
        let ht = MutationOperator::HeavyTailed { beta: 1.5 };
        for sel in SelectionScheme::ALL {
            let b = theoretical_bound(20, 3, 68, sel, &MutationOperator::BitwiseStandard).unwrap();
            let h = theoretical_bound(20, 3, 68, sel, &ht).unwrap();
            assert!(h < b, "{sel}: {h} vs {b}");
        }
    }

    #[test]
    fn grid_rejects_bad_specs() {
        let p = OjzjProblem::new(8, 2).unwrap();
        let base = AlgorithmConfig::nsga2(
            p,
            28,
            SelectionScheme::TwoPermutationTournaments,
            MutationOperator::BitwiseStandard,
        );
        assert!(ExperimentSpec::new(base.clone(), 1)
            .with_repetitions(0)
            .grid()
            .is_err());
        assert!(ExperimentSpec::new(base.clone(), 1)
            .with_population_sizes(vec![28, 27])
            .grid()
            .is_err());
        assert!(ExperimentSpec::new(base.clone(), 1)
            .with_multipliers(&[0])
            .grid()
            .is_err());
        let grid = ExperimentSpec::new(base, 1)
            .with_multipliers(&[2, 4])
            .grid()
            .unwrap();
        assert_eq!(
            grid.iter().map(|c| c.population_size).collect::<Vec<_>>(),
            vec![14, 28]
        );
    }

    #[test]
    fn single_repetition_summary() {
        let p = OjzjProblem::new(8, 2).unwrap();
        let base = AlgorithmConfig::nsga2(
            p,
            28,
            SelectionScheme::IndependentTournaments,
            MutationOperator::BitwiseStandard,
        );
        let result = run_experiment(&ExperimentSpec::new(base, 9).with_repetitions(1)).unwrap();
        let s = &result.summaries[0].stats;
        assert_eq!(
            s.mean,
            Some(result.runs[0].record.evaluations_to_cover.unwrap() as f64)
        );
        assert_eq!(s.std_dev, None);
        let csv = String::from_utf8(result.summary_csv().unwrap()).unwrap();
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[12], "");
        // Bound is reported: N = 28 = 4(n - 2k + 3).
        assert!(!fields[16].is_empty());
    }
}
