//! `ojzj`: runs NSGA-II or GSEMO experiments on OneJumpZeroJump and reports
//! runtime statistics.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use ojzj_core::harness::{run_experiment, ExperimentSpec};
use ojzj_core::{
    AlgorithmConfig, AlgorithmKind, InitMode, MutationOperator, OjzjProblem, SelectionScheme,
};
use serde::Deserialize;

/// Experiment settings. Every field may come from the config file; flags
/// given on the command line take precedence.
#[derive(clap::Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Settings {
    /// nsga2 or gsemo [default: nsga2]
    #[arg(long)]
    algorithm: Option<String>,
    /// Bit-string length [default: 20]
    #[arg(long)]
    n: Option<usize>,
    /// Jump size [default: 3]
    #[arg(long)]
    k: Option<usize>,
    /// Population sizes as multiples of the front size n-2k+3, comma
    /// separated [default: 4]
    #[arg(long, value_delimiter = ',', conflicts_with = "pop_size")]
    pop_mult: Option<Vec<usize>>,
    /// Absolute population sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    pop_size: Option<Vec<usize>>,
    /// fair, uniform, tournament or two-perm [default: tournament]
    #[arg(long)]
    selection: Option<String>,
    /// one-bit, bitwise or heavy-tailed [default: bitwise]
    #[arg(long)]
    mutation: Option<String>,
    /// Power-law exponent of heavy-tailed mutation [default: 1.5]
    #[arg(long)]
    beta: Option<f64>,
    /// Crossover probability per parent pair [default: 0]
    #[arg(long)]
    crossover_prob: Option<f64>,
    /// uniform or inner-pareto-set [default: uniform]
    #[arg(long)]
    init: Option<String>,
    /// Repetitions per grid point [default: 50]
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation cap per run [default: 1000 N n^k]
    #[arg(long)]
    max_evals: Option<u64>,
    /// Directory for runs.csv and summary.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-generation trace as JSON lines to this file
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Check that no rank-1 objective value is lost between generations
    #[arg(long, action = clap::ArgAction::SetTrue)]
    #[serde(default)]
    assert_lemma1: bool,
}

impl Settings {
    /// Fills every unset field of `self` from `file`.
    fn or(self, file: Settings) -> Settings {
        let (pop_mult, pop_size) = if self.pop_mult.is_some() || self.pop_size.is_some() {
            (self.pop_mult, self.pop_size)
        } else {
            (file.pop_mult, file.pop_size)
        };
        Settings {
            algorithm: self.algorithm.or(file.algorithm),
            n: self.n.or(file.n),
            k: self.k.or(file.k),
            pop_mult,
            pop_size,
            selection: self.selection.or(file.selection),
            mutation: self.mutation.or(file.mutation),
            beta: self.beta.or(file.beta),
            crossover_prob: self.crossover_prob.or(file.crossover_prob),
            init: self.init.or(file.init),
            reps: self.reps.or(file.reps),
            seed: self.seed.or(file.seed),
            max_evals: self.max_evals.or(file.max_evals),
            out: self.out.or(file.out),
            trace: self.trace.or(file.trace),
            assert_lemma1: self.assert_lemma1 || file.assert_lemma1,
        }
    }

    fn experiment(&self) -> anyhow::Result<ExperimentSpec> {
        let problem = OjzjProblem::new(self.n.unwrap_or(20), self.k.unwrap_or(3))?;
        let algorithm: AlgorithmKind = self.algorithm.as_deref().unwrap_or("nsga2").parse()?;
        let mutation = MutationOperator::parse(
            self.mutation.as_deref().unwrap_or("bitwise"),
            self.beta.unwrap_or(MutationOperator::DEFAULT_BETA),
        )?;
        let init: InitMode = self.init.as_deref().unwrap_or("uniform").parse()?;

        let mut base = match algorithm {
            AlgorithmKind::Nsga2 => {
                let selection: SelectionScheme =
                    self.selection.as_deref().unwrap_or("tournament").parse()?;
                AlgorithmConfig::nsga2(problem, problem.front_size(), selection, mutation)
            }
            AlgorithmKind::Gsemo => {
                if self.pop_mult.is_some() || self.pop_size.is_some() || self.selection.is_some() {
                    log::warn!("population size and selection are ignored by gsemo");
                }
                AlgorithmConfig::gsemo(problem, mutation)
            }
        }
        .with_init(init);
        if let Some(p) = self.crossover_prob {
            base = base.with_crossover(p);
        }
        if self.assert_lemma1 {
            base = base.with_lemma1_checks();
        }

        let mut spec = ExperimentSpec::new(base, self.seed.unwrap_or(1));
        spec = match (&self.pop_size, &self.pop_mult) {
            (Some(_), Some(_)) => bail!("--pop-mult and --pop-size are mutually exclusive"),
            (Some(sizes), None) => spec.with_population_sizes(sizes.clone()),
            (None, Some(mults)) => spec.with_multipliers(mults),
            (None, None) => spec.with_multipliers(&[4]),
        };
        if let Some(reps) = self.reps {
            spec = spec.with_repetitions(reps);
        }
        spec.max_evaluations = self.max_evals;
        spec.trace = self.trace.is_some();
        spec.grid()?;
        Ok(spec)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ojzj",
    version,
    about = "Runtime experiments for NSGA-II and GSEMO on OneJumpZeroJump"
)]
struct Cli {
    /// TOML file with any of the settings below (kebab-case keys)
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

fn load_config(path: &Path) -> anyhow::Result<Settings> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}

fn resolve(cli: Cli) -> anyhow::Result<(Settings, ExperimentSpec)> {
    let settings = match &cli.config {
        Some(path) => cli.settings.or(load_config(path)?),
        None => cli.settings,
    };
    let spec = settings.experiment()?;
    Ok((settings, spec))
}

fn execute(settings: &Settings, spec: &ExperimentSpec) -> anyhow::Result<()> {
    let result = run_experiment(spec)?;
    print!("{}", result.summary_table());
    if let Some(dir) = &settings.out {
        result.write_to_dir(dir)?;
        log::info!("wrote results to {}", dir.display());
    }
    if let Some(path) = &settings.trace {
        result.write_trace(path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (settings, spec) = match resolve(cli) {
        Ok(resolved) => resolved,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match execute(&settings, &spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
