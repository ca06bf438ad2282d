//! Monte Carlo comparison harness.
//!
//! Runs every configured filter over many independently simulated
//! trajectories and aggregates position/velocity RMSE, divergence counts and
//! (optionally) per-step wall time. Within a run all filters see the *same*
//! truth, the same measurements and the same initial estimate, so differences
//! in their errors are paired — which is what makes desk-scale run counts
//! statistically meaningful.
//!
//! Reproducibility: run `r` derives substreams `("truth", r)`, `("init", r)`
//! and `(filter name, r)` from the scenario seed. No stream is shared across
//! runs or filters, so the aggregate is independent of thread count and of
//! which filters are enabled together.

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{rstscf_step, sif_step, GaussianEstimate, PointReuse, StateEstimate};
use crate::rng::RngStream;
use crate::rules::StudentTRule;
use crate::sampling::standard_normal_vector;
use crate::sim::metrics::{armse, rmse_over_runs};
use crate::sim::scenario::{FilterConfig, FilterRule, Scenario, ScenarioConfig};
use crate::sim::truth::{simulate_truth, TruthData};

/// Substream label for trajectory simulation.
const TRUTH_LABEL: &str = "truth";
/// Substream label for the shared initial-estimate draw.
const INIT_LABEL: &str = "init";

/// Knobs that do not change any estimate, only how the study is executed.
#[derive(Debug, Clone)]
pub struct HarnessOptions {
    /// Record wall-clock time per filter step. Off, the timing fields are
    /// exactly zero, which keeps emitted reports byte-identical across
    /// machines and reruns.
    pub collect_timing: bool,
    /// Worker threads (`None` = rayon's default). Results are identical
    /// either way; this only trades latency for cores.
    pub threads: Option<usize>,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            collect_timing: true,
            threads: None,
        }
    }
}

/// Aggregated study results for one filter.
#[derive(Debug, Clone)]
pub struct FilterRunStats {
    pub name: String,
    /// Per-step position RMSE (km) across completed runs.
    pub rmse_position: Vec<f64>,
    /// Per-step velocity RMSE (km/min) across completed runs.
    pub rmse_velocity: Vec<f64>,
    /// Time-averaged position RMSE (km).
    pub armse_position: f64,
    /// Time-averaged velocity RMSE (km/min).
    pub armse_velocity: f64,
    /// Per-run time-averaged position error norm (km), aligned with run
    /// index; `None` marks a diverged run. Kept for paired comparisons
    /// between filters.
    pub per_run_mean_position_error: Vec<Option<f64>>,
    /// Runs this filter failed (filter error or non-finite estimate). Failed
    /// runs are excluded from every error aggregate above.
    pub divergences: usize,
    /// Runs that completed all steps.
    pub completed_runs: usize,
    /// Mean wall time per filter step in seconds (0 when timing is off).
    pub mean_step_seconds: f64,
}

/// Results of one full Monte Carlo study.
#[derive(Debug, Clone)]
pub struct MonteCarloSummary {
    pub runs: usize,
    pub steps: usize,
    pub filters: Vec<FilterRunStats>,
}

impl MonteCarloSummary {
    /// Look up one filter's stats by configured name.
    pub fn filter(&self, name: &str) -> Option<&FilterRunStats> {
        self.filters.iter().find(|f| f.name == name)
    }
}

/// Per-(run, filter) raw outcome.
struct FilterRunOutput {
    /// Squared position error per step.
    position_sq: Vec<f64>,
    /// Squared velocity error per step.
    velocity_sq: Vec<f64>,
    /// Wall seconds spent inside the filter loop (0 when timing is off).
    seconds: f64,
}

/// The filter state machine for one run, dispatching on the configured rule.
enum Engine {
    StudentT {
        state: StateEstimate,
        rule: StudentTRule,
    },
    Gaussian {
        state: GaussianEstimate,
        samples: usize,
    },
}

impl Engine {
    fn build(
        filter: &FilterConfig,
        scenario: &Scenario,
        initial_mean: &DVector<f64>,
    ) -> Result<Engine> {
        let config = scenario.config();
        let samples = filter.effective_samples(config.samples);
        match filter.rule {
            FilterRule::Stochastic => Ok(Engine::StudentT {
                state: StateEstimate::new(
                    initial_mean.clone(),
                    scenario.prior_scale().clone(),
                    config.prior.dof,
                )?,
                rule: StudentTRule::Stochastic { samples },
            }),
            FilterRule::Deterministic => Ok(Engine::StudentT {
                state: StateEstimate::new(
                    initial_mean.clone(),
                    scenario.prior_scale().clone(),
                    config.prior.dof,
                )?,
                rule: StudentTRule::Deterministic,
            }),
            FilterRule::MonteCarlo => Ok(Engine::StudentT {
                state: StateEstimate::new(
                    initial_mean.clone(),
                    scenario.prior_scale().clone(),
                    config.prior.dof,
                )?,
                rule: StudentTRule::MonteCarlo { samples },
            }),
            FilterRule::Gaussian => Ok(Engine::Gaussian {
                state: GaussianEstimate::new(
                    initial_mean.clone(),
                    scenario.prior_scale().clone(),
                )?,
                samples,
            }),
        }
    }

    fn step(
        &mut self,
        scenario: &Scenario,
        step: usize,
        z: &DVector<f64>,
        rng: &mut RngStream,
    ) -> Result<()> {
        match self {
            Engine::StudentT { state, rule } => {
                let (next, _) = rstscf_step(
                    state,
                    scenario.model(),
                    step,
                    z,
                    scenario.process_spec(),
                    scenario.measurement_spec(),
                    *rule,
                    PointReuse::Shared,
                    rng,
                )?;
                *state = next;
                Ok(())
            }
            Engine::Gaussian { state, samples } => {
                let (next, _) = sif_step(
                    state,
                    scenario.model(),
                    step,
                    z,
                    scenario.process_spec().scale(),
                    scenario.measurement_spec().scale(),
                    *samples,
                    rng,
                )?;
                *state = next;
                Ok(())
            }
        }
    }

    fn mean(&self) -> &DVector<f64> {
        match self {
            Engine::StudentT { state, .. } => state.mean(),
            Engine::Gaussian { state, .. } => state.mean(),
        }
    }
}

/// Run one filter over one simulated trajectory. `None` marks divergence:
/// the filter erred or produced a non-finite estimate, and the whole run is
/// excluded from its aggregates.
fn run_filter(
    filter: &FilterConfig,
    scenario: &Scenario,
    truth: &TruthData,
    initial_mean: &DVector<f64>,
    rng: &mut RngStream,
    collect_timing: bool,
) -> Option<FilterRunOutput> {
    let steps = scenario.config().steps;
    let mut engine = Engine::build(filter, scenario, initial_mean).ok()?;
    let mut position_sq = Vec::with_capacity(steps);
    let mut velocity_sq = Vec::with_capacity(steps);

    let start = Instant::now();
    for k in 1..=steps {
        engine.step(scenario, k, &truth.measurements[k - 1], rng).ok()?;
        let mean = engine.mean();
        if mean.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let x = &truth.states[k];
        position_sq.push((mean[0] - x[0]).powi(2) + (mean[1] - x[1]).powi(2));
        velocity_sq.push((mean[2] - x[2]).powi(2) + (mean[3] - x[3]).powi(2));
    }
    let seconds = if collect_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };

    Some(FilterRunOutput {
        position_sq,
        velocity_sq,
        seconds,
    })
}

/// Simulate one run and feed every filter the same data.
fn run_once(
    scenario: &Scenario,
    run: usize,
    collect_timing: bool,
) -> Vec<Option<FilterRunOutput>> {
    let config = scenario.config();
    let base = RngStream::new(config.seed);

    let mut truth_rng = base.derive(TRUTH_LABEL, run as u64);
    let truth = simulate_truth(scenario, &mut truth_rng);

    // One initialization draw shared by all filters, so their errors start
    // paired.
    let mut init_rng = base.derive(INIT_LABEL, run as u64);
    let initial_mean =
        scenario.initial_truth() + scenario.prior_chol() * standard_normal_vector(&mut init_rng, 4);

    config
        .filters
        .iter()
        .map(|filter| {
            let mut rng = base.derive(&filter.name, run as u64);
            run_filter(
                filter,
                scenario,
                &truth,
                &initial_mean,
                &mut rng,
                collect_timing,
            )
        })
        .collect()
}

/// Run the full study described by `config`.
///
/// Runs execute in parallel; aggregation happens afterwards in run order, so
/// the summary is bit-for-bit identical regardless of `options.threads`.
pub fn run_monte_carlo(
    config: &ScenarioConfig,
    options: &HarnessOptions,
) -> Result<MonteCarloSummary> {
    let scenario = config.build()?;
    let collect_timing = options.collect_timing;

    let execute = || -> Vec<Vec<Option<FilterRunOutput>>> {
        (0..config.runs)
            .into_par_iter()
            .map(|run| run_once(&scenario, run, collect_timing))
            .collect()
    };
    let per_run = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(execute),
        None => execute(),
    };

    let steps = config.steps;
    let mut filters = Vec::with_capacity(config.filters.len());
    for (index, filter) in config.filters.iter().enumerate() {
        let mut position_runs: Vec<Vec<f64>> = Vec::new();
        let mut velocity_runs: Vec<Vec<f64>> = Vec::new();
        let mut per_run_mean_position_error = Vec::with_capacity(config.runs);
        let mut divergences = 0;
        let mut total_seconds = 0.0;
        for run in &per_run {
            match &run[index] {
                Some(output) => {
                    let mean_error = output
                        .position_sq
                        .iter()
                        .map(|e2| e2.sqrt())
                        .sum::<f64>()
                        / steps as f64;
                    per_run_mean_position_error.push(Some(mean_error));
                    total_seconds += output.seconds;
                    position_runs.push(output.position_sq.clone());
                    velocity_runs.push(output.velocity_sq.clone());
                }
                None => {
                    per_run_mean_position_error.push(None);
                    divergences += 1;
                }
            }
        }
        let completed_runs = position_runs.len();
        let (rmse_position, rmse_velocity) = if completed_runs == 0 {
            (vec![f64::NAN; steps], vec![f64::NAN; steps])
        } else {
            (
                rmse_over_runs(&position_runs)?,
                rmse_over_runs(&velocity_runs)?,
            )
        };
        let mean_step_seconds = if completed_runs == 0 {
            0.0
        } else {
            total_seconds / (completed_runs * steps) as f64
        };
        filters.push(FilterRunStats {
            name: filter.name.clone(),
            armse_position: armse(&rmse_position),
            armse_velocity: armse(&rmse_velocity),
            rmse_position,
            rmse_velocity,
            per_run_mean_position_error,
            divergences,
            completed_runs,
            mean_step_seconds,
        });
    }

    Ok(MonteCarloSummary {
        runs: config.runs,
        steps,
        filters,
    })
}
