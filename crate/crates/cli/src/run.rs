//! The `run` subcommand: load a TOML scenario, apply command-line overrides,
//! execute the Monte Carlo study, and write `summary.csv` plus
//! `rmse_series.csv` into the output directory.
//!
//! The CSV files are byte-reproducible for a fixed config and seed: floats
//! are printed with a fixed format, rows follow the configured filter order,
//! and timings are forced to zero when `--timing off` is given.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use stcubature::sim::{run_monte_carlo, HarnessOptions, MonteCarloSummary, ScenarioConfig};

use crate::Failure;

#[derive(Args)]
pub struct RunArgs {
    /// Scenario description (TOML).
    #[arg(long, env = "STCUBATURE_CONFIG", value_name = "FILE")]
    config: PathBuf,

    /// Directory for the CSV outputs (created if missing).
    #[arg(long, env = "STCUBATURE_OUT", value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Override the master seed from the config.
    #[arg(long, env = "STCUBATURE_SEED")]
    seed: Option<u64>,

    /// Override the number of Monte Carlo runs.
    #[arg(long, env = "STCUBATURE_RUNS")]
    runs: Option<usize>,

    /// Override the default per-update realization count of sampled rules.
    #[arg(long, env = "STCUBATURE_SAMPLES")]
    samples: Option<usize>,

    /// Comma-separated subset of configured filter names to run.
    #[arg(
        long,
        env = "STCUBATURE_FILTERS",
        value_delimiter = ',',
        value_name = "NAMES"
    )]
    filters: Vec<String>,

    /// Worker threads for the run loop (default: all cores).
    #[arg(long, env = "STCUBATURE_WORKERS")]
    workers: Option<usize>,

    /// Wall-clock step timing; `off` zeroes the timing column so reruns
    /// produce byte-identical CSVs.
    #[arg(long, env = "STCUBATURE_TIMING", value_enum, default_value_t = Timing::Wall)]
    timing: Timing,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Timing {
    Wall,
    Off,
}

pub fn execute(args: RunArgs) -> Result<ExitCode, Failure> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        Failure::Config(format!("cannot read `{}`: {e}", args.config.display()))
    })?;
    let mut config = ScenarioConfig::from_toml_str(&text)?;

    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if !args.filters.is_empty() {
        retain_filters(&mut config, &args.filters)?;
    }
    config.validate()?;

    let options = HarnessOptions {
        collect_timing: args.timing == Timing::Wall,
        threads: args.workers,
    };
    let summary = run_monte_carlo(&config, &options)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Runtime(format!("cannot create `{}`: {e}", args.out.display())))?;
    write_output(&args.out.join("summary.csv"), &summary_csv(&summary))?;
    write_output(&args.out.join("rmse_series.csv"), &series_csv(&summary))?;

    print!("{}", summary_table(&summary));
    println!("wrote {}", args.out.join("summary.csv").display());
    println!("wrote {}", args.out.join("rmse_series.csv").display());
    Ok(ExitCode::SUCCESS)
}

/// Keep only the named filters, preserving config order, and reject names
/// that match nothing so typos fail loudly instead of silently shrinking
/// the study.
fn retain_filters(config: &mut ScenarioConfig, names: &[String]) -> Result<(), Failure> {
    for name in names {
        if !config.filters.iter().any(|f| &f.name == name) {
            let known: Vec<&str> = config.filters.iter().map(|f| f.name.as_str()).collect();
            return Err(Failure::Config(format!(
                "`--filters` names unknown filter `{name}`; config defines: {}",
                known.join(", ")
            )));
        }
    }
    config.filters.retain(|f| names.iter().any(|n| n == &f.name));
    Ok(())
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Runtime(format!("cannot write `{}`: {e}", path.display())))
}

fn summary_csv(summary: &MonteCarloSummary) -> String {
    let mut out = String::from("filter,armse_pos_km,armse_vel_km_per_min,mean_step_time_ms,diverged_runs\n");
    for f in &summary.filters {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{}",
            f.name,
            f.armse_position,
            f.armse_velocity,
            f.mean_step_seconds * 1e3,
            f.divergences
        );
    }
    out
}

fn series_csv(summary: &MonteCarloSummary) -> String {
    let mut out = String::from("k");
    for f in &summary.filters {
        let _ = write!(out, ",{0}_rmse_pos_km,{0}_rmse_vel_km_per_min", f.name);
    }
    out.push('\n');
    for k in 0..summary.steps {
        let _ = write!(out, "{}", k + 1);
        for f in &summary.filters {
            let _ = write!(out, ",{:.6},{:.6}", f.rmse_position[k], f.rmse_velocity[k]);
        }
        out.push('\n');
    }
    out
}

fn summary_table(summary: &MonteCarloSummary) -> String {
    let width = summary
        .filters
        .iter()
        .map(|f| f.name.len())
        .max()
        .unwrap_or(6)
        .max("filter".len());
    let mut out = format!(
        "{:<width$}  {:>14}  {:>18}  {:>12}  {:>9}\n",
        "filter", "ARMSE pos [km]", "ARMSE vel [km/min]", "step [ms]", "diverged"
    );
    for f in &summary.filters {
        let _ = writeln!(
            out,
            "{:<width$}  {:>14.3}  {:>18.3}  {:>12.3}  {:>6}/{}",
            f.name,
            f.armse_position,
            f.armse_velocity,
            f.mean_step_seconds * 1e3,
            f.divergences,
            summary.runs
        );
    }
    out
}
