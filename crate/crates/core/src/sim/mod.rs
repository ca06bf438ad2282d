//! Bearings-only target-tracking study.
//!
//! A target moves with near-constant velocity in the plane while an observer
//! platform follows a dog-leg course and measures only the bearing to the
//! target. Both the process and the measurement noise are *contaminated*
//! Gaussians — with small probability a draw comes from an inflated-variance
//! component — which is exactly the regime the heavy-tailed filters are
//! built for.
//!
//! The module splits into:
//!
//! * [`scenario`] — TOML-backed configuration, validation, and the concrete
//!   state-space model (dynamics, bearing measurement, platform track).
//! * [`truth`] — contaminated-noise truth and measurement simulation.
//! * [`harness`] — the Monte Carlo study: many independent runs, every
//!   filter fed identical data per run, divergence accounting, timing.
//! * [`metrics`] — RMSE / time-averaged RMSE aggregation.
//!
//! Everything is reproducible bit-for-bit from the scenario seed: each run
//! derives dedicated substreams for truth, initialization, and every filter,
//! so results do not depend on thread count or filter ordering.

pub mod harness;
pub mod metrics;
pub mod scenario;
pub mod truth;

pub use harness::{run_monte_carlo, FilterRunStats, HarnessOptions, MonteCarloSummary};
pub use metrics::{armse, rmse_over_runs};
pub use scenario::{
    course_velocity, knots_to_km_per_min, wrap_angle, BearingsOnlyModel, FilterConfig, FilterRule,
    MeasurementNoiseConfig, PlatformConfig, PriorConfig, ProcessNoiseConfig, Scenario,
    ScenarioConfig, TargetConfig,
};
pub use truth::{sample_contaminated_noise, simulate_truth, TruthData};
