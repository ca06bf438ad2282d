//! Scenario configuration and the bearings-only state-space model.
//!
//! Units are kilometers and minutes throughout the state space; speeds enter
//! the config in knots (converted on load), courses in degrees measured from
//! north (+y) with positive angles rotating toward −x, bearings in radians
//! from the +x axis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{NoiseSpec, SystemModel};

/// Nautical miles per hour → kilometers per minute.
pub fn knots_to_km_per_min(knots: f64) -> f64 {
    knots * 1.852 / 60.0
}

/// Velocity components `(vx, vy)` for a speed (km/min) on a course given in
/// degrees from north: `v = speed · (−sin θ, cos θ)`, so course 0 points +y
/// and positive courses rotate counterclockwise.
///
/// With the mirrored (clockwise) reading the benchmark target would cut
/// within ~1.1 km of the sensor during the first step, and the study turns
/// into a degenerate point-blank flyby; this orientation keeps the closest
/// approach at 4.1 km and the tracking problem well posed.
pub fn course_velocity(speed_km_min: f64, course_deg: f64) -> (f64, f64) {
    let theta = course_deg.to_radians();
    (-speed_km_min * theta.sin(), speed_km_min * theta.cos())
}

/// Wrap an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let wrapped = theta.rem_euclid(std::f64::consts::TAU);
    if wrapped > std::f64::consts::PI {
        wrapped - std::f64::consts::TAU
    } else {
        wrapped
    }
}

/// Contaminated process-noise description: nominal per-axis acceleration
/// standard deviation `sigma_w` (km/min²), with probability
/// `contamination_probability` the variance is multiplied by
/// `contamination_inflation`. `dof` is the tail weight the *filters* assume
/// for this noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessNoiseConfig {
    pub sigma_w: f64,
    pub contamination_probability: f64,
    pub contamination_inflation: f64,
    pub dof: f64,
}

/// Contaminated bearing-noise description: nominal standard deviation
/// `sigma_v` (radians); other fields as in [`ProcessNoiseConfig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementNoiseConfig {
    pub sigma_v: f64,
    pub contamination_probability: f64,
    pub contamination_inflation: f64,
    pub dof: f64,
}

/// The target's deterministic initial condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub initial_position_km: [f64; 2],
    pub speed_knots: f64,
    pub course_deg: f64,
}

/// The observer platform's dog-leg track: straight on `initial_course_deg`
/// through minute `turn_step`, then straight on `final_course_deg`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformConfig {
    pub initial_position_km: [f64; 2],
    pub speed_knots: f64,
    pub initial_course_deg: f64,
    pub final_course_deg: f64,
    pub turn_step: usize,
}

/// Initial belief: every filter starts from one shared draw
/// `x̂₀ ~ N(x₀, P₀)` with `P₀ = diag(position_var, position_var,
/// velocity_var, velocity_var)`; the heavy-tailed filters use `P₀` as their
/// initial scale with `dof` degrees of freedom.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub position_var: f64,
    pub velocity_var: f64,
    pub dof: f64,
}

/// Which estimator a benchmark entry runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterRule {
    /// Student's t filter on the stochastic spherical-radial rule.
    Stochastic,
    /// Student's t filter on the deterministic third-degree rule.
    Deterministic,
    /// Student's t filter on plain Monte Carlo integration.
    MonteCarlo,
    /// Gaussian stochastic-integration filter (the light-tailed baseline).
    Gaussian,
}

/// One benchmark entry: a display name, the estimator, and an optional
/// override of the scenario-wide sample count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub name: String,
    pub rule: FilterRule,
    #[serde(default)]
    pub samples: Option<usize>,
}

impl FilterConfig {
    /// Rule sample count, falling back to the scenario-wide default.
    pub fn effective_samples(&self, scenario_default: usize) -> usize {
        self.samples.unwrap_or(scenario_default)
    }
}

fn default_filter_set() -> Vec<FilterConfig> {
    vec![
        FilterConfig {
            name: "rstscf".into(),
            rule: FilterRule::Stochastic,
            samples: None,
        },
        FilterConfig {
            name: "rstcf3".into(),
            rule: FilterRule::Deterministic,
            samples: None,
        },
        FilterConfig {
            name: "rstmcf".into(),
            rule: FilterRule::MonteCarlo,
            samples: Some(10_000),
        },
        FilterConfig {
            name: "sif".into(),
            rule: FilterRule::Gaussian,
            samples: None,
        },
    ]
}

/// Full description of one tracking study, loadable from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Master seed; every run/filter substream derives from it.
    pub seed: u64,
    /// Monte Carlo runs.
    pub runs: usize,
    /// Filter steps per run (one measurement per step).
    pub steps: usize,
    /// Sampling interval in minutes.
    pub dt_min: f64,
    /// Default stochastic-rule realizations per update for sampled filters.
    pub samples: usize,
    pub process_noise: ProcessNoiseConfig,
    pub measurement_noise: MeasurementNoiseConfig,
    pub target: TargetConfig,
    pub platform: PlatformConfig,
    pub prior: PriorConfig,
    #[serde(default = "default_filter_set")]
    pub filters: Vec<FilterConfig>,
}

impl ScenarioConfig {
    /// Parse and validate a TOML scenario.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Serialize back to TOML (round-trips through [`Self::from_toml_str`]).
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Check every field once so later stages can assume sane values.
    pub fn validate(&self) -> Result<()> {
        fn positive(value: f64, key: &str) -> Result<()> {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "`{key}` must be positive and finite, got {value}"
                )));
            }
            Ok(())
        }
        fn probability(value: f64, key: &str) -> Result<()> {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "`{key}` must lie in [0, 1], got {value}"
                )));
            }
            Ok(())
        }
        fn dof(value: f64, key: &str) -> Result<()> {
            if !(value > 2.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "`{key}` must exceed 2 (finite second moments), got {value}"
                )));
            }
            Ok(())
        }

        if self.runs == 0 {
            return Err(Error::Config("`runs` must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("`steps` must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("`samples` must be at least 1".into()));
        }
        positive(self.dt_min, "dt_min")?;
        positive(self.process_noise.sigma_w, "process_noise.sigma_w")?;
        probability(
            self.process_noise.contamination_probability,
            "process_noise.contamination_probability",
        )?;
        positive(
            self.process_noise.contamination_inflation,
            "process_noise.contamination_inflation",
        )?;
        dof(self.process_noise.dof, "process_noise.dof")?;
        positive(self.measurement_noise.sigma_v, "measurement_noise.sigma_v")?;
        probability(
            self.measurement_noise.contamination_probability,
            "measurement_noise.contamination_probability",
        )?;
        positive(
            self.measurement_noise.contamination_inflation,
            "measurement_noise.contamination_inflation",
        )?;
        dof(self.measurement_noise.dof, "measurement_noise.dof")?;
        if !(self.target.speed_knots >= 0.0) || !self.target.speed_knots.is_finite() {
            return Err(Error::Config(format!(
                "`target.speed_knots` must be non-negative, got {}",
                self.target.speed_knots
            )));
        }
        if !(self.platform.speed_knots >= 0.0) || !self.platform.speed_knots.is_finite() {
            return Err(Error::Config(format!(
                "`platform.speed_knots` must be non-negative, got {}",
                self.platform.speed_knots
            )));
        }
        for (value, key) in [
            (self.target.course_deg, "target.course_deg"),
            (self.platform.initial_course_deg, "platform.initial_course_deg"),
            (self.platform.final_course_deg, "platform.final_course_deg"),
        ] {
            if !value.is_finite() {
                return Err(Error::Config(format!("`{key}` must be finite, got {value}")));
            }
        }
        for (value, key) in [
            (self.target.initial_position_km, "target.initial_position_km"),
            (
                self.platform.initial_position_km,
                "platform.initial_position_km",
            ),
        ] {
            if value.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("`{key}` must be finite")));
            }
        }
        positive(self.prior.position_var, "prior.position_var")?;
        positive(self.prior.velocity_var, "prior.velocity_var")?;
        dof(self.prior.dof, "prior.dof")?;
        if self.filters.is_empty() {
            return Err(Error::Config("`filters` must list at least one entry".into()));
        }
        for (i, f) in self.filters.iter().enumerate() {
            if f.name.trim().is_empty() {
                return Err(Error::Config(format!("`filters[{i}].name` is empty")));
            }
            if f.samples == Some(0) {
                return Err(Error::Config(format!(
                    "`filters[{i}].samples` must be at least 1"
                )));
            }
            if self.filters[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Config(format!(
                    "duplicate filter name `{}`; substream derivation needs unique names",
                    f.name
                )));
            }
        }
        Ok(())
    }

    /// Build the runnable scenario (model, noise specs, prior).
    pub fn build(&self) -> Result<Scenario> {
        self.validate()?;
        Scenario::new(self.clone())
    }
}

/// Discrete constant-velocity dynamics with white-noise acceleration, plus
/// the bearing measurement taken from the moving platform.
///
/// State layout is `[x, y, vx, vy]` (km, km/min). The transition is
/// `x⁺ = F x + G w` with a 2-D acceleration disturbance `w`;
/// [`SystemModel::transition`] applies only the deterministic part `F x`.
/// The bearing at step `k` is `atan2(y − pᵧ(k), x − pₓ(k))`, and residuals
/// are wrapped to `(−π, π]`, so a noisy bearing near ±π cannot masquerade as
/// a full-turn innovation.
#[derive(Debug, Clone)]
pub struct BearingsOnlyModel {
    transition_matrix: DMatrix<f64>,
    noise_input: DMatrix<f64>,
    platform_track: Vec<DVector<f64>>,
}

impl BearingsOnlyModel {
    /// Build the model for `steps` measurements at spacing `dt` minutes.
    pub fn new(dt: f64, platform: &PlatformConfig, steps: usize) -> Self {
        let mut f = DMatrix::identity(4, 4);
        f[(0, 2)] = dt;
        f[(1, 3)] = dt;
        let mut g = DMatrix::zeros(4, 2);
        g[(0, 0)] = 0.5 * dt * dt;
        g[(1, 1)] = 0.5 * dt * dt;
        g[(2, 0)] = dt;
        g[(3, 1)] = dt;

        let speed = knots_to_km_per_min(platform.speed_knots);
        let (vx0, vy0) = course_velocity(speed, platform.initial_course_deg);
        let (vx1, vy1) = course_velocity(speed, platform.final_course_deg);
        let mut track = Vec::with_capacity(steps + 1);
        let mut pos = DVector::from_row_slice(&platform.initial_position_km);
        track.push(pos.clone());
        for k in 1..=steps {
            let (vx, vy) = if k <= platform.turn_step {
                (vx0, vy0)
            } else {
                (vx1, vy1)
            };
            pos[0] += vx * dt;
            pos[1] += vy * dt;
            track.push(pos.clone());
        }
        BearingsOnlyModel {
            transition_matrix: f,
            noise_input: g,
            platform_track: track,
        }
    }

    /// Deterministic transition matrix `F`.
    pub fn transition_matrix(&self) -> &DMatrix<f64> {
        &self.transition_matrix
    }

    /// Disturbance input matrix `G` (4×2) mapping per-axis accelerations into
    /// the state.
    pub fn noise_input(&self) -> &DMatrix<f64> {
        &self.noise_input
    }

    /// Platform position at `step ∈ 0..=steps`.
    pub fn platform_position(&self, step: usize) -> &DVector<f64> {
        &self.platform_track[step]
    }

    /// Number of measurement steps the platform track covers.
    pub fn steps(&self) -> usize {
        self.platform_track.len() - 1
    }
}

impl SystemModel for BearingsOnlyModel {
    fn state_dim(&self) -> usize {
        4
    }

    fn measurement_dim(&self) -> usize {
        1
    }

    fn transition(&self, _step: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.transition_matrix * x
    }

    fn measurement(&self, step: usize, x: &DVector<f64>) -> DVector<f64> {
        let p = self.platform_position(step);
        DVector::from_row_slice(&[(x[1] - p[1]).atan2(x[0] - p[0])])
    }

    fn residual(&self, z: &DVector<f64>, predicted: &DVector<f64>) -> DVector<f64> {
        DVector::from_row_slice(&[wrap_angle(z[0] - predicted[0])])
    }
}

/// A validated, runnable scenario: the model plus every derived quantity the
/// harness needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    model: BearingsOnlyModel,
    process_spec: NoiseSpec,
    measurement_spec: NoiseSpec,
    initial_truth: DVector<f64>,
    prior_scale: DMatrix<f64>,
    prior_chol: DMatrix<f64>,
}

impl Scenario {
    fn new(config: ScenarioConfig) -> Result<Self> {
        let model = BearingsOnlyModel::new(config.dt_min, &config.platform, config.steps);

        // Filters see the nominal (uncontaminated) noise shapes; the truth
        // generator is what injects the outliers. For the heavy-tailed
        // filters the nominal covariance is used directly as the Student's t
        // scale, which leaves their assumed noise slightly wider than
        // nominal — that headroom is part of the design.
        let sigma_w2 = config.process_noise.sigma_w.powi(2);
        let g = model.noise_input();
        let process_scale = g * DMatrix::identity(2, 2) * sigma_w2 * g.transpose();
        let process_spec = NoiseSpec::new(process_scale, config.process_noise.dof)?;
        let measurement_scale =
            DMatrix::from_element(1, 1, config.measurement_noise.sigma_v.powi(2));
        let measurement_spec = NoiseSpec::new(measurement_scale, config.measurement_noise.dof)?;

        let speed = knots_to_km_per_min(config.target.speed_knots);
        let (vx, vy) = course_velocity(speed, config.target.course_deg);
        let initial_truth = DVector::from_row_slice(&[
            config.target.initial_position_km[0],
            config.target.initial_position_km[1],
            vx,
            vy,
        ]);

        let p = config.prior.position_var;
        let v = config.prior.velocity_var;
        let prior_scale = DMatrix::from_diagonal(&DVector::from_row_slice(&[p, p, v, v]));
        let prior_chol = DMatrix::from_diagonal(&DVector::from_row_slice(&[
            p.sqrt(),
            p.sqrt(),
            v.sqrt(),
            v.sqrt(),
        ]));

        Ok(Scenario {
            config,
            model,
            process_spec,
            measurement_spec,
            initial_truth,
            prior_scale,
            prior_chol,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn model(&self) -> &BearingsOnlyModel {
        &self.model
    }

    /// Heavy-tailed process-noise description assumed by the filters; its
    /// scale `G Σ_w Gᵀ` doubles as the Gaussian filter's process covariance.
    pub fn process_spec(&self) -> &NoiseSpec {
        &self.process_spec
    }

    /// Heavy-tailed bearing-noise description; its scale `σ_v²` doubles as
    /// the Gaussian filter's measurement covariance.
    pub fn measurement_spec(&self) -> &NoiseSpec {
        &self.measurement_spec
    }

    /// The target's exact initial state.
    pub fn initial_truth(&self) -> &DVector<f64> {
        &self.initial_truth
    }

    /// Initial spread `P₀` (covariance of the initialization draw and scale
    /// of the heavy-tailed filters' initial belief).
    pub fn prior_scale(&self) -> &DMatrix<f64> {
        &self.prior_scale
    }

    /// Cholesky factor of `P₀`.
    pub fn prior_chol(&self) -> &DMatrix<f64> {
        &self.prior_chol
    }
}
