//! Truth and measurement simulation under contaminated Gaussian noise.

use nalgebra::DVector;

use crate::rng::RngStream;
use crate::sampling::standard_normal_vector;
use crate::sim::scenario::{wrap_angle, Scenario};

use crate::filter::SystemModel;

/// One simulated trajectory with its measurement record.
#[derive(Debug, Clone)]
pub struct TruthData {
    /// True states `x₀ … x_T` (length `steps + 1`).
    pub states: Vec<DVector<f64>>,
    /// Measurements `z₁ … z_T` (length `steps`), already wrapped to `(−π, π]`.
    pub measurements: Vec<DVector<f64>>,
}

/// Draw from the contaminated zero-mean Gaussian
/// `(1 − p) · N(0, σ²I) + p · N(0, inflation · σ²I)`.
///
/// Draw order is pinned: one uniform decides the mixture component, then
/// `dim` standard normals follow — changing this would silently re-key every
/// seeded result downstream.
pub fn sample_contaminated_noise(
    rng: &mut RngStream,
    dim: usize,
    sigma: f64,
    probability: f64,
    inflation: f64,
) -> DVector<f64> {
    let contaminated = rng.uniform() < probability;
    let scale = if contaminated {
        sigma * inflation.sqrt()
    } else {
        sigma
    };
    standard_normal_vector(rng, dim) * scale
}

/// Simulate the target trajectory and its bearing record for one run.
///
/// Per step the draw order is process noise first, then measurement noise.
/// The stored measurement is the wrapped noisy bearing — noise can push the
/// raw sum just past ±π, and a physical bearing sensor reports on the circle.
pub fn simulate_truth(scenario: &Scenario, rng: &mut RngStream) -> TruthData {
    let config = scenario.config();
    let model = scenario.model();
    let steps = config.steps;

    let mut states = Vec::with_capacity(steps + 1);
    states.push(scenario.initial_truth().clone());
    let mut measurements = Vec::with_capacity(steps);

    for k in 1..=steps {
        let w = sample_contaminated_noise(
            rng,
            2,
            config.process_noise.sigma_w,
            config.process_noise.contamination_probability,
            config.process_noise.contamination_inflation,
        );
        let x = model.transition(k, states.last().expect("states start non-empty"))
            + model.noise_input() * w;

        let v = sample_contaminated_noise(
            rng,
            1,
            config.measurement_noise.sigma_v,
            config.measurement_noise.contamination_probability,
            config.measurement_noise.contamination_inflation,
        );
        let z = wrap_angle(model.measurement(k, &x)[0] + v[0]);
        states.push(x);
        measurements.push(DVector::from_row_slice(&[z]));
    }

    TruthData {
        states,
        measurements,
    }
}
