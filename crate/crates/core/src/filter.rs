//! Recursive filters built on the cubature rules.
//!
//! Two filters live here. The Student's t filter propagates a heavy-tailed
//! state belief `St(mean, scale, dof)` whose fixed degrees of freedom keep it
//! outlier-tolerant: its moment integrals run through any [`StudentTRule`],
//! and the posterior scale is modulated by the squared innovation deviation,
//! so a surprising measurement inflates uncertainty instead of corrupting the
//! state. The Gaussian stochastic-integration filter is its light-tailed
//! counterpart (the formal `dof → ∞` limit) and shares all the plumbing.
//!
//! Both filters assemble the predicted mean, the innovation scale and the
//! cross scale from one shared weighted point set per update, which is both
//! cheaper and internally consistent. The literal variant that re-randomizes
//! the rule for every moment integral is available through
//! [`PointReuse::PerIntegral`] for diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, min_symmetric_eigenvalue, symmetrize, SpdMatrix};
use crate::rng::RngStream;
use crate::rules::{sir_points_raw, CubaturePointSet, StudentTRule};

/// Student's t state belief `St(mean, scale, dof)`.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    mean: DVector<f64>,
    scale: SpdMatrix,
    dof: f64,
}

impl StateEstimate {
    /// Validate a raw (mean, scale, dof) triple into a state estimate.
    ///
    /// The scale is symmetrized and must then admit a Cholesky factorization;
    /// the mean must be finite; `dof` must exceed 2 so the scale corresponds
    /// to a finite covariance.
    pub fn new(mean: DVector<f64>, scale: DMatrix<f64>, dof: f64) -> Result<Self> {
        Self::validated(mean, scale, dof, "state scale")
    }

    fn validated(
        mean: DVector<f64>,
        scale: DMatrix<f64>,
        dof: f64,
        context: &str,
    ) -> Result<Self> {
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "state mean contains non-finite entries ({context})"
            )));
        }
        if !(dof > 2.0) || !dof.is_finite() {
            return Err(Error::DofTooSmall { dof, min: 2.0 });
        }
        if mean.len() != scale.nrows() {
            return Err(Error::LengthMismatch(format!(
                "mean has dimension {}, scale is {}x{}",
                mean.len(),
                scale.nrows(),
                scale.ncols()
            )));
        }
        let sym = symmetrize(&scale);
        let scale = SpdMatrix::new(sym).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => Error::NotPositiveDefinite {
                context: context.to_string(),
            },
            other => other,
        })?;
        Ok(StateEstimate { mean, scale, dof })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn scale(&self) -> &SpdMatrix {
        &self.scale
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Gaussian state belief `N(mean, covariance)`.
#[derive(Debug, Clone)]
pub struct GaussianEstimate {
    mean: DVector<f64>,
    covariance: SpdMatrix,
}

impl GaussianEstimate {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "state mean contains non-finite entries".into(),
            ));
        }
        if mean.len() != covariance.nrows() {
            return Err(Error::LengthMismatch(format!(
                "mean has dimension {}, covariance is {}x{}",
                mean.len(),
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        let covariance = SpdMatrix::new(symmetrize(&covariance))?;
        Ok(GaussianEstimate { mean, covariance })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &SpdMatrix {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Heavy-tailed noise description: Student's t with scale `scale` (symmetric
/// positive *semi*definite — state-space process noise is often
/// rank-deficient) and `dof > 2`.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    scale: DMatrix<f64>,
    dof: f64,
}

impl NoiseSpec {
    pub fn new(scale: DMatrix<f64>, dof: f64) -> Result<Self> {
        if scale.nrows() != scale.ncols() || scale.is_empty() {
            return Err(Error::LengthMismatch(format!(
                "noise scale must be square and non-empty, got {}x{}",
                scale.nrows(),
                scale.ncols()
            )));
        }
        let gap = asymmetry(&scale);
        if gap > 1e-12 {
            return Err(Error::Domain(format!(
                "noise scale is not symmetric (asymmetry {gap:.3e})"
            )));
        }
        let sym = symmetrize(&scale);
        let floor = -1e-10 * crate::linalg::max_abs(&sym).max(1.0);
        let min_eig = min_symmetric_eigenvalue(&sym);
        if min_eig < floor {
            return Err(Error::NotPositiveDefinite {
                context: format!("noise scale has eigenvalue {min_eig:.3e}"),
            });
        }
        if !(dof > 2.0) || !dof.is_finite() {
            return Err(Error::DofTooSmall { dof, min: 2.0 });
        }
        Ok(NoiseSpec { scale: sym, dof })
    }

    pub fn scale(&self) -> &DMatrix<f64> {
        &self.scale
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn dim(&self) -> usize {
        self.scale.nrows()
    }
}

/// How a filter update spends rule randomness on its moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointReuse {
    /// One point set per update, all moments read off the same evaluations.
    /// Cheaper and internally consistent; the default.
    #[default]
    Shared,
    /// Fresh rule randomness for every moment integral (the literal cascade
    /// of rule invocations). Noisier at equal cost; kept for diagnostics and
    /// for reproducing the textbook formulation exactly.
    PerIntegral,
}

/// Dynamics/measurement pair for a tracking problem.
///
/// `step` is the discrete time index of the transition target / measurement,
/// which lets models carry moving observers or schedules without interior
/// mutability. `residual` exists so angular measurements can wrap their
/// innovation; the default is plain subtraction.
pub trait SystemModel {
    fn state_dim(&self) -> usize;
    fn measurement_dim(&self) -> usize;
    /// Propagate state from step − 1 to `step`.
    fn transition(&self, step: usize, x: &DVector<f64>) -> DVector<f64>;
    /// Measurement function at `step`.
    fn measurement(&self, step: usize, x: &DVector<f64>) -> DVector<f64>;
    /// Innovation `z − predicted`, wrapped as the measurement space requires.
    fn residual(&self, z: &DVector<f64>, predicted: &DVector<f64>) -> DVector<f64> {
        z - predicted
    }
}

/// Everything the measurement update computed on the way to the posterior.
#[derive(Debug, Clone)]
pub struct MeasurementReport {
    /// Predicted measurement `ẑ`.
    pub predicted_measurement: DVector<f64>,
    /// Wrapped innovation fed to the gain.
    pub innovation: DVector<f64>,
    /// Innovation scale `S_zz` (after any jitter repair).
    pub innovation_scale: DMatrix<f64>,
    /// Cross scale `S_xz`.
    pub cross_scale: DMatrix<f64>,
    /// Filter gain `K`.
    pub gain: DMatrix<f64>,
    /// Squared innovation deviation `Δ² = rᵀ S_zz⁻¹ r`.
    pub squared_deviation: f64,
    /// Whether the one-shot diagonal jitter had to repair `S_zz`.
    pub regularized: bool,
}

/// Weighted first moment of stored evaluations.
fn weighted_mean(values: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
    let mut acc = DVector::zeros(values[0].len());
    for (v, &w) in values.iter().zip(weights) {
        acc.axpy(w, v, 1.0);
    }
    acc
}

/// Weighted central second moment `Σ w (v − c)(v − c)ᵀ` of stored evaluations.
fn weighted_central_second(
    values: &[DVector<f64>],
    weights: &[f64],
    center: &DVector<f64>,
) -> DMatrix<f64> {
    let n = center.len();
    let mut acc = DMatrix::zeros(n, n);
    let mut d = DVector::zeros(n);
    for (v, &w) in values.iter().zip(weights) {
        d.copy_from(v);
        d -= center;
        acc.ger(w, &d, &d, 1.0);
    }
    acc
}

/// Weighted cross moment `Σ w (a − ca)(b − cb)ᵀ`.
fn weighted_cross(
    a: &[DVector<f64>],
    ca: &DVector<f64>,
    b: &[DVector<f64>],
    cb: &DVector<f64>,
    weights: &[f64],
) -> DMatrix<f64> {
    let mut acc = DMatrix::zeros(ca.len(), cb.len());
    let mut da = DVector::zeros(ca.len());
    let mut db = DVector::zeros(cb.len());
    for ((va, vb), &w) in a.iter().zip(b).zip(weights) {
        da.copy_from(va);
        da -= ca;
        db.copy_from(vb);
        db -= cb;
        acc.ger(w, &da, &db, 1.0);
    }
    acc
}

/// Evaluate `g` on every point, enforcing a fixed output dimension and
/// finiteness.
fn evaluate_all<F>(points: &[DVector<f64>], g: &F, expected_dim: Option<usize>) -> Result<Vec<DVector<f64>>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut out = Vec::with_capacity(points.len());
    let mut dim = expected_dim;
    for p in points {
        let v = g(p);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteIntegrand);
        }
        match dim {
            None => dim = Some(v.len()),
            Some(d) => {
                if v.len() != d {
                    return Err(Error::LengthMismatch(format!(
                        "function output dimension {} does not match expected {}",
                        v.len(),
                        d
                    )));
                }
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Time update of the Student's t filter.
///
/// Propagates `St(mean, scale, dof)` through `transition` and inflates the
/// result with the process-noise term: with `ν₁ = process_noise.dof` and
/// `ν₃ = state.dof`,
///
/// ```text
/// mean⁺  = ∫ f(x) St(x) dx
/// scale⁺ = (ν₃−2)/ν₃ · (∫ f fᵀ St − mean⁺ mean⁺ᵀ) + ν₁(ν₃−2)/((ν₁−2)ν₃) · Q
/// ```
///
/// both integrals estimated by `rule`. The degrees of freedom are carried
/// through unchanged — matching predicted moments while keeping the belief's
/// tail weight fixed is what stops `dof` from drifting to infinity over the
/// recursion and losing robustness.
pub fn time_update<F>(
    state: &StateEstimate,
    transition: F,
    process_noise: &NoiseSpec,
    rule: StudentTRule,
    reuse: PointReuse,
    rng: &mut RngStream,
) -> Result<StateEstimate>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = state.dim();
    if process_noise.dim() != n {
        return Err(Error::LengthMismatch(format!(
            "process noise is {}x{}, state has dimension {}",
            process_noise.dim(),
            process_noise.dim(),
            n
        )));
    }
    let nu1 = process_noise.dof();
    let nu3 = state.dof();
    let c_state = (nu3 - 2.0) / nu3;
    let c_noise = nu1 * (nu3 - 2.0) / ((nu1 - 2.0) * nu3);

    let (mean, spread) = match reuse {
        PointReuse::Shared => {
            let set = rule.points(rng, state.mean(), state.scale(), nu3)?;
            let evals = evaluate_all(&set.points, &transition, Some(n))?;
            let mean = weighted_mean(&evals, &set.weights);
            let spread = weighted_central_second(&evals, &set.weights, &mean);
            (mean, spread)
        }
        PointReuse::PerIntegral => {
            let density =
                crate::density::StudentTDensity::new(state.mean().clone(), state.scale().clone(), nu3)?;
            let wrapped = |x: &DVector<f64>| {
                let v = transition(x);
                debug_assert_eq!(v.len(), n);
                v
            };
            let mean = rule.integrate(&wrapped, &density, rng)?;
            if mean.len() != n {
                return Err(Error::LengthMismatch(format!(
                    "transition output dimension {} does not match state dimension {n}",
                    mean.len()
                )));
            }
            let flat = |x: &DVector<f64>| {
                let v = transition(x);
                let outer = &v * v.transpose();
                DVector::from_column_slice(outer.as_slice())
            };
            let second = rule.integrate(&flat, &density, rng)?;
            let second = DMatrix::from_column_slice(n, n, second.as_slice());
            (mean.clone(), second - &mean * mean.transpose())
        }
    };

    let scale = &spread * c_state + process_noise.scale() * c_noise;
    StateEstimate::validated(mean, scale, nu3, "predicted scale")
}

/// Relative jitter applied (once) to an innovation scale that fails its
/// factorization: `1e-9 · trace/m` added to the diagonal.
const JITTER_RELATIVE: f64 = 1e-9;

/// Factor an innovation scale, repairing it at most once with the bounded
/// diagonal jitter. Returns the (possibly repaired) matrix, its factor
/// wrapper, and whether the repair fired.
fn factor_innovation(s_zz: DMatrix<f64>) -> Result<(SpdMatrix, bool)> {
    match SpdMatrix::new(s_zz.clone()) {
        Ok(m) => Ok((m, false)),
        Err(_) => {
            let m_dim = s_zz.nrows() as f64;
            let jitter = JITTER_RELATIVE * s_zz.trace() / m_dim;
            let repaired = &s_zz + DMatrix::identity(s_zz.nrows(), s_zz.ncols()) * jitter;
            match SpdMatrix::new(repaired) {
                Ok(m) => Ok((m, true)),
                Err(_) => Err(Error::InnovationNotPositiveDefinite),
            }
        }
    }
}

/// Measurement update of the Student's t filter.
///
/// Computes the predicted measurement, innovation scale and cross scale under
/// the predicted belief, applies the gain, and rescales the posterior spread
/// by `(ν₃ + Δ²)/(ν₃ + m − 2) · (ν₃ − 2)/ν₃`, where `Δ²` is the squared
/// innovation deviation. That factor is the robustness mechanism: a
/// measurement far outside the predicted innovation spread (large `Δ²`)
/// *grows* the posterior scale rather than letting an outlier masquerade as
/// information.
pub fn measurement_update<H, R>(
    predicted: &StateEstimate,
    z: &DVector<f64>,
    measurement: H,
    residual: R,
    measurement_noise: &NoiseSpec,
    rule: StudentTRule,
    reuse: PointReuse,
    rng: &mut RngStream,
) -> Result<(StateEstimate, MeasurementReport)>
where
    H: Fn(&DVector<f64>) -> DVector<f64>,
    R: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
{
    let m = z.len();
    if measurement_noise.dim() != m {
        return Err(Error::LengthMismatch(format!(
            "measurement noise is {}x{}, measurement has dimension {m}",
            measurement_noise.dim(),
            measurement_noise.dim(),
        )));
    }
    let nu2 = measurement_noise.dof();
    let nu3 = predicted.dof();
    let c_state = (nu3 - 2.0) / nu3;
    let c_noise = nu2 * (nu3 - 2.0) / ((nu2 - 2.0) * nu3);

    let (z_pred, spread_zz, spread_xz) = match reuse {
        PointReuse::Shared => {
            let set = rule.points(rng, predicted.mean(), predicted.scale(), nu3)?;
            let evals = evaluate_all(&set.points, &measurement, Some(m))?;
            let z_pred = weighted_mean(&evals, &set.weights);
            let spread_zz = weighted_central_second(&evals, &set.weights, &z_pred);
            let spread_xz =
                weighted_cross(&set.points, predicted.mean(), &evals, &z_pred, &set.weights);
            (z_pred, spread_zz, spread_xz)
        }
        PointReuse::PerIntegral => {
            let density = crate::density::StudentTDensity::new(
                predicted.mean().clone(),
                predicted.scale().clone(),
                nu3,
            )?;
            let z_pred = rule.integrate(&|x: &DVector<f64>| measurement(x), &density, rng)?;
            if z_pred.len() != m {
                return Err(Error::LengthMismatch(format!(
                    "measurement output dimension {} does not match measurement dimension {m}",
                    z_pred.len()
                )));
            }
            let flat_zz = |x: &DVector<f64>| {
                let v = measurement(x);
                let outer = &v * v.transpose();
                DVector::from_column_slice(outer.as_slice())
            };
            let second = rule.integrate(&flat_zz, &density, rng)?;
            let second = DMatrix::from_column_slice(m, m, second.as_slice());
            let spread_zz = second - &z_pred * z_pred.transpose();

            let n = predicted.dim();
            let flat_xz = |x: &DVector<f64>| {
                let v = measurement(x);
                let outer = x * v.transpose();
                DVector::from_column_slice(outer.as_slice())
            };
            let cross = rule.integrate(&flat_xz, &density, rng)?;
            let cross = DMatrix::from_column_slice(n, m, cross.as_slice());
            let spread_xz = cross - predicted.mean() * z_pred.transpose();
            (z_pred, spread_zz, spread_xz)
        }
    };

    let s_zz_raw = symmetrize(&(&spread_zz * c_state + measurement_noise.scale() * c_noise));
    let (s_zz, regularized) = factor_innovation(s_zz_raw)?;
    let s_xz = spread_xz * c_state;

    let innovation = residual(z, &z_pred);
    if innovation.len() != m {
        return Err(Error::LengthMismatch(format!(
            "residual dimension {} does not match measurement dimension {m}",
            innovation.len()
        )));
    }
    if innovation.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("residual is not finite".into()));
    }

    let squared_deviation = s_zz.inv_quadratic_form(&innovation);
    // Gain K = S_xz S_zz⁻¹ via the factored solve of S_zz Kᵀ = S_xzᵀ.
    let gain = s_zz.solve_matrix(&s_xz.transpose()).transpose();

    let mean = predicted.mean() + &gain * &innovation;
    let shrink = predicted.scale().matrix() - &s_xz * gain.transpose();
    let gamma =
        (nu3 - 2.0) * (nu3 + squared_deviation) / (nu3 * (nu3 + m as f64 - 2.0));
    let scale = symmetrize(&(shrink * gamma));

    let posterior = StateEstimate::validated(mean, scale, nu3, "posterior scale")?;
    let report = MeasurementReport {
        predicted_measurement: z_pred,
        innovation,
        innovation_scale: s_zz.matrix().clone(),
        cross_scale: s_xz,
        gain,
        squared_deviation,
        regularized,
    };
    Ok((posterior, report))
}

/// One full predict-update step of the recursive Student's t stochastic
/// cubature filter on a [`SystemModel`].
#[allow(clippy::too_many_arguments)]
pub fn rstscf_step<M: SystemModel>(
    state: &StateEstimate,
    model: &M,
    step: usize,
    z: &DVector<f64>,
    process_noise: &NoiseSpec,
    measurement_noise: &NoiseSpec,
    rule: StudentTRule,
    reuse: PointReuse,
    rng: &mut RngStream,
) -> Result<(StateEstimate, MeasurementReport)> {
    let predicted = time_update(
        state,
        |x| model.transition(step, x),
        process_noise,
        rule,
        reuse,
        rng,
    )?;
    measurement_update(
        &predicted,
        z,
        |x| model.measurement(step, x),
        |z, z_pred| model.residual(z, z_pred),
        measurement_noise,
        rule,
        reuse,
        rng,
    )
}

/// Shared Gaussian point set: `samples` realizations of the Gaussian
/// stochastic rule concatenated with weights `1/samples`.
fn gaussian_points(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    covariance: &SpdMatrix,
    samples: usize,
) -> Result<CubaturePointSet> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let n = mean.len();
    let inv = 1.0 / samples as f64;
    let mut points = Vec::with_capacity(samples * (2 * n + 1));
    let mut weights = Vec::with_capacity(samples * (2 * n + 1));
    for _ in 0..samples {
        let set = sir_points_raw(rng, mean, covariance)?;
        points.extend(set.points);
        weights.extend(set.weights.into_iter().map(|w| w * inv));
    }
    Ok(CubaturePointSet { points, weights })
}

/// Time update of the Gaussian stochastic-integration filter.
///
/// `process_covariance` is a plain covariance matrix (symmetric PSD).
pub fn sif_time_update<F>(
    state: &GaussianEstimate,
    transition: F,
    process_covariance: &DMatrix<f64>,
    samples: usize,
    rng: &mut RngStream,
) -> Result<GaussianEstimate>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = state.dim();
    if process_covariance.nrows() != n || process_covariance.ncols() != n {
        return Err(Error::LengthMismatch(format!(
            "process covariance is {}x{}, state has dimension {n}",
            process_covariance.nrows(),
            process_covariance.ncols()
        )));
    }
    let set = gaussian_points(rng, state.mean(), state.covariance(), samples)?;
    let evals = evaluate_all(&set.points, &transition, Some(n))?;
    let mean = weighted_mean(&evals, &set.weights);
    let spread = weighted_central_second(&evals, &set.weights, &mean);
    GaussianEstimate::new(mean, spread + process_covariance)
}

/// Measurement update of the Gaussian stochastic-integration filter.
pub fn sif_measurement_update<H, R>(
    predicted: &GaussianEstimate,
    z: &DVector<f64>,
    measurement: H,
    residual: R,
    measurement_covariance: &DMatrix<f64>,
    samples: usize,
    rng: &mut RngStream,
) -> Result<(GaussianEstimate, MeasurementReport)>
where
    H: Fn(&DVector<f64>) -> DVector<f64>,
    R: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
{
    let m = z.len();
    if measurement_covariance.nrows() != m || measurement_covariance.ncols() != m {
        return Err(Error::LengthMismatch(format!(
            "measurement covariance is {}x{}, measurement has dimension {m}",
            measurement_covariance.nrows(),
            measurement_covariance.ncols()
        )));
    }
    let set = gaussian_points(rng, predicted.mean(), predicted.covariance(), samples)?;
    let evals = evaluate_all(&set.points, &measurement, Some(m))?;
    let z_pred = weighted_mean(&evals, &set.weights);
    let spread_zz = weighted_central_second(&evals, &set.weights, &z_pred);
    let spread_xz = weighted_cross(&set.points, predicted.mean(), &evals, &z_pred, &set.weights);

    let s_zz_raw = symmetrize(&(spread_zz + measurement_covariance));
    let (s_zz, regularized) = factor_innovation(s_zz_raw)?;

    let innovation = residual(z, &z_pred);
    if innovation.len() != m {
        return Err(Error::LengthMismatch(format!(
            "residual dimension {} does not match measurement dimension {m}",
            innovation.len()
        )));
    }
    if innovation.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("residual is not finite".into()));
    }

    let squared_deviation = s_zz.inv_quadratic_form(&innovation);
    let gain = s_zz.solve_matrix(&spread_xz.transpose()).transpose();
    let mean = predicted.mean() + &gain * &innovation;
    let covariance = predicted.covariance().matrix() - &spread_xz * gain.transpose();

    let posterior = GaussianEstimate::new(mean, covariance)?;
    let report = MeasurementReport {
        predicted_measurement: z_pred,
        innovation,
        innovation_scale: s_zz.matrix().clone(),
        cross_scale: spread_xz,
        gain,
        squared_deviation,
        regularized,
    };
    Ok((posterior, report))
}

/// One full predict-update step of the Gaussian stochastic-integration
/// filter on a [`SystemModel`].
#[allow(clippy::too_many_arguments)]
pub fn sif_step<M: SystemModel>(
    state: &GaussianEstimate,
    model: &M,
    step: usize,
    z: &DVector<f64>,
    process_covariance: &DMatrix<f64>,
    measurement_covariance: &DMatrix<f64>,
    samples: usize,
    rng: &mut RngStream,
) -> Result<(GaussianEstimate, MeasurementReport)> {
    let predicted = sif_time_update(
        state,
        |x| model.transition(step, x),
        process_covariance,
        samples,
        rng,
    )?;
    sif_measurement_update(
        &predicted,
        z,
        |x| model.measurement(step, x),
        |z, z_pred| model.residual(z, z_pred),
        measurement_covariance,
        samples,
        rng,
    )
}
