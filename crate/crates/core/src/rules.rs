//! Spherical-radial cubature rules for multivariate Student's t integrals.
//!
//! Everything here estimates vector-valued integrals of the form
//! `∫ g(x) · St(x; μ, Σ, ν) dx`. Four estimators are provided:
//!
//! * [`sstsrcr_integrate`] — the stochastic spherical-radial rule. Each sample
//!   places `2n + 1` points: the center `μ` plus the pairs
//!   `μ ± r √ν · L Q eᵢ`, where `L Lᵀ = Σ`, `Q` is a fresh Haar-orthogonal
//!   matrix, and the squared radius follows the Student-specific radial law
//!   `r² = τ/(1−τ)`, `τ ~ Beta((n+2)/2, (ν−2)/2)`. The weights
//!   `1 − n/((ν−2) r²)` (center) and `1/(2 (ν−2) r²)` (each axis point) make
//!   every single realization exact for polynomials of total degree ≤ 3,
//!   while averaging `N` independent realizations drives down the variance on
//!   everything else. The center weight is allowed to go negative; that is
//!   part of the construction, not a defect.
//! * [`deterministic_stsrcr_integrate`] — the classical third-degree rule
//!   recovered by fixing `r² = n/(ν−2)` (the choice that zeroes the center
//!   weight) and `Q = I`: `2n` equally weighted points.
//! * [`sir_integrate`] — the Gaussian-limit counterpart (`ν → ∞`): same
//!   geometry, squared radius `ρ² ~ χ²(n+2)`, weights `1 − n/ρ²` and
//!   `1/(2ρ²)`, integrating against `N(μ, Σ)`.
//! * [`mc_integrate`] — plain Monte Carlo over Student's t draws, the
//!   honest-but-noisy baseline the cubature rules are judged against.
//!
//! All stochastic rules take an explicit [`RngStream`], consume draws in a
//! fixed documented order, and are bit-reproducible for a given stream.

use nalgebra::{DMatrix, DVector};
use rand_distr::Gamma;

use crate::density::StudentTDensity;
use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::rng::RngStream;
use crate::sampling::{haar_orthogonal, multivariate_t_draw, sample_beta, sample_gamma};

/// Degrees of freedom standing in for the Gaussian limit in consistency
/// diagnostics: large enough that ν/(ν−2) is 1 + 2e-8, small enough that the
/// radial Beta parameters stay comfortably inside f64.
pub const GAUSSIAN_LIMIT_DOF: f64 = 1e8;

/// Radii below this trigger a redraw: the weights scale like r⁻², so a
/// zero-adjacent radius is numerically useless even though it has measure
/// zero under the radial law.
const MIN_RADIUS: f64 = 1e-8;

/// Redraw attempts before giving up; hitting this means the parameters are
/// so extreme the radial law keeps producing degenerate values.
const MAX_REDRAWS: u32 = 1000;

/// One realized weighted point set.
///
/// For the spherical-radial constructions the layout is the center point
/// first (when present), followed by the `±` pair for each axis, so
/// `points[2i+1]` and `points[2i+2]` mirror each other around the mean. Sets
/// produced by averaging or by Monte Carlo only promise the documented weight
/// normalization, not the pairing.
#[derive(Debug, Clone)]
pub struct CubaturePointSet {
    pub points: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
}

impl CubaturePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Σ weights; 1 (to rounding) for every rule in this module.
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σᵢ wᵢ g(xᵢ)` in storage order.
    ///
    /// Fails with [`Error::NonFiniteIntegrand`] if any evaluation returns a
    /// NaN or infinity, and with [`Error::LengthMismatch`] if `g` changes its
    /// output dimension between points.
    pub fn integrate<F>(&self, g: &F) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        debug_assert_eq!(self.points.len(), self.weights.len());
        let mut acc: Option<DVector<f64>> = None;
        for (x, &w) in self.points.iter().zip(&self.weights) {
            let v = g(x);
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteIntegrand);
            }
            match acc.as_mut() {
                None => acc = Some(v * w),
                Some(a) => {
                    if a.len() != v.len() {
                        return Err(Error::LengthMismatch(format!(
                            "integrand output changed dimension from {} to {}",
                            a.len(),
                            v.len()
                        )));
                    }
                    a.axpy(w, &v, 1.0);
                }
            }
        }
        acc.ok_or_else(|| Error::LengthMismatch("empty point set".into()))
    }
}

/// One draw from the radial law together with the weights it induces.
#[derive(Debug, Clone, Copy)]
pub struct RadialSample {
    /// The radius r (dimensionless; the point offset is `r √ν L Q eᵢ`).
    pub radius: f64,
    /// Weight on the center point, `1 − n/((ν−2) r²)`. May be negative.
    pub center_weight: f64,
    /// Weight on each of the `2n` axis points, `1/(2 (ν−2) r²)`.
    pub axis_weight: f64,
    /// How many degenerate draws were rejected before this one.
    pub redraws: u32,
}

/// Draw the squared-radius transform `r = √(τ/(1−τ))`, `τ ~ Beta((n+2)/2,
/// (ν−2)/2)`, rejecting radii below [`MIN_RADIUS`] and non-finite values
/// (τ rounding to exactly 1 at tiny `ν − 2`).
pub fn sample_radial(rng: &mut RngStream, dim: usize, dof: f64) -> Result<RadialSample> {
    if dim == 0 {
        return Err(Error::LengthMismatch("dimension must be positive".into()));
    }
    if !(dof > 2.0) || !dof.is_finite() {
        return Err(Error::DofTooSmall { dof, min: 2.0 });
    }
    let n = dim as f64;
    let a = (n + 2.0) / 2.0;
    let b = (dof - 2.0) / 2.0;
    let mut redraws = 0;
    loop {
        let tau = sample_beta(rng, a, b)?;
        let radius = (tau / (1.0 - tau)).sqrt();
        if radius.is_finite() && radius >= MIN_RADIUS {
            let denom = (dof - 2.0) * radius * radius;
            return Ok(RadialSample {
                radius,
                center_weight: 1.0 - n / denom,
                axis_weight: 1.0 / (2.0 * denom),
                redraws,
            });
        }
        redraws += 1;
        if redraws >= MAX_REDRAWS {
            return Err(Error::Domain(format!(
                "radial sampler kept producing degenerate radii (dim {dim}, dof {dof})"
            )));
        }
    }
}

/// Shared core for the three spherical-radial point builders: given a radius
/// multiplier `c` and an orientation `Q`, lay out `μ` and `μ ± c · (L Q) eᵢ`.
fn spherical_points(
    mean: &DVector<f64>,
    scale: &SpdMatrix,
    orientation: Option<&DMatrix<f64>>,
    offset_scale: f64,
    center_weight: f64,
    axis_weight: f64,
    include_center: bool,
) -> CubaturePointSet {
    let n = mean.len();
    let directions = match orientation {
        Some(q) => scale.chol_lower() * q,
        None => scale.chol_lower().clone(),
    };
    let mut points = Vec::with_capacity(2 * n + usize::from(include_center));
    let mut weights = Vec::with_capacity(2 * n + usize::from(include_center));
    if include_center {
        points.push(mean.clone());
        weights.push(center_weight);
    }
    for i in 0..n {
        let offset = directions.column(i) * offset_scale;
        points.push(mean + &offset);
        weights.push(axis_weight);
        points.push(mean - &offset);
        weights.push(axis_weight);
    }
    CubaturePointSet { points, weights }
}

fn require_rule_dof(dof: f64) -> Result<()> {
    if !(dof > 2.0) || !dof.is_finite() {
        return Err(Error::DofTooSmall { dof, min: 2.0 });
    }
    Ok(())
}

fn require_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn sstsrcr_points_raw(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    scale: &SpdMatrix,
    dof: f64,
) -> Result<CubaturePointSet> {
    require_rule_dof(dof)?;
    let n = mean.len();
    // Fixed draw order per realization: radial first, then the n² Gaussians
    // behind the orientation matrix.
    let radial = sample_radial(rng, n, dof)?;
    let q = haar_orthogonal(rng, n);
    Ok(spherical_points(
        mean,
        scale,
        Some(&q),
        radial.radius * dof.sqrt(),
        radial.center_weight,
        radial.axis_weight,
        true,
    ))
}

/// One realization (`2n + 1` points) of the stochastic Student's t
/// spherical-radial rule for `density`.
pub fn build_sstsrcr_points(
    rng: &mut RngStream,
    density: &StudentTDensity,
) -> Result<CubaturePointSet> {
    sstsrcr_points_raw(rng, density.mean(), density.scale(), density.dof())
}

/// Estimate `∫ g · St(μ, Σ, ν)` by averaging `samples` independent
/// realizations of the stochastic rule, combined in draw order.
pub fn sstsrcr_integrate<F>(
    g: &F,
    density: &StudentTDensity,
    samples: usize,
    rng: &mut RngStream,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    require_samples(samples)?;
    require_rule_dof(density.dof())?;
    let mut acc: Option<DVector<f64>> = None;
    for _ in 0..samples {
        let set = build_sstsrcr_points(rng, density)?;
        let estimate = set.integrate(g)?;
        match acc.as_mut() {
            None => acc = Some(estimate),
            Some(a) => *a += estimate,
        }
    }
    Ok(acc.expect("samples >= 1") / samples as f64)
}

/// The `2n`-point deterministic third-degree rule for `density`: radius fixed
/// at the value that zeroes the center weight, axes along `L` itself.
pub fn deterministic_stsrcr_points(density: &StudentTDensity) -> Result<CubaturePointSet> {
    require_rule_dof(density.dof())?;
    let n = density.dim() as f64;
    let dof = density.dof();
    // r² = n/(ν−2) ⇒ offset = r √ν = √(n ν / (ν−2)); axis weight 1/(2n).
    let offset = (n * dof / (dof - 2.0)).sqrt();
    Ok(spherical_points(
        density.mean(),
        density.scale(),
        None,
        offset,
        0.0,
        1.0 / (2.0 * n),
        false,
    ))
}

/// Evaluate the deterministic third-degree rule (no randomness involved).
pub fn deterministic_stsrcr_integrate<F>(g: &F, density: &StudentTDensity) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    deterministic_stsrcr_points(density)?.integrate(g)
}

pub(crate) fn sir_points_raw(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    covariance: &SpdMatrix,
) -> Result<CubaturePointSet> {
    let n = mean.len();
    let shape = (n as f64 + 2.0) / 2.0;
    let mut redraws = 0;
    let (radius, center_weight, axis_weight) = loop {
        // χ²(n+2) as Gamma(shape (n+2)/2, rate 1/2).
        let rho2 = sample_gamma(rng, shape, 0.5)?;
        let rho = rho2.sqrt();
        if rho.is_finite() && rho >= MIN_RADIUS {
            break (rho, 1.0 - n as f64 / rho2, 1.0 / (2.0 * rho2));
        }
        redraws += 1;
        if redraws >= MAX_REDRAWS {
            return Err(Error::Domain(
                "stochastic integration rule kept producing degenerate radii".into(),
            ));
        }
    };
    let q = haar_orthogonal(rng, n);
    Ok(spherical_points(
        mean,
        covariance,
        Some(&q),
        radius,
        center_weight,
        axis_weight,
        true,
    ))
}

/// Estimate the Gaussian integral `∫ g · N(μ, Σ)` with the stochastic
/// spherical-radial rule for Gaussian weights (the `ν → ∞` limit of the
/// Student's t construction): squared radius `χ²(n+2)`, fresh Haar
/// orientation per sample, `samples` realizations averaged in draw order.
pub fn sir_integrate<F>(
    g: &F,
    mean: &DVector<f64>,
    covariance: &SpdMatrix,
    samples: usize,
    rng: &mut RngStream,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if mean.len() != covariance.dim() {
        return Err(Error::LengthMismatch(format!(
            "mean has dimension {}, covariance is {}x{}",
            mean.len(),
            covariance.dim(),
            covariance.dim()
        )));
    }
    require_samples(samples)?;
    let mut acc: Option<DVector<f64>> = None;
    for _ in 0..samples {
        let set = sir_points_raw(rng, mean, covariance)?;
        let estimate = set.integrate(g)?;
        match acc.as_mut() {
            None => acc = Some(estimate),
            Some(a) => *a += estimate,
        }
    }
    Ok(acc.expect("samples >= 1") / samples as f64)
}

/// Plain Monte Carlo estimate of `∫ g · St(μ, Σ, ν)`: `samples` i.i.d. draws,
/// equal weights, accumulated in draw order. Valid for any `dof > 0`.
pub fn mc_integrate<F>(
    g: &F,
    density: &StudentTDensity,
    samples: usize,
    rng: &mut RngStream,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    require_samples(samples)?;
    mc_points_raw(rng, density.mean(), density.scale(), density.dof(), samples)?.integrate(g)
}

pub(crate) fn mc_points_raw(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    scale: &SpdMatrix,
    dof: f64,
    samples: usize,
) -> Result<CubaturePointSet> {
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::DofTooSmall { dof, min: 0.0 });
    }
    let chi2 = Gamma::new(dof / 2.0, 2.0)
        .map_err(|e| Error::Domain(format!("chi-square sampler rejected dof={dof}: {e}")))?;
    let w = 1.0 / samples as f64;
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples {
        points.push(multivariate_t_draw(rng, mean, scale, dof, &chi2));
    }
    Ok(CubaturePointSet {
        points,
        weights: vec![w; samples],
    })
}

/// The integration rules a Student's t filter can run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudentTRule {
    /// Average of `samples` stochastic spherical-radial realizations.
    Stochastic { samples: usize },
    /// The `2n`-point deterministic third-degree rule.
    Deterministic,
    /// Plain Monte Carlo with `samples` draws.
    MonteCarlo { samples: usize },
}

impl StudentTRule {
    /// Materialize one weighted point set for `St(mean, scale, dof)` whose
    /// weights sum to 1, suitable for evaluating several moment integrals on
    /// shared evaluations.
    pub(crate) fn points(
        &self,
        rng: &mut RngStream,
        mean: &DVector<f64>,
        scale: &SpdMatrix,
        dof: f64,
    ) -> Result<CubaturePointSet> {
        match *self {
            StudentTRule::Stochastic { samples } => {
                require_samples(samples)?;
                require_rule_dof(dof)?;
                let n = mean.len();
                let mut points = Vec::with_capacity(samples * (2 * n + 1));
                let mut weights = Vec::with_capacity(samples * (2 * n + 1));
                let inv = 1.0 / samples as f64;
                for _ in 0..samples {
                    let set = sstsrcr_points_raw(rng, mean, scale, dof)?;
                    points.extend(set.points);
                    weights.extend(set.weights.into_iter().map(|w| w * inv));
                }
                Ok(CubaturePointSet { points, weights })
            }
            StudentTRule::Deterministic => {
                let density = StudentTDensity::new(mean.clone(), scale.clone(), dof)?;
                deterministic_stsrcr_points(&density)
            }
            StudentTRule::MonteCarlo { samples } => {
                require_samples(samples)?;
                mc_points_raw(rng, mean, scale, dof, samples)
            }
        }
    }

    /// Estimate `∫ g · St(mean, scale, dof)` with this rule.
    pub fn integrate<F>(
        &self,
        g: &F,
        density: &StudentTDensity,
        rng: &mut RngStream,
    ) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        match *self {
            StudentTRule::Stochastic { samples } => sstsrcr_integrate(g, density, samples, rng),
            StudentTRule::Deterministic => deterministic_stsrcr_integrate(g, density),
            StudentTRule::MonteCarlo { samples } => mc_integrate(g, density, samples, rng),
        }
    }
}

/// Side-by-side estimates of a Gaussian integral: the Student's t stochastic
/// rule pushed to its Gaussian limit versus the native Gaussian stochastic
/// rule, plus their disagreement.
#[derive(Debug, Clone)]
pub struct LimitConsistencyReport {
    /// SSTSRCR estimate at `dof = GAUSSIAN_LIMIT_DOF`.
    pub student_t_estimate: DVector<f64>,
    /// Native Gaussian stochastic rule estimate.
    pub gaussian_estimate: DVector<f64>,
    /// `max_i |a_i − b_i|`.
    pub max_abs_gap: f64,
    /// `max_i |a_i − b_i| / max(1, |b_i|)`.
    pub max_rel_gap: f64,
}

/// Run the Student's t stochastic rule at [`GAUSSIAN_LIMIT_DOF`] against the
/// native Gaussian rule on the same integral with a matched sampling budget
/// (`samples` realizations each, independent derived streams), and report the
/// gap. A healthy implementation gives gaps consistent with two unbiased
/// estimators of the same quantity.
pub fn limit_consistency_check<F>(
    g: &F,
    mean: &DVector<f64>,
    covariance: &SpdMatrix,
    samples: usize,
    seed: u64,
) -> Result<LimitConsistencyReport>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let root = RngStream::new(seed);
    let mut rng_t = root.derive("limit-student-t", 0);
    let mut rng_g = root.derive("limit-gaussian", 0);
    let density = StudentTDensity::new(mean.clone(), covariance.clone(), GAUSSIAN_LIMIT_DOF)?;
    let student_t_estimate = sstsrcr_integrate(g, &density, samples, &mut rng_t)?;
    let gaussian_estimate = sir_integrate(g, mean, covariance, samples, &mut rng_g)?;
    let mut max_abs_gap = 0.0_f64;
    let mut max_rel_gap = 0.0_f64;
    for i in 0..student_t_estimate.len() {
        let gap = (student_t_estimate[i] - gaussian_estimate[i]).abs();
        max_abs_gap = max_abs_gap.max(gap);
        max_rel_gap = max_rel_gap.max(gap / gaussian_estimate[i].abs().max(1.0));
    }
    Ok(LimitConsistencyReport {
        student_t_estimate,
        gaussian_estimate,
        max_abs_gap,
        max_rel_gap,
    })
}
