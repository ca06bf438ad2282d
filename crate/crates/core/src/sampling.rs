//! Scalar, matrix and multivariate samplers on top of [`RngStream`].
//!
//! Draw orders inside each sampler are fixed and documented, because the
//! reproducibility contract is sequence-level: a given `(seed, stream)` must
//! yield the same variates forever, not merely the same distribution.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::rng::RngStream;

/// One standard normal variate (ziggurat).
pub fn standard_normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

/// Vector of `n` independent standard normal variates.
pub fn standard_normal_vector(rng: &mut RngStream, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| standard_normal(rng))
}

/// One `Gamma(shape, rate)` variate (mean `shape / rate`).
///
/// Uses the squeeze/rejection sampler with the shape-boost for `shape < 1`,
/// which stays accurate for the very small and very large shapes the radial
/// law produces as the degrees of freedom approach 2 or grow to ~1e8.
pub fn sample_gamma(rng: &mut RngStream, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Domain(format!(
            "gamma shape must be finite and > 0, got {shape}"
        )));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!(
            "gamma rate must be finite and > 0, got {rate}"
        )));
    }
    let dist = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::Domain(format!("gamma sampler rejected parameters: {e}")))?;
    Ok(dist.sample(rng))
}

/// One `Beta(a, b)` variate, built from two gamma draws as
/// `g₁ / (g₁ + g₂)` with `g₁ ~ Gamma(a, 1)`, `g₂ ~ Gamma(b, 1)`.
///
/// Draw order is fixed: `g₁` first, then `g₂`. The (astronomically rare)
/// event that both draws underflow to zero triggers a redraw of the pair.
pub fn sample_beta(rng: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "beta parameters must be finite and > 0, got a={a}, b={b}"
        )));
    }
    let ga = Gamma::new(a, 1.0)
        .map_err(|e| Error::Domain(format!("beta sampler rejected a={a}: {e}")))?;
    let gb = Gamma::new(b, 1.0)
        .map_err(|e| Error::Domain(format!("beta sampler rejected b={b}: {e}")))?;
    loop {
        let g1 = ga.sample(rng);
        let g2 = gb.sample(rng);
        let sum = g1 + g2;
        if sum > 0.0 {
            return Ok(g1 / sum);
        }
    }
}

/// A Haar-distributed `n × n` orthogonal matrix.
///
/// QR of an i.i.d. standard normal matrix, followed by the sign correction
/// that multiplies column `i` of `Q` by the sign of `R_ii`. Skipping the
/// correction leaves the factorization's sign convention imprinted on `Q`,
/// which visibly biases the distribution; with it, `Q` is exactly Haar.
pub fn haar_orthogonal(rng: &mut RngStream, n: usize) -> DMatrix<f64> {
    assert!(n > 0, "orthogonal matrix dimension must be positive");
    let gaussian = DMatrix::from_fn(n, n, |_, _| standard_normal(rng));
    let qr = gaussian.qr();
    let r_diag = qr.r().diagonal().clone_owned();
    let mut q = qr.q();
    for i in 0..n {
        if r_diag[i] < 0.0 {
            let mut col = q.column_mut(i);
            col.neg_mut();
        }
    }
    q
}

/// One draw from the multivariate Student's t `St(mean, scale, dof)`,
/// via `x = mean + L z √(dof / w)` with `w ~ χ²_dof` and `z ~ N(0, I)`.
///
/// Draw order is fixed: `w` first, then the `n` components of `z`.
pub fn sample_multivariate_t(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    scale: &SpdMatrix,
    dof: f64,
) -> Result<DVector<f64>> {
    if mean.len() != scale.dim() {
        return Err(Error::LengthMismatch(format!(
            "mean has dimension {}, scale is {}x{}",
            mean.len(),
            scale.dim(),
            scale.dim()
        )));
    }
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::DofTooSmall { dof, min: 0.0 });
    }
    let chi2 = Gamma::new(dof / 2.0, 2.0)
        .map_err(|e| Error::Domain(format!("chi-square sampler rejected dof={dof}: {e}")))?;
    Ok(multivariate_t_draw(rng, mean, scale, dof, &chi2))
}

/// Shared inner draw so batch callers can construct the χ² sampler once.
pub(crate) fn multivariate_t_draw(
    rng: &mut RngStream,
    mean: &DVector<f64>,
    scale: &SpdMatrix,
    dof: f64,
    chi2: &Gamma<f64>,
) -> DVector<f64> {
    let w = loop {
        let w = chi2.sample(rng);
        if w > 0.0 && w.is_finite() {
            break w;
        }
    };
    let z = standard_normal_vector(rng, mean.len());
    mean + scale.chol_lower() * z * (dof / w).sqrt()
}
