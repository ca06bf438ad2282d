//! Multivariate Student's t density.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::rng::RngStream;
use crate::sampling::sample_multivariate_t;
use crate::special::ln_gamma;

/// `St(mean, scale, dof)` — the weight against which all rules in this crate
/// integrate.
///
/// `scale` is the scale matrix Σ, not the covariance: for `dof > 2` the
/// covariance is `dof/(dof−2) · Σ`. Any `dof > 0` is a valid density; the
/// spherical-radial constructions additionally require `dof > 2` and say so
/// at their own entry points.
#[derive(Debug, Clone)]
pub struct StudentTDensity {
    mean: DVector<f64>,
    scale: SpdMatrix,
    dof: f64,
}

impl StudentTDensity {
    pub fn new(mean: DVector<f64>, scale: SpdMatrix, dof: f64) -> Result<Self> {
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
        Ok(StudentTDensity { mean, scale, dof })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
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

    /// Covariance matrix `dof/(dof−2) · Σ`; requires `dof > 2`.
    pub fn covariance(&self) -> Result<nalgebra::DMatrix<f64>> {
        if self.dof <= 2.0 {
            return Err(Error::DofTooSmall {
                dof: self.dof,
                min: 2.0,
            });
        }
        Ok(self.scale.matrix() * (self.dof / (self.dof - 2.0)))
    }

    /// Log density at `x`. Entirely in log space; far-tail evaluations return
    /// large negative values rather than underflowing to `-inf`.
    pub fn logpdf(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch(format!(
                "point has dimension {}, density has {}",
                x.len(),
                self.dim()
            )));
        }
        let n = self.dim() as f64;
        let nu = self.dof;
        let d2 = self.scale.inv_quadratic_form(&(x - &self.mean));
        Ok(ln_gamma((nu + n) / 2.0)?
            - ln_gamma(nu / 2.0)?
            - 0.5 * n * (nu * std::f64::consts::PI).ln()
            - 0.5 * self.scale.ln_det()
            - 0.5 * (nu + n) * (d2 / nu).ln_1p())
    }

    /// One random draw from the density.
    pub fn sample(&self, rng: &mut RngStream) -> DVector<f64> {
        sample_multivariate_t(rng, &self.mean, &self.scale, self.dof)
            .expect("density invariants guarantee valid sampler parameters")
    }
}
