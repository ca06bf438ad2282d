//! Symmetric positive (semi)definite matrix plumbing.
//!
//! Everything downstream — point generation, innovation solves, Mahalanobis
//! distances — runs through Cholesky factors. No matrix is ever inverted
//! explicitly; solves go through the triangular factors, which is both faster
//! and better conditioned.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest absolute entry, used to scale relative tolerances.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `(A + Aᵀ)/2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

/// Worst asymmetry relative to the matrix magnitude:
/// `max|A − Aᵀ| / max(1, max|A|)`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / max_abs(m).max(1.0)
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = m`.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot is not strictly
/// positive; `context` names the matrix in the error so filter-level failures
/// stay attributable.
pub fn cholesky_lower(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::LengthMismatch(format!(
            "cholesky of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            context: format!("{context}: non-finite entries"),
        });
    }
    m.clone()
        .cholesky()
        .map(|c| c.unpack())
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: context.to_string(),
        })
}

/// Smallest eigenvalue of a symmetric matrix (used for PSD validation of
/// noise shapes, which may legitimately be rank-deficient).
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// A validated symmetric positive definite matrix with its Cholesky factor
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validate and wrap a matrix.
    ///
    /// The input must be square, symmetric to within `1e-12` relative, and
    /// admit a Cholesky factorization. The stored matrix is exactly
    /// symmetrized so `matrix()[(i, j)] == matrix()[(j, i)]` bit-for-bit.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::LengthMismatch(format!(
                "SPD matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.is_empty() {
            return Err(Error::LengthMismatch(
                "SPD matrix must have positive dimension".into(),
            ));
        }
        let gap = asymmetry(&matrix);
        if gap > 1e-12 {
            return Err(Error::Domain(format!(
                "matrix is not symmetric (asymmetry {gap:.3e} exceeds 1e-12 relative)"
            )));
        }
        let sym = symmetrize(&matrix);
        let chol_lower = cholesky_lower(&sym, "SPD validation")?;
        Ok(SpdMatrix {
            matrix: sym,
            chol_lower,
        })
    }

    /// Identity of dimension `n ≥ 1`.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity dimension must be positive");
        SpdMatrix {
            matrix: DMatrix::identity(n, n),
            chol_lower: DMatrix::identity(n, n),
        }
    }

    /// Diagonal matrix from strictly positive entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::LengthMismatch(
                "diagonal must have at least one entry".into(),
            ));
        }
        if let Some(bad) = diag.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite {
                context: format!("diagonal entry {bad} is not strictly positive"),
            });
        }
        let matrix = DMatrix::from_diagonal(&DVector::from_row_slice(diag));
        let chol_lower = DMatrix::from_diagonal(&DVector::from_iterator(
            diag.len(),
            diag.iter().map(|v| v.sqrt()),
        ));
        Ok(SpdMatrix { matrix, chol_lower })
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The matrix itself (exactly symmetric).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Lower Cholesky factor `L`, `L Lᵀ = matrix`.
    pub fn chol_lower(&self) -> &DMatrix<f64> {
        &self.chol_lower
    }

    /// Solve `M x = b` through the triangular factors.
    pub fn solve_vector(&self, b: &DVector<f64>) -> DVector<f64> {
        let y = self
            .chol_lower
            .solve_lower_triangular(b)
            .expect("Cholesky factor has strictly positive diagonal");
        self.chol_lower
            .transpose()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor has strictly positive diagonal")
    }

    /// Solve `M X = B` column-wise through the triangular factors.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let y = self
            .chol_lower
            .solve_lower_triangular(b)
            .expect("Cholesky factor has strictly positive diagonal");
        self.chol_lower
            .transpose()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor has strictly positive diagonal")
    }

    /// Quadratic form in the inverse, `rᵀ M⁻¹ r`, computed as `‖L⁻¹ r‖²`
    /// (always ≥ 0, unlike a naive inverse-multiply round trip).
    pub fn inv_quadratic_form(&self, r: &DVector<f64>) -> f64 {
        let y = self
            .chol_lower
            .solve_lower_triangular(r)
            .expect("Cholesky factor has strictly positive diagonal");
        y.norm_squared()
    }

    /// `ln det M = 2 Σ ln L_ii`, stable for tiny and huge determinants.
    pub fn ln_det(&self) -> f64 {
        2.0 * self.chol_lower.diagonal().iter().map(|v| v.ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spd_4x4() -> DMatrix<f64> {
        // A B Bᵀ + I construction is SPD for any B.
        let b = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.8, -0.3, 0.1, 0.0, //
                0.2, 1.1, -0.4, 0.3, //
                -0.5, 0.2, 0.9, 0.1, //
                0.1, 0.0, -0.2, 1.3,
            ],
        );
        &b * b.transpose() + DMatrix::identity(4, 4)
    }

    #[test]
    fn cholesky_reconstructs_the_matrix() {
        let m = spd_4x4();
        let spd = SpdMatrix::new(m.clone()).unwrap();
        let l = spd.chol_lower();
        let rebuilt = l * l.transpose();
        let err = max_abs(&(&rebuilt - &m));
        assert!(
            err <= 1e-12 * max_abs(&m),
            "reconstruction error {err:.3e} too large"
        );
    }

    #[test]
    fn cholesky_factor_is_lower_triangular_with_positive_diagonal() {
        let spd = SpdMatrix::new(spd_4x4()).unwrap();
        let l = spd.chol_lower();
        for i in 0..4 {
            assert!(l[(i, i)] > 0.0);
            for j in (i + 1)..4 {
                assert_eq!(l[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.1]);
        match SpdMatrix::new(m) {
            Err(Error::NotPositiveDefinite { .. }) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficient_matrix_is_rejected() {
        // vvᵀ has rank 1; Cholesky must hit a zero pivot.
        let v = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        let m = &v * v.transpose();
        assert!(SpdMatrix::new(m).is_err());
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        match SpdMatrix::new(m) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected Domain error, got {other:?}"),
        }
    }

    #[test]
    fn solve_matches_direct_inverse() {
        let spd = SpdMatrix::new(spd_4x4()).unwrap();
        let b = DVector::from_row_slice(&[1.0, -2.0, 0.5, 3.0]);
        let x = spd.solve_vector(&b);
        let back = spd.matrix() * &x;
        for i in 0..4 {
            assert_abs_diff_eq!(back[i], b[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn inv_quadratic_form_agrees_with_solve() {
        let spd = SpdMatrix::new(spd_4x4()).unwrap();
        let r = DVector::from_row_slice(&[0.3, 1.0, -0.7, 0.2]);
        let direct = r.dot(&spd.solve_vector(&r));
        assert_abs_diff_eq!(spd.inv_quadratic_form(&r), direct, epsilon = 1e-12);
    }

    #[test]
    fn ln_det_matches_determinant() {
        let spd = SpdMatrix::new(spd_4x4()).unwrap();
        let det = spd.matrix().determinant();
        assert_abs_diff_eq!(spd.ln_det(), det.ln(), epsilon = 1e-12);
    }

    #[test]
    fn diagonal_constructor_validates_entries() {
        assert!(SpdMatrix::from_diagonal(&[1.0, 2.0]).is_ok());
        assert!(SpdMatrix::from_diagonal(&[1.0, 0.0]).is_err());
        assert!(SpdMatrix::from_diagonal(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn psd_eigen_floor_detects_semidefiniteness() {
        let v = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        let m = &v * v.transpose();
        let lo = min_symmetric_eigenvalue(&m);
        assert!(lo.abs() < 1e-12, "rank-one Gram matrix has eigenvalue 0");
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        assert!(min_symmetric_eigenvalue(&neg) < -0.4);
    }
}
