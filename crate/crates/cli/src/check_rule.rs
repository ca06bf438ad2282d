//! The `check-rule` subcommand: statistical self-checks of the integration
//! rules, printed one line per property.
//!
//! Each check restates a guarantee the library advertises — unit weight
//! mass, per-realization cubic exactness, unbiasedness on a transcendental
//! integrand, the radial sampling law, the variance advantage over plain
//! Monte Carlo in one dimension, and agreement with the Gaussian rule at
//! huge degrees of freedom — and verifies it against oracles that do not
//! share code with the rules themselves.

use std::process::ExitCode;

use clap::Args;
use nalgebra::{DMatrix, DVector};
use stcubature::rules::{
    deterministic_stsrcr_integrate, limit_consistency_check, mc_integrate, sample_radial,
    sir_integrate, sstsrcr_integrate,
};
use stcubature::{Error, RngStream, SpdMatrix, StudentTDensity};

use crate::oracle;
use crate::Failure;

#[derive(Args)]
pub struct CheckRuleArgs {
    /// Degrees of freedom used where a property leaves it free (default 5).
    /// The cubic-exactness sweep randomizes over (4, 30) unless this is set,
    /// and the fixed radial-law and variance cases keep their own values.
    #[arg(long)]
    nu: Option<f64>,

    /// Master seed for the statistical checks.
    #[arg(long, default_value_t = 20_260_819)]
    seed: u64,
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

pub fn execute(args: CheckRuleArgs) -> Result<ExitCode, Failure> {
    if let Some(nu) = args.nu {
        if !(nu > 2.0) || !nu.is_finite() {
            return Err(Error::DofTooSmall { dof: nu, min: 2.0 }.into());
        }
    }
    let nu = args.nu.unwrap_or(5.0);
    let base = RngStream::new(args.seed);

    let checks = [
        weight_normalization(&base, nu)?,
        cubic_exactness(&base, args.nu)?,
        cos_unbiasedness(&base, nu)?,
        radial_law(&base)?,
        variance_ordering(&base)?,
        limit_consistency(args.seed)?,
    ];

    println!("rule checks (seed {}, dof {}):", args.seed, nu);
    let mut failed = 0;
    for check in &checks {
        let verdict = if check.pass { "pass" } else { "FAIL" };
        println!("  {:<24} {}   {}", check.name, verdict, check.detail);
        if !check.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failed} check(s) failed");
        Ok(ExitCode::FAILURE)
    }
}

/// Exponentially decaying covariance `0.3^|i−j|`; positive definite in any
/// dimension and comfortably anisotropic.
fn band_scale(n: usize) -> SpdMatrix {
    let m = DMatrix::from_fn(n, n, |i, j| 0.3_f64.powi((i as i32 - j as i32).abs()));
    SpdMatrix::new(m).expect("band matrix is positive definite")
}

fn scalar<'a>(
    g: impl Fn(&DVector<f64>) -> f64 + 'a,
) -> impl Fn(&DVector<f64>) -> DVector<f64> + 'a {
    move |x| DVector::from_element(1, g(x))
}

/// Every rule integrates the constant 1 to exactly 1, i.e. its weights sum
/// to unit mass no matter which radii and rotations were drawn.
fn weight_normalization(base: &RngStream, nu: f64) -> Result<Check, Failure> {
    let one = scalar(|_| 1.0);
    let mut worst = 0.0_f64;
    for n in 1..=5 {
        let mut rng = base.derive("weights", n as u64);
        let mean = DVector::from_fn(n, |i, _| if i % 2 == 0 { 0.3 } else { -0.3 });
        let density = StudentTDensity::new(mean.clone(), band_scale(n), nu)?;
        for _ in 0..40 {
            let est = sstsrcr_integrate(&one, &density, 1, &mut rng)?;
            worst = worst.max((est[0] - 1.0).abs());
            let est = sir_integrate(&one, &mean, density.scale(), 1, &mut rng)?;
            worst = worst.max((est[0] - 1.0).abs());
        }
        let est = deterministic_stsrcr_integrate(&one, &density)?;
        worst = worst.max((est[0] - 1.0).abs());
        let est = mc_integrate(&one, &density, 64, &mut rng)?;
        worst = worst.max((est[0] - 1.0).abs());
    }
    Ok(Check {
        name: "weight normalization",
        pass: worst <= 1e-12,
        detail: format!("max |sum w - 1| = {worst:.1e} (limit 1e-12)"),
    })
}

/// A single stochastic realization reproduces the exact expectation of any
/// polynomial of degree at most three, whatever radius and rotation it drew.
fn cubic_exactness(base: &RngStream, nu_override: Option<f64>) -> Result<Check, Failure> {
    let mut rng = base.derive("cubics", 0);
    let mut worst = 0.0_f64;
    for case in 0..200_u64 {
        let n = 1 + (case as usize) % 5;
        let nu = nu_override.unwrap_or_else(|| 4.0 + 26.0 * rng.uniform());
        let mean = DVector::from_fn(n, |_, _| 2.0 * rng.uniform() - 1.0);
        let b = DMatrix::from_fn(n, n, |_, _| 2.0 * rng.uniform() - 1.0);
        let scale = SpdMatrix::new(&b * b.transpose() + DMatrix::identity(n, n) * (0.5 + rng.uniform()))?;
        let poly = CubicPolynomial::random(&mut rng, n);
        let density = StudentTDensity::new(mean.clone(), scale.clone(), nu)?;
        let est = sstsrcr_integrate(&scalar(|x| poly.eval(x)), &density, 1, &mut rng)?;
        let exact = poly.exact_expectation(&mean, &(scale.matrix() * (nu / (nu - 2.0))));
        let gap = (est[0] - exact).abs() / (1.0 + exact.abs());
        worst = worst.max(gap);
    }
    Ok(Check {
        name: "cubic exactness",
        pass: worst <= 1e-9,
        detail: format!("max rel gap = {worst:.1e} over 200 cases (limit 1e-9)"),
    })
}

/// Averages of single-realization estimates of `E[cos aᵀx]` converge on the
/// quadrature value: the rule is unbiased beyond the polynomial class.
fn cos_unbiasedness(base: &RngStream, nu: f64) -> Result<Check, Failure> {
    const REPS: usize = 10_000;
    let mut worst_z = 0.0_f64;

    // One-dimensional case.
    let mut rng = base.derive("cos-1d", 0);
    let density = StudentTDensity::new(
        DVector::from_element(1, 0.2),
        SpdMatrix::new(DMatrix::from_element(1, 1, 1.21))?,
        nu,
    )?;
    let g = scalar(|x: &DVector<f64>| x[0].cos());
    let mut estimates = Vec::with_capacity(REPS);
    for _ in 0..REPS {
        estimates.push(sstsrcr_integrate(&g, &density, 1, &mut rng)?[0]);
    }
    let (mean_est, se) = oracle::mean_and_se(&estimates);
    let reference = oracle::student_t_cos(0.2, 1.1, nu);
    worst_z = worst_z.max((mean_est - reference).abs() / se);

    // Two-dimensional case; `aᵀx` is again scalar Student's t, so the same
    // one-dimensional quadrature provides the reference.
    let mut rng = base.derive("cos-2d", 0);
    let mean = DVector::from_vec(vec![0.3, -0.2]);
    let sigma = DMatrix::from_row_slice(2, 2, &[1.2, 0.3, 0.3, 0.8]);
    let a = DVector::from_vec(vec![1.0, 0.5]);
    let loc = a.dot(&mean);
    let spread: f64 = (a.transpose() * &sigma * &a)[(0, 0)];
    let spread = spread.sqrt();
    let density = StudentTDensity::new(mean, SpdMatrix::new(sigma)?, nu)?;
    let g = scalar(move |x: &DVector<f64>| a.dot(x).cos());
    let mut estimates = Vec::with_capacity(REPS);
    for _ in 0..REPS {
        estimates.push(sstsrcr_integrate(&g, &density, 1, &mut rng)?[0]);
    }
    let (mean_est, se) = oracle::mean_and_se(&estimates);
    let reference = oracle::student_t_cos(loc, spread, nu);
    worst_z = worst_z.max((mean_est - reference).abs() / se);

    Ok(Check {
        name: "cos unbiasedness",
        pass: worst_z <= 4.0,
        detail: format!("worst |gap|/SE = {worst_z:.2} over 2 cases (limit 4)"),
    })
}

/// The squared radius has the advertised mean and, mapped back to the beta
/// variable `τ = r²/(1 + r²)`, the advertised distribution.
fn radial_law(base: &RngStream) -> Result<Check, Failure> {
    const DRAWS: usize = 100_000;
    let mut worst_mean_pct = 0.0_f64;
    let mut worst_ks_ratio = 0.0_f64;
    for (case, &(dim, dof)) in [(2_usize, 8.0_f64), (4, 6.0), (3, 10.0)].iter().enumerate() {
        let mut rng = base.derive("radial", case as u64);
        let mut taus = Vec::with_capacity(DRAWS);
        let mut mean_r2 = 0.0;
        for _ in 0..DRAWS {
            let r = sample_radial(&mut rng, dim, dof)?.radius;
            mean_r2 += r * r / DRAWS as f64;
            taus.push(r * r / (1.0 + r * r));
        }
        let expected_r2 = (dim as f64 + 2.0) / (dof - 4.0);
        worst_mean_pct = worst_mean_pct.max(100.0 * (mean_r2 - expected_r2).abs() / expected_r2);

        let a = (dim as f64 + 2.0) / 2.0;
        let b = (dof - 2.0) / 2.0;
        let d = oracle::ks_statistic(&mut taus, |t| oracle::betai(a, b, t));
        worst_ks_ratio = worst_ks_ratio.max(d * (DRAWS as f64).sqrt() / oracle::KS_CRITICAL_1PCT);
    }
    Ok(Check {
        name: "radial law",
        pass: worst_mean_pct <= 2.0 && worst_ks_ratio <= 1.0,
        detail: format!(
            "mean r^2 gap {worst_mean_pct:.2}% (limit 2%), KS {worst_ks_ratio:.2} of critical"
        ),
    })
}

/// In one dimension at dof 5 the averaged rule beats plain Monte Carlo on
/// `E[cos x]` at a matched evaluation budget (10 realizations of the
/// three-point rule versus 30 raw draws).
fn variance_ordering(base: &RngStream) -> Result<Check, Failure> {
    const REPS: usize = 1_000;
    let mut rng = base.derive("variance", 0);
    let density = StudentTDensity::new(
        DVector::from_element(1, 0.2),
        SpdMatrix::new(DMatrix::from_element(1, 1, 1.21))?,
        5.0,
    )?;
    let g = scalar(|x: &DVector<f64>| x[0].cos());
    let mut rule_estimates = Vec::with_capacity(REPS);
    let mut mc_estimates = Vec::with_capacity(REPS);
    for _ in 0..REPS {
        rule_estimates.push(sstsrcr_integrate(&g, &density, 10, &mut rng)?[0]);
        mc_estimates.push(mc_integrate(&g, &density, 30, &mut rng)?[0]);
    }
    let ratio =
        oracle::sample_variance(&rule_estimates) / oracle::sample_variance(&mc_estimates);
    Ok(Check {
        name: "variance ordering",
        pass: ratio < 1.0,
        detail: format!("var rule/mc = {ratio:.3} at matched 30-eval budget (limit < 1)"),
    })
}

/// At dof 1e8 the Student's t rule and the native Gaussian rule agree: to
/// rounding on polynomials (both are exact per realization) and within
/// sampling noise on a cosine.
fn limit_consistency(seed: u64) -> Result<Check, Failure> {
    let mean = DVector::from_vec(vec![0.3, -0.2]);
    let cov = SpdMatrix::new(DMatrix::from_row_slice(2, 2, &[1.2, 0.3, 0.3, 0.8]))?;

    let poly = |x: &DVector<f64>| {
        DVector::from_vec(vec![x[0], x[1], x[0] * x[0], x[0] * x[1]])
    };
    let poly_report = limit_consistency_check(&poly, &mean, &cov, 200, seed ^ 0x51)?;

    let cos = scalar(|x: &DVector<f64>| (x[0] + 0.5 * x[1]).cos());
    let cos_report = limit_consistency_check(&cos, &mean, &cov, 4000, seed ^ 0x52)?;

    Ok(Check {
        name: "limit consistency",
        pass: poly_report.max_rel_gap <= 1e-6 && cos_report.max_rel_gap <= 0.05,
        detail: format!(
            "poly gap {:.1e} (limit 1e-6), cos gap {:.1e} (limit 5e-2)",
            poly_report.max_rel_gap, cos_report.max_rel_gap
        ),
    })
}

/// Random polynomial of total degree three with a closed-form expectation:
/// for `x` with mean `μ` and central covariance `V`,
/// `E[x_i x_j x_k] = μ_i μ_j μ_k + V_ij μ_k + V_ik μ_j + V_jk μ_i`.
struct CubicPolynomial {
    constant: f64,
    linear: DVector<f64>,
    quadratic: DMatrix<f64>,
    cubic: Vec<(usize, usize, usize, f64)>,
}

impl CubicPolynomial {
    fn random(rng: &mut RngStream, n: usize) -> Self {
        let mut unit = || 2.0 * rng.uniform() - 1.0;
        let constant = unit();
        let linear = DVector::from_fn(n, |_, _| unit());
        let q = DMatrix::from_fn(n, n, |_, _| unit());
        let quadratic = (&q + q.transpose()) * 0.5;
        let mut cubic = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    cubic.push((i, j, k, unit()));
                }
            }
        }
        CubicPolynomial {
            constant,
            linear,
            quadratic,
            cubic,
        }
    }

    fn eval(&self, x: &DVector<f64>) -> f64 {
        let mut value =
            self.constant + self.linear.dot(x) + (x.transpose() * &self.quadratic * x)[0];
        for &(i, j, k, c) in &self.cubic {
            value += c * x[i] * x[j] * x[k];
        }
        value
    }

    fn exact_expectation(&self, mean: &DVector<f64>, central_cov: &DMatrix<f64>) -> f64 {
        let second = central_cov + mean * mean.transpose();
        let mut value =
            self.constant + self.linear.dot(mean) + (&self.quadratic * second).trace();
        for &(i, j, k, c) in &self.cubic {
            value += c
                * (mean[i] * mean[j] * mean[k]
                    + central_cov[(i, j)] * mean[k]
                    + central_cov[(i, k)] * mean[j]
                    + central_cov[(j, k)] * mean[i]);
        }
        value
    }
}
