//! Numeric references the subcommands compare against: a Simpson quadrature
//! for one-dimensional cosine expectations under a Student's t density, the
//! regularized incomplete beta function (own continued fraction), and small
//! statistics helpers.

use stcubature::special::{ln_beta, ln_gamma};

/// `E[cos X]` for scalar `X ~ St(loc, scale², dof)` by Simpson quadrature
/// on the standardized variable.
///
/// The truncation point grows until the tail mass bound drops below 1e-10,
/// and the step resolves both the density and the `cos(scale·u)`
/// oscillation, so the result carries far more digits than any statistical
/// tolerance used against it.
pub fn student_t_cos(loc: f64, scale: f64, dof: f64) -> f64 {
    assert!(scale > 0.0 && dof > 2.0);
    let ln_norm = ln_gamma((dof + 1.0) / 2.0).expect("gamma argument is positive")
        - ln_gamma(dof / 2.0).expect("gamma argument is positive")
        - 0.5 * (dof * std::f64::consts::PI).ln();
    let density = |u: f64| (ln_norm - 0.5 * (dof + 1.0) * (u * u / dof).ln_1p()).exp();

    // Tail mass beyond `u` is below norm · ν^{(ν+1)/2} · u^{−ν} / ν.
    let mut half_width = 40.0_f64;
    let norm = ln_norm.exp();
    while norm * dof.powf((dof + 1.0) / 2.0) * half_width.powf(-dof) / dof > 1e-10
        && half_width < 1e6
    {
        half_width *= 1.5;
    }

    let step_target = (0.02_f64).min(0.05 / scale);
    let intervals = ((2.0 * half_width / step_target).ceil() as usize).next_multiple_of(2);
    let h = 2.0 * half_width / intervals as f64;
    let f = |u: f64| (loc + scale * u).cos() * density(u);
    let mut acc = f(-half_width) + f(half_width);
    for i in 1..intervals {
        let u = -half_width + h * i as f64;
        acc += f(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Regularized incomplete beta `I_x(a, b)` via the classic continued
/// fraction (Lentz), independent of the library's beta sampling path.
pub fn betai(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_beta_ab = ln_beta(a, b).expect("beta parameters are positive");
    let bt = (a * x.ln() + b * (1.0 - x).ln() - ln_beta_ab).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 400;
    const EPS: f64 = 3e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            return h;
        }
    }
    panic!("incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}");
}

/// One-sample Kolmogorov–Smirnov statistic; sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|p, q| p.partial_cmp(q).expect("samples must be comparable"));
    let n = samples.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical value at 1% significance: reject when
/// `D_n > KS_CRITICAL_1PCT / √n`.
pub const KS_CRITICAL_1PCT: f64 = 1.627_623_611_518_950_3;

/// Sample mean and its standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    assert!(n >= 2.0);
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    assert!(n >= 2.0);
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}
