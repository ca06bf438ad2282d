//! Oracles and statistics helpers shared by the integration tests.
//!
//! Everything here is deliberately independent of the library's own numerics:
//! the incomplete beta runs its own continued fraction (log-beta constants
//! are frozen from 50-digit arithmetic), so a defect in the crate's special
//! functions cannot mask itself in a test that relies on them.

#![allow(dead_code)] // each integration test pulls a different subset

/// Regularized incomplete beta `I_x(a, b)`.
///
/// `ln_beta_ab` must be `ln B(a, b)` for the same `(a, b)`; passing it in
/// keeps this oracle free of any gamma-function code. Continued fraction in
/// the style of the classic numerical-recipes `betacf`, accurate to ~1e-14.
pub fn betai(a: f64, b: f64, x: f64, ln_beta_ab: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt = (a * x.ln() + b * (1.0 - x).ln() - ln_beta_ab).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

/// Lentz evaluation of the incomplete-beta continued fraction.
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

/// One-sample Kolmogorov–Smirnov statistic `D_n = sup |F_n − F|`.
///
/// Sorts `samples` in place.
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

/// Asymptotic Kolmogorov critical value at significance 1%: reject when
/// `D_n > KS_CRITICAL_1PCT / √n`. Frozen from solving the Kolmogorov
/// distribution's CDF for 0.99 in 50-digit arithmetic.
pub const KS_CRITICAL_1PCT: f64 = 1.627_623_611_518_950_3;

/// Sample mean and its standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    assert!(n >= 2.0, "need at least two values for a standard error");
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

/// Frozen `ln B(a, b)` values for the beta distributions the tests touch
/// (50-digit arithmetic, truncated to f64).
pub mod ln_beta {
    /// `ln B(2, 1.5)` — radial law for dimension 2, dof 5.
    pub const B_2_0_1_5: f64 = -1.321_755_839_982_319_4;
    /// `ln B(3, 2)` — radial law for dimension 4, dof 6.
    pub const B_3_0_2_0: f64 = -2.484_906_649_788_000_3;
    /// `ln B(2.5, 3)` — radial law for dimension 3, dof 8.
    pub const B_2_5_3_0: f64 = -2.979_983_916_585_851_8;
    /// `ln B(3, 1.5)`.
    pub const B_3_0_1_5: f64 = -1.881_371_627_917_742_1;
    /// `ln B(2.5, 2)`.
    pub const B_2_5_2_0: f64 = -2.169_053_700_369_523;
    /// `ln B(1.5, 1.5)`.
    pub const B_1_5_1_5: f64 = -0.934_711_655_830_435_8;
}

/// Frozen expectations `E[cos(aᵀx)]` under multivariate Student's t and
/// Gaussian densities, computed two independent ways (Bessel-K closed form
/// of the characteristic function, and gamma scale-mixture quadrature) in
/// 50-digit arithmetic; the methods agreed to all printed digits.
pub mod expected_cos {
    /// `E[cos x]`, `x ~ St(0, 1, 5)`.
    pub const STD_T_NU5: f64 = 0.523_994_108_831_820_3;
    /// `E[cos x]`, `x ~ St(0.5, 1.3, 7)`.
    pub const T_MU05_S13_NU7: f64 = 0.407_663_317_513_634_25;
    /// `E[cos x]`, `x ~ St(0, 1, 6)`.
    pub const STD_T_NU6: f64 = 0.535_925_466_210_576_8;
    /// `E[cos x]`, `x ~ St(−0.25, 0.8, 5)`.
    pub const T_MUN025_S08_NU5: f64 = 0.568_221_493_769_290_5;
    /// `E[cos x]`, `x ~ N(0, 1)` (that is, `e^{−1/2}`).
    pub const STD_GAUSS: f64 = 0.606_530_659_712_633_4;

    /// The 3-D reference geometry: `μ = (0.3, −0.2, 0.1)`,
    /// `a = (1, 0.5, −0.25)`, `Σ = [[1.2, 0.3, −0.1], [0.3, 0.8, 0.2],
    /// [−0.1, 0.2, 1.5]]`, giving `aᵀμ = 0.175`, `aᵀΣa = 1.79375`.
    pub const TRI_MU: [f64; 3] = [0.3, -0.2, 0.1];
    pub const TRI_A: [f64; 3] = [1.0, 0.5, -0.25];
    pub const TRI_SIGMA: [f64; 9] = [1.2, 0.3, -0.1, 0.3, 0.8, 0.2, -0.1, 0.2, 1.5];
    /// `E[cos(aᵀx)]` for the geometry above at dof 5.
    pub const TRI_NU5: f64 = 0.344_209_919_471_473_8;
    /// …at dof 8.
    pub const TRI_NU8: f64 = 0.361_233_588_758_194_04;
    /// …in the Gaussian limit.
    pub const TRI_GAUSS: f64 = 0.401_613_015_573_846_86;
}

/// Frozen regularized incomplete beta reference values (50-digit
/// arithmetic), used to cross-check [`betai`] itself.
pub const BETAI_REFERENCES: [(f64, f64, f64, f64, f64); 7] = [
    (3.0, 1.5, 0.3, ln_beta::B_3_0_1_5, 0.051_959_607_433_575_64),
    (3.0, 1.5, 0.7, ln_beta::B_3_0_1_5, 0.512_184_597_221_961_35),
    (2.5, 2.0, 0.42, ln_beta::B_2_5_2_0, 0.280_084_651_503_790_9),
    (1.5, 1.5, 0.5, ln_beta::B_1_5_1_5, 0.5),
    (3.0, 2.0, 0.9, ln_beta::B_3_0_2_0, 0.947_7),
    (2.0, 1.5, 0.35, ln_beta::B_2_0_1_5, 0.200_828_700_699_906_24),
    (2.5, 3.0, 0.6, ln_beta::B_2_5_3_0, 0.752_907_962_502_721_8),
];
