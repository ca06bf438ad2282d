//! Error aggregation across Monte Carlo runs.

use crate::error::{Error, Result};

/// Per-step RMSE across runs: given squared errors indexed `[run][step]`,
/// returns `rmse[k] = √(mean over runs of e²[·][k])`.
///
/// All runs must cover the same number of steps.
pub fn rmse_over_runs(squared_errors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = squared_errors.first() else {
        return Err(Error::LengthMismatch("no runs to aggregate".into()));
    };
    let steps = first.len();
    if steps == 0 {
        return Err(Error::LengthMismatch("runs cover zero steps".into()));
    }
    let mut sums = vec![0.0_f64; steps];
    for (r, run) in squared_errors.iter().enumerate() {
        if run.len() != steps {
            return Err(Error::LengthMismatch(format!(
                "run {r} has {} steps, expected {steps}",
                run.len()
            )));
        }
        for (s, e2) in sums.iter_mut().zip(run) {
            *s += e2;
        }
    }
    let inv = 1.0 / squared_errors.len() as f64;
    Ok(sums.into_iter().map(|s| (s * inv).sqrt()).collect())
}

/// Time-averaged RMSE: `√(mean over k of rmse[k]²)`, so that ARMSE² is the
/// grand mean of the squared errors over runs × steps.
pub fn armse(rmse: &[f64]) -> f64 {
    if rmse.is_empty() {
        return f64::NAN;
    }
    (rmse.iter().map(|r| r * r).sum::<f64>() / rmse.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rmse_pools_across_runs_per_step() {
        let e2 = vec![vec![1.0, 4.0], vec![9.0, 16.0]];
        let rmse = rmse_over_runs(&e2).unwrap();
        assert_abs_diff_eq!(rmse[0], 5.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(rmse[1], 10.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(armse(&rmse), 7.5_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn single_run_rmse_is_the_absolute_error() {
        let e2 = vec![vec![4.0, 0.25, 9.0]];
        let rmse = rmse_over_runs(&e2).unwrap();
        assert_eq!(rmse, vec![2.0, 0.5, 3.0]);
    }

    #[test]
    fn ragged_and_empty_inputs_are_rejected() {
        assert!(rmse_over_runs(&[]).is_err());
        assert!(rmse_over_runs(&[vec![]]).is_err());
        assert!(rmse_over_runs(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(armse(&[]).is_nan());
    }
}
