use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub pass: bool,
}

/// CDF of the χ² distribution with `dof` degrees of freedom.
pub fn chi2_cdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(dof as f64 / 2.0, x / 2.0)
}

/// Upper-`alpha` critical value of χ²(`dof`), found by bisection on the
/// regularized lower incomplete gamma function.
pub fn chi2_critical(dof: usize, alpha: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("chi-squared dof must be >= 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} not in (0,1)")));
    }
    let target = 1.0 - alpha;
    let mut hi = dof as f64 + 10.0;
    while chi2_cdf(hi, dof) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, dof) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pearson χ² goodness of fit of `observed` counts against `expected` counts.
///
/// Degrees of freedom are `categories - 1`; the test passes when the statistic
/// does not exceed the upper-`alpha` critical value.
pub fn chi2_gof(observed: &[f64], expected: &[f64], alpha: f64) -> Result<GofResult> {
    if observed.len() != expected.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::Insufficient("need at least two categories".into()));
    }
    if let Some(bad) = expected.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::invalid(format!(
            "expected count {bad} must be positive"
        )));
    }
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum::<f64>();
    let dof = observed.len() - 1;
    let critical_value = chi2_critical(dof, alpha)?;
    Ok(GofResult {
        statistic,
        dof,
        critical_value,
        pass: statistic <= critical_value,
    })
}
