use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::ols::{design_with_intercept, fit_ols_named, population_variance};
use crate::error::{Error, Result};

/// Slack allowed for R-squared nesting violations caused by rounding.
const NESTING_TOLERANCE: f64 = 1e-10;

/// The seven statistics that parameterize the bias cubic.
///
/// Variances use divisor N. `tau_x` is the residual variance of the auxiliary
/// regression of treatment on controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub beta_short: f64,
    pub r2_short: f64,
    pub beta_int: f64,
    pub r2_int: f64,
    pub sigma2_y: f64,
    pub sigma2_x: f64,
    pub tau_x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Classical standard error of `beta_short` (reporting only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_short: Option<f64>,
    /// Classical standard error of `beta_int` (reporting only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_int: Option<f64>,
}

impl RegressionSummary {
    /// Validated constructor for summaries supplied directly (no sample size or errors).
    pub fn new(
        beta_short: f64,
        r2_short: f64,
        beta_int: f64,
        r2_int: f64,
        sigma2_y: f64,
        sigma2_x: f64,
        tau_x: f64,
    ) -> Result<Self> {
        let s = Self {
            beta_short,
            r2_short,
            beta_int,
            r2_int,
            sigma2_y,
            sigma2_x,
            tau_x,
            n: None,
            se_short: None,
            se_int: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let vals =
            [self.beta_short, self.r2_short, self.beta_int, self.r2_int, self.sigma2_y, self.sigma2_x, self.tau_x];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSummary("non-finite statistic".into()));
        }
        if !(0.0..1.0).contains(&self.r2_short) || !(0.0..1.0).contains(&self.r2_int) {
            return Err(Error::InvalidSummary(format!(
                "R-squared values must lie in [0, 1): short {}, intermediate {}",
                self.r2_short, self.r2_int
            )));
        }
        if self.r2_int < self.r2_short {
            return Err(Error::InvalidSummary(format!(
                "intermediate R-squared {} below short R-squared {}",
                self.r2_int, self.r2_short
            )));
        }
        if self.sigma2_y <= 0.0 || self.sigma2_x <= 0.0 {
            return Err(Error::InvalidSummary("variances must be positive".into()));
        }
        if self.tau_x <= 0.0 || self.tau_x > self.sigma2_x {
            return Err(Error::InvalidSummary(format!(
                "need 0 < tau_x <= sigma2_x, got tau_x = {}, sigma2_x = {}",
                self.tau_x, self.sigma2_x
            )));
        }
        Ok(())
    }

    /// `beta_short - beta_int`, the coefficient movement when controls enter.
    pub fn beta_gap(&self) -> f64 {
        self.beta_short - self.beta_int
    }

    /// `tau_x * sigma2_x - tau_x^2`, the delta-independent factor of the leading coefficient.
    pub fn leading_factor(&self) -> f64 {
        self.tau_x * self.sigma2_x - self.tau_x * self.tau_x
    }
}

/// Run the short, intermediate and auxiliary regressions on `data`.
pub fn summarize(data: &Dataset) -> Result<RegressionSummary> {
    let y = data.outcome();
    let x = data.treatment();
    let controls: Vec<&[f64]> = data.controls().iter().map(Vec::as_slice).collect();

    let mut names = vec!["(intercept)".to_string(), data.treatment_name().to_string()];
    names.extend(data.control_names().iter().cloned());

    let short = fit_ols_named(y, &design_with_intercept(&[x]), &names[..2])?;

    let mut int_cols = vec![x];
    int_cols.extend(controls.iter().copied());
    let intermediate = fit_ols_named(y, &design_with_intercept(&int_cols), &names)?;

    let mut aux_names = vec!["(intercept)".to_string()];
    aux_names.extend(data.control_names().iter().cloned());
    let auxiliary = fit_ols_named(x, &design_with_intercept(&controls), &aux_names)?;

    if intermediate.r_squared < short.r_squared - NESTING_TOLERANCE {
        return Err(Error::Inconsistent(format!(
            "intermediate R-squared {} below short R-squared {}",
            intermediate.r_squared, short.r_squared
        )));
    }

    let summary = RegressionSummary {
        beta_short: short.coefficients[1],
        r2_short: short.r_squared,
        beta_int: intermediate.coefficients[1],
        r2_int: intermediate.r_squared.max(short.r_squared),
        sigma2_y: population_variance(y),
        sigma2_x: population_variance(x),
        tau_x: auxiliary.residual_variance,
        n: Some(data.len()),
        se_short: Some(short.std_errors[1]),
        se_int: Some(intermediate.std_errors[1]),
    };
    if summary.r2_int >= 1.0 {
        return Err(Error::InvalidData("intermediate regression fits perfectly (R-squared = 1)".into()));
    }
    if summary.tau_x <= 0.0 {
        return Err(Error::InvalidData("controls explain the treatment perfectly".into()));
    }
    // Auxiliary residual variance never exceeds the total; clamp rounding excess.
    let summary = RegressionSummary { tau_x: summary.tau_x.min(summary.sigma2_x), ..summary };
    summary.validate()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_controls_leave_beta_unchanged() {
        // x and w are exactly orthogonal and both centered.
        let x = vec![1.0, -1.0, 1.0, -1.0, 2.0, -2.0, 2.0, -2.0];
        let w = vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let y: Vec<f64> = x
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(i, (a, b))| 0.7 * a + 1.3 * b + [0.1, -0.2, 0.05, 0.3, -0.1, 0.0, 0.2, -0.15][i])
            .collect();
        let s = summarize(&Dataset::new(y, x, vec![w]).unwrap()).unwrap();
        assert!((s.beta_short - s.beta_int).abs() < 1e-10, "{s:?}");
        assert!((s.tau_x - s.sigma2_x).abs() < 1e-10);
        assert!(s.r2_int >= s.r2_short);
    }

    #[test]
    fn rejects_bad_summaries() {
        assert!(RegressionSummary::new(0.5, 0.3, 0.3, 0.2, 1.0, 1.0, 0.5).is_err());
        assert!(RegressionSummary::new(0.5, 0.2, 0.3, 0.4, 1.0, 1.0, 1.5).is_err());
        assert!(RegressionSummary::new(0.5, 0.2, 0.3, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(RegressionSummary::new(0.5, 0.2, 0.3, 0.4, 0.0, 1.0, 0.5).is_err());
        assert!(RegressionSummary::new(0.5, 0.2, 0.3, 0.4, 2.0, 1.5, 1.0).is_ok());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: RegressionSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
