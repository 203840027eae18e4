use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_inputs::RegressionSummary;

/// Lattice points closer than this to `delta = 1` are moved off the singular line.
pub const UNIT_DELTA_GUARD: f64 = 1e-9;
const COUNT_SLACK: f64 = 1e-9;

/// A rectangle in the `(delta, R_max)` plane with a common lattice spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedBox {
    pub delta_low: f64,
    pub delta_high: f64,
    pub rmax_low: f64,
    pub rmax_high: f64,
    pub step: f64,
}

impl BoundedBox {
    pub fn new(delta_low: f64, delta_high: f64, rmax_low: f64, rmax_high: f64, step: f64) -> Result<Self> {
        let b = Self { delta_low, delta_high, rmax_low, rmax_high, step };
        b.check_shape()?;
        Ok(b)
    }

    fn check_shape(&self) -> Result<()> {
        let all = [self.delta_low, self.delta_high, self.rmax_low, self.rmax_high, self.step];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBox("non-finite bound".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidBox(format!("step must be positive, got {}", self.step)));
        }
        if self.delta_low >= self.delta_high {
            return Err(Error::InvalidBox(format!(
                "delta_low {} must be below delta_high {}",
                self.delta_low, self.delta_high
            )));
        }
        if self.rmax_low >= self.rmax_high || self.rmax_high > 1.0 {
            return Err(Error::InvalidBox(format!(
                "need rmax_low < rmax_high <= 1, got [{}, {}]",
                self.rmax_low, self.rmax_high
            )));
        }
        if self.n_delta() < 2 || self.n_rmax() < 2 {
            return Err(Error::InvalidBox(format!(
                "step {} gives a {}x{} lattice; at least 2x2 is required",
                self.step,
                self.n_delta(),
                self.n_rmax()
            )));
        }
        Ok(())
    }

    /// Full validation, including `R_max >= R~` for the given summary.
    pub fn validate_for(&self, s: &RegressionSummary) -> Result<()> {
        self.check_shape()?;
        if self.rmax_low < s.r2_int {
            return Err(Error::InvalidBox(format!(
                "rmax_low {} is below the intermediate R-squared {}",
                self.rmax_low, s.r2_int
            )));
        }
        Ok(())
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        Self::new(self.delta_low, self.delta_high, self.rmax_low, self.rmax_high, step)
    }

    pub fn n_delta(&self) -> usize {
        axis_count(self.delta_low, self.delta_high, self.step)
    }

    pub fn n_rmax(&self) -> usize {
        axis_count(self.rmax_low, self.rmax_high, self.step)
    }

    pub fn len(&self) -> usize {
        self.n_delta() * self.n_rmax()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Raw lattice value along delta; `i` may be negative for extended lattices.
    pub fn delta_at(&self, i: i64) -> f64 {
        self.delta_low + i as f64 * self.step
    }

    pub fn rmax_at(&self, j: usize) -> f64 {
        self.rmax_low + j as f64 * self.step
    }
}

fn axis_count(lo: f64, hi: f64, step: f64) -> usize {
    let span = (hi - lo) / step;
    if !(span.is_finite() && span >= 0.0) {
        return 0;
    }
    (span + COUNT_SLACK).floor() as usize + 1
}

/// Move `delta` off the unit line; the flag records whether it moved.
pub fn guard_unit_delta(delta: f64) -> (f64, bool) {
    if (delta - 1.0).abs() < UNIT_DELTA_GUARD {
        (1.0 + UNIT_DELTA_GUARD, true)
    } else {
        (delta, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts_are_inclusive() {
        let b = BoundedBox::new(0.01, 0.99, 0.256, 0.61, 0.01).unwrap();
        assert_eq!(b.n_delta(), 99);
        assert_eq!(b.n_rmax(), 36);
        assert!((b.rmax_at(35) - 0.606).abs() < 1e-12);
        assert_eq!(BoundedBox::new(1.01, 3.99, 0.256, 0.61, 0.01).unwrap().n_delta(), 299);
    }

    #[test]
    fn too_coarse_or_inverted_rejected() {
        assert!(BoundedBox::new(0.0, 0.5, 0.3, 0.31, 0.02).is_err());
        assert!(BoundedBox::new(0.5, 0.1, 0.3, 0.6, 0.01).is_err());
        assert!(BoundedBox::new(0.1, 0.5, 0.3, 1.2, 0.01).is_err());
        assert!(BoundedBox::new(0.1, 0.5, 0.3, 0.6, 0.0).is_err());
    }

    #[test]
    fn rmax_low_must_reach_r2_int() {
        let s = RegressionSummary::new(0.5, 0.2, 0.3, 0.4, 2.0, 1.5, 1.0).unwrap();
        let b = BoundedBox::new(0.1, 0.5, 0.35, 0.6, 0.05).unwrap();
        assert!(matches!(b.validate_for(&s), Err(Error::InvalidBox(_))));
    }

    #[test]
    fn unit_delta_is_shifted() {
        assert_eq!(guard_unit_delta(1.0), (1.0 + UNIT_DELTA_GUARD, true));
        assert_eq!(guard_unit_delta(0.99), (0.99, false));
    }
}
