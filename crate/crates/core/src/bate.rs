//! Distributions of the bias and of the bias-adjusted effect `beta* = beta~ - nu`.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, BiasField, BoundedBox, GridCell};
use crate::model_inputs::RegressionSummary;
use crate::{fmt_human, fmt_machine};

pub const LEVELS: [f64; 5] = [0.025, 0.05, 0.5, 0.95, 0.975];
pub const QUANTILE_RULE: &str = "linear interpolation between order statistics at 1 + p(n - 1)";
pub const BOUNDING_SET_LABEL: &str = "bounding set (2.5%-97.5% quantiles over the (delta, R_max) box)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Hull of two points.
    pub fn hull(a: f64, b: f64) -> Self {
        Self { lo: a.min(b), hi: a.max(b) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", fmt_human(self.lo), fmt_human(self.hi))
    }
}

/// Quantile of ascending `sorted` at level `p`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty sample");
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Values at the five [`LEVELS`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q025: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q975: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let [q025, q05, q50, q95, q975] = LEVELS.map(|p| quantile(&v, p));
        Self { q025, q05, q50, q95, q975 }
    }

    pub fn values(&self) -> [f64; 5] {
        [self.q025, self.q05, self.q50, self.q95, self.q975]
    }
}

/// Distribution restricted to unflagged cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictSummary {
    pub excluded: usize,
    pub nu_quantiles: Quantiles,
    pub beta_star_quantiles: Quantiles,
    pub bounding_set: Interval,
    pub contains_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BateDistribution {
    pub beta_int: f64,
    pub nu_values: Vec<f64>,
    pub beta_star_values: Vec<f64>,
    pub nu_quantiles: Quantiles,
    pub beta_star_quantiles: Quantiles,
    pub bounding_set: Interval,
    pub contains_zero: bool,
    /// Present when any in-box cell is flagged ambiguous or multiplicity-hazard.
    pub strict: Option<StrictSummary>,
}

impl BateDistribution {
    /// Build from selected roots directly.
    pub fn from_nu(nu_values: Vec<f64>, beta_int: f64) -> Result<Self> {
        if nu_values.is_empty() {
            return Err(Error::EmptyField);
        }
        let beta_star_values: Vec<f64> = nu_values.iter().map(|nu| beta_int - nu).collect();
        let nu_quantiles = Quantiles::of(&nu_values);
        let beta_star_quantiles = Quantiles::of(&beta_star_values);
        let bounding_set = Interval { lo: beta_star_quantiles.q025, hi: beta_star_quantiles.q975 };
        Ok(Self {
            beta_int,
            nu_values,
            beta_star_values,
            nu_quantiles,
            beta_star_quantiles,
            contains_zero: bounding_set.contains(0.0),
            bounding_set,
            strict: None,
        })
    }

    pub fn len(&self) -> usize {
        self.nu_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu_values.is_empty()
    }
}

fn selected(cells: impl Iterator<Item = impl std::ops::Deref<Target = GridCell>>) -> Vec<f64> {
    cells.map(|c| c.selected).collect()
}

/// Distribution over the cells inside the box (extension cells are excluded).
pub fn distribution(field: &BiasField, s: &RegressionSummary) -> Result<BateDistribution> {
    let mut dist = BateDistribution::from_nu(selected(field.in_box()), s.beta_int)?;
    let excluded = field.flagged_in_box();
    if excluded > 0 {
        let clean = selected(field.in_box().filter(|c| !c.is_flagged()));
        if !clean.is_empty() {
            let d = BateDistribution::from_nu(clean, s.beta_int)?;
            dist.strict = Some(StrictSummary {
                excluded,
                nu_quantiles: d.nu_quantiles,
                beta_star_quantiles: d.beta_star_quantiles,
                bounding_set: d.bounding_set,
                contains_zero: d.contains_zero,
            });
        }
    }
    Ok(dist)
}

/// Distribution over unflagged in-box cells only.
pub fn distribution_strict(field: &BiasField, s: &RegressionSummary) -> Result<BateDistribution> {
    BateDistribution::from_nu(selected(field.in_box().filter(|c| !c.is_flagged())), s.beta_int)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub step: f64,
    pub cells: usize,
    pub runtime_secs: f64,
    pub beta_star_quantiles: Quantiles,
}

/// Re-run the box at each step size, timing each run.
pub fn step_size_sweep(s: &RegressionSummary, bbox: &BoundedBox, steps: &[f64]) -> Result<Vec<SweepRow>> {
    steps
        .iter()
        .map(|&step| {
            let b = bbox.with_step(step)?;
            let start = Instant::now();
            let field = grid::run(s, &b)?;
            let dist = distribution(&field, s)?;
            Ok(SweepRow {
                step,
                cells: dist.len(),
                runtime_secs: start.elapsed().as_secs_f64(),
                beta_star_quantiles: dist.beta_star_quantiles,
            })
        })
        .collect()
}

/// One labelled row block of the quantile table.
#[derive(Debug, Clone, Serialize)]
pub struct QuantileRow {
    pub quantity: &'static str,
    pub region: String,
    pub q025: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q975: f64,
}

/// Bias and BATE rows for each labelled distribution.
pub fn quantile_rows(entries: &[(String, &BateDistribution)]) -> Vec<QuantileRow> {
    let row = |quantity, region: &str, q: &Quantiles| QuantileRow {
        quantity,
        region: region.to_string(),
        q025: q.q025,
        q05: q.q05,
        q50: q.q50,
        q95: q.q95,
        q975: q.q975,
    };
    let mut rows: Vec<QuantileRow> = entries.iter().map(|(r, d)| row("Bias", r, &d.nu_quantiles)).collect();
    rows.extend(entries.iter().map(|(r, d)| row("BATE", r, &d.beta_star_quantiles)));
    rows
}

pub fn write_quantile_csv<W: Write>(rows: &[QuantileRow], writer: W, human: bool) -> Result<()> {
    let fmt = if human { fmt_human } else { fmt_machine };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["quantity", "region", "2.5%", "5%", "50%", "95%", "97.5%"])?;
    for r in rows {
        let mut rec = vec![r.quantity.to_string(), r.region.clone()];
        rec.extend([r.q025, r.q05, r.q50, r.q95, r.q975].map(fmt));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "cells", "runtime_secs", "2.5%", "5%", "50%", "95%", "97.5%"])?;
    for r in rows {
        let mut rec = vec![fmt_machine(r.step), r.cells.to_string(), format!("{:.3}", r.runtime_secs)];
        rec.extend(r.beta_star_quantiles.values().map(fmt_machine));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nine_value_quantile_table() {
        // h = p * 8 over 0.1..0.9: 0.2 -> 0.12, 0.4 -> 0.14, 4 -> 0.5, 7.6 -> 0.86, 7.8 -> 0.88
        let nu: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let d = BateDistribution::from_nu(nu, 1.0).unwrap();
        let want = [0.12, 0.14, 0.5, 0.86, 0.88];
        for (got, w) in d.nu_quantiles.values().iter().zip(want) {
            assert!((got - w).abs() < 1e-15, "{got} vs {w}");
        }
        let want_bate = [0.12, 0.14, 0.5, 0.86, 0.88];
        for (got, w) in d.beta_star_quantiles.values().iter().zip(want_bate) {
            assert!((got - w).abs() < 1e-15);
        }
        assert!(!d.contains_zero);
    }

    #[test]
    fn constant_bias_gives_point_set() {
        let d = BateDistribution::from_nu(vec![0.25; 12], 0.3).unwrap();
        assert_eq!(d.bounding_set, Interval { lo: 0.3 - 0.25, hi: 0.3 - 0.25 });
        let z = BateDistribution::from_nu(vec![0.0; 4], 0.0).unwrap();
        assert!(z.contains_zero);
        let nz = BateDistribution::from_nu(vec![0.0; 4], 0.017).unwrap();
        assert_eq!(nz.bounding_set, Interval { lo: 0.017, hi: 0.017 });
        assert!(!nz.contains_zero);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(BateDistribution::from_nu(vec![], 1.0), Err(Error::EmptyField)));
    }

    #[test]
    fn quantile_csv_layout() {
        let d = BateDistribution::from_nu(vec![0.1, 0.2, 0.3], 1.0).unwrap();
        let rows = quantile_rows(&[("Box 1".into(), &d)]);
        let mut out = Vec::new();
        write_quantile_csv(&rows, &mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "quantity,region,2.5%,5%,50%,95%,97.5%");
        assert_eq!(lines[1], "Bias,Box 1,0.105,0.110,0.200,0.290,0.295");
        assert_eq!(lines[2], "BATE,Box 1,0.705,0.710,0.800,0.890,0.895");
    }

    proptest! {
        #[test]
        fn shift_equivariance(nu in prop::collection::vec(-5.0f64..5.0, 1..60), b in -3.0f64..3.0, k in -2.0f64..2.0) {
            let a = BateDistribution::from_nu(nu.clone(), b).unwrap();
            let s = BateDistribution::from_nu(nu, b + k).unwrap();
            for (x, y) in a.beta_star_quantiles.values().iter().zip(s.beta_star_quantiles.values()) {
                prop_assert!((x + k - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn quantiles_are_monotone(nu in prop::collection::vec(-5.0f64..5.0, 1..60)) {
            let d = BateDistribution::from_nu(nu, 0.0).unwrap();
            let q = d.nu_quantiles.values();
            prop_assert!(q.windows(2).all(|w| w[0] <= w[1]));
            let v = d.beta_star_quantiles.values();
            prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
