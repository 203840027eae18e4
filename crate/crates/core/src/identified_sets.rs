//! Identified sets under equal selection (`delta = 1`).
//!
//! The cubic drops to a quadratic with two real roots, so there are two
//! candidate sets `[beta~, beta~ - nu_i]`. Both are always reported.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bate::Interval;
use crate::cubic::equal_selection_roots;
use crate::error::Result;
use crate::model_inputs::RegressionSummary;
use crate::{fmt_human, fmt_machine};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifiedSets {
    pub rmax: f64,
    /// `c1^2 - 4 d1 b1`.
    pub discriminant_d: f64,
    /// Root from the `+ sqrt(D)` branch.
    pub nu1: f64,
    /// Root from the `- sqrt(D)` branch; absent when the quadratic is linear.
    pub nu2: Option<f64>,
    pub set1: Interval,
    pub set2: Option<Interval>,
    pub set1_contains_zero: bool,
    pub set2_contains_zero: Option<bool>,
    pub conclusions_differ: bool,
    pub note: Option<String>,
}

pub fn identified_sets(s: &RegressionSummary, rmax: f64) -> Result<IdentifiedSets> {
    let r = equal_selection_roots(s, rmax)?;
    let bt = s.beta_int;
    let set1 = Interval::hull(bt, bt - r.nu1);
    let set2 = r.nu2.map(|nu| Interval::hull(bt, bt - nu));
    let z1 = set1.contains(0.0);
    let z2 = set2.map(|i| i.contains(0.0));
    Ok(IdentifiedSets {
        rmax,
        discriminant_d: r.disc,
        nu1: r.nu1,
        nu2: r.nu2,
        set1,
        set2,
        set1_contains_zero: z1,
        set2_contains_zero: z2,
        conclusions_differ: z2.is_some_and(|z| z != z1),
        note: r.is_linear().then(|| "beta_short = beta_int: the quadratic is linear and has a single root".to_string()),
    })
}

pub fn write_csv<W: Write>(rows: &[(String, IdentifiedSets)], writer: W, human: bool) -> Result<()> {
    let fmt = if human { fmt_human } else { fmt_machine };
    let interval = |i: &Interval| format!("[{},{}]", fmt(i.lo), fmt(i.hi));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "rmax", "D", "id_set_1", "id_set_2", "nu1", "nu2"])?;
    for (label, r) in rows {
        w.write_record([
            label.clone(),
            fmt(r.rmax),
            fmt(r.discriminant_d),
            interval(&r.set1),
            r.set2.as_ref().map(interval).unwrap_or_else(|| "NA".into()),
            fmt(r.nu1),
            r.nu2.map(fmt).unwrap_or_else(|| "NA".into()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
