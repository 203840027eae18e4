//! The zero-effect curve `delta = f(R_max) = C / (A (R_max - R~) + B)`.
//!
//! Setting `nu = beta~` in the bias cubic (a zero treatment effect) leaves an
//! equation linear in `delta`; `f` is its solution. `R* = R~ - B/A` is the pole.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cubic::coefficients;
use crate::error::{Error, Result};
use crate::model_inputs::RegressionSummary;
use crate::{fmt_human, fmt_machine};

/// Distance from the pole within which evaluation is refused.
pub const POLE_TOLERANCE: f64 = 1e-9;
/// Relative residual certifying the constants against the cubic.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;
const A_ZERO_TOLERANCE: f64 = 1e-12;
const C_ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slope {
    Negative,
    Positive,
    Constant,
}

impl Slope {
    pub fn label(self) -> &'static str {
        match self {
            Slope::Negative => "Negative",
            Slope::Positive => "Positive",
            Slope::Constant => "Constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    None,
    /// `beta~ = 0`: the effect is already zero and `C = 0`.
    BetaTildeZero,
    /// `A = 0`: `f` is constant and has no pole.
    AZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaStarProfile {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r2_int: f64,
    /// `R~ - B/A`; `None` when `A` is degenerate.
    pub r_star: Option<f64>,
    pub discontinuity_in_domain: bool,
    pub slope: Slope,
    pub degenerate: Degeneracy,
    pub usable: bool,
}

impl DeltaStarProfile {
    /// Profile from explicit constants, with `A` treated as zero only when exactly zero.
    pub fn from_constants(a: f64, b: f64, c: f64, r2_int: f64) -> Self {
        Self::classify(a, b, c, r2_int, a == 0.0, c == 0.0, Degeneracy::None)
    }

    fn classify(a: f64, b: f64, c: f64, r2_int: f64, a_zero: bool, c_zero: bool, base: Degeneracy) -> Self {
        let degenerate = match base {
            Degeneracy::None if a_zero => Degeneracy::AZero,
            other => other,
        };
        let r_star = (!a_zero).then(|| r2_int - b / a);
        let discontinuity_in_domain = r_star.is_some_and(|r| (r2_int..=1.0).contains(&r));
        let slope = if c_zero || a_zero {
            Slope::Constant
        } else if a * c > 0.0 {
            Slope::Negative
        } else {
            Slope::Positive
        };
        Self {
            a,
            b,
            c,
            r2_int,
            r_star,
            discontinuity_in_domain,
            slope,
            degenerate,
            usable: degenerate == Degeneracy::None && !discontinuity_in_domain,
        }
    }

    fn denominator(&self, rmax: f64) -> f64 {
        self.a * (rmax - self.r2_int) + self.b
    }
}

pub fn profile(s: &RegressionSummary) -> DeltaStarProfile {
    let (bt, bs) = (s.beta_int, s.beta_short);
    let (sy, sx, tau) = (s.sigma2_y, s.sigma2_x, s.tau_x);
    let g = s.beta_gap();
    let lead = sx * tau - tau * tau;

    let a = bt * sy * (sx - tau) + sy * sx * g;
    let b = bt.powi(3) * lead + bt * bt * sx * tau * g;
    let c = bt * sy * tau * (s.r2_int - s.r2_short)
        + bt * sx * tau * g * g
        + bt.powi(3) * lead
        + 2.0 * bt * bt * sx * tau * g;

    let a_tol = A_ZERO_TOLERANCE * sy * sx.max(tau) * bt.abs().max(bs.abs()).max(1.0);
    let c_terms = (sx * bs * bs).max(sy * (s.r2_int - s.r2_short)).max(tau * bt * bt);
    let c_zero = c.abs() <= C_ZERO_TOLERANCE * (bt * tau).abs() * c_terms;
    let base = if bt == 0.0 { Degeneracy::BetaTildeZero } else { Degeneracy::None };
    DeltaStarProfile::classify(a, b, c, s.r2_int, a.abs() <= a_tol, c_zero || bt == 0.0, base)
}

pub fn evaluate(p: &DeltaStarProfile, rmax: f64) -> Result<f64> {
    if !(p.r2_int..=1.0).contains(&rmax) {
        return Err(Error::Domain(format!("R_max = {rmax} outside [{}, 1]", p.r2_int)));
    }
    if let Some(r_star) = p.r_star {
        if (rmax - r_star).abs() <= POLE_TOLERANCE {
            return Err(Error::Pole { rmax, r_star });
        }
    }
    let den = p.denominator(rmax);
    if den == 0.0 {
        return Err(Error::DeltaStarRefused("A and B both vanish".into()));
    }
    Ok(p.c / den)
}

/// Substitution of `nu = beta~` into the cubic at `(delta*, rmax)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEffectCheck {
    pub rmax: f64,
    pub delta_star: f64,
    pub residual: f64,
    /// `max(|a|, |b|, |c|, |d|) * max(1, |beta~|)^3`.
    pub scale: f64,
    pub certified: bool,
}

pub fn zero_effect_consistency(s: &RegressionSummary, rmax: f64) -> Result<ZeroEffectCheck> {
    let p = profile(s);
    if p.degenerate == Degeneracy::BetaTildeZero {
        return Err(Error::DeltaStarRefused("beta~ = 0: the effect is zero for every delta".into()));
    }
    let delta_star = evaluate(&p, rmax)?;
    let co = coefficients(s, delta_star, rmax)?;
    let residual = co.eval(s.beta_int);
    let scale = co.scale() * s.beta_int.abs().max(1.0).powi(3);
    Ok(ZeroEffectCheck {
        rmax,
        delta_star,
        residual,
        scale,
        certified: residual.abs() <= CONSISTENCY_TOLERANCE * scale,
    })
}

/// One diagnostic row: discontinuity flag, slope and delta*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStarReport {
    pub rmax: f64,
    pub discontinuity: bool,
    pub slope: Slope,
    pub r_star: Option<f64>,
    pub delta_star: Option<f64>,
    pub refusal: Option<String>,
}

pub fn report(p: &DeltaStarProfile, rmax: f64) -> DeltaStarReport {
    let refuse = |msg: String| DeltaStarReport {
        rmax,
        discontinuity: p.discontinuity_in_domain,
        slope: p.slope,
        r_star: p.r_star,
        delta_star: None,
        refusal: Some(msg),
    };
    match p.degenerate {
        Degeneracy::BetaTildeZero => return refuse("beta~ = 0, so delta* is 0 for every R_max".into()),
        Degeneracy::AZero => return refuse("A = 0, so delta* does not depend on R_max".into()),
        Degeneracy::None => {}
    }
    if p.discontinuity_in_domain {
        return refuse(format!(
            "R* = {} lies in [R~, 1]; delta* is unstable near the pole and should be avoided",
            fmt_human(p.r_star.unwrap_or(f64::NAN))
        ));
    }
    match evaluate(p, rmax) {
        Ok(v) => DeltaStarReport {
            rmax,
            discontinuity: false,
            slope: p.slope,
            r_star: p.r_star,
            delta_star: Some(v),
            refusal: None,
        },
        Err(e) => refuse(e.to_string()),
    }
}

pub fn write_report_csv<W: Write>(rows: &[(String, DeltaStarReport)], writer: W, human: bool) -> Result<()> {
    let fmt = if human { fmt_human } else { fmt_machine };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "rmax", "delta_star", "discont", "slope", "note"])?;
    for (label, r) in rows {
        w.write_record([
            label.clone(),
            fmt(r.rmax),
            r.delta_star.map(fmt).unwrap_or_else(|| "NA".into()),
            if r.discontinuity { "TRUE" } else { "FALSE" }.into(),
            r.slope.label().into(),
            r.refusal.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
