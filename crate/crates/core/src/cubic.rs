//! The bias cubic `a nu^3 + b nu^2 + c nu + d = 0` and its `delta = 1` quadratic.
//!
//! Real roots come from closed forms: Cardano in the one-real-root case and the
//! trigonometric form when all three roots are real. Each root then gets a few
//! guarded Newton steps on the undepressed cubic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_inputs::RegressionSummary;

/// Relative size of `a` (against `tau_x sigma2_x - tau_x^2`) below which the cubic degenerates.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Discriminant magnitude, relative to its largest term, treated as zero.
pub const DISC_TOLERANCE: f64 = 1e-10;
/// Relative tolerance for `b^2 = 3ac` in [`multiplicity_guard`].
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the quadratic's leading coefficient before it is treated as linear.
pub const LINEAR_TOLERANCE: f64 = 1e-12;

const NEWTON_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Depressed {
    pub p: f64,
    pub q: f64,
    /// `27 q^2 + 4 p^3`; positive means one real root.
    pub disc: f64,
    /// Largest term of the discriminant, in the same units as `disc`.
    pub disc_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub delta: f64,
    pub rmax: f64,
    /// Threshold on `|a|` below which the cubic is degenerate.
    pub eps_a: f64,
    /// `None` when `|a| <= eps_a`.
    pub depressed: Option<Depressed>,
}

impl CubicCoefficients {
    /// A bare cubic, not tied to a regression summary. Degenerate only when `a == 0`.
    pub fn from_raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::assemble(a, b, c, d, f64::NAN, f64::NAN, 0.0)
    }

    fn assemble(a: f64, b: f64, c: f64, d: f64, delta: f64, rmax: f64, eps_a: f64) -> Self {
        let depressed = (a.abs() > eps_a).then(|| depress(a, b, c, d));
        Self { a, b, c, d, delta, rmax, eps_a, depressed }
    }

    pub fn is_degenerate(&self) -> bool {
        self.depressed.is_none()
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.a * x + self.b) * x + self.c) * x + self.d
    }

    fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a * x + 2.0 * self.b) * x + self.c
    }

    /// `max(|a|, |b|, |c|, |d|)`.
    pub fn scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Residual bound used throughout: `1e-9 * scale * max(1, |x|)^3`.
    pub fn residual_bound(&self, x: f64) -> f64 {
        1e-9 * self.scale() * x.abs().max(1.0).powi(3)
    }
}

fn depress(a: f64, b: f64, c: f64, d: f64) -> Depressed {
    let p = (3.0 * a * c - b * b) / (3.0 * a * a);
    let q = (27.0 * a * a * d + 2.0 * b * b * b - 9.0 * a * b * c) / (27.0 * a * a * a);
    // 27 q^2 + 4 p^3 cancels badly when |a| << |b|; the undepressed
    // discriminant divided by -a^4 is the same quantity without that loss.
    let terms =
        [18.0 * a * b * c * d, -4.0 * b * b * b * d, b * b * c * c, -4.0 * a * c * c * c, -27.0 * a * a * d * d];
    let a4 = (a * a) * (a * a);
    let disc = -terms.iter().sum::<f64>() / a4;
    let disc_scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs())) / a4;
    Depressed { p, q, disc, disc_scale }
}

/// Coefficients of the bias cubic at `(delta, rmax)`.
pub fn coefficients(s: &RegressionSummary, delta: f64, rmax: f64) -> Result<CubicCoefficients> {
    if !(delta.is_finite() && rmax.is_finite()) {
        return Err(Error::Domain(format!("non-finite evaluation point ({delta}, {rmax})")));
    }
    if rmax < s.r2_int {
        return Err(Error::Domain(format!("R_max below intermediate R-squared ({rmax} < {})", s.r2_int)));
    }
    let (sy, sx, tau) = (s.sigma2_y, s.sigma2_x, s.tau_x);
    let g = s.beta_gap();
    let lead = s.leading_factor();
    let a = (delta - 1.0) * lead;
    let b = tau * g * sx * (delta - 2.0);
    let c = delta * (rmax - s.r2_int) * sy * (sx - tau) - (s.r2_int - s.r2_short) * sy * tau - sx * tau * g * g;
    let d = delta * (rmax - s.r2_int) * sy * g * sx;
    Ok(CubicCoefficients::assemble(a, b, c, d, delta, rmax, DEGENERACY_TOLERANCE * lead.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    UniqueReal,
    ThreeReal,
    QuadraticTwo,
    QuadraticOne,
    /// The `delta = 1` quadratic collapsed to a linear equation.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub kind: RootKind,
    /// Ascending; repeated roots appear with multiplicity for `ThreeReal`.
    pub roots: Vec<f64>,
    pub disc: f64,
}

impl RootSet {
    pub fn is_unique(&self) -> bool {
        self.kind == RootKind::UniqueReal
    }
}

/// Discriminant threshold for the classification of `dep`.
pub fn disc_tolerance(dep: &Depressed) -> f64 {
    DISC_TOLERANCE * dep.disc_scale
}

pub fn solve_cubic(co: &CubicCoefficients) -> Result<RootSet> {
    let dep = co.depressed.ok_or(Error::DegenerateCubic { a: co.a, tolerance: co.eps_a })?;
    let shift = co.b / (3.0 * co.a);
    let (p, q) = (dep.p, dep.q);

    if dep.disc > disc_tolerance(&dep) {
        let x = cardano(p, q);
        let root = polish(co, x - shift);
        return Ok(RootSet { kind: RootKind::UniqueReal, roots: vec![root], disc: dep.disc });
    }

    let mut roots = if p >= 0.0 {
        // Only reachable with p and q both negligible: a (near) triple root.
        let x = polish(co, cardano(p, q) - shift);
        vec![x, x, x]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let largest = (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .max_by(|x, y| x.abs().total_cmp(&y.abs()))
            .unwrap_or(-shift);
        // The smaller roots lose all accuracy to the shift when |b/a| dominates,
        // so they come from the deflated quadratic instead.
        let r = polish(co, largest);
        let (e, f) = if r == 0.0 {
            (co.b, co.c)
        } else {
            let f = -co.d / r;
            ((f - co.c) / r, f)
        };
        let sq = (e * e - 4.0 * co.a * f).max(0.0).sqrt();
        let t = -0.5 * (e + if e >= 0.0 { sq } else { -sq });
        let (r1, r2) = if t == 0.0 { (0.0, 0.0) } else { (t / co.a, f / t) };
        vec![r, polish(co, r1), polish(co, r2)]
    };
    roots.sort_by(f64::total_cmp);
    Ok(RootSet { kind: RootKind::ThreeReal, roots, disc: dep.disc })
}

/// Real root of `x^3 + p x + q` when `(q/2)^2 + (p/3)^3 >= 0`.
fn cardano(p: f64, q: f64) -> f64 {
    let d3 = (0.25 * q * q + (p / 3.0).powi(3)).max(0.0);
    let sq = d3.sqrt();
    // Take the cube root of the larger-magnitude term and recover the other
    // from u v = -p/3, which avoids cancellation.
    let big = if q >= 0.0 { -(0.5 * q + sq) } else { -0.5 * q + sq };
    if big == 0.0 {
        return 0.0;
    }
    let u = big.cbrt();
    u - p / (3.0 * u)
}

fn polish(co: &CubicCoefficients, mut x: f64) -> f64 {
    let mut fx = co.eval(x);
    for _ in 0..NEWTON_STEPS {
        if fx == 0.0 {
            break;
        }
        let dfx = co.derivative(x);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        let fnext = co.eval(next);
        if fnext.abs() >= fx.abs() || fnext.is_nan() {
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

/// Coefficients `(b1, c1, d1)` of `b1 nu^2 + c1 nu + d1 = 0`, the cubic at `delta = 1`.
pub fn quadratic_coefficients(s: &RegressionSummary, rmax: f64) -> Result<(f64, f64, f64)> {
    let co = coefficients(s, 1.0, rmax)?;
    Ok((co.b, co.c, co.d))
}

/// Quadratic roots with their branch labels kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualSelectionRoots {
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
    /// `c1^2 - 4 d1 b1`.
    pub disc: f64,
    /// `(-c1 + sqrt(D)) / 2 b1`, or the single root of the linear case.
    pub nu1: f64,
    /// `(-c1 - sqrt(D)) / 2 b1`; `None` in the linear case.
    pub nu2: Option<f64>,
}

impl EqualSelectionRoots {
    pub fn is_linear(&self) -> bool {
        self.nu2.is_none()
    }
}

pub fn equal_selection_roots(s: &RegressionSummary, rmax: f64) -> Result<EqualSelectionRoots> {
    let (b1, c1, d1) = quadratic_coefficients(s, rmax)?;
    let disc_raw = c1 * c1 - 4.0 * d1 * b1;
    let scale = (c1 * c1).max((4.0 * d1 * b1).abs());
    if disc_raw < -1e-12 * scale {
        return Err(Error::Inconsistent(format!(
            "negative equal-selection discriminant {disc_raw:e} (scale {scale:e})"
        )));
    }
    let disc = disc_raw.max(0.0);

    let gap_tol = LINEAR_TOLERANCE * s.beta_short.abs().max(s.beta_int.abs()).max(1.0);
    if s.beta_gap().abs() <= gap_tol {
        if c1 == 0.0 {
            return Err(Error::DegenerateQuadratic("b1 and c1 both vanish; every nu solves the equation".into()));
        }
        return Ok(EqualSelectionRoots { b1, c1, d1, disc, nu1: -d1 / c1, nu2: None });
    }

    let sq = disc.sqrt();
    let (nu1, nu2) = if c1 >= 0.0 {
        let den = -c1 - sq;
        let nu2 = den / (2.0 * b1);
        let nu1 = if den == 0.0 { 0.0 } else { 2.0 * d1 / den };
        (nu1, nu2)
    } else {
        let num = -c1 + sq;
        (num / (2.0 * b1), 2.0 * d1 / num)
    };
    Ok(EqualSelectionRoots { b1, c1, d1, disc, nu1, nu2: Some(nu2) })
}

pub fn solve_quadratic(s: &RegressionSummary, rmax: f64) -> Result<RootSet> {
    let r = equal_selection_roots(s, rmax)?;
    let Some(nu2) = r.nu2 else {
        return Ok(RootSet { kind: RootKind::Degenerate, roots: vec![r.nu1], disc: r.disc });
    };
    if r.disc <= 1e-12 * (r.c1 * r.c1).max((4.0 * r.d1 * r.b1).abs()) {
        return Ok(RootSet { kind: RootKind::QuadraticOne, roots: vec![0.5 * (r.nu1 + nu2)], disc: r.disc });
    }
    let (lo, hi) = if r.nu1 <= nu2 { (r.nu1, nu2) } else { (nu2, r.nu1) };
    Ok(RootSet { kind: RootKind::QuadraticTwo, roots: vec![lo, hi], disc: r.disc })
}

/// `true` when `b^2 != 3ac` beyond tolerance, i.e. real roots are simple.
pub fn multiplicity_guard(co: &CubicCoefficients) -> bool {
    let bb = co.b * co.b;
    let ac3 = 3.0 * co.a * co.c;
    (bb - ac3).abs() > MULTIPLICITY_TOLERANCE * bb.max(ac3.abs()).max(1.0)
}
