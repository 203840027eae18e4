//! Oracles shared by the integration tests. None of them call the closed-form solver.
#![allow(dead_code)]

use ovbound::cubic::coefficients;
use ovbound::grid::{BiasField, Region};
use ovbound::RegressionSummary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn eval(c: [f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

fn bisect(c: [f64; 4], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Critical points of the cubic, ascending, when the derivative has two distinct real roots.
fn critical_points(c: [f64; 4]) -> Option<(f64, f64)> {
    let (qa, qb, qc) = (3.0 * c[0], 2.0 * c[1], c[2]);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let sign = if qb >= 0.0 { 1.0 } else { -1.0 };
    let t = -0.5 * (qb + sign * disc.sqrt());
    let (x1, x2) = if t == 0.0 { (0.0, -qb / qa) } else { (t / qa, qc / t) };
    Some((x1.min(x2), x1.max(x2)))
}

/// Number of distinct real roots from the signs of the cubic at its critical points.
pub fn distinct_real_root_count(c: [f64; 4]) -> usize {
    match critical_points(c) {
        None => 1,
        Some((x1, x2)) => {
            let (f1, f2) = (eval(c, x1), eval(c, x2));
            if f1 == 0.0 || f2 == 0.0 {
                2
            } else if (f1 < 0.0) != (f2 < 0.0) {
                3
            } else {
                1
            }
        }
    }
}

/// Real roots located by bisection between critical points and a Cauchy bound.
pub fn real_roots(c: [f64; 4]) -> Vec<f64> {
    let bound = 1.0 + (c[1] / c[0]).abs().max((c[2] / c[0]).abs()).max((c[3] / c[0]).abs());
    let mut pts = vec![-bound];
    if let Some((x1, x2)) = critical_points(c) {
        pts.extend([x1, x2]);
    }
    pts.push(bound);
    let mut roots = Vec::new();
    for w in pts.windows(2) {
        let (fa, fb) = (eval(c, w[0]), eval(c, w[1]));
        if fa == 0.0 {
            roots.push(w[0]);
        } else if (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(c, w[0], w[1]));
        }
    }
    if let Some(&last) = pts.last() {
        if eval(c, last) == 0.0 {
            roots.push(last);
        }
    }
    roots.dedup();
    roots
}

/// Track a root from `start` along the straight segment `from -> to` in `(delta, R_max)`,
/// keeping at each of `steps` points the real root nearest the previous one.
pub fn track(s: &RegressionSummary, from: (f64, f64), to: (f64, f64), start: f64, steps: usize) -> f64 {
    let mut current = start;
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let delta = from.0 + t * (to.0 - from.0);
        let rmax = from.1 + t * (to.1 - from.1);
        let co = coefficients(s, delta, rmax).expect("segment stays in the domain");
        let roots = real_roots([co.a, co.b, co.c, co.d]);
        current = roots
            .into_iter()
            .min_by(|x, y| (x - current).abs().total_cmp(&(y - current).abs()))
            .expect("a cubic has a real root");
    }
    current
}

/// For each NURR cell: the nearest URR cell in lattice distance (ties by index) and the tracked root.
pub fn continuation_oracle(s: &RegressionSummary, field: &BiasField, steps: usize) -> Vec<(usize, f64)> {
    use rayon::prelude::*;
    let urr: Vec<_> = field.cells.iter().filter(|c| c.region == Region::Urr).collect();
    field
        .cells
        .par_iter()
        .enumerate()
        .filter(|(_, c)| c.region == Region::Nurr)
        .map(|(idx, c)| {
            let anchor = urr
                .iter()
                .min_by_key(|u| {
                    let di = u.i as i64 - c.i as i64;
                    let dj = u.j as i64 - c.j as i64;
                    (di * di + dj * dj, u.i, u.j)
                })
                .expect("field has a URR cell");
            (idx, track(s, (anchor.delta, anchor.rmax), (c.delta, c.rmax), anchor.roots.roots[0], steps))
        })
        .collect()
}

/// A random summary satisfying every validity invariant.
pub fn random_summary(r: &mut ChaCha8Rng) -> RegressionSummary {
    let r0 = r.random_range(0.0..0.6);
    let rt = r0 + r.random_range(0.0..(0.99 - r0));
    let sx = 10f64.powf(r.random_range(-1.5..1.5));
    let tau = sx * r.random_range(0.02..0.98);
    RegressionSummary::new(
        r.random_range(-3.0..3.0),
        r0,
        r.random_range(-3.0..3.0),
        rt,
        10f64.powf(r.random_range(-1.5..1.5)),
        sx,
        tau,
    )
    .expect("constructed within the invariants")
}

pub fn calibrated() -> Vec<(String, f64, RegressionSummary)> {
    let text = include_str!("../../fixtures/calibrated_models.json");
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    v["models"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            (
                m["label"].as_str().unwrap().to_string(),
                m["rmax"].as_f64().unwrap(),
                serde_json::from_value(m["summary"].clone()).unwrap(),
            )
        })
        .collect()
}
