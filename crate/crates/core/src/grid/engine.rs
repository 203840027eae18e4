use std::collections::VecDeque;

use rayon::prelude::*;

use super::field::{BiasField, CaseUsed, Extension, GridCell, Region, SelectionSource};
use super::lattice::{guard_unit_delta, BoundedBox};
use crate::cubic::{coefficients, multiplicity_guard, solve_cubic, RootSet};
use crate::error::{Error, Result};
use crate::model_inputs::RegressionSummary;

/// Case 3 never widens delta beyond `(-DELTA_CAP, DELTA_CAP)`.
pub const DELTA_CAP: f64 = 100.0;
/// Width in delta added per Case 3 iteration.
pub const EXTENSION_WIDTH: f64 = 0.5;
/// Candidate roots whose distances to the anchor differ by less than this are tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// One lattice point after solving the cubic there.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedPoint {
    pub delta: f64,
    pub rmax: f64,
    pub shifted: bool,
    pub region: Region,
    pub roots: RootSet,
    pub multiplicity_ok: bool,
}

/// Region map over a box, stored delta-major (`i * n_rmax + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub n_delta: usize,
    pub n_rmax: usize,
    pub points: Vec<ClassifiedPoint>,
}

impl RegionMap {
    pub fn get(&self, i: usize, j: usize) -> &ClassifiedPoint {
        &self.points[i * self.n_rmax + j]
    }

    pub fn count(&self, region: Region) -> usize {
        self.points.iter().filter(|p| p.region == region).count()
    }
}

fn classify_point(s: &RegressionSummary, delta: f64, rmax: f64) -> Result<ClassifiedPoint> {
    let (delta, shifted) = guard_unit_delta(delta);
    let co = coefficients(s, delta, rmax)?;
    let roots = solve_cubic(&co)?;
    let region = if roots.is_unique() { Region::Urr } else { Region::Nurr };
    Ok(ClassifiedPoint { delta, rmax, shifted, region, roots, multiplicity_ok: multiplicity_guard(&co) })
}

fn classify_column(s: &RegressionSummary, bbox: &BoundedBox, i: i64) -> Result<Vec<ClassifiedPoint>> {
    let delta = bbox.delta_at(i);
    (0..bbox.n_rmax()).map(|j| classify_point(s, delta, bbox.rmax_at(j))).collect()
}

fn classify_columns(
    s: &RegressionSummary,
    bbox: &BoundedBox,
    range: std::ops::Range<i64>,
) -> Result<Vec<Vec<ClassifiedPoint>>> {
    range.into_par_iter().map(|i| classify_column(s, bbox, i)).collect()
}

/// Solve the cubic at every lattice point of `bbox` and tag URR / NURR.
pub fn classify(s: &RegressionSummary, bbox: &BoundedBox) -> Result<RegionMap> {
    bbox.validate_for(s)?;
    let cols = classify_columns(s, bbox, 0..bbox.n_delta() as i64)?;
    Ok(RegionMap { n_delta: bbox.n_delta(), n_rmax: bbox.n_rmax(), points: cols.into_iter().flatten().collect() })
}

/// Select one root at every lattice point of `bbox`.
///
/// URR points take their unique root. NURR points are resolved in layers
/// outward from resolved points, each taking the real root nearest to its
/// closest resolved 8-neighbour. With no URR point in the box, the lattice is
/// first widened along delta until one appears.
pub fn run(s: &RegressionSummary, bbox: &BoundedBox) -> Result<BiasField> {
    bbox.validate_for(s)?;
    let n_delta = bbox.n_delta() as i64;
    let mut cols: VecDeque<Vec<ClassifiedPoint>> = classify_columns(s, bbox, 0..n_delta)?.into();

    let has_urr = |cols: &[Vec<ClassifiedPoint>]| cols.iter().flatten().any(|p| p.region == Region::Urr);
    let all_urr = cols.iter().flatten().all(|p| p.region == Region::Urr);
    let case_used = if all_urr {
        CaseUsed::Case1
    } else if has_urr(cols.make_contiguous()) {
        CaseUsed::Case2
    } else {
        CaseUsed::Case3
    };

    let mut added_low = 0i64;
    let mut added_high = 0i64;
    let mut extension = None;
    if case_used == CaseUsed::Case3 {
        let chunk = ((EXTENSION_WIDTH / bbox.step).round() as i64).max(1);
        let mut iterations = 0;
        let mut prefer_high = true;
        loop {
            let next_high = n_delta + added_high;
            let next_low = -added_low - 1;
            let can_high = bbox.delta_at(next_high) < DELTA_CAP;
            let can_low = bbox.delta_at(next_low) > -DELTA_CAP;
            if !can_high && !can_low {
                return Err(Error::NoAnchor {
                    delta_low: bbox.delta_at(-added_low),
                    delta_high: bbox.delta_at(n_delta - 1 + added_high),
                });
            }
            let go_high = (prefer_high && can_high) || !can_low;
            prefer_high = !prefer_high;
            iterations += 1;
            let found = if go_high {
                let end = (next_high..next_high + chunk)
                    .take_while(|&i| bbox.delta_at(i) < DELTA_CAP)
                    .last()
                    .map_or(next_high, |i| i + 1);
                let new = classify_columns(s, bbox, next_high..end)?;
                added_high += end - next_high;
                let found = has_urr(&new);
                cols.extend(new);
                found
            } else {
                let start =
                    (next_low - chunk + 1..=next_low).find(|&i| bbox.delta_at(i) > -DELTA_CAP).unwrap_or(next_low);
                let new = classify_columns(s, bbox, start..next_low + 1)?;
                added_low += next_low + 1 - start;
                let found = has_urr(&new);
                for col in new.into_iter().rev() {
                    cols.push_front(col);
                }
                found
            };
            if found {
                extension = Some(Extension {
                    delta_low: bbox.delta_at(-added_low),
                    delta_high: bbox.delta_at(n_delta - 1 + added_high),
                    columns_low: added_low as usize,
                    columns_high: added_high as usize,
                    iterations,
                });
                break;
            }
        }
    }

    let n_cols = cols.len();
    let n_rmax = bbox.n_rmax();
    let offset = added_low as usize;
    let points: Vec<ClassifiedPoint> = cols.into_iter().flatten().collect();
    let resolution = propagate(&points, n_cols, n_rmax)?;

    let cells = points
        .into_iter()
        .zip(resolution)
        .enumerate()
        .map(|(idx, (p, r))| {
            let (i, j) = (idx / n_rmax, idx % n_rmax);
            GridCell {
                i,
                j,
                delta: p.delta,
                rmax: p.rmax,
                region: p.region,
                roots: p.roots,
                selected: r.selected,
                source: r.source,
                layer: r.layer,
                multiplicity_ok: p.multiplicity_ok,
                ambiguous: r.ambiguous,
                shifted: p.shifted,
                in_box: i >= offset && i < offset + n_delta as usize,
            }
        })
        .collect();

    Ok(BiasField { bbox: *bbox, n_delta: n_cols, n_rmax, delta_offset: offset, cells, case_used, extension })
}

#[derive(Debug, Clone, Copy)]
struct Resolution {
    selected: f64,
    source: SelectionSource,
    layer: usize,
    ambiguous: bool,
}

fn neighbours(i: usize, j: usize, n_cols: usize, n_rmax: usize) -> impl Iterator<Item = (usize, usize, bool)> {
    // (i', j', diagonal), yielded in ascending (i', j') order
    (-1i64..=1).flat_map(move |di| {
        (-1i64..=1).filter_map(move |dj| {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if (di == 0 && dj == 0) || ni < 0 || nj < 0 || ni >= n_cols as i64 || nj >= n_rmax as i64 {
                return None;
            }
            Some((ni as usize, nj as usize, di != 0 && dj != 0))
        })
    })
}

fn propagate(points: &[ClassifiedPoint], n_cols: usize, n_rmax: usize) -> Result<Vec<Resolution>> {
    let mut state: Vec<Option<Resolution>> = points
        .iter()
        .map(|p| {
            (p.region == Region::Urr).then(|| Resolution {
                selected: p.roots.roots[0],
                source: SelectionSource::UniqueRoot,
                layer: 0,
                ambiguous: false,
            })
        })
        .collect();

    let mut queued = vec![false; points.len()];
    let mut frontier: Vec<usize> = Vec::new();
    let enqueue_neighbours = |idx: usize, state: &[Option<Resolution>], queued: &mut [bool], out: &mut Vec<usize>| {
        let (i, j) = (idx / n_rmax, idx % n_rmax);
        for (ni, nj, _) in neighbours(i, j, n_cols, n_rmax) {
            let k = ni * n_rmax + nj;
            if state[k].is_none() && !queued[k] {
                queued[k] = true;
                out.push(k);
            }
        }
    };
    for idx in 0..points.len() {
        if state[idx].is_some() {
            enqueue_neighbours(idx, &state, &mut queued, &mut frontier);
        }
    }

    let mut layer = 0;
    while !frontier.is_empty() {
        layer += 1;
        frontier.sort_unstable();
        let snapshot = &state;
        let resolved: Vec<Resolution> =
            frontier.par_iter().map(|&idx| resolve_from(idx, points, snapshot, n_cols, n_rmax, layer)).collect();
        for (&idx, r) in frontier.iter().zip(resolved) {
            state[idx] = Some(r);
        }
        let mut next = Vec::new();
        for &idx in &frontier {
            enqueue_neighbours(idx, &state, &mut queued, &mut next);
        }
        frontier = next;
    }

    state
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Inconsistent("lattice has cells no anchor can reach".into()))
}

fn resolve_from(
    idx: usize,
    points: &[ClassifiedPoint],
    state: &[Option<Resolution>],
    n_cols: usize,
    n_rmax: usize,
    layer: usize,
) -> Resolution {
    let (i, j) = (idx / n_rmax, idx % n_rmax);
    let (ai, aj, _) = neighbours(i, j, n_cols, n_rmax)
        .filter(|&(ni, nj, _)| state[ni * n_rmax + nj].is_some())
        .min_by_key(|&(ni, nj, diag)| (diag, ni, nj))
        .expect("frontier cells have a resolved neighbour");
    let anchor = state[ai * n_rmax + aj].expect("anchor resolved").selected;
    let (selected, ambiguous) = nearest_root(&points[idx].roots.roots, anchor);
    Resolution { selected, source: SelectionSource::PropagatedFrom { i: ai, j: aj }, layer, ambiguous }
}

/// Root closest to `target`. Ties within [`TIE_TOLERANCE`] go to the smaller
/// magnitude and are reported as ambiguous.
pub fn nearest_root(roots: &[f64], target: f64) -> (f64, bool) {
    let best = roots.iter().map(|r| (r - target).abs()).fold(f64::INFINITY, f64::min);
    let mut tied: Vec<f64> = roots.iter().copied().filter(|r| (r - target).abs() - best <= TIE_TOLERANCE).collect();
    tied.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
    tied.dedup();
    (tied[0], tied.len() > 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn breastfeed() -> RegressionSummary {
        RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119).unwrap()
    }

    #[test]
    fn nearest_root_tie_prefers_small_magnitude() {
        assert_eq!(nearest_root(&[-1.0, 0.5, 2.0], 0.4), (0.5, false));
        assert_eq!(nearest_root(&[-1.0, 1.0, 5.0], 0.0), (-1.0, true));
        assert_eq!(nearest_root(&[-0.5, 1.5, 5.0], 0.5), (-0.5, true));
        // a repeated root is not a tie between distinct candidates
        assert_eq!(nearest_root(&[2.0, 2.0, 7.0], 2.1), (2.0, false));
    }

    #[test]
    fn every_cell_is_resolved() {
        let s = breastfeed();
        let bx = BoundedBox::new(0.01, 0.99, s.r2_int, 0.61, 0.02).unwrap();
        let f = run(&s, &bx).unwrap();
        assert_eq!(f.cells.len(), bx.len());
        assert!(f.cells.iter().all(|c| c.selected.is_finite()));
        for c in &f.cells {
            assert!(c.roots.roots.contains(&c.selected));
            if c.region == Region::Urr {
                assert_eq!(c.source, SelectionSource::UniqueRoot);
            }
        }
    }

    #[test]
    fn propagation_sources_are_adjacent_and_earlier() {
        let s = breastfeed();
        let bx = BoundedBox::new(1.01, 3.99, s.r2_int, 0.61, 0.05).unwrap();
        let f = run(&s, &bx).unwrap();
        for c in &f.cells {
            if let SelectionSource::PropagatedFrom { i, j } = c.source {
                assert!(c.i.abs_diff(i) <= 1 && c.j.abs_diff(j) <= 1);
                assert!(f.cell(i, j).layer < c.layer);
            }
        }
    }

    #[test]
    fn unit_delta_column_is_shifted() {
        let s = breastfeed();
        let bx = BoundedBox::new(0.9, 1.1, s.r2_int, 0.5, 0.05).unwrap();
        let f = run(&s, &bx).unwrap();
        let shifted: Vec<_> = f.cells.iter().filter(|c| c.shifted).collect();
        assert_eq!(shifted.len(), bx.n_rmax());
        assert!(shifted.iter().all(|c| c.delta == 1.0 + 1e-9));
    }
}
