mod common;

use ovbound::bate::{self, quantile, Quantiles};
use ovbound::grid::{self, BoundedBox};
use ovbound::{BateDistribution, RegressionSummary};
use proptest::prelude::*;

fn breastfeed() -> (RegressionSummary, f64) {
    let (_, rmax, s) = common::calibrated().remove(0);
    (s, rmax)
}

fn box_1(s: &RegressionSummary, rmax: f64, step: f64) -> BoundedBox {
    BoundedBox::new(0.01, 0.99, s.r2_int, rmax, step).unwrap()
}

#[test]
fn breastfeed_box_1_matches_the_published_row() {
    let (s, rmax) = breastfeed();
    let field = grid::run(&s, &box_1(&s, rmax, 0.01)).unwrap();
    let dist = bate::distribution(&field, &s).unwrap();
    let published = [-0.021, -0.017, 0.009, 0.017, 0.017];
    for (got, want) in dist.beta_star_quantiles.values().iter().zip(published) {
        assert!((got - want).abs() <= 2e-3, "{got} vs {want}");
    }
    assert!(dist.contains_zero);
}

#[test]
fn step_size_drift_shrinks() {
    let (s, rmax) = breastfeed();
    let rows = bate::step_size_sweep(&s, &box_1(&s, rmax, 0.04), &[0.04, 0.02, 0.01]).unwrap();
    let drift = |a: &Quantiles, b: &Quantiles| {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let d1 = drift(&rows[0].beta_star_quantiles, &rows[1].beta_star_quantiles);
    let d2 = drift(&rows[1].beta_star_quantiles, &rows[2].beta_star_quantiles);
    assert!(d2 < d1, "{d1} then {d2}");
    assert!(rows.windows(2).all(|w| w[1].cells > w[0].cells));
}

#[test]
fn sweep_rows_match_direct_runs_and_repeat_exactly() {
    let (s, rmax) = breastfeed();
    let bx = box_1(&s, rmax, 0.04);
    let rows = bate::step_size_sweep(&s, &bx, &[0.04, 0.04]).unwrap();
    assert_eq!(rows[0].beta_star_quantiles, rows[1].beta_star_quantiles);
    assert_eq!(rows[0].cells, rows[1].cells);
    let direct = bate::distribution(&grid::run(&s, &bx).unwrap(), &s).unwrap();
    assert_eq!(rows[0].beta_star_quantiles, direct.beta_star_quantiles);
    assert_eq!(rows[0].cells, direct.len());
}

#[test]
fn coarse_lattice_values_reappear_in_the_fine_lattice() {
    let (s, rmax) = breastfeed();
    let coarse = grid::run(&s, &box_1(&s, rmax, 0.02)).unwrap();
    let fine = grid::run(&s, &box_1(&s, rmax, 0.01)).unwrap();
    let mut fine_values: Vec<f64> = bate::distribution(&fine, &s).unwrap().beta_star_values;
    fine_values.sort_by(f64::total_cmp);
    for v in bate::distribution(&coarse, &s).unwrap().beta_star_values {
        let k = fine_values.partition_point(|x| *x < v - 1e-9);
        assert!(k < fine_values.len() && (fine_values[k] - v).abs() <= 1e-9, "{v}");
    }
}

#[test]
fn in_box_cells_only() {
    let lbw = common::calibrated().remove(2);
    let (_, rmax, s) = lbw;
    let bx = BoundedBox::new(1.01, 3.99, s.r2_int, rmax, 0.02).unwrap();
    let field = grid::run(&s, &bx).unwrap();
    assert!(field.cells.len() > bx.len());
    assert_eq!(bate::distribution(&field, &s).unwrap().len(), bx.len());
}

#[test]
fn empty_sample_is_an_error() {
    assert!(BateDistribution::from_nu(vec![], 1.0).is_err());
}

#[test]
fn quantile_rule_on_a_small_sample() {
    let v = [1.0, 2.0, 4.0, 8.0];
    assert_eq!(quantile(&v, 0.0), 1.0);
    assert_eq!(quantile(&v, 1.0), 8.0);
    assert_eq!(quantile(&v, 0.5), 3.0);
    assert!((quantile(&v, 0.975) - 7.7).abs() < 1e-12);
    assert_eq!(quantile(&[5.0], 0.3), 5.0);
}

proptest! {
    #[test]
    fn beta_star_is_the_reflected_bias(nu in prop::collection::vec(-10.0..10.0f64, 1..200), bt in -5.0..5.0f64) {
        let d = BateDistribution::from_nu(nu, bt).unwrap();
        let (b, n) = (d.beta_star_quantiles.values(), d.nu_quantiles.values());
        for k in 0..5 {
            prop_assert!((b[k] - (bt - n[4 - k])).abs() <= 1e-9);
        }
        prop_assert!(b.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(d.contains_zero, d.bounding_set.contains(0.0));
    }

    #[test]
    fn quantiles_are_translation_equivariant(v in prop::collection::vec(-100.0..100.0f64, 1..200), c in -50.0..50.0f64) {
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let (a, b) = (Quantiles::of(&v).values(), Quantiles::of(&shifted).values());
        for k in 0..5 {
            prop_assert!((b[k] - a[k] - c).abs() <= 1e-9);
        }
    }

    #[test]
    fn quantiles_ignore_input_order(mut v in prop::collection::vec(-100.0..100.0f64, 1..100)) {
        let q = Quantiles::of(&v);
        v.reverse();
        prop_assert_eq!(q, Quantiles::of(&v));
    }
}
