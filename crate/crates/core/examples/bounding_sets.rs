//! Bounding sets for the calibrated breastfeeding model over the two standard boxes.

use ovbound::{bate, grid, BoundedBox, RegressionSummary};

fn main() -> ovbound::Result<()> {
    let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119)?;
    let boxes = [
        ("Box 1", BoundedBox::new(0.01, 0.99, s.r2_int, 0.61, 0.01)?),
        ("Box 2", BoundedBox::new(1.01, 3.99, s.r2_int, 0.61, 0.01)?),
    ];
    let mut dists = Vec::new();
    for (label, bx) in &boxes {
        let field = grid::run(&s, bx)?;
        println!(
            "{label}: {:?}, {} URR / {} NURR cells, {} flagged",
            field.case_used,
            field.count_in_box(grid::Region::Urr),
            field.count_in_box(grid::Region::Nurr),
            field.flagged_in_box()
        );
        dists.push((label.to_string(), bate::distribution(&field, &s)?));
    }
    let entries: Vec<_> = dists.iter().map(|(l, d)| (l.clone(), d)).collect();
    bate::write_quantile_csv(&bate::quantile_rows(&entries), std::io::stdout().lock(), true)?;
    for (label, d) in &dists {
        println!("{label}: {} = {}", bate::BOUNDING_SET_LABEL, d.bounding_set);
    }
    Ok(())
}
