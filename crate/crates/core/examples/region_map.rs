//! Character map of the unique-root (`.`) and multiple-root (`#`) regions over a box.

use ovbound::{grid, BoundedBox, Region, RegressionSummary};

fn main() -> ovbound::Result<()> {
    let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119)?;
    let bx = BoundedBox::new(0.01, 3.99, s.r2_int, 0.61, 0.05)?;
    let map = grid::classify(&s, &bx)?;
    println!(
        "R_max down the page ({:.3} at the bottom), delta across ({} to {})",
        s.r2_int, bx.delta_low, bx.delta_high
    );
    for j in (0..bx.n_rmax()).rev() {
        let row: String =
            (0..bx.n_delta()).map(|i| if map.get(i, j).region == Region::Urr { '.' } else { '#' }).collect();
        println!("{:.3} {row}", bx.rmax_at(j));
    }
    println!("URR {} / NURR {}", map.count(Region::Urr), map.count(Region::Nurr));
    Ok(())
}
