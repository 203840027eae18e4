//! Quantiles of the bias-adjusted effect as the lattice step shrinks.

use ovbound::{bate, BoundedBox, RegressionSummary};

fn main() -> ovbound::Result<()> {
    let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119)?;
    let bx = BoundedBox::new(0.01, 0.99, s.r2_int, 0.61, 0.04)?;
    let rows = bate::step_size_sweep(&s, &bx, &[1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 250.0])?;
    println!("{:>8} {:>8} {:>9}  2.5%    5%      50%     95%     97.5%", "step", "cells", "secs");
    for r in &rows {
        let q = r.beta_star_quantiles.values().map(ovbound::fmt_human).join("  ");
        println!("{:>8.4} {:>8} {:>9.4}  {q}", r.step, r.cells, r.runtime_secs);
    }
    Ok(())
}
