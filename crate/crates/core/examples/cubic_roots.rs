//! Real roots of the bias cubic at a few (delta, R_max) points. At delta = 1 the
//! leading coefficient vanishes and the quadratic solver takes over.

use ovbound::cubic::{coefficients, solve_cubic, solve_quadratic};
use ovbound::RegressionSummary;

fn main() -> ovbound::Result<()> {
    let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119)?;
    for (delta, rmax) in [(0.5, 0.4), (0.9, 0.61), (1.0, 0.61), (2.0, 0.61), (3.5, 0.3)] {
        let co = coefficients(&s, delta, rmax)?;
        let roots = if delta == 1.0 { solve_quadratic(&s, rmax)? } else { solve_cubic(&co)? };
        let residuals: Vec<String> = roots.roots.iter().map(|r| format!("{:.1e}", co.eval(*r))).collect();
        println!(
            "delta {delta:<4} R_max {rmax:<4} {:?}: roots {:?}, residuals [{}]",
            roots.kind,
            roots.roots,
            residuals.join(", ")
        );
    }
    Ok(())
}
