//! The delta that would make the effect zero, as R_max varies.

use ovbound::delta_star::{self, zero_effect_consistency};
use ovbound::RegressionSummary;

fn main() -> ovbound::Result<()> {
    let s = RegressionSummary::new(0.176, 0.008, 0.050, 0.249, 0.9143271194, 0.206959541, 0.2004183631)?;
    let p = delta_star::profile(&s);
    println!("slope {}, pole {:?}, pole inside [R~, 1]: {}", p.slope.label(), p.r_star, p.discontinuity_in_domain);
    for rmax in [0.3, 0.4, 0.5, 0.61, 0.8, 1.0] {
        let r = delta_star::report(&p, rmax);
        match (r.delta_star, r.refusal) {
            (Some(d), _) => {
                let chk = zero_effect_consistency(&s, rmax)?;
                println!("R_max {rmax:.2}: delta* = {d:.4} (cubic at beta~ = {:.1e})", chk.residual);
            }
            (None, reason) => println!("R_max {rmax:.2}: refused, {}", reason.unwrap_or_default()),
        }
    }
    Ok(())
}
