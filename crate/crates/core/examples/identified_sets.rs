//! Both equal-selection identified sets for the calibrated models.

use ovbound::identified_sets::identified_sets;
use ovbound::RegressionSummary;

fn main() -> ovbound::Result<()> {
    let models = [
        (
            "IQ, Breastfeed",
            0.61,
            RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808345735, 21.4647083, 19.01738119)?,
        ),
        (
            "IQ, Drink Preg",
            0.61,
            RegressionSummary::new(0.176, 0.008, 0.050, 0.249, 0.9143271194, 0.206959541, 0.2004183631)?,
        ),
        (
            "BW, Smoke Preg",
            0.53,
            RegressionSummary::new(-183.115, 0.319, -172.51, 0.352, 419705.3304, 0.206144692, 0.1883025866)?,
        ),
    ];
    for (label, rmax, s) in models {
        let id = identified_sets(&s, rmax)?;
        let set2 = id.set2.map_or("-".to_string(), |i| i.to_string());
        println!("{label:<16} D = {:<14.4} set 1 = {:<20} set 2 = {set2}", id.discriminant_d, id.set1.to_string());
        if id.conclusions_differ {
            println!("{:<16} the two sets disagree on whether zero is excluded", "");
        }
    }
    Ok(())
}
