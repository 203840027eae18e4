//! Bounding sets for a treatment effect under omitted-variable bias.
//!
//! The bias `nu` of the intermediate-regression coefficient solves a cubic whose
//! coefficients depend on seven regression statistics and on two unknowns, the
//! proportional-selection ratio `delta` and the long-regression R-squared
//! `R_max`. Sweeping a box of `(delta, R_max)` values and picking a root at every
//! point gives an empirical distribution of the bias-adjusted effect.
//!
//! ```
//! use ovbound::{grid, bate, BoundedBox, RegressionSummary};
//!
//! let s = RegressionSummary::new(0.044, 0.045, 0.017, 0.256, 0.9808, 21.46, 19.02)?;
//! let bx = BoundedBox::new(0.01, 0.99, s.r2_int, 0.61, 0.02)?;
//! let field = grid::run(&s, &bx)?;
//! let dist = bate::distribution(&field, &s)?;
//! println!("{:?}", dist.bounding_set);
//! # Ok::<(), ovbound::Error>(())
//! ```

pub mod bate;
pub mod cli;
pub mod cubic;
pub mod delta_star;
mod error;
pub mod grid;
pub mod identified_sets;
pub mod model_inputs;

pub use bate::{BateDistribution, Interval};
pub use cubic::{CubicCoefficients, RootKind, RootSet};
pub use delta_star::{DeltaStarProfile, Slope};
pub use error::{Error, Result};
pub use grid::{BiasField, BoundedBox, CaseUsed, GridCell, Region};
pub use identified_sets::IdentifiedSets;
pub use model_inputs::{simulate_dgp, summarize, Dataset, DgpSpec, DgpTruth, RegressionSummary};

/// Machine-file number format: 17 significant digits, round-trips exactly.
pub fn fmt_machine(v: f64) -> String {
    format!("{v:.16e}")
}

/// Human table format: three decimals.
pub fn fmt_human(v: f64) -> String {
    format!("{v:.3}")
}
