//! Regression inputs: data ingestion, OLS, the regression summary, and a
//! synthetic data generator satisfying the orthogonality conditions.

mod dataset;
mod dgp;
mod ols;
mod summary;

pub use dataset::Dataset;
pub use dgp::{simulate_dgp, DgpSpec, DgpTruth};
pub use ols::{fit_ols, OlsFit};
pub use summary::{summarize, RegressionSummary};
