//! Synthetic data from the long model `Y = beta X + W1 + W2 + eps`.
//!
//! Controls are mutually independent normals and the confounder `W2` is
//! independent of every control, so the population quantities that the bias
//! cubic is built from are available in closed form. The treatment is
//! `X = alpha1 W1 + delta1 W2 + W3 + u` with `W1 = sum_j psi_j w_j` and an
//! optional index `W3 = sum_j kappa_j w_j` uncorrelated with `W1`, which makes
//! `alpha1` and `delta1` the projection coefficients of `X` on `W1` and `W2`.
//!
//! With `W3` absent the outcome and the treatment load on the controls through
//! the same index. The population cubic then has the root
//! `-(beta_short - beta_int) sigma2_x / (sigma2_x - tau_x)` at every
//! `(delta, R_max)`, so a nonzero `kappa` is needed for designs where the
//! bounding set should recover `beta`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::summary::RegressionSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub n: usize,
    pub beta_true: f64,
    /// Outcome loadings of the observed controls.
    pub psi: Vec<f64>,
    pub control_variances: Vec<f64>,
    pub confounder_variance: f64,
    /// Projection coefficient of treatment on the observable index.
    pub alpha1: f64,
    /// Projection coefficient of treatment on the confounder.
    pub delta1: f64,
    /// Variance of the outcome error.
    pub noise_variance: f64,
    /// Variance of the treatment's idiosyncratic component.
    #[serde(default = "one")]
    pub treatment_noise_variance: f64,
    /// Treatment loadings `kappa` of an index uncorrelated with `W1`; empty means none.
    #[serde(default)]
    pub orthogonal_loadings: Vec<f64>,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

/// Analytic population values implied by a [`DgpSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpTruth {
    pub beta: f64,
    /// Omitted-variable bias of the intermediate coefficient.
    pub nu: f64,
    pub delta: f64,
    pub rmax: f64,
    /// Probability limits of every statistic in the regression summary.
    pub population_summary: RegressionSummary,
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        let j = self.psi.len();
        if j == 0 {
            return Err(Error::InvalidSpec("at least one control is required".into()));
        }
        if self.control_variances.len() != j {
            return Err(Error::InvalidSpec(format!(
                "{} control variances for {} loadings",
                self.control_variances.len(),
                j
            )));
        }
        if self.n < j + 3 {
            return Err(Error::InvalidSpec(format!("n = {} is below J + 3 = {}", self.n, j + 3)));
        }
        let positive = self
            .control_variances
            .iter()
            .chain([&self.confounder_variance, &self.noise_variance, &self.treatment_noise_variance])
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive {
            return Err(Error::InvalidSpec("all variances must be positive and finite".into()));
        }
        if !(self.alpha1.is_finite() && self.alpha1 != 0.0) {
            return Err(Error::InvalidSpec("alpha1 must be finite and nonzero".into()));
        }
        if !(self.delta1.is_finite() && self.beta_true.is_finite()) {
            return Err(Error::InvalidSpec("delta1 and beta_true must be finite".into()));
        }
        let s1 = self.observable_index_variance();
        if s1 <= 0.0 {
            return Err(Error::InvalidSpec("observable index W1 has zero variance (all psi are 0)".into()));
        }
        let k = &self.orthogonal_loadings;
        if !k.is_empty() {
            if k.len() != j {
                return Err(Error::InvalidSpec(format!("{} orthogonal loadings for {} controls", k.len(), j)));
            }
            if !k.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidSpec("orthogonal loadings must be finite".into()));
            }
            let cov: f64 = k.iter().zip(&self.psi).zip(&self.control_variances).map(|((k, p), w)| k * p * w).sum();
            if cov.abs() > 1e-12 * (s1 * self.orthogonal_index_variance()).sqrt().max(1.0) {
                return Err(Error::InvalidSpec(format!("W3 must be uncorrelated with W1 (covariance {cov})")));
            }
        }
        Ok(())
    }

    fn observable_index_variance(&self) -> f64 {
        self.psi.iter().zip(&self.control_variances).map(|(p, w)| p * p * w).sum()
    }

    fn orthogonal_index_variance(&self) -> f64 {
        self.orthogonal_loadings.iter().zip(&self.control_variances).map(|(k, w)| k * k * w).sum()
    }

    /// Population values, computed without drawing any data.
    pub fn truth(&self) -> Result<DgpTruth> {
        self.validate()?;
        let beta = self.beta_true;
        let s1 = self.observable_index_variance();
        let s2 = self.confounder_variance;
        let s1x = self.alpha1 * s1;
        let s2x = self.delta1 * s2;
        let tau = self.delta1 * self.delta1 * s2 + self.treatment_noise_variance;
        let sx = self.alpha1 * self.alpha1 * s1 + self.orthogonal_index_variance() + tau;
        let nu = s2x / tau;
        let sy = beta * beta * sx + s1 + s2 + self.noise_variance + 2.0 * beta * (s1x + s2x);

        let beta_short = beta + (s1x + s2x) / sx;
        let beta_int = beta + nu;
        let r2_short = beta_short * beta_short * sx / sy;
        let r2_int = (beta * beta * sx + s1 + nu * nu * tau + 2.0 * beta * nu * tau + 2.0 * beta * s1x) / sy;
        let rmax = (sy - self.noise_variance) / sy;

        Ok(DgpTruth {
            beta,
            nu,
            delta: self.delta1 / self.alpha1,
            rmax,
            population_summary: RegressionSummary {
                beta_short,
                r2_short,
                beta_int,
                r2_int,
                sigma2_y: sy,
                sigma2_x: sx,
                tau_x: tau,
                n: None,
                se_short: None,
                se_int: None,
            },
        })
    }
}

/// Draw a dataset from the long model. Deterministic in `spec.seed`.
pub fn simulate_dgp(spec: &DgpSpec) -> Result<(Dataset, DgpTruth)> {
    let truth = spec.truth()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let j = spec.psi.len();
    let sd_w: Vec<f64> = spec.control_variances.iter().map(|v| v.sqrt()).collect();
    let sd_2 = spec.confounder_variance.sqrt();
    let sd_u = spec.treatment_noise_variance.sqrt();
    let sd_e = spec.noise_variance.sqrt();

    let mut y = Vec::with_capacity(spec.n);
    let mut x = Vec::with_capacity(spec.n);
    let mut w = vec![Vec::with_capacity(spec.n); j];
    for _ in 0..spec.n {
        let (mut w1, mut w3) = (0.0, 0.0);
        for k in 0..j {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = sd_w[k] * z;
            w[k].push(v);
            w1 += spec.psi[k] * v;
            w3 += spec.orthogonal_loadings.get(k).copied().unwrap_or(0.0) * v;
        }
        let z2: f64 = StandardNormal.sample(&mut rng);
        let zu: f64 = StandardNormal.sample(&mut rng);
        let ze: f64 = StandardNormal.sample(&mut rng);
        let w2 = sd_2 * z2;
        let xi = spec.alpha1 * w1 + spec.delta1 * w2 + w3 + sd_u * zu;
        y.push(spec.beta_true * xi + w1 + w2 + sd_e * ze);
        x.push(xi);
    }
    let data = Dataset::new(y, x, w)?;
    Ok((data, truth))
}
