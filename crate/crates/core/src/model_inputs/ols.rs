use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative size of a column's component orthogonal to the preceding columns
/// below which the design is treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// 1 - SSR/SST with SST centered on the mean of y.
    pub r_squared: f64,
    /// SSR / N.
    pub residual_variance: f64,
    /// Classical (homoskedastic) standard errors, SSR/(N-k) scaling. Reporting only.
    pub std_errors: Vec<f64>,
}

/// Least squares of `y` on the columns of `design` (intercept column supplied by the caller).
pub fn fit_ols(y: &[f64], design: &DMatrix<f64>) -> Result<OlsFit> {
    let names: Vec<String> = (0..design.ncols()).map(|k| format!("column {k}")).collect();
    fit_ols_named(y, design, &names)
}

pub(crate) fn fit_ols_named(y: &[f64], design: &DMatrix<f64>, names: &[String]) -> Result<OlsFit> {
    let n = design.nrows();
    let k = design.ncols();
    if y.len() != n {
        return Err(Error::InvalidData(format!("y has {} rows, design has {n}", y.len())));
    }
    if n <= k {
        return Err(Error::InsufficientData { rows: n, required: k + 1 });
    }

    let col_norms: Vec<f64> = (0..k).map(|j| design.column(j).norm()).collect();
    let qr = design.clone().qr();
    let r = qr.r();
    let dependent: Vec<String> = (0..k)
        .filter(|&j| r[(j, j)].abs() <= RANK_TOLERANCE * col_norms[j].max(f64::MIN_POSITIVE))
        .map(|j| names.get(j).cloned().unwrap_or_else(|| format!("column {j}")))
        .collect();
    if !dependent.is_empty() {
        return Err(Error::SingularDesign { columns: dependent });
    }

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let beta = r.solve_upper_triangular(&rhs).ok_or_else(|| Error::SingularDesign { columns: names.to_vec() })?;

    let fitted = design * &beta;
    let ssr: f64 = y.iter().zip(fitted.iter()).map(|(yi, fi)| (yi - fi).powi(2)).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|yi| (yi - mean).powi(2)).sum();
    if sst <= 0.0 {
        return Err(Error::InvalidData("response has zero variance".into()));
    }

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign { columns: names.to_vec() })?;
    let s2 = ssr / (n - k) as f64;
    let std_errors = (0..k).map(|i| (s2 * r_inv.row(i).iter().map(|v| v * v).sum::<f64>()).sqrt()).collect();

    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        r_squared: (1.0 - ssr / sst).max(0.0),
        residual_variance: ssr / n as f64,
        std_errors,
    })
}

/// Build `[1, columns...]` as an N x (1 + m) design matrix.
pub(crate) fn design_with_intercept(columns: &[&[f64]]) -> DMatrix<f64> {
    let n = columns.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, columns.len() + 1, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] })
}

/// Variance with divisor N.
pub(crate) fn population_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_data() {
        let x = [0.0, 1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = fit_ols(&y, &design_with_intercept(&[&x])).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.residual_variance < 1e-24);
    }

    #[test]
    fn six_point_normal_equations() {
        let x = [1.0, 2.0, 4.0, 5.0, 7.0, 8.0];
        let y = [2.0, 3.0, 3.0, 6.0, 8.0, 7.0];
        // (X'X) = [[6, 27], [27, 159]], X'y = [29, 162]; det = 954 - 729 = 225
        let det = 6.0 * 159.0 - 27.0 * 27.0;
        let b0 = (159.0 * 29.0 - 27.0 * 162.0) / det;
        let b1 = (-27.0 * 29.0 + 6.0 * 162.0) / det;
        let fit = fit_ols(&y, &design_with_intercept(&[&x])).unwrap();
        assert!((fit.coefficients[0] - b0).abs() < 1e-12, "{:?}", fit.coefficients);
        assert!((fit.coefficients[1] - b1).abs() < 1e-12);
        assert!((b0 - 237.0 / 225.0).abs() < 1e-15 && (b1 - 0.84).abs() < 1e-15);
    }

    #[test]
    fn duplicated_column_is_reported() {
        let a = [1.0, 2.0, 3.0, 4.0, 6.0, 5.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let y = [1.0, 0.0, 2.0, 1.0, 3.0, 2.0];
        let names = vec!["const".to_string(), "a".to_string(), "b".to_string()];
        let err = fit_ols_named(&y, &design_with_intercept(&[&a, &b]), &names).unwrap_err();
        match err {
            Error::SingularDesign { columns } => assert_eq!(columns, vec!["b".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let x = [1.0, 2.0];
        let err = fit_ols(&[1.0, 2.0], &design_with_intercept(&[&x])).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
    }

    #[test]
    fn independent_noise_has_small_r2() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 20_000;
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let fit = fit_ols(&y, &design_with_intercept(&[&x])).unwrap();
        assert!(fit.r_squared < 3.0 / (n as f64).sqrt());
    }
}
