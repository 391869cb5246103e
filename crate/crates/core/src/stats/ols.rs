//! Ordinary least squares with classical inference.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "const";

/// Relative size of a QR pivot below which a column counts as dependent.
const RANK_TOL: f64 = 1e-9;

/// Named design matrix, optionally with a leading column of ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    x: DMatrix<f64>,
    intercept: bool,
}

impl Design {
    /// `columns` are predictors (without intercept), each of length n.
    pub fn new(names: Vec<String>, columns: &[Vec<f64>], intercept: bool) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Dimension(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::Dimension(format!(
                "column `{}` has {} rows, expected {n}",
                names[bad],
                columns[bad].len()
            )));
        }
        let offset = usize::from(intercept);
        let p = columns.len() + offset;
        let x = DMatrix::from_fn(n, p, |i, j| {
            if intercept && j == 0 {
                1.0
            } else {
                columns[j - offset][i]
            }
        });
        let mut all = Vec::with_capacity(p);
        if intercept {
            all.push(INTERCEPT.to_owned());
        }
        all.extend(names);
        Ok(Self {
            names: all,
            x,
            intercept,
        })
    }

    /// An intercept-only design with `n` rows.
    pub fn intercept_only(n: usize) -> Self {
        Self {
            names: vec![INTERCEPT.to_owned()],
            x: DMatrix::from_element(n, 1, 1.0),
            intercept: true,
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of columns including the intercept.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Predictor names, intercept excluded.
    pub fn predictors(&self) -> &[String] {
        &self.names[usize::from(self.intercept)..]
    }

    /// Copy without the listed columns.
    pub fn without(&self, drop: &[usize]) -> Design {
        let keep: Vec<usize> = (0..self.p()).filter(|j| !drop.contains(j)).collect();
        let x = self.x.select_columns(keep.iter());
        let names = keep.iter().map(|&j| self.names[j].clone()).collect();
        let intercept = self.intercept && keep.first() == Some(&0);
        Design {
            names,
            x,
            intercept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n: usize,
    pub df_resid: usize,
    pub intercept: bool,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Overall F test of all predictors; `None` for an intercept-only model.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub rss: f64,
    pub tss: f64,
    pub sigma2: f64,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Row-major coefficient covariance matrix.
    pub covariance: Vec<Vec<f64>>,
}

impl RegressionResult {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.coefficients[j])
    }

    pub fn n_predictors(&self) -> usize {
        self.names.len() - usize::from(self.intercept)
    }

    /// Two-sided confidence interval from the t distribution.
    pub fn conf_int(&self, name: &str, level: f64) -> Option<(f64, f64)> {
        let j = self.index_of(name)?;
        let t = StudentsT::new(0.0, 1.0, self.df_resid as f64).ok()?;
        let q = t.inverse_cdf(0.5 + level / 2.0);
        let b = self.coefficients[j];
        Some((b - q * self.std_errors[j], b + q * self.std_errors[j]))
    }
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Upper-tail p-value of an F statistic.
pub fn f_upper_p(f: f64, df1: f64, df2: f64) -> f64 {
    if f.is_nan() {
        return f64::NAN;
    }
    if f.is_infinite() {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(df1, df2)
        .expect("positive degrees of freedom")
        .sf(f)
}

/// Indices of columns that are (numerically) linear combinations of earlier
/// columns, from the diagonal of an unpivoted QR factor.
pub(crate) fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let r = x.clone().qr().r();
    (0..x.ncols())
        .filter(|&j| {
            let norm = x.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm
        })
        .collect()
}

/// Fits `y` on the design by Householder QR.
///
/// Standard errors are the classical homoskedastic ones. Adjusted R² uses
/// `1 - (1 - R²)(n - 1)/(n - p - 1)` with `p` predictors besides the intercept.
pub fn ols_fit(y: &[f64], design: &Design) -> Result<RegressionResult> {
    let n = design.n();
    let p = design.p();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::TooFewObservations { n, p });
    }
    let dependent = dependent_columns(design.matrix());
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(
            dependent.iter().map(|&j| design.names[j].clone()).collect(),
        ));
    }

    let x = design.matrix();
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(design.names.clone()))?;
    let fitted = x * &beta;
    let resid = &yv - &fitted;
    let rss = resid.norm_squared();
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::RankDeficient(design.names.clone()))?;
    let cov = (&r_inv * r_inv.transpose()) * sigma2;

    let tss = if design.intercept {
        let mean = yv.mean();
        yv.iter().map(|v| (v - mean).powi(2)).sum()
    } else {
        yv.norm_squared()
    };
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let k = p - usize::from(design.intercept);
    let denom_df = if design.intercept { n - 1 } else { n };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * denom_df as f64 / df_resid as f64;
    let (f_statistic, f_p_value) = if k == 0 {
        (None, None)
    } else {
        let f = ((tss - rss) / k as f64) / sigma2;
        let f = if sigma2 == 0.0 { f64::INFINITY } else { f };
        (Some(f), Some(f_upper_p(f, k as f64, df_resid as f64)))
    };

    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let std_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let t_values: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| match (se == 0.0, b == 0.0) {
            (true, true) => 0.0,
            (true, false) => b.signum() * f64::INFINITY,
            _ => b / se,
        })
        .collect();
    let p_values = t_values
        .iter()
        .map(|&t| t_two_sided_p(t, df_resid as f64))
        .collect();

    Ok(RegressionResult {
        names: design.names.clone(),
        coefficients,
        std_errors,
        t_values,
        p_values,
        n,
        df_resid,
        intercept: design.intercept,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_p_value,
        rss,
        tss,
        sigma2,
        residuals: resid.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        covariance: (0..p)
            .map(|i| (0..p).map(|j| cov[(i, j)]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_line() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let d = Design::new(vec!["x".into()], &[x], true).unwrap();
        let fit = ols_fit(&y, &d).unwrap();
        assert!((fit.coefficient("x").unwrap() - 2.0).abs() < 1e-10);
        assert!(fit.coefficient(INTERCEPT).unwrap().abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_names_columns() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let b: Vec<f64> = a.iter().map(|v| 3.0 * v).collect();
        let c = vec![0.3, -1.0, 2.0, 0.1, 0.7];
        let d = Design::new(vec!["a".into(), "b".into(), "c".into()], &[a, b, c], true).unwrap();
        let err = ols_fit(&[1.0, 2.0, 0.0, 1.0, 3.0], &d).unwrap_err();
        assert_eq!(err, Error::RankDeficient(vec!["b".into()]));
    }

    #[test]
    fn too_few_rows() {
        let d = Design::new(vec!["a".into()], &[vec![1.0, 2.0]], true).unwrap();
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &d),
            Err(Error::TooFewObservations { n: 2, p: 2 })
        ));
    }

    #[test]
    fn reference_p_values() {
        // reference values computed with scipy.stats
        assert!((t_two_sided_p(2.228_138_851_964_938_5, 10.0) - 0.05).abs() < 1e-10);
        assert!((t_two_sided_p(1.0, 3.0) - 0.391_002_218_955_770_53).abs() < 1e-10);
        assert!((f_upper_p(4.964_602_743_730_714_5, 1.0, 10.0) - 0.05).abs() < 1e-10);
        assert!((f_upper_p(2.5, 3.0, 20.0) - 0.088_843_751_937_689_2).abs() < 1e-10);
    }

    #[test]
    fn intercept_only_model() {
        let y = [1.0, 2.0, 3.0, 6.0];
        let fit = ols_fit(&y, &Design::intercept_only(4)).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert_eq!(fit.f_statistic, None);
        assert!(fit.r_squared.abs() < 1e-15);
    }
}
