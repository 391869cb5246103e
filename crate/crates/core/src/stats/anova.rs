//! Partial F tests of individual predictors.

use serde::{Deserialize, Serialize};

use super::ols::{f_upper_p, ols_fit, Design, RegressionResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedFTest {
    pub f: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

/// F test of a full model against a nested reduced model fitted on the same data.
pub fn nested_f_test(full: &RegressionResult, reduced: &RegressionResult) -> Result<NestedFTest> {
    let p_full = full.names.len();
    let p_red = reduced.names.len();
    if full.n != reduced.n || p_red >= p_full {
        return Err(Error::Dimension(
            "reduced model must be nested in the full model".into(),
        ));
    }
    let df_num = p_full - p_red;
    let df_den = full.df_resid;
    let f = ((reduced.rss - full.rss) / df_num as f64) / (full.rss / df_den as f64);
    Ok(NestedFTest {
        f,
        df_num,
        df_den,
        p_value: f_upper_p(f, df_num as f64, df_den as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub name: String,
    pub f: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// Drop-one F test for each predictor, sorted by decreasing F.
///
/// Each statistic compares the full model to the model without that predictor,
/// so the result does not depend on column order.
pub fn anova_f_importance(
    y: &[f64],
    design: &Design,
    alpha: f64,
) -> Result<Vec<FeatureImportance>> {
    let full = ols_fit(y, design)?;
    let first = usize::from(design.has_intercept());
    let mut out = Vec::new();
    for j in first..design.p() {
        let reduced = ols_fit(y, &design.without(&[j]))?;
        let test = nested_f_test(&full, &reduced)?;
        out.push(FeatureImportance {
            name: design.names()[j].clone(),
            f: test.f,
            p_value: test.p_value,
            significant: test.p_value < alpha,
        });
    }
    out.sort_by(|a, b| b.f.total_cmp(&a.f).then_with(|| a.name.cmp(&b.name)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_predictor_f_is_t_squared() {
        let x = vec![0.1, 1.3, 2.2, 2.9, 4.4, 5.1, 6.3, 6.8];
        let y = vec![1.0, 1.9, 3.5, 3.1, 5.2, 5.0, 7.4, 6.6];
        let d = Design::new(vec!["x".into()], &[x], true).unwrap();
        let fit = ols_fit(&y, &d).unwrap();
        let imp = anova_f_importance(&y, &d, 0.05).unwrap();
        assert!((imp[0].f - fit.t_values[1].powi(2)).abs() < 1e-8);
        // dropping every predictor reproduces the overall F
        let reduced = ols_fit(&y, &Design::intercept_only(8)).unwrap();
        let t = nested_f_test(&fit, &reduced).unwrap();
        assert!((t.f - fit.f_statistic.unwrap()).abs() < 1e-8);
    }
}
