//! Variance inflation factors.

use serde::{Deserialize, Serialize};

use super::ols::{dependent_columns, ols_fit, Design};
use crate::error::{Error, Result};

/// Values at or above this are conventionally read as problematic collinearity.
pub const VIF_WARN: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifReport {
    pub names: Vec<String>,
    /// `f64::INFINITY` for a predictor that is an exact combination of others.
    pub values: Vec<f64>,
}

impl VifReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.values[j])
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// R² of `y` on `columns` plus an intercept. Exactly dependent regressors are
/// dropped first since they leave the fitted space unchanged.
pub(crate) fn auxiliary_r_squared(
    y: &[f64],
    names: &[String],
    columns: &[Vec<f64>],
) -> Result<f64> {
    let mut names = names.to_vec();
    let mut columns = columns.to_vec();
    loop {
        let design = Design::new(names.clone(), &columns, true)?;
        let dependent = dependent_columns(design.matrix());
        if dependent.is_empty() {
            return Ok(ols_fit(y, &design)?.r_squared);
        }
        // column 0 is the intercept; drop the first dependent predictor and retry
        let j = dependent[0];
        if j == 0 {
            return Err(Error::RankDeficient(vec![super::ols::INTERCEPT.to_owned()]));
        }
        names.remove(j - 1);
        columns.remove(j - 1);
    }
}

/// VIF of each predictor: `1 / (1 - R²_j)` from regressing it on the others.
pub fn vif(names: &[String], columns: &[Vec<f64>]) -> Result<VifReport> {
    if columns.len() < 2 {
        return Err(Error::InvalidParameter(
            "VIF needs at least two predictors".into(),
        ));
    }
    let mut values = Vec::with_capacity(columns.len());
    for j in 0..columns.len() {
        let others: Vec<Vec<f64>> = columns
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, c)| c.clone())
            .collect();
        let other_names: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, c)| c.clone())
            .collect();
        let r2 = auxiliary_r_squared(&columns[j], &other_names, &others)?;
        values.push(if 1.0 - r2 <= 1e-12 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - r2)
        });
    }
    Ok(VifReport {
        names: names.to_vec(),
        values,
    })
}
