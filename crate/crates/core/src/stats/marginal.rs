//! Predicted outcome along one feature with the others held at zero.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ols::RegressionResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalPoint {
    pub x: f64,
    pub prediction: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Prediction `b0 + x * b_feature` over `grid` with a pointwise normal band
/// at confidence `level`. Other features sit at 0, their mean once standardized.
pub fn marginal_effects(
    fit: &RegressionResult,
    feature: &str,
    grid: &[f64],
    level: f64,
) -> Result<Vec<MarginalPoint>> {
    let j = fit
        .index_of(feature)
        .filter(|&j| !(fit.intercept && j == 0))
        .ok_or_else(|| Error::UnknownFeature(feature.to_owned()))?;
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidParameter(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0);
    let cov = &fit.covariance;
    let (b0, v00, v0j) = if fit.intercept {
        (fit.coefficients[0], cov[0][0], cov[0][j])
    } else {
        (0.0, 0.0, 0.0)
    };
    let bj = fit.coefficients[j];
    let vjj = cov[j][j];
    Ok(grid
        .iter()
        .map(|&x| {
            let prediction = b0 + x * bj;
            let se = (v00 + 2.0 * x * v0j + x * x * vjj).max(0.0).sqrt();
            MarginalPoint {
                x,
                prediction,
                se,
                lower: prediction - z * se,
                upper: prediction + z * se,
            }
        })
        .collect())
}

/// Evenly spaced grid from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
