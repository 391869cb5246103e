use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and sample standard deviation used to standardize one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub mean: f64,
    pub sd: f64,
}

impl ColumnScale {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n < 2 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        (sd > 0.0 && sd.is_finite()).then_some(Self { mean, sd })
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.sd
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.sd + self.mean
    }
}

/// Standardizes each named column to mean 0 and sample standard deviation 1.
pub fn standardize(columns: &[(String, Vec<f64>)]) -> Result<(Vec<Vec<f64>>, Vec<ColumnScale>)> {
    let mut out = Vec::with_capacity(columns.len());
    let mut scales = Vec::with_capacity(columns.len());
    for (name, values) in columns {
        let scale = ColumnScale::of(values).ok_or_else(|| Error::ZeroVariance(name.clone()))?;
        out.push(values.iter().map(|&v| scale.apply(v)).collect());
        scales.push(scale);
    }
    Ok((out, scales))
}
