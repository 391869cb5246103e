//! The settlement-level model battery: controls only, each network measure
//! alone, and both together, for each corruption-risk outcome.

use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, Design, RegressionResult};
use super::standardize::{standardize, ColumnScale};
use crate::error::{Error, Result};
use crate::graph::SettlementId;

pub const FRAGMENTATION: &str = "fragmentation";
pub const DIVERSITY: &str = "diversity";

pub const CONTROL_NAMES: [&str; 11] = [
    "income_per_capita",
    "log_n_contracts",
    "log_population",
    "iwiw_use_rate",
    "mayor_victory_margin",
    "pct_hs_grads",
    "distance_to_capital_minutes",
    "share_inactive",
    "unemployment_rate",
    "share_over_60",
    "has_university",
];

/// One settlement after joining risk scores, network measures and controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementRow {
    pub settlement_id: SettlementId,
    pub mean_csb: f64,
    pub mean_cri: f64,
    pub fragmentation: f64,
    pub diversity: f64,
    /// In the order of [`CONTROL_NAMES`].
    pub controls: [f64; 11],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependent {
    MeanCsb,
    MeanCri,
}

impl Dependent {
    pub const ALL: [Dependent; 2] = [Dependent::MeanCsb, Dependent::MeanCri];

    pub fn name(self) -> &'static str {
        match self {
            Dependent::MeanCsb => "mean_csb",
            Dependent::MeanCri => "mean_cri",
        }
    }

    pub fn value(self, row: &SettlementRow) -> f64 {
        match self {
            Dependent::MeanCsb => row.mean_csb,
            Dependent::MeanCri => row.mean_cri,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Base,
    WithFragmentation,
    WithDiversity,
    Full,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 4] = [
        ModelSpec::Base,
        ModelSpec::WithFragmentation,
        ModelSpec::WithDiversity,
        ModelSpec::Full,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelSpec::Base => "controls",
            ModelSpec::WithFragmentation => "+F",
            ModelSpec::WithDiversity => "+D",
            ModelSpec::Full => "+F+D",
        }
    }

    pub fn network_features(self) -> &'static [&'static str] {
        match self {
            ModelSpec::Base => &[],
            ModelSpec::WithFragmentation => &[FRAGMENTATION],
            ModelSpec::WithDiversity => &[DIVERSITY],
            ModelSpec::Full => &[FRAGMENTATION, DIVERSITY],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Also standardize the outcome; by default only predictors are.
    pub standardize_dv: bool,
}

/// All predictors of the full model, standardized across `rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedPredictors {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub scales: Vec<ColumnScale>,
}

impl StandardizedPredictors {
    pub fn from_rows(rows: &[SettlementRow]) -> Result<Self> {
        let mut raw: Vec<(String, Vec<f64>)> = vec![
            (
                FRAGMENTATION.into(),
                rows.iter().map(|r| r.fragmentation).collect(),
            ),
            (DIVERSITY.into(), rows.iter().map(|r| r.diversity).collect()),
        ];
        for (k, name) in CONTROL_NAMES.iter().enumerate() {
            raw.push(((*name).into(), rows.iter().map(|r| r.controls[k]).collect()));
        }
        let (columns, scales) = standardize(&raw)?;
        Ok(Self {
            names: raw.into_iter().map(|(n, _)| n).collect(),
            columns,
            scales,
        })
    }

    /// Design for one model: listed network features first, then the controls.
    pub fn design(&self, spec: ModelSpec) -> Result<Design> {
        let mut names = Vec::new();
        let mut cols = Vec::new();
        let wanted = spec.network_features().iter().chain(CONTROL_NAMES.iter());
        for name in wanted {
            let j = self
                .names
                .iter()
                .position(|n| n == name)
                .expect("known predictor");
            names.push(self.names[j].clone());
            cols.push(self.columns[j].clone());
        }
        Design::new(names, &cols, true)
    }

    pub fn controls_only(&self) -> (Vec<String>, Vec<Vec<f64>>) {
        (self.names[2..].to_vec(), self.columns[2..].to_vec())
    }
}

/// Outcome vector, standardized if requested.
pub fn outcome(rows: &[SettlementRow], dv: Dependent, opts: &SuiteOptions) -> Result<Vec<f64>> {
    let y: Vec<f64> = rows.iter().map(|r| dv.value(r)).collect();
    if opts.standardize_dv {
        let (z, _) = standardize(&[(dv.name().to_owned(), y)])?;
        Ok(z.into_iter().next().expect("one column"))
    } else {
        Ok(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub spec: ModelSpec,
    pub result: RegressionResult,
    /// Adjusted R² minus that of the controls-only model.
    pub adj_r_squared_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependentSuite {
    pub dependent: Dependent,
    pub fits: Vec<ModelFit>,
}

impl DependentSuite {
    pub fn fit(&self, spec: ModelSpec) -> &RegressionResult {
        &self
            .fits
            .iter()
            .find(|f| f.spec == spec)
            .expect("all specs fitted")
            .result
    }
}

/// Fits the four models for each outcome.
pub fn model_suite(rows: &[SettlementRow], opts: &SuiteOptions) -> Result<Vec<DependentSuite>> {
    let p_full = 2 + CONTROL_NAMES.len() + 1;
    if rows.len() < p_full + 1 {
        return Err(Error::TooFewObservations {
            n: rows.len(),
            p: p_full,
        });
    }
    let predictors = StandardizedPredictors::from_rows(rows)?;
    let designs: Vec<(ModelSpec, Design)> = ModelSpec::ALL
        .iter()
        .map(|&s| predictors.design(s).map(|d| (s, d)))
        .collect::<Result<_>>()?;
    Dependent::ALL
        .iter()
        .map(|&dv| {
            let y = outcome(rows, dv, opts)?;
            let results: Vec<(ModelSpec, RegressionResult)> = designs
                .iter()
                .map(|(s, d)| ols_fit(&y, d).map(|r| (*s, r)))
                .collect::<Result<_>>()?;
            let base = results[0].1.adj_r_squared;
            Ok(DependentSuite {
                dependent: dv,
                fits: results
                    .into_iter()
                    .map(|(spec, result)| ModelFit {
                        spec,
                        adj_r_squared_delta: result.adj_r_squared - base,
                        result,
                    })
                    .collect(),
            })
        })
        .collect()
}
