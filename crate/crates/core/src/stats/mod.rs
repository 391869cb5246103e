//! Statistics for the settlement-level analysis.

mod anova;
mod marginal;
mod mwu;
mod ols;
mod rank;
mod report;
mod standardize;
mod suite;
mod vif;

pub use anova::{anova_f_importance, nested_f_test, FeatureImportance, NestedFTest};
pub use marginal::{grid, marginal_effects, MarginalPoint};
pub use mwu::{
    exact_p_value, exact_u_counts, mann_whitney_u, normal_p_value, simulated_power, MwuMethod,
    MwuResult, EXACT_MAX_N,
};
pub use ols::{f_upper_p, ols_fit, t_two_sided_p, Design, RegressionResult, INTERCEPT};
pub use rank::{midranks, pearson, spearman_rho, tie_groups};
pub use report::{render_suite, render_table, stars};
pub use standardize::{standardize, ColumnScale};
pub use suite::{
    model_suite, outcome, Dependent, DependentSuite, ModelFit, ModelSpec, SettlementRow,
    StandardizedPredictors, SuiteOptions, CONTROL_NAMES, DIVERSITY, FRAGMENTATION,
};
pub use vif::{vif, VifReport, VIF_WARN};
