//! Run configuration: a flat TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use socrisk::community::CrossingEdges;
use socrisk::diversity::Averaging;
use socrisk::procurement::{MarketGranularity, MissingMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub edges: Option<PathBuf>,
    pub attribution: Option<PathBuf>,
    pub contracts: Option<PathBuf>,
    pub controls: Option<PathBuf>,
    pub groups: Option<PathBuf>,
    pub out: PathBuf,
    /// Whether input tables start with a header row.
    pub has_headers: bool,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub missing_mode: MissingMode,
    pub standardize_dv: bool,

    /// Users with more connections than this are dropped.
    pub max_degree: usize,
    /// Settlement ids that mark accounts located abroad.
    pub foreign_settlements: Vec<String>,
    /// Largest tolerated share of malformed input rows.
    pub max_error_rate: f64,

    pub min_contracts_per_year: f64,
    pub years: u32,
    pub excluded_settlements: Vec<String>,
    /// CPV prefix length defining a market; unset means the exact code.
    pub cpv_prefix: Option<usize>,

    pub crossing_edges: CrossingEdges,
    pub averaging: Averaging,

    pub alpha: f64,
    pub marginal_level: f64,
    pub marginal_points: usize,
    pub histogram_bins: usize,
    /// Difference in group means assumed by the power simulation.
    pub power_shift: f64,
    pub power_sims: usize,

    pub synth_towns: usize,
    pub synth_low_activity_towns: usize,
    pub synth_beta_fragmentation: f64,
    pub synth_beta_diversity: f64,
    pub synth_noise_sd: f64,
    /// Full generator parameters; when set the other `synth_` keys are ignored.
    pub synth_spec: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            edges: None,
            attribution: None,
            contracts: None,
            controls: None,
            groups: None,
            out: PathBuf::from("out"),
            has_headers: true,
            seed: 1,
            threads: 0,
            missing_mode: MissingMode::Impute0,
            standardize_dv: false,
            max_degree: 10_000,
            foreign_settlements: Vec::new(),
            max_error_rate: 0.01,
            min_contracts_per_year: 5.0,
            years: 9,
            excluded_settlements: Vec::new(),
            cpv_prefix: None,
            crossing_edges: CrossingEdges::BothGroups,
            averaging: Averaging::IncludedOnly,
            alpha: 0.05,
            marginal_level: 0.9,
            marginal_points: 41,
            histogram_bins: 20,
            power_shift: 0.06,
            power_sims: 1000,
            synth_towns: 150,
            synth_low_activity_towns: 10,
            synth_beta_fragmentation: 0.25,
            synth_beta_diversity: -0.55,
            synth_noise_sd: 0.5,
            synth_spec: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file; relative paths in it are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.edges,
            &mut cfg.attribution,
            &mut cfg.contracts,
            &mut cfg.controls,
            &mut cfg.groups,
            &mut cfg.synth_spec,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn granularity(&self) -> MarketGranularity {
        self.cpv_prefix
            .map_or(MarketGranularity::ExactCode, MarketGranularity::Prefix)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_degree == 0 {
            bail!("max_degree must be positive");
        }
        if self.min_contracts_per_year.is_nan()
            || self.min_contracts_per_year <= 0.0
            || self.years == 0
        {
            bail!("min_contracts_per_year and years must be positive");
        }
        if !(0.0..1.0).contains(&self.max_error_rate) {
            bail!("max_error_rate must lie in [0, 1)");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0)
            || !(self.marginal_level > 0.0 && self.marginal_level < 1.0)
        {
            bail!("alpha and marginal_level must lie in (0, 1)");
        }
        if self.histogram_bins == 0 || self.marginal_points == 0 || self.power_sims == 0 {
            bail!("histogram_bins, marginal_points and power_sims must be positive");
        }
        Ok(())
    }

    /// Path of a required input, checked to exist.
    pub fn input(&self, path: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
        let Some(p) = path else {
            bail!("input `{key}` is not configured");
        };
        if !p.exists() {
            bail!("input `{key}` not found: {}", p.display());
        }
        Ok(p.clone())
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig {
            foreign_settlements: vec!["abroad".into()],
            cpv_prefix: Some(2),
            ..Default::default()
        };
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
        let cfg: RunConfig = toml::from_str("seed = 3\nmissing_mode = \"strict\"").unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.missing_mode, MissingMode::Strict);
    }
}
