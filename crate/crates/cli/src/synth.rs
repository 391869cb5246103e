//! Writes a synthetic country in the input formats the other commands read.

use std::path::PathBuf;

use anyhow::{Context, Result};
use log::info;
use socrisk::synth::{generate_country, CountrySpec, SyntheticCountry};
use socrisk::Exec;

use crate::config::RunConfig;
use crate::regress::{controls_schema, ControlsRecord};
use crate::score::write_contracts;
use crate::table::{num, opt_num, write_table, write_text};

/// Every fifth active town is labelled `listed` in the generated group file.
pub const LISTED_EVERY: usize = 5;

/// Generator parameters from the config; the run seed drives both the
/// generator and the realized measures.
pub fn country_spec(cfg: &RunConfig) -> Result<CountrySpec> {
    let mut spec = match &cfg.synth_spec {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => {
            let mut s = CountrySpec::default();
            s.network.n_towns = cfg.synth_towns;
            s.low_activity_towns = cfg.synth_low_activity_towns;
            s.beta_fragmentation = cfg.synth_beta_fragmentation;
            s.beta_diversity = cfg.synth_beta_diversity;
            s.noise_sd = cfg.synth_noise_sd;
            s
        }
    };
    spec.network.seed = cfg.seed;
    spec.measure_seed = cfg.seed;
    spec.years = cfg.years;
    Ok(spec)
}

pub fn run(cfg: &RunConfig, exec: Exec) -> Result<SyntheticCountry> {
    let spec = country_spec(cfg)?;
    let country = generate_country(&spec, exec).context("generating the synthetic country")?;
    let out = |name: &str| cfg.out_path(name);

    write_table(
        &out("edges.csv"),
        &[("user_a", "string"), ("user_b", "string")],
        country
            .network
            .edges
            .iter()
            .map(|(a, b)| vec![a.to_string(), b.to_string()]),
    )?;
    write_table(
        &out("attribution.csv"),
        &[("user_id", "string"), ("settlement_id", "string")],
        country
            .network
            .attribution
            .iter()
            .map(|(u, s)| vec![u.to_string(), s.to_string()]),
    )?;
    write_contracts(&out("contracts.csv"), &country.contracts)?;
    write_table(
        &out("controls.csv"),
        &controls_schema(),
        country.controls.iter().map(|c| {
            let r = ControlsRecord::from_values(c.settlement_id.to_string(), c.values);
            let mut row = vec![r.settlement_id.clone()];
            row.extend(r.values().iter().map(|&v| num(v)));
            row
        }),
    )?;
    let active: Vec<_> = country.truth.iter().filter(|t| t.active).collect();
    write_table(
        &out("groups.csv"),
        &[("settlement_id", "string"), ("group", "string")],
        active.iter().enumerate().map(|(i, t)| {
            let g = if i % LISTED_EVERY == 0 {
                "listed"
            } else {
                "other"
            };
            vec![t.settlement_id.to_string(), g.to_owned()]
        }),
    )?;
    write_table(
        &out("ground_truth.csv"),
        &[
            ("settlement_id", "string"),
            ("active", "bool"),
            ("n_users", "integer"),
            ("k_blocks", "integer"),
            ("ratio", "float"),
            ("cross_town_rate", "float"),
            ("n_contracts", "integer"),
            ("fragmentation", "float?"),
            ("diversity", "float?"),
            ("diversity_internal", "float?"),
            ("z_fragmentation", "float"),
            ("z_diversity", "float"),
            ("latent_csb", "float"),
            ("latent_cri", "float"),
            ("csb_rate", "float"),
            ("cri_rate", "float"),
        ],
        country.truth.iter().map(|t| {
            vec![
                t.settlement_id.to_string(),
                t.active.to_string(),
                t.n_users.to_string(),
                t.k_blocks.to_string(),
                num(t.ratio),
                num(t.cross_town_rate),
                t.n_contracts.to_string(),
                opt_num(t.fragmentation),
                opt_num(t.diversity),
                opt_num(t.diversity_internal),
                num(t.z_fragmentation),
                num(t.z_diversity),
                num(t.latent_csb),
                num(t.latent_cri),
                num(t.csb_rate),
                num(t.cri_rate),
            ]
        }),
    )?;
    let json = serde_json::json!({
        "spec": spec,
        "beta_fragmentation": spec.beta_fragmentation,
        "beta_diversity": spec.beta_diversity,
        "dv_scale": { "mean_csb": spec.csb_scale, "mean_cri": spec.cri_scale },
        "n_settlements": country.truth.len(),
        "n_active": active.len(),
        "n_edges": country.network.edges.len(),
        "n_contracts": country.contracts.len(),
    });
    write_text(
        &out("ground_truth.json"),
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;

    let run_cfg = RunConfig {
        edges: Some(PathBuf::from("edges.csv")),
        attribution: Some(PathBuf::from("attribution.csv")),
        contracts: Some(PathBuf::from("contracts.csv")),
        controls: Some(PathBuf::from("controls.csv")),
        groups: Some(PathBuf::from("groups.csv")),
        out: PathBuf::from("results"),
        synth_spec: None,
        ..cfg.clone()
    };
    write_text(&out("run.toml"), &run_cfg.to_toml())?;
    info!(
        "synth: {} settlements ({} active), {} users, {} edges, {} contracts in {}",
        country.truth.len(),
        active.len(),
        country.network.attribution.len(),
        country.network.edges.len(),
        country.contracts.len(),
        cfg.out.display()
    );
    Ok(country)
}
