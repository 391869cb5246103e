//! Fragmentation and diversity for the eligible settlements.

use std::collections::BTreeSet;

use anyhow::Result;
use log::info;
use serde::Deserialize;
use socrisk::diversity::DiversityOptions;
use socrisk::measures::{settlement_measures, SettlementMeasures};
use socrisk::procurement::eligibility_filter;
use socrisk::{Exec, SettlementId, SocialGraph};

use crate::config::RunConfig;
use crate::table::{num, opt_num, write_table, AuditLog, ErrorLog};

pub const EXCLUDED: &str = "EXCLUDED";
pub const LOW_ACTIVITY: &str = "LOW_ACTIVITY";

/// One row of `fragmentation.csv`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FragmentationRecord {
    pub settlement_id: String,
    pub n_nodes: usize,
    pub n_edges: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    #[serde(rename = "Q_max")]
    pub q_max: Option<f64>,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub degenerate_flag: bool,
}

/// One row of `diversity.csv`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DiversityRecord {
    pub settlement_id: String,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    #[serde(rename = "D_internal")]
    pub d_internal: Option<f64>,
    pub n_included: usize,
    pub n_excluded: usize,
}

/// Settlements of the graph that pass the activity filter, in graph order.
///
/// Without a contract file every settlement not explicitly excluded is kept.
pub fn eligible_settlements(
    cfg: &RunConfig,
    g: &SocialGraph,
    audit: &mut AuditLog,
) -> Result<Vec<SettlementId>> {
    let excluded: BTreeSet<SettlementId> = cfg
        .excluded_settlements
        .iter()
        .map(|s| SettlementId(s.clone()))
        .collect();
    let active = match &cfg.contracts {
        Some(_) => {
            let path = cfg.input(&cfg.contracts, "contracts")?;
            // malformed contract rows are reported by the score stage
            let contracts =
                crate::score::load_contracts(&path, cfg.has_headers, &mut ErrorLog::default())?;
            Some(eligibility_filter(
                &contracts,
                cfg.years,
                cfg.min_contracts_per_year,
                &excluded,
            ))
        }
        None => None,
    };
    let mut out = Vec::new();
    for s in g.settlements() {
        if excluded.contains(s) {
            audit.drop(
                "settlement",
                s.to_string(),
                EXCLUDED,
                "listed in excluded_settlements",
            );
        } else if active.as_ref().is_some_and(|a| !a.contains(s)) {
            audit.drop(
                "settlement",
                s.to_string(),
                LOW_ACTIVITY,
                format!(
                    "fewer than {} contracts per year over {} years",
                    cfg.min_contracts_per_year, cfg.years
                ),
            );
        } else {
            out.push(s.clone());
        }
    }
    Ok(out)
}

pub fn compute(
    cfg: &RunConfig,
    g: &SocialGraph,
    settlements: &[SettlementId],
    exec: Exec,
) -> Vec<SettlementMeasures> {
    let opts = DiversityOptions {
        seed: cfg.seed,
        averaging: cfg.averaging,
        exec,
    };
    settlement_measures(g, settlements, cfg.crossing_edges, &opts)
}

pub fn run(cfg: &RunConfig, g: &SocialGraph, exec: Exec) -> Result<Vec<SettlementMeasures>> {
    let mut audit = AuditLog::default();
    let eligible = eligible_settlements(cfg, g, &mut audit)?;
    let rows = compute(cfg, g, &eligible, exec);
    write_table(
        &cfg.out_path("fragmentation.csv"),
        &[
            ("settlement_id", "string"),
            ("n_nodes", "integer"),
            ("n_edges", "integer"),
            ("K", "integer"),
            ("Q", "float?"),
            ("Q_max", "float?"),
            ("F", "float?"),
            ("degenerate_flag", "bool"),
        ],
        rows.iter().map(|m| {
            let r = &m.fragmentation.report;
            vec![
                m.fragmentation.settlement.to_string(),
                r.n_nodes.to_string(),
                r.n_edges.to_string(),
                r.k.to_string(),
                num(r.q),
                num(r.q_max),
                opt_num(r.fragmentation),
                r.degenerate.to_string(),
            ]
        }),
    )?;
    write_table(
        &cfg.out_path("diversity.csv"),
        &[
            ("settlement_id", "string"),
            ("D", "float?"),
            ("D_internal", "float?"),
            ("n_included", "integer"),
            ("n_excluded", "integer"),
        ],
        rows.iter().map(|m| {
            let d = &m.diversity;
            vec![
                d.settlement.to_string(),
                opt_num(d.d),
                opt_num(d.d_internal),
                d.n_included.to_string(),
                d.n_excluded.to_string(),
            ]
        }),
    )?;
    audit.write(&cfg.out_path("audit_measures.csv"))?;
    info!(
        "measures: {} eligible settlements, {} dropped",
        rows.len(),
        audit.entries.len()
    );
    Ok(rows)
}
