//! Reads the edge and attribution files and applies the cleaning rules.

use std::collections::{HashMap, HashSet};

use anyhow::{Context, Result};
use log::info;
use serde::Deserialize;
use socrisk::{NodeId, SettlementId, SocialGraph};

use crate::config::RunConfig;
use crate::table::{write_table, AuditLog, ErrorLog};

pub const FOREIGN_LOCATION: &str = "FOREIGN_LOCATION";
pub const SUPER_DEGREE: &str = "SUPER_DEGREE";
pub const UNATTRIBUTED: &str = "UNATTRIBUTED";

#[derive(Debug, Deserialize)]
struct EdgeRow {
    user_a: String,
    user_b: String,
}

#[derive(Debug, Deserialize)]
struct AttributionRow {
    user_id: String,
    settlement_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleaningReport {
    pub edge_rows: usize,
    pub attribution_rows: usize,
    pub malformed_rows: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub unattributed_users: usize,
    pub foreign_users: usize,
    pub super_degree_users: usize,
    pub edges_removed_with_users: usize,
    pub users: usize,
    pub edges: usize,
    pub settlements: usize,
}

impl CleaningReport {
    fn rows(&self) -> Vec<Vec<String>> {
        [
            ("edge_rows", self.edge_rows),
            ("attribution_rows", self.attribution_rows),
            ("malformed_rows", self.malformed_rows),
            ("self_loops", self.self_loops),
            ("duplicate_edges", self.duplicate_edges),
            ("unattributed_users", self.unattributed_users),
            ("foreign_users", self.foreign_users),
            ("super_degree_users", self.super_degree_users),
            ("edges_removed_with_users", self.edges_removed_with_users),
            ("users", self.users),
            ("edges", self.edges),
            ("settlements", self.settlements),
        ]
        .into_iter()
        .map(|(k, v)| vec![k.to_owned(), v.to_string()])
        .collect()
    }
}

pub struct Ingested {
    pub graph: SocialGraph,
    pub report: CleaningReport,
    pub audit: AuditLog,
    pub errors: ErrorLog,
}

/// Loads and cleans the network without writing anything.
pub fn load(cfg: &RunConfig) -> Result<Ingested> {
    let edges_path = cfg.input(&cfg.edges, "edges")?;
    let attribution_path = cfg.input(&cfg.attribution, "attribution")?;
    let mut errors = ErrorLog::default();
    let mut audit = AuditLog::default();
    let mut report = CleaningReport::default();

    let attribution: Vec<(u64, AttributionRow)> =
        crate::table::read_rows(&attribution_path, cfg.has_headers, &mut errors)?;
    report.attribution_rows = attribution.len();
    let mut index: HashMap<String, u32> = HashMap::with_capacity(attribution.len());
    let mut users: Vec<(String, String)> = Vec::with_capacity(attribution.len());
    for (line, row) in attribution {
        if row.user_id.is_empty() || row.settlement_id.is_empty() {
            errors.record(&attribution_path, line, "empty user or settlement id");
            continue;
        }
        match index.get(&row.user_id) {
            Some(&i) if users[i as usize].1 != row.settlement_id => {
                let msg = format!(
                    "user {} attributed to both {} and {}",
                    row.user_id, users[i as usize].1, row.settlement_id
                );
                errors.record(&attribution_path, line, msg);
            }
            Some(_) => {}
            None => {
                index.insert(row.user_id.clone(), users.len() as u32);
                users.push((row.user_id, row.settlement_id));
            }
        }
    }

    let edge_rows: Vec<(u64, EdgeRow)> =
        crate::table::read_rows(&edges_path, cfg.has_headers, &mut errors)?;
    report.edge_rows = edge_rows.len();
    let mut unattributed: Vec<String> = Vec::new();
    let mut unattributed_seen: HashSet<String> = HashSet::new();
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edge_rows.len());
    for (line, row) in edge_rows {
        if row.user_a.is_empty() || row.user_b.is_empty() {
            errors.record(&edges_path, line, "empty user id");
            continue;
        }
        let mut ends = [0u32; 2];
        let mut ok = true;
        for (slot, id) in ends.iter_mut().zip([&row.user_a, &row.user_b]) {
            match index.get(id.as_str()) {
                Some(&i) => *slot = i,
                None => {
                    ok = false;
                    if unattributed_seen.insert(id.clone()) {
                        unattributed.push(id.clone());
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        if ends[0] == ends[1] {
            report.self_loops += 1;
            continue;
        }
        pairs.push((ends[0].min(ends[1]), ends[0].max(ends[1])));
    }
    errors.check("ingest", cfg.max_error_rate)?;
    report.malformed_rows = errors.errors.len();

    let before = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    report.duplicate_edges = before - pairs.len();

    for id in &unattributed {
        audit.drop(
            "node",
            id.clone(),
            UNATTRIBUTED,
            "appears in edges without a settlement",
        );
    }
    report.unattributed_users = unattributed.len();

    let mut degree = vec![0usize; users.len()];
    for &(a, b) in &pairs {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let foreign: HashSet<&str> = cfg.foreign_settlements.iter().map(String::as_str).collect();
    let mut keep = vec![true; users.len()];
    for (i, (uid, sid)) in users.iter().enumerate() {
        if foreign.contains(sid.as_str()) {
            keep[i] = false;
            report.foreign_users += 1;
            audit.drop(
                "node",
                uid.clone(),
                FOREIGN_LOCATION,
                format!("settlement {sid}"),
            );
        } else if degree[i] > cfg.max_degree {
            keep[i] = false;
            report.super_degree_users += 1;
            audit.drop(
                "node",
                uid.clone(),
                SUPER_DEGREE,
                format!("{} connections, limit {}", degree[i], cfg.max_degree),
            );
        }
    }

    let kept_pairs: Vec<(NodeId, NodeId)> = pairs
        .iter()
        .filter(|&&(a, b)| keep[a as usize] && keep[b as usize])
        .map(|&(a, b)| {
            (
                NodeId(users[a as usize].0.clone()),
                NodeId(users[b as usize].0.clone()),
            )
        })
        .collect();
    report.edges_removed_with_users = pairs.len() - kept_pairs.len();
    let kept_users: Vec<(NodeId, SettlementId)> = users
        .into_iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|((u, s), _)| (NodeId(u), SettlementId(s)))
        .collect();
    let graph =
        SocialGraph::build(&kept_pairs, &kept_users).context("building the cleaned graph")?;
    report.users = graph.node_count();
    report.edges = graph.edge_count();
    report.settlements = graph.settlements().len();
    info!(
        "ingest: {} users, {} edges, {} settlements; dropped {} foreign, {} over {} connections, {} unattributed",
        report.users,
        report.edges,
        report.settlements,
        report.foreign_users,
        report.super_degree_users,
        cfg.max_degree,
        report.unattributed_users
    );
    Ok(Ingested {
        graph,
        report,
        audit,
        errors,
    })
}

/// Loads, cleans and writes the cleaned network with its reports.
pub fn run(cfg: &RunConfig) -> Result<Ingested> {
    let ing = load(cfg)?;
    let g = &ing.graph;
    write_table(
        &cfg.out_path("clean_attribution.csv"),
        &[("user_id", "string"), ("settlement_id", "string")],
        g.nodes().iter().map(|n| {
            vec![
                n.to_string(),
                g.settlement_of(n.as_str())
                    .expect("node of graph")
                    .to_string(),
            ]
        }),
    )?;
    write_table(
        &cfg.out_path("clean_edges.csv"),
        &[("user_a", "string"), ("user_b", "string")],
        g.edges().map(|(a, b)| vec![a.to_string(), b.to_string()]),
    )?;
    write_table(
        &cfg.out_path("cleaning_report.csv"),
        &[("category", "string"), ("count", "integer")],
        ing.report.rows(),
    )?;
    ing.audit.write(&cfg.out_path("audit_ingest.csv"))?;
    ing.errors.write(&cfg.out_path("errors_ingest.csv"))?;
    Ok(ing)
}
