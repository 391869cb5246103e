//! Modularity of a partition and the normalized fragmentation score.
//!
//! Two formulations live here. [`newman_girvan`] is the usual degree-based
//! modularity that Louvain maximizes. [`modularity_paper`] and [`q_max`] use
//! edge counts per group:
//!
//! ```text
//! Q     = sum_k [ Lw_k / L - (L_k / L)^2 ]
//! Q_max = sum_k [ L_k  / L - (L_k / L)^2 ]
//! ```
//!
//! where `Lw_k` counts edges with both ends in group `k` and `L_k` counts edges
//! touching group `k`. How a crossing edge enters `L_k` is set by
//! [`CrossingEdges`]. Fragmentation is `Q / Q_max` on the Louvain partition.

use log::debug;
use serde::{Deserialize, Serialize};

use super::{louvain, Partition};
use crate::error::{Error, Result};
use crate::graph::Adjacency;

/// How an edge between two different groups contributes to `L_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingEdges {
    /// Counts fully toward both endpoint groups, so `sum_k L_k >= L`.
    #[default]
    BothGroups,
    /// Counts one half toward each endpoint group, so `sum_k L_k = L`.
    /// With this convention `Q` coincides with Newman-Girvan modularity.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityTerms {
    /// `L_k`: edges touching the group (may be fractional under `Split`).
    pub adjacent: f64,
    /// `Lw_k`: edges with both endpoints in the group.
    pub within: usize,
}

fn tally(
    adj: &Adjacency,
    p: &Partition,
    conv: CrossingEdges,
) -> Result<(f64, Vec<CommunityTerms>)> {
    p.check_covers(adj.node_count())?;
    let l = adj.edge_count();
    if l == 0 {
        return Err(Error::NoEdges);
    }
    let labels = p.labels();
    let mut terms = vec![
        CommunityTerms {
            adjacent: 0.0,
            within: 0
        };
        p.k()
    ];
    let crossing = match conv {
        CrossingEdges::BothGroups => 1.0,
        CrossingEdges::Split => 0.5,
    };
    for (a, b) in adj.edges() {
        let (ca, cb) = (labels[a], labels[b]);
        if ca == cb {
            terms[ca].within += 1;
            terms[ca].adjacent += 1.0;
        } else {
            terms[ca].adjacent += crossing;
            terms[cb].adjacent += crossing;
        }
    }
    Ok((l as f64, terms))
}

/// Edge-count modularity `Q` with per-group `(L_k, Lw_k)`.
pub fn modularity_paper(
    g: &impl AsRef<Adjacency>,
    p: &Partition,
    conv: CrossingEdges,
) -> Result<(f64, Vec<CommunityTerms>)> {
    let (l, terms) = tally(g.as_ref(), p, conv)?;
    let q = terms
        .iter()
        .map(|t| t.within as f64 / l - (t.adjacent / l).powi(2))
        .sum();
    Ok((q, terms))
}

/// Largest value [`modularity_paper`] could take for the same group sizes,
/// reached when every edge falls inside a group.
pub fn q_max(g: &impl AsRef<Adjacency>, p: &Partition, conv: CrossingEdges) -> Result<f64> {
    let (l, terms) = tally(g.as_ref(), p, conv)?;
    Ok(terms
        .iter()
        .map(|t| {
            let share = t.adjacent / l;
            share - share * share
        })
        .sum())
}

/// Standard degree-based modularity.
pub fn newman_girvan(g: &impl AsRef<Adjacency>, p: &Partition) -> Result<f64> {
    let adj = g.as_ref();
    p.check_covers(adj.node_count())?;
    let l = adj.edge_count();
    if l == 0 {
        return Err(Error::NoEdges);
    }
    let labels = p.labels();
    let mut within = vec![0usize; p.k()];
    let mut degree = vec![0usize; p.k()];
    for i in 0..adj.node_count() {
        degree[labels[i]] += adj.degree(i);
    }
    for (a, b) in adj.edges() {
        if labels[a] == labels[b] {
            within[labels[a]] += 1;
        }
    }
    let l = l as f64;
    Ok(within
        .iter()
        .zip(&degree)
        .map(|(&w, &d)| w as f64 / l - (d as f64 / (2.0 * l)).powi(2))
        .sum())
}

/// Fragmentation of one settlement's internal network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub k: usize,
    pub q: f64,
    pub q_max: f64,
    /// `Q / Q_max`; `None` when the network has no edges.
    pub fragmentation: Option<f64>,
    /// Set when `Q_max = 0` and the score was fixed at 0.
    pub degenerate: bool,
    pub per_community: Vec<CommunityTerms>,
}

impl ModularityReport {
    fn undefined(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            n_edges: 0,
            k: 0,
            q: f64::NAN,
            q_max: f64::NAN,
            fragmentation: None,
            degenerate: false,
            per_community: Vec::new(),
        }
    }
}

/// Runs Louvain on a settlement-internal network and scores the result.
///
/// A network without edges gets an undefined report instead of an error so
/// callers can drop the settlement and keep going.
pub fn fragmentation(
    g_internal: &impl AsRef<Adjacency>,
    seed: u64,
    conv: CrossingEdges,
) -> ModularityReport {
    let adj = g_internal.as_ref();
    if adj.edge_count() == 0 {
        return ModularityReport::undefined(adj.node_count());
    }
    let p = louvain(adj, seed).expect("graph with edges has nodes");
    let (q, per_community) =
        modularity_paper(adj, &p, conv).expect("partition from louvain covers graph");
    let q_max = q_max(adj, &p, conv).expect("partition from louvain covers graph");
    let degenerate = q_max <= 1e-15;
    let f = if degenerate {
        debug!(
            "fragmentation: Q_max = 0 with K = {}, score set to 0",
            p.k()
        );
        0.0
    } else {
        q / q_max
    };
    ModularityReport {
        n_nodes: adj.node_count(),
        n_edges: adj.edge_count(),
        k: p.k(),
        q,
        q_max,
        fragmentation: Some(f),
        degenerate,
        per_community,
    }
}
