//! Ego-network diversity and its settlement average.
//!
//! A user's diversity is the modularity of the Louvain partition of the
//! network among the user's friends, with the user removed. Friends living
//! elsewhere are kept unless [`AlterScope::SameSettlement`] is requested.

use serde::{Deserialize, Serialize};

use crate::community::{louvain, newman_girvan};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::{Adjacency, NodeId, SettlementId, SocialGraph};
use crate::rng::{derive_seed, hash_str};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlterScope {
    #[default]
    All,
    /// Only alters living in the ego's own settlement.
    SameSettlement,
}

/// Which users enter the settlement average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Users whose alter network has at least one edge.
    #[default]
    IncludedOnly,
    /// Every resident; users without alter edges count as zero.
    AllMembers,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EgoDiversity {
    pub ego: NodeId,
    /// Modularity of the alters' partition; 0 when the alters share no edge.
    pub q_ego: f64,
    pub n_alters: usize,
    pub n_alter_edges: usize,
    pub k_ego: usize,
}

impl EgoDiversity {
    /// Whether this ego enters the default settlement average.
    pub fn is_included(&self) -> bool {
        self.n_alter_edges > 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SettlementDiversity {
    pub settlement: SettlementId,
    /// `None` when no resident qualifies.
    pub d: Option<f64>,
    pub n_included: usize,
    pub n_excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiversityOptions {
    pub seed: u64,
    pub averaging: Averaging,
    pub exec: Exec,
}

/// Louvain seed for one ego, independent of evaluation order.
pub fn ego_seed(seed: u64, ego: &NodeId) -> u64 {
    derive_seed(seed, hash_str(ego.as_str()))
}

fn alters_of(g: &SocialGraph, ego: usize, scope: AlterScope) -> Vec<u32> {
    let nbrs = g.adjacency().neighbors(ego);
    match scope {
        AlterScope::All => nbrs.to_vec(),
        AlterScope::SameSettlement => {
            let home = g.settlement_idx_at(ego);
            nbrs.iter()
                .copied()
                .filter(|&a| g.settlement_idx_at(a as usize) == home)
                .collect()
        }
    }
}

fn ego_by_index(g: &SocialGraph, ego: usize, seed: u64, scope: AlterScope) -> EgoDiversity {
    let id = g.node_id(ego);
    let alters = alters_of(g, ego, scope);
    let sub: Adjacency = g.adjacency().induced(&alters);
    let n_alter_edges = sub.edge_count();
    let (q_ego, k_ego) = if n_alter_edges == 0 {
        (0.0, alters.len())
    } else {
        let p = louvain(&sub, ego_seed(seed, id)).expect("alter graph with edges is nonempty");
        (
            newman_girvan(&sub, &p).expect("alter graph has edges"),
            p.k(),
        )
    };
    EgoDiversity {
        ego: id.clone(),
        q_ego,
        n_alters: alters.len(),
        n_alter_edges,
        k_ego,
    }
}

/// Diversity of one user over all alters.
pub fn ego_diversity(g: &SocialGraph, ego: &str, seed: u64) -> Result<EgoDiversity> {
    let i = g
        .index_of(ego)
        .ok_or_else(|| Error::UnknownNode(ego.to_owned()))?;
    Ok(ego_by_index(g, i, seed, AlterScope::All))
}

/// Diversity of one user over alters in the same settlement.
pub fn internal_ego_diversity(g: &SocialGraph, ego: &str, seed: u64) -> Result<EgoDiversity> {
    let i = g
        .index_of(ego)
        .ok_or_else(|| Error::UnknownNode(ego.to_owned()))?;
    Ok(ego_by_index(g, i, seed, AlterScope::SameSettlement))
}

/// Averages per-user scores into a settlement score.
pub fn average(
    settlement: SettlementId,
    egos: &[EgoDiversity],
    averaging: Averaging,
) -> SettlementDiversity {
    let included: Vec<f64> = egos
        .iter()
        .filter(|e| e.is_included())
        .map(|e| e.q_ego)
        .collect();
    let n_included = included.len();
    let n_excluded = egos.len() - n_included;
    let sum: f64 = included.iter().sum();
    let d = match averaging {
        _ if n_included == 0 => None,
        Averaging::IncludedOnly => Some(sum / n_included as f64),
        Averaging::AllMembers => Some(sum / egos.len() as f64),
    };
    if d.is_none() {
        log::debug!("diversity: settlement {settlement} has no resident with alter edges");
    }
    SettlementDiversity {
        settlement,
        d,
        n_included,
        n_excluded,
    }
}

fn settlement_scope(
    g: &SocialGraph,
    s: &str,
    opts: &DiversityOptions,
    scope: AlterScope,
) -> SettlementDiversity {
    let members = g.member_indices(s);
    let egos = exec::map(opts.exec, members, |&i| {
        ego_by_index(g, i as usize, opts.seed, scope)
    });
    average(s.into(), &egos, opts.averaging)
}

/// Mean ego diversity of a settlement's residents.
pub fn settlement_diversity(
    g: &SocialGraph,
    s: &str,
    opts: &DiversityOptions,
) -> SettlementDiversity {
    settlement_scope(g, s, opts, AlterScope::All)
}

/// As [`settlement_diversity`], with each ego's alters restricted to residents.
pub fn internal_diversity(
    g: &SocialGraph,
    s: &str,
    opts: &DiversityOptions,
) -> SettlementDiversity {
    settlement_scope(g, s, opts, AlterScope::SameSettlement)
}

/// Both diversity variants for one settlement.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiversityRow {
    pub settlement: SettlementId,
    pub d: Option<f64>,
    pub d_internal: Option<f64>,
    pub n_included: usize,
    pub n_excluded: usize,
}

/// Computes `D` and `D_internal` for many settlements, spreading the per-ego
/// work over all residents at once.
pub fn diversity_table(
    g: &SocialGraph,
    settlements: &[SettlementId],
    opts: &DiversityOptions,
) -> Vec<DiversityRow> {
    let egos: Vec<u32> = settlements
        .iter()
        .flat_map(|s| g.member_indices(s.as_str()).iter().copied())
        .collect();
    let scored = exec::map(opts.exec, &egos, |&i| {
        let i = i as usize;
        (
            ego_by_index(g, i, opts.seed, AlterScope::All),
            ego_by_index(g, i, opts.seed, AlterScope::SameSettlement),
        )
    });
    let mut out = Vec::with_capacity(settlements.len());
    let mut at = 0;
    for s in settlements {
        let n = g.member_indices(s.as_str()).len();
        let (all, internal): (Vec<_>, Vec<_>) = scored[at..at + n].iter().cloned().unzip();
        at += n;
        let d = average(s.clone(), &all, opts.averaging);
        let di = average(s.clone(), &internal, opts.averaging);
        out.push(DiversityRow {
            settlement: s.clone(),
            d: d.d,
            d_internal: di.d,
            n_included: d.n_included,
            n_excluded: d.n_excluded,
        });
    }
    out
}
