//! Per-settlement network measures over a shared graph.

use serde::{Deserialize, Serialize};

use crate::community::{fragmentation, CrossingEdges, ModularityReport};
use crate::diversity::{diversity_table, DiversityOptions, DiversityRow};
use crate::exec::{self, Exec};
use crate::graph::{SettlementId, SocialGraph};
use crate::rng::{derive_seed, hash_str};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FragmentationRow {
    pub settlement: SettlementId,
    pub report: ModularityReport,
}

/// Louvain seed for a settlement's internal network.
pub fn settlement_seed(seed: u64, settlement: &SettlementId) -> u64 {
    derive_seed(seed, hash_str(settlement.as_str()))
}

/// Fragmentation of each settlement's internal network, in input order.
pub fn fragmentation_table(
    g: &SocialGraph,
    settlements: &[SettlementId],
    seed: u64,
    conv: CrossingEdges,
    exec: Exec,
) -> Vec<FragmentationRow> {
    exec::map(exec, settlements, |s| {
        let members = g.member_indices(s.as_str());
        let internal = g.adjacency().induced(members);
        FragmentationRow {
            settlement: s.clone(),
            report: fragmentation(&internal, settlement_seed(seed, s), conv),
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SettlementMeasures {
    pub fragmentation: FragmentationRow,
    pub diversity: DiversityRow,
}

/// Fragmentation and both diversity variants for every listed settlement.
pub fn settlement_measures(
    g: &SocialGraph,
    settlements: &[SettlementId],
    conv: CrossingEdges,
    opts: &DiversityOptions,
) -> Vec<SettlementMeasures> {
    let frag = fragmentation_table(g, settlements, opts.seed, conv, opts.exec);
    let div = diversity_table(g, settlements, opts);
    frag.into_iter()
        .zip(div)
        .map(|(fragmentation, diversity)| SettlementMeasures {
            fragmentation,
            diversity,
        })
        .collect()
}
