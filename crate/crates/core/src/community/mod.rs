//! Community detection, modularity and settlement fragmentation.

mod brute;
mod louvain;
mod modularity;

pub use brute::{brute_force_best_partition, DEFAULT_BRUTE_FORCE_LIMIT};
pub use louvain::louvain;
pub use modularity::{
    fragmentation, modularity_paper, newman_girvan, q_max, CommunityTerms, CrossingEdges,
    ModularityReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Assignment of graph nodes (by index) to community labels `0..k`.
///
/// Labels are contiguous and numbered in order of first appearance, so two
/// partitions describing the same grouping compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Self {
            k: remap.len(),
            labels,
        }
    }

    pub fn single(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_of(&self, g: &SocialGraph, node: &str) -> Result<usize> {
        let i = g
            .index_of(node)
            .ok_or_else(|| Error::UnknownNode(node.to_owned()))?;
        Ok(self.labels[i])
    }

    /// Member indices of each community.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub(crate) fn check_covers(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::PartitionMismatch {
                expected: n,
                got: self.labels.len(),
            });
        }
        Ok(())
    }
}

/// Adjusted Rand index between two labelings of the same node set.
///
/// 1.0 for identical groupings up to relabeling; about 0 for independent ones.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same nodes");
    let n = a.len();
    let pa = Partition::from_labels(a);
    let pb = Partition::from_labels(b);
    let mut table = vec![vec![0u64; pb.k()]; pa.k()];
    for i in 0..n {
        table[pa.labels[i]][pb.labels[i]] += 1;
    }
    let c2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table.iter().flatten().map(|&x| c2(x)).sum();
    let sum_rows: f64 = table.iter().map(|r| c2(r.iter().sum())).sum();
    let sum_cols: f64 = (0..pb.k())
        .map(|j| c2(table.iter().map(|r| r[j]).sum()))
        .sum();
    let total = c2(n as u64);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_rows * sum_cols / total;
    let max = 0.5 * (sum_rows + sum_cols);
    if (max - expected).abs() < f64::EPSILON {
        return 1.0;
    }
    (sum_cells - expected) / (max - expected)
}
