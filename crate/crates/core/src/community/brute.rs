//! Exhaustive modularity maximization over all set partitions.

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::Adjacency;

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 10;

/// Finds a partition maximizing Newman-Girvan modularity by visiting every
/// restricted growth string of length `n` (Bell(n) candidates).
///
/// The first maximizer in enumeration order is returned; the all-zero string,
/// i.e. the single community, comes first.
pub fn brute_force_best_partition(
    g: &impl AsRef<Adjacency>,
    max_nodes: usize,
) -> Result<(Partition, f64)> {
    let adj = g.as_ref();
    let n = adj.node_count();
    if n > max_nodes {
        return Err(Error::GraphTooLarge {
            nodes: n,
            limit: max_nodes,
        });
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let l = adj.edge_count();
    if l == 0 {
        return Err(Error::NoEdges);
    }
    let edges: Vec<(usize, usize)> = adj.edges().collect();
    let degree: Vec<usize> = (0..n).map(|i| adj.degree(i)).collect();
    let l = l as f64;

    let score = |labels: &[usize], k: usize, within: &mut [usize], deg: &mut [usize]| -> f64 {
        within[..k].iter_mut().for_each(|x| *x = 0);
        deg[..k].iter_mut().for_each(|x| *x = 0);
        for i in 0..n {
            deg[labels[i]] += degree[i];
        }
        for &(a, b) in &edges {
            if labels[a] == labels[b] {
                within[labels[a]] += 1;
            }
        }
        (0..k)
            .map(|c| within[c] as f64 / l - (deg[c] as f64 / (2.0 * l)).powi(2))
            .sum()
    };

    let mut labels = vec![0usize; n];
    // prefix maxima: max_prefix[i] = max(labels[..i])
    let mut max_prefix = vec![0usize; n + 1];
    let mut within = vec![0usize; n];
    let mut deg = vec![0usize; n];
    let mut best = labels.clone();
    let mut best_q = score(&labels, 1, &mut within, &mut deg);

    loop {
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok((Partition::from_labels(&best), best_q));
            }
            if labels[i] <= max_prefix[i] {
                labels[i] += 1;
                break;
            }
            labels[i] = 0;
            i -= 1;
        }
        for j in i..n {
            if j > i {
                labels[j] = 0;
            }
            max_prefix[j + 1] = max_prefix[j].max(labels[j]);
        }
        let k = max_prefix[n] + 1;
        let q = score(&labels, k, &mut within, &mut deg);
        if q > best_q + 1e-12 {
            best_q = q;
            best.copy_from_slice(&labels);
        }
    }
}
