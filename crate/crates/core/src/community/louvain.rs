//! Louvain modularity maximization (unweighted input, weighted levels).
//!
//! Local moves visit nodes in an order shuffled once per level from the seed.
//! A node moves only when a neighbouring community strictly improves on
//! staying put; among equally good candidates the lowest community label wins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::Adjacency;

const GAIN_EPS: f64 = 1e-12;

/// Weighted graph used inside the level loop. `loops[i]` is the weight of
/// edges collapsed inside super-node `i`; each contributes twice to strength.
struct Level {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    loops: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_adjacency(adj: &Adjacency) -> Self {
        let n = adj.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * adj.edge_count());
        offsets.push(0);
        for i in 0..n {
            targets.extend_from_slice(adj.neighbors(i));
            offsets.push(targets.len());
        }
        let weights = vec![1.0; targets.len()];
        let strength = (0..n).map(|i| adj.degree(i) as f64).collect();
        Self {
            offsets,
            targets,
            weights,
            loops: vec![0.0; n],
            strength,
        }
    }

    fn len(&self) -> usize {
        self.loops.len()
    }

    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.targets[r.clone()], &self.weights[r])
    }

    /// Collapses each community into one node. `comm` must be contiguous.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut members = vec![Vec::new(); k];
        for (i, &c) in comm.iter().enumerate() {
            members[c].push(i);
        }
        let mut offsets = Vec::with_capacity(k + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut acc = vec![0.0f64; k];
        let mut touched: Vec<usize> = Vec::new();
        offsets.push(0);
        for c in 0..k {
            for &i in &members[c] {
                loops[c] += self.loops[i];
                strength[c] += self.strength[i];
                let (t, w) = self.row(i);
                for (&j, &wij) in t.iter().zip(w) {
                    let d = comm[j as usize];
                    if d == c {
                        // each internal edge is seen from both ends
                        loops[c] += 0.5 * wij;
                    } else {
                        if acc[d] == 0.0 {
                            touched.push(d);
                        }
                        acc[d] += wij;
                    }
                }
            }
            touched.sort_unstable();
            for &d in &touched {
                targets.push(d as u32);
                weights.push(acc[d]);
                acc[d] = 0.0;
            }
            touched.clear();
            offsets.push(targets.len());
        }
        Level {
            offsets,
            targets,
            weights,
            loops,
            strength,
        }
    }
}

/// One round of local moves. Returns contiguous community labels and whether
/// any node changed community.
fn local_moves(level: &Level, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
    let n = level.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = level.strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut link = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut cands: Vec<usize> = Vec::new();
    let mut moved_any = false;

    loop {
        let mut moves = 0usize;
        for &i in &order {
            let ki = level.strength[i];
            if ki == 0.0 {
                continue;
            }
            let own = comm[i];
            let (t, w) = level.row(i);
            for (&j, &wij) in t.iter().zip(w) {
                let c = comm[j as usize];
                if !seen[c] {
                    seen[c] = true;
                    cands.push(c);
                }
                link[c] += wij;
            }
            tot[own] -= ki;
            let scale = ki / two_m;
            let own_gain = link[own] - tot[own] * scale;
            cands.sort_unstable();
            let mut best = own;
            let mut best_other: Option<(usize, f64)> = None;
            for &c in &cands {
                if c == own {
                    continue;
                }
                let gain = link[c] - tot[c] * scale;
                match best_other {
                    Some((_, g)) if gain <= g + GAIN_EPS => {}
                    _ => best_other = Some((c, gain)),
                }
            }
            if let Some((c, g)) = best_other {
                if g > own_gain + GAIN_EPS {
                    best = c;
                }
            }
            tot[best] += ki;
            if best != own {
                comm[i] = best;
                moves += 1;
            }
            for &c in &cands {
                link[c] = 0.0;
                seen[c] = false;
            }
            cands.clear();
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }

    let mut relabel = vec![usize::MAX; n];
    let mut k = 0;
    for c in comm.iter_mut() {
        if relabel[*c] == usize::MAX {
            relabel[*c] = k;
            k += 1;
        }
        *c = relabel[*c];
    }
    (comm, k, moved_any)
}

/// Detects communities with the Louvain method.
///
/// Deterministic for a fixed `seed`. Isolated nodes end up as singleton
/// communities. An empty graph is an error; a graph without edges yields all
/// singletons.
pub fn louvain(g: &impl AsRef<Adjacency>, seed: u64) -> Result<Partition> {
    let adj = g.as_ref();
    let n = adj.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if adj.edge_count() == 0 {
        return Ok(Partition::singletons(n));
    }
    let two_m = 2.0 * adj.edge_count() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_adjacency(adj);
    loop {
        let (comm, k, moved) = local_moves(&level, two_m, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if k == level.len() {
            break;
        }
        level = level.aggregate(&comm, k);
    }
    Ok(Partition::from_labels(&membership))
}
