//! Social network representation with settlement attribution.
//!
//! Users and settlements are identified externally by opaque string ids and
//! interned to dense indices. Adjacency is stored in compressed sparse row
//! form with sorted neighbour lists; the graph is immutable once built.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(NodeId);
string_id!(SettlementId);

/// Undirected simple graph in compressed sparse row form.
///
/// Node `i` has neighbours `targets[offsets[i]..offsets[i + 1]]`, sorted
/// ascending, with no self-loops and no repeats. Every edge is stored twice.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// Builds from an arbitrary list of index pairs; loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(a, b) in edges {
            if a != b {
                counts[a as usize + 1] += 1;
                counts[b as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut targets = vec![0u32; counts[n]];
        for &(a, b) in edges {
            if a != b {
                targets[fill[a as usize]] = b;
                fill[a as usize] += 1;
                targets[fill[b as usize]] = a;
                fill[b as usize] += 1;
            }
        }
        // sort and dedup each row, then compact
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut write = 0;
        for i in 0..n {
            let (lo, hi) = (counts[i], counts[i + 1]);
            targets[lo..hi].sort_unstable();
            let mut last = None;
            for r in lo..hi {
                let t = targets[r];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
            offsets.push(write);
        }
        targets.truncate(write);
        Self { offsets, targets }
    }

    /// Builds from rows that are already sorted, symmetric and loop-free.
    pub(crate) fn from_sorted_rows(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        debug_assert_eq!(*offsets.last().unwrap_or(&0), targets.len());
        Self { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Each undirected edge once, as `(low, high)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Induced subgraph on `nodes` (global indices, ascending). Local index `k`
    /// refers to `nodes[k]`.
    pub fn induced(&self, nodes: &[u32]) -> Adjacency {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &v in nodes {
            intersect_local(self.neighbors(v as usize), nodes, &mut targets);
            offsets.push(targets.len());
        }
        Adjacency::from_sorted_rows(offsets, targets)
    }
}

impl AsRef<Adjacency> for Adjacency {
    fn as_ref(&self) -> &Adjacency {
        self
    }
}

impl AsRef<Adjacency> for SocialGraph {
    fn as_ref(&self) -> &Adjacency {
        &self.adj
    }
}

/// Appends the local positions (in `set`) of every element of `row` that
/// also appears in `set`. Both slices must be sorted.
fn intersect_local(row: &[u32], set: &[u32], out: &mut Vec<u32>) {
    let (mut i, mut j) = (0, 0);
    while i < row.len() && j < set.len() {
        match row[i].cmp(&set[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(j as u32);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Undirected, simple social graph whose nodes each belong to one settlement.
#[derive(Debug, Clone, Default)]
pub struct SocialGraph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, u32>,
    settlements: Vec<SettlementId>,
    settlement_index: HashMap<SettlementId, u32>,
    settlement_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    adj: Adjacency,
}

impl SocialGraph {
    /// Builds a graph from an edge list and a node-to-settlement attribution.
    ///
    /// Nodes are ordered as they appear in `attribution`, which may also list
    /// users without any edge. Self-loops and repeated edges are dropped. An
    /// endpoint without attribution is an error naming the node; so is a node
    /// attributed to two different settlements.
    pub fn build(
        edges: &[(NodeId, NodeId)],
        attribution: &[(NodeId, SettlementId)],
    ) -> Result<Self> {
        let mut ids = Vec::with_capacity(attribution.len());
        let mut index: HashMap<NodeId, u32> = HashMap::with_capacity(attribution.len());
        let mut settlements = Vec::new();
        let mut settlement_index: HashMap<SettlementId, u32> = HashMap::new();
        let mut settlement_of = Vec::with_capacity(attribution.len());

        for (node, settlement) in attribution {
            let s = match settlement_index.get(settlement) {
                Some(&s) => s,
                None => {
                    let s = settlements.len() as u32;
                    settlements.push(settlement.clone());
                    settlement_index.insert(settlement.clone(), s);
                    s
                }
            };
            match index.get(node) {
                Some(&existing) => {
                    let prev = settlement_of[existing as usize];
                    if prev != s {
                        return Err(Error::ConflictingAttribution {
                            node: node.0.clone(),
                            first: settlements[prev as usize].0.clone(),
                            second: settlement.0.clone(),
                        });
                    }
                }
                None => {
                    index.insert(node.clone(), ids.len() as u32);
                    ids.push(node.clone());
                    settlement_of.push(s);
                }
            }
        }

        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::MissingAttribution(a.0.clone()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::MissingAttribution(b.0.clone()))?;
            pairs.push((ia, ib));
        }
        let adj = Adjacency::from_edges(ids.len(), &pairs);

        let mut members = vec![Vec::new(); settlements.len()];
        for (i, &s) in settlement_of.iter().enumerate() {
            members[s as usize].push(i as u32);
        }

        Ok(Self {
            ids,
            index,
            settlements,
            settlement_index,
            settlement_of,
            members,
            adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.edge_count()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adj
    }

    /// Node ids in index order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.ids
    }

    /// Settlement ids in order of first appearance in the attribution.
    pub fn settlements(&self) -> &[SettlementId] {
        &self.settlements
    }

    pub fn index_of(&self, node: &str) -> Option<usize> {
        self.index.get(node).map(|&i| i as usize)
    }

    pub fn node_id(&self, i: usize) -> &NodeId {
        &self.ids[i]
    }

    pub fn settlement_index_of(&self, settlement: &str) -> Option<usize> {
        self.settlement_index.get(settlement).map(|&i| i as usize)
    }

    pub fn settlement_at(&self, i: usize) -> &SettlementId {
        &self.settlements[self.settlement_of[i] as usize]
    }

    pub(crate) fn settlement_idx_at(&self, i: usize) -> u32 {
        self.settlement_of[i]
    }

    pub fn settlement_of(&self, node: &str) -> Result<&SettlementId> {
        let i = self.require(node)?;
        Ok(self.settlement_at(i))
    }

    pub fn degree(&self, node: &str) -> Result<usize> {
        Ok(self.adj.degree(self.require(node)?))
    }

    pub fn neighbors(&self, node: &str) -> Result<Vec<&NodeId>> {
        let i = self.require(node)?;
        Ok(self
            .adj
            .neighbors(i)
            .iter()
            .map(|&j| &self.ids[j as usize])
            .collect())
    }

    /// Members of a settlement in index order; empty for an unknown settlement.
    pub fn settlement_members(&self, settlement: &str) -> Vec<&NodeId> {
        self.member_indices(settlement)
            .iter()
            .map(|&i| &self.ids[i as usize])
            .collect()
    }

    pub(crate) fn member_indices(&self, settlement: &str) -> &[u32] {
        match self.settlement_index.get(settlement) {
            Some(&s) => &self.members[s as usize],
            None => &[],
        }
    }

    /// Each edge once, endpoints in index order.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.adj.edges().map(|(a, b)| (&self.ids[a], &self.ids[b]))
    }

    /// Induced subgraph on the residents of `settlement`; ties to other
    /// settlements are dropped. An unknown settlement yields an empty graph.
    pub fn internal_subgraph(&self, settlement: &str) -> SocialGraph {
        self.induced(self.member_indices(settlement))
    }

    /// Subgraph induced on the neighbours of `ego`, without the ego itself.
    /// Alters from every settlement are kept.
    pub fn ego_alters_subgraph(&self, ego: &str) -> Result<SocialGraph> {
        let i = self.require(ego)?;
        Ok(self.induced(self.adj.neighbors(i)))
    }

    fn induced(&self, nodes: &[u32]) -> SocialGraph {
        let adj = self.adj.induced(nodes);
        let mut settlements = Vec::new();
        let mut settlement_index = HashMap::new();
        let mut settlement_of = Vec::with_capacity(nodes.len());
        let mut ids = Vec::with_capacity(nodes.len());
        let mut index = HashMap::with_capacity(nodes.len());
        for (local, &v) in nodes.iter().enumerate() {
            let sid = self.settlement_at(v as usize);
            let s = *settlement_index.entry(sid.clone()).or_insert_with(|| {
                settlements.push(sid.clone());
                (settlements.len() - 1) as u32
            });
            settlement_of.push(s);
            ids.push(self.ids[v as usize].clone());
            index.insert(self.ids[v as usize].clone(), local as u32);
        }
        let mut members = vec![Vec::new(); settlements.len()];
        for (i, &s) in settlement_of.iter().enumerate() {
            members[s as usize].push(i as u32);
        }
        SocialGraph {
            ids,
            index,
            settlements,
            settlement_index,
            settlement_of,
            members,
            adj,
        }
    }

    fn require(&self, node: &str) -> Result<usize> {
        self.index_of(node)
            .ok_or_else(|| Error::UnknownNode(node.to_owned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(pairs: &[(&str, &str)]) -> Vec<(NodeId, NodeId)> {
        pairs.iter().map(|&(a, b)| (a.into(), b.into())).collect()
    }

    fn attr(pairs: &[(&str, &str)]) -> Vec<(NodeId, SettlementId)> {
        pairs.iter().map(|&(a, b)| (a.into(), b.into())).collect()
    }

    #[test]
    fn drops_loops_and_duplicates() {
        let g = SocialGraph::build(
            &ids(&[("a", "b"), ("b", "a"), ("a", "a")]),
            &attr(&[("a", "S1"), ("b", "S1")]),
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree("a").unwrap(), 1);
        assert_eq!(g.degree("b").unwrap(), 1);
    }

    #[test]
    fn empty_graph() {
        let g = SocialGraph::build(&[], &[]).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.is_empty());
    }

    #[test]
    fn missing_attribution_names_node() {
        let err = SocialGraph::build(&ids(&[("a", "b")]), &attr(&[("a", "S1")])).unwrap_err();
        assert_eq!(err, Error::MissingAttribution("b".into()));
    }

    #[test]
    fn conflicting_attribution_rejected() {
        let err = SocialGraph::build(&[], &attr(&[("a", "S1"), ("a", "S2")])).unwrap_err();
        assert!(matches!(err, Error::ConflictingAttribution { .. }));
        // a repeated identical attribution is harmless
        assert!(SocialGraph::build(&[], &attr(&[("a", "S1"), ("a", "S1")])).is_ok());
    }

    fn two_towns() -> SocialGraph {
        SocialGraph::build(
            &ids(&[
                ("a1", "a2"),
                ("a2", "a3"),
                ("a1", "a3"),
                ("b1", "b2"),
                ("b2", "b3"),
                ("a3", "b1"),
            ]),
            &attr(&[
                ("a1", "A"),
                ("a2", "A"),
                ("a3", "A"),
                ("b1", "B"),
                ("b2", "B"),
                ("b3", "B"),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn internal_subgraph_drops_bridges() {
        let g = two_towns();
        let a = g.internal_subgraph("A");
        assert_eq!(a.node_count(), 3);
        assert_eq!(a.edge_count(), 3);
        let b = g.internal_subgraph("B");
        assert_eq!(b.edge_count(), 2);
        assert_eq!(g.internal_subgraph("nowhere").node_count(), 0);
    }

    #[test]
    fn internal_subgraph_of_single_settlement_is_identity() {
        let g = SocialGraph::build(
            &ids(&[("x", "y"), ("y", "z")]),
            &attr(&[("x", "S"), ("y", "S"), ("z", "S")]),
        )
        .unwrap();
        let h = g.internal_subgraph("S");
        assert_eq!(h.nodes(), g.nodes());
        assert_eq!(h.adjacency(), g.adjacency());
    }

    #[test]
    fn ego_subgraphs() {
        // star: centre c with five leaves
        let star: Vec<_> = (0..5).map(|i| ("c".to_string(), format!("l{i}"))).collect();
        let mut a = vec![("c".to_string(), "S".to_string())];
        a.extend((0..5).map(|i| (format!("l{i}"), "S".to_string())));
        let g = SocialGraph::build(
            &star
                .iter()
                .map(|(x, y)| (x.as_str().into(), y.as_str().into()))
                .collect::<Vec<_>>(),
            &a.iter()
                .map(|(x, y)| (x.as_str().into(), y.as_str().into()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let alters = g.ego_alters_subgraph("c").unwrap();
        assert_eq!(alters.node_count(), 5);
        assert_eq!(alters.edge_count(), 0);

        let tri = SocialGraph::build(
            &ids(&[("a", "b"), ("b", "c"), ("a", "c")]),
            &attr(&[("a", "S"), ("b", "S"), ("c", "S")]),
        )
        .unwrap();
        let alters = tri.ego_alters_subgraph("b").unwrap();
        assert_eq!(alters.node_count(), 2);
        assert_eq!(alters.edge_count(), 1);
        assert_eq!(
            tri.ego_alters_subgraph("zz").unwrap_err(),
            Error::UnknownNode("zz".into())
        );
    }

    #[test]
    fn ego_alters_span_settlements() {
        let g = SocialGraph::build(
            &ids(&[("e", "x"), ("e", "y"), ("e", "z"), ("x", "y"), ("y", "z")]),
            &attr(&[("e", "A"), ("x", "A"), ("y", "B"), ("z", "C")]),
        )
        .unwrap();
        let alters = g.ego_alters_subgraph("e").unwrap();
        assert_eq!(alters.node_count(), 3);
        assert_eq!(alters.edge_count(), 2);
        assert_eq!(alters.settlements().len(), 3);
    }

    #[test]
    fn basic_counts() {
        let tri = SocialGraph::build(
            &ids(&[("a", "b"), ("b", "c"), ("a", "c")]),
            &attr(&[("a", "S"), ("b", "S"), ("c", "S")]),
        )
        .unwrap();
        for n in ["a", "b", "c"] {
            assert_eq!(tri.degree(n).unwrap(), 2);
        }
        assert!(tri.degree("q").is_err());
        assert!(tri.settlement_members("T").is_empty());

        let names: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let mut e = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                e.push((names[i].as_str().into(), names[j].as_str().into()));
            }
        }
        let a: Vec<_> = names
            .iter()
            .map(|n| (n.as_str().into(), "S".into()))
            .collect();
        let k5 = SocialGraph::build(&e, &a).unwrap();
        assert_eq!(k5.edge_count(), 10);
    }
}
