//! Simple directed graph keyed by account id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Account identifier.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

/// Ordered pair `(source, target)`: source follows target.
pub type Edge = (NodeId, NodeId);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
}

/// Simple directed graph: no self-loops, no parallel edges.
///
/// Adjacency is kept in ordered sets so every iteration order is
/// deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DirectedGraph {
    out: BTreeMap<NodeId, BTreeSet<NodeId>>,
    inc: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from edges, rejecting self-loops. Duplicates collapse.
    pub fn from_edges<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Self::new();
        for (s, t) in edges {
            g.add_edge(s, t)?;
        }
        Ok(g)
    }

    /// Adds an isolated node; returns `false` if it was already present.
    pub fn add_node(&mut self, n: NodeId) -> bool {
        let fresh = !self.out.contains_key(&n);
        if fresh {
            self.out.insert(n, BTreeSet::new());
            self.inc.insert(n, BTreeSet::new());
        }
        fresh
    }

    /// Adds `source -> target`; returns `false` if the edge already existed.
    pub fn add_edge(&mut self, source: NodeId, target: NodeId) -> Result<bool, GraphError> {
        if source == target {
            return Err(GraphError::SelfLoop(source));
        }
        self.add_node(source);
        self.add_node(target);
        let fresh = self.out.get_mut(&source).expect("node present").insert(target);
        if fresh {
            self.inc.get_mut(&target).expect("node present").insert(source);
            self.edge_count += 1;
        }
        Ok(fresh)
    }

    pub fn remove_edge(&mut self, source: NodeId, target: NodeId) -> bool {
        let removed = self.out.get_mut(&source).is_some_and(|s| s.remove(&target));
        if removed {
            self.inc.get_mut(&target).expect("node present").remove(&source);
            self.edge_count -= 1;
        }
        removed
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.out.contains_key(&n)
    }

    pub fn contains_edge(&self, source: NodeId, target: NodeId) -> bool {
        self.out.get(&source).is_some_and(|s| s.contains(&target))
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.out.keys().copied()
    }

    /// Edges ordered by source, then target.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out.iter().flat_map(|(&s, ts)| ts.iter().map(move |&t| (s, t)))
    }

    /// Friends of `n` (nodes `n` follows), ascending.
    pub fn out_neighbors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out.get(&n).into_iter().flatten().copied()
    }

    /// Followers of `n`, ascending.
    pub fn in_neighbors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.inc.get(&n).into_iter().flatten().copied()
    }

    pub fn out_degree(&self, n: NodeId) -> usize {
        self.out.get(&n).map_or(0, BTreeSet::len)
    }

    pub fn in_degree(&self, n: NodeId) -> usize {
        self.inc.get(&n).map_or(0, BTreeSet::len)
    }

    /// In-degree plus out-degree; a reciprocal pair counts twice.
    pub fn degree(&self, n: NodeId) -> usize {
        self.in_degree(n) + self.out_degree(n)
    }

    /// Subgraph induced by the nodes for which `keep` holds.
    pub fn induced_subgraph<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(NodeId) -> bool,
    {
        let kept: BTreeSet<NodeId> = self.nodes().filter(|&n| keep(n)).collect();
        let mut g = Self::new();
        for &n in &kept {
            g.add_node(n);
        }
        for (s, t) in self.edges() {
            if kept.contains(&s) && kept.contains(&t) {
                g.add_edge(s, t).expect("source graph is simple");
            }
        }
        g
    }

    /// Subgraph induced by the nodes with at least `min` followers.
    ///
    /// A single pass: nodes whose in-degree drops below `min` after the
    /// filter are kept.
    pub fn filter_in_degree(&self, min: usize) -> Self {
        self.induced_subgraph(|n| self.in_degree(n) >= min)
    }
}
