//! Community assignments, label propagation and the community meta-graph.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Read, Write};

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::io::{csv_error, FormatError};
use crate::keywords::Tweet;
use crate::profile::Profiles;
use crate::rng::{substream, LABEL_PROPAGATION};

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("nodes without a community: {0:?}")]
    Missing(Vec<NodeId>),
    #[error("nodes not in the graph: {0:?}")]
    Unknown(Vec<NodeId>),
    #[error("node {0} assigned twice")]
    Duplicate(NodeId),
    #[error("window end {t1} precedes start {t0}")]
    Window { t0: i64, t1: i64 },
}

/// Node to community map. Community ids are small integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommunityAssignment {
    pub labels: BTreeMap<NodeId, usize>,
}

impl CommunityAssignment {
    pub fn community_of(&self, node: NodeId) -> Option<usize> {
        self.labels.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> BTreeMap<usize, usize> {
        let mut sizes = BTreeMap::new();
        for &c in self.labels.values() {
            *sizes.entry(c).or_insert(0) += 1;
        }
        sizes
    }

    pub fn members(&self) -> BTreeMap<usize, Vec<NodeId>> {
        let mut out: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for (&n, &c) in &self.labels {
            out.entry(c).or_default().push(n);
        }
        out
    }

    /// Relabels communities 0, 1, ... by descending size, ties by old label.
    pub fn renumbered(&self) -> Self {
        let mut order: Vec<(usize, usize)> = self.sizes().into_iter().collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let map: BTreeMap<usize, usize> = order.iter().enumerate().map(|(new, &(old, _))| (old, new)).collect();
        Self { labels: self.labels.iter().map(|(&n, c)| (n, map[c])).collect() }
    }
}

/// Asynchronous label propagation on the undirected view of `graph`.
///
/// Nodes are visited in a freshly shuffled order each sweep and adopt the
/// most frequent neighbour label. A node keeps its label when that label is
/// among the most frequent; otherwise ties go to the lowest label.
pub fn label_propagation(graph: &DirectedGraph, rng_seed: u64, max_iters: usize) -> CommunityAssignment {
    let nodes: Vec<NodeId> = graph.nodes().collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let neighbours: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&n| {
            let set: BTreeSet<usize> = graph.out_neighbors(n).chain(graph.in_neighbors(n)).map(|m| index[&m]).collect();
            set.into_iter().collect()
        })
        .collect();
    let mut labels: Vec<usize> = (0..nodes.len()).collect();
    let mut rng = substream(rng_seed, LABEL_PROPAGATION);
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();

    for _ in 0..max_iters {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &i in &order {
            if neighbours[i].is_empty() {
                continue;
            }
            counts.clear();
            for &j in &neighbours[i] {
                *counts.entry(labels[j]).or_insert(0) += 1;
            }
            let best = counts.values().copied().max().expect("has neighbours");
            if counts.get(&labels[i]) == Some(&best) {
                continue;
            }
            let pick = counts.iter().find(|(_, &c)| c == best).map(|(&l, _)| l).expect("max exists");
            labels[i] = pick;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    CommunityAssignment { labels: nodes.into_iter().zip(labels).collect() }.renumbered()
}

pub fn write_assignment<W: Write>(assignment: &CommunityAssignment, mut w: W) -> io::Result<()> {
    writeln!(w, "node,community")?;
    for (n, c) in &assignment.labels {
        writeln!(w, "{n},{c}")?;
    }
    Ok(())
}

/// Parses `node,community` CSV without checking it against a graph.
pub fn read_assignment<R: Read>(reader: R) -> Result<CommunityAssignment, CommunityError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || &header[0] != "node" || &header[1] != "community" {
        return Err(FormatError::Header {
            expected: "node,community".into(),
            found: header.iter().collect::<Vec<_>>().join(","),
        }
        .into());
    }
    let mut labels = BTreeMap::new();
    for row in rdr.deserialize::<(u64, usize)>() {
        let (node, community) = row.map_err(csv_error)?;
        if labels.insert(NodeId(node), community).is_some() {
            return Err(CommunityError::Duplicate(NodeId(node)));
        }
    }
    Ok(CommunityAssignment { labels })
}

/// Parses an assignment and requires it to cover exactly the nodes of `graph`.
pub fn load_assignment<R: Read>(reader: R, graph: &DirectedGraph) -> Result<CommunityAssignment, CommunityError> {
    let a = read_assignment(reader)?;
    let unknown: Vec<NodeId> = a.labels.keys().copied().filter(|&n| !graph.contains_node(n)).collect();
    if !unknown.is_empty() {
        return Err(CommunityError::Unknown(unknown));
    }
    let missing: Vec<NodeId> = graph.nodes().filter(|n| !a.labels.contains_key(n)).collect();
    if !missing.is_empty() {
        return Err(CommunityError::Missing(missing));
    }
    Ok(a)
}

/// Communities as nodes, inter-community edge counts as weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommunityGraph {
    /// Sizes of the communities that passed the size filter.
    pub sizes: BTreeMap<usize, usize>,
    pub weights: BTreeMap<(usize, usize), u64>,
    /// Edges inside a community, before filtering.
    pub intra_edges: u64,
    /// Sum of all inter-community weights, before filtering.
    pub inter_edges: u64,
}

/// Aggregates `graph` by community. Communities smaller than `min_size` and
/// meta-edges lighter than `min_weight` are dropped.
pub fn community_graph(
    graph: &DirectedGraph,
    assignment: &CommunityAssignment,
    min_size: usize,
    min_weight: u64,
) -> Result<CommunityGraph, CommunityError> {
    let missing: Vec<NodeId> = graph.nodes().filter(|n| !assignment.labels.contains_key(n)).collect();
    if !missing.is_empty() {
        return Err(CommunityError::Missing(missing));
    }
    let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut intra = 0;
    for (s, t) in graph.edges() {
        let (a, b) = (assignment.labels[&s], assignment.labels[&t]);
        if a == b {
            intra += 1;
        } else {
            *weights.entry((a, b)).or_insert(0) += 1;
        }
    }
    let inter = weights.values().sum();
    let sizes: BTreeMap<usize, usize> = assignment.sizes().into_iter().filter(|&(_, s)| s >= min_size).collect();
    weights.retain(|(a, b), w| sizes.contains_key(a) && sizes.contains_key(b) && *w >= min_weight);
    Ok(CommunityGraph { sizes, weights, intra_edges: intra, inter_edges: inter })
}

impl CommunityGraph {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "source_community,target_community,weight")?;
        for ((a, b), wt) in &self.weights {
            writeln!(w, "{a},{b},{wt}")?;
        }
        Ok(())
    }
}

/// Evidence of posting activity.
#[derive(Clone, Copy, Debug)]
pub enum ActivityEvidence<'a> {
    Tweets(&'a [Tweet]),
    /// Uses `last_status_at`.
    Profiles(&'a Profiles),
}

/// Members per community with at least one post in `[t0, t1]`. Every
/// community of the assignment appears, possibly with zero.
pub fn active_accounts(
    assignment: &CommunityAssignment,
    t0: i64,
    t1: i64,
    evidence: ActivityEvidence<'_>,
) -> Result<BTreeMap<usize, usize>, CommunityError> {
    if t1 < t0 {
        return Err(CommunityError::Window { t0, t1 });
    }
    let active: BTreeSet<NodeId> = match evidence {
        ActivityEvidence::Tweets(tweets) => {
            tweets.iter().filter(|t| (t0..=t1).contains(&t.ts)).map(|t| t.node).collect()
        }
        ActivityEvidence::Profiles(profiles) => profiles
            .values()
            .filter(|p| p.last_status_at.is_some_and(|ts| (t0..=t1).contains(&ts)))
            .map(|p| p.node)
            .collect(),
    };
    let mut counts: BTreeMap<usize, usize> = assignment.sizes().keys().map(|&c| (c, 0)).collect();
    for (n, c) in &assignment.labels {
        if active.contains(n) {
            *counts.get_mut(c).expect("seeded") += 1;
        }
    }
    Ok(counts)
}

/// `community,size,active`; `active` is empty when no counts are given.
pub fn write_sizes_csv<W: Write>(
    sizes: &BTreeMap<usize, usize>,
    active: Option<&BTreeMap<usize, usize>>,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "community,size,active")?;
    for (c, s) in sizes {
        match active {
            Some(a) => writeln!(w, "{c},{s},{}", a.get(c).copied().unwrap_or(0))?,
            None => writeln!(w, "{c},{s},")?,
        }
    }
    Ok(())
}
