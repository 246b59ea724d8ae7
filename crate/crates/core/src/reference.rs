//! Full-knowledge rank degree sampling on undirected graphs.
//!
//! The default options follow the original method: dynamic degrees,
//! undirected edge removal, one neighbour per seed and walker collapse.
//! [`Removal::Directed`], [`Ranking::Initial`] and [`SeedSchedule::Scripted`]
//! reproduce the API walker step for step.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use thiserror::Error;

use crate::graph::{DirectedGraph, Edge, GraphError, NodeId};
use crate::rng::{substream, REFERENCE};
use crate::sampler::SampleGraph;

/// Simple undirected graph, stored as sorted adjacency sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edge_count: usize,
}

impl UndirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<I: IntoIterator<Item = (NodeId, NodeId)>>(edges: I) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Every arc becomes an undirected edge; reciprocal pairs merge.
    pub fn from_directed(graph: &DirectedGraph) -> Self {
        let mut g = Self::new();
        for n in graph.nodes() {
            g.add_node(n);
        }
        for (s, t) in graph.edges() {
            g.add_edge(s, t).expect("directed graph has no loops");
        }
        g
    }

    /// Both arcs of every edge.
    pub fn to_directed(&self) -> DirectedGraph {
        let mut d = DirectedGraph::new();
        for &n in self.adj.keys() {
            d.add_node(n);
        }
        for (u, v) in self.edges() {
            d.add_edge(u, v).expect("no loops");
            d.add_edge(v, u).expect("no loops");
        }
        d
    }

    pub fn add_node(&mut self, node: NodeId) -> bool {
        if self.adj.contains_key(&node) {
            return false;
        }
        self.adj.insert(node, BTreeSet::new());
        true
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.add_node(v);
        let fresh = self.adj.entry(u).or_default().insert(v);
        if fresh {
            self.adj.get_mut(&v).expect("added").insert(u);
            self.edge_count += 1;
        }
        Ok(fresh)
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.adj.contains_key(&node)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(&u).is_some_and(|a| a.contains(&v))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().flat_map(|(&u, a)| a.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.get(&node).into_iter().flatten().copied()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj.get(&node).map_or(0, BTreeSet::len)
    }
}

/// Which degree orders a seed's neighbours.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ranking {
    /// Degree in the working graph at selection time.
    #[default]
    Current,
    /// Degree in the input graph.
    Initial,
}

/// What a traversal deletes from the working graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Removal {
    /// The undirected edge; neither endpoint can use it again.
    #[default]
    Both,
    /// Only the traversed direction; the reverse stays walkable.
    Directed,
}

/// Neighbours selected per seed.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum TopK {
    #[default]
    One,
    /// `max(1, floor(rho * degree))` with `rho` in (0, 1].
    Proportional(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeedSchedule {
    /// Uniform draws from nodes that can still move.
    Random { rng_seed: u64 },
    /// Replacement seeds taken in order; the run ends when the list runs out.
    Scripted(Vec<NodeId>),
}

impl Default for SeedSchedule {
    fn default() -> Self {
        SeedSchedule::Random { rng_seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankDegreeConfig {
    pub initial_seeds: Vec<NodeId>,
    /// Target number of directed sample edges.
    pub sample_size: usize,
    pub top_k: TopK,
    pub ranking: Ranking,
    pub removal: Removal,
    pub collapse: bool,
    pub reseed: SeedSchedule,
}

impl RankDegreeConfig {
    pub fn new(initial_seeds: Vec<NodeId>, sample_size: usize) -> Self {
        Self {
            initial_seeds,
            sample_size,
            top_k: TopK::One,
            ranking: Ranking::Current,
            removal: Removal::Both,
            collapse: true,
            reseed: SeedSchedule::default(),
        }
    }
}

/// Options under which this sampler retraces a single API walker on a fully
/// reciprocal graph: `seeds[0]` starts, later entries replace dead ends.
pub fn bridge_config(seeds: &[NodeId], sample_size: usize) -> RankDegreeConfig {
    RankDegreeConfig {
        initial_seeds: seeds.iter().take(1).copied().collect(),
        sample_size,
        top_k: TopK::One,
        ranking: Ranking::Initial,
        removal: Removal::Directed,
        collapse: false,
        reseed: SeedSchedule::Scripted(seeds.iter().skip(1).copied().collect()),
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReferenceError {
    #[error("sample size must be positive")]
    ZeroSampleSize,
    #[error("rho must lie in (0, 1], got {0}")]
    Rho(f64),
    #[error("no initial seeds")]
    NoSeeds,
    #[error("seed {0} is not in the graph")]
    UnknownSeed(NodeId),
}

/// Result of one rank degree run.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDegreeSample {
    /// Traversed `(seed, neighbour)` pairs in selection order.
    pub picks: Vec<Edge>,
    /// Both directions of every traversed edge.
    pub sample: SampleGraph,
    pub rounds: usize,
    pub reseeds: usize,
    /// Set when the graph or seed script ran out before `sample_size`.
    pub exhausted: bool,
}

struct Working {
    graph: DirectedGraph,
    initial: BTreeMap<NodeId, usize>,
    ranking: Ranking,
}

impl Working {
    fn rank_degree(&self, node: NodeId) -> usize {
        match self.ranking {
            Ranking::Current => self.graph.out_degree(node),
            Ranking::Initial => self.initial[&node],
        }
    }

    fn top(&self, w: NodeId, k: usize) -> Vec<NodeId> {
        let mut cands: Vec<(usize, NodeId)> = self.graph.out_neighbors(w).map(|v| (self.rank_degree(v), v)).collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        cands.into_iter().take(k).map(|(_, v)| v).collect()
    }

    fn is_leaf(&self, node: NodeId) -> bool {
        self.graph.out_degree(node) == 0
    }
}

/// Runs rank degree sampling from `config.initial_seeds`.
///
/// A seed is a leaf once it has no remaining edge in the working graph.
/// When every current seed is a leaf, `initial_seeds.len()` replacements
/// are drawn from the schedule.
pub fn rank_degree(graph: &UndirectedGraph, config: &RankDegreeConfig) -> Result<RankDegreeSample, ReferenceError> {
    if config.sample_size == 0 {
        return Err(ReferenceError::ZeroSampleSize);
    }
    if let TopK::Proportional(rho) = config.top_k {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(ReferenceError::Rho(rho));
        }
    }
    if config.initial_seeds.is_empty() {
        return Err(ReferenceError::NoSeeds);
    }
    if let Some(&s) = config.initial_seeds.iter().find(|&&s| !graph.contains_node(s)) {
        return Err(ReferenceError::UnknownSeed(s));
    }

    let mut work = Working {
        graph: graph.to_directed(),
        initial: graph.nodes().map(|n| (n, graph.degree(n))).collect(),
        ranking: config.ranking,
    };
    let mut rng = match config.reseed {
        SeedSchedule::Random { rng_seed } => Some(substream(rng_seed, REFERENCE)),
        SeedSchedule::Scripted(_) => None,
    };
    let mut script = match &config.reseed {
        SeedSchedule::Scripted(s) => s.iter().copied(),
        SeedSchedule::Random { .. } => [].iter().copied(),
    };

    let mut out =
        RankDegreeSample { picks: Vec::new(), sample: SampleGraph::new(), rounds: 0, reseeds: 0, exhausted: false };
    let mut seeds = config.initial_seeds.clone();
    for &s in &seeds {
        out.sample.mark_seed(s);
    }

    loop {
        if seeds.iter().all(|&s| work.is_leaf(s)) {
            let count = config.initial_seeds.len();
            let fresh: Vec<NodeId> = match rng.as_mut() {
                Some(rng) => {
                    let movable: Vec<NodeId> = work.graph.nodes().filter(|&n| !work.is_leaf(n)).collect();
                    movable.choose_multiple(rng, count).copied().collect()
                }
                None => script.by_ref().take(count).collect(),
            };
            if fresh.is_empty() || work.graph.edge_count() == 0 {
                out.exhausted = true;
                return Ok(out);
            }
            for &s in &fresh {
                out.sample.mark_seed(s);
            }
            seeds = fresh;
            out.reseeds += 1;
            continue;
        }

        out.rounds += 1;
        let mut next = Vec::new();
        for &w in &seeds {
            let k = match config.top_k {
                TopK::One => 1,
                TopK::Proportional(rho) => ((rho * work.graph.out_degree(w) as f64).floor() as usize).max(1),
            };
            for v in work.top(w, k) {
                out.picks.push((w, v));
                out.sample.add_walked(w, v);
                out.sample.add_symmetric(v, w);
                work.graph.remove_edge(w, v);
                if config.removal == Removal::Both {
                    work.graph.remove_edge(v, w);
                }
                if out.sample.edge_count() >= config.sample_size {
                    return Ok(out);
                }
                if !(config.collapse && next.contains(&v)) {
                    next.push(v);
                }
            }
        }
        seeds = next;
    }
}
