use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, Edge, NodeId};
use crate::io::{read_edge_list_from, FormatError};

/// How an edge entered the sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeProvenance {
    /// Traversed (and burned) by a walker.
    Walked,
    /// Reverse of a walked edge, added because the follow is mutual.
    Symmetric,
}

impl EdgeProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeProvenance::Walked => "walked",
            EdgeProvenance::Symmetric => "symmetric",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeFlags {
    pub seed: bool,
    pub walked: bool,
    pub symmetric: bool,
}

/// Edges collected by the walkers, with provenance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleGraph {
    graph: DirectedGraph,
    provenance: BTreeMap<Edge, EdgeProvenance>,
    seeds: BTreeSet<NodeId>,
}

impl SampleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a walked edge. Upgrades an earlier symmetric entry.
    pub fn add_walked(&mut self, source: NodeId, target: NodeId) -> bool {
        let fresh = self.graph.add_edge(source, target).expect("walked edge is not a loop");
        self.provenance.insert((source, target), EdgeProvenance::Walked);
        fresh
    }

    /// Records the reverse of a walked edge unless already present.
    pub fn add_symmetric(&mut self, source: NodeId, target: NodeId) -> bool {
        let fresh = self.graph.add_edge(source, target).expect("symmetric edge is not a loop");
        if fresh {
            self.provenance.insert((source, target), EdgeProvenance::Symmetric);
        }
        fresh
    }

    pub fn mark_seed(&mut self, node: NodeId) {
        self.seeds.insert(node);
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> DirectedGraph {
        self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn provenance(&self, edge: Edge) -> Option<EdgeProvenance> {
        self.provenance.get(&edge).copied()
    }

    /// Edges with provenance, ordered by edge.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, EdgeProvenance)> + '_ {
        self.provenance.iter().map(|(&e, &p)| (e, p))
    }

    /// Every node ever drawn as a seed, whether or not it contributed an edge.
    pub fn seeds(&self) -> &BTreeSet<NodeId> {
        &self.seeds
    }

    pub fn node_flags(&self, node: NodeId) -> NodeFlags {
        let seed = self.seeds.contains(&node);
        let mut walked = false;
        let mut symmetric = false;
        for src in self.graph.in_neighbors(node) {
            match self.provenance[&(src, node)] {
                EdgeProvenance::Walked => walked = true,
                EdgeProvenance::Symmetric => symmetric = true,
            }
        }
        symmetric |= self.graph.out_neighbors(node).any(|t| self.provenance[&(node, t)] == EdgeProvenance::Symmetric);
        NodeFlags { seed, walked, symmetric }
    }

    /// Seeds present in the sample without any incoming sample edge.
    pub fn unreached_seeds(&self) -> BTreeSet<NodeId> {
        self.seeds.iter().copied().filter(|&s| self.graph.contains_node(s) && self.graph.in_degree(s) == 0).collect()
    }

    /// Sample nodes with at least one incoming sample edge.
    pub fn influencer_nodes(&self) -> BTreeSet<NodeId> {
        self.graph.nodes().filter(|&n| self.graph.in_degree(n) >= 1).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "source,target,provenance")?;
        for ((s, t), p) in self.edges() {
            writeln!(w, "{s},{t},{}", p.as_str())?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()
    }

    /// Reads `source,target,provenance`; a missing provenance column reads as walked.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, FormatError> {
        let mut text = String::new();
        let mut reader = reader;
        reader.read_to_string(&mut text)?;
        let graph = read_edge_list_from(text.as_bytes())?.graph;
        let mut sample = SampleGraph { graph, ..Default::default() };
        for (idx, line) in text.lines().enumerate().skip(1) {
            let mut cols = line.split(',').map(str::trim);
            let (Some(s), Some(t)) = (cols.next(), cols.next()) else { continue };
            let (Ok(s), Ok(t)) = (s.parse::<u64>(), t.parse::<u64>()) else { continue };
            let prov = match cols.next() {
                None | Some("walked") => EdgeProvenance::Walked,
                Some("symmetric") => EdgeProvenance::Symmetric,
                Some(other) => {
                    return Err(FormatError::Malformed {
                        line: idx as u64 + 1,
                        message: format!("unknown provenance `{other}`"),
                    })
                }
            };
            sample.provenance.insert((NodeId(s), NodeId(t)), prov);
        }
        Ok(sample)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        Self::read_csv(File::open(path)?)
    }
}
