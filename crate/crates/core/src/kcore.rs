//! k-core filtering on total degree.

use std::collections::{BTreeMap, VecDeque};

use crate::graph::{DirectedGraph, NodeId};

/// Maximal subgraph in which every node has total degree (in + out) of at
/// least `k`. A reciprocal pair contributes 2 to each endpoint.
pub fn k_core(graph: &DirectedGraph, k: usize) -> DirectedGraph {
    let mut degree: BTreeMap<NodeId, usize> = graph.nodes().map(|n| (n, graph.degree(n))).collect();
    let mut queue: VecDeque<NodeId> = degree.iter().filter(|&(_, &d)| d < k).map(|(&n, _)| n).collect();
    let mut removed = std::collections::BTreeSet::new();

    while let Some(n) = queue.pop_front() {
        if !removed.insert(n) {
            continue;
        }
        for m in graph.out_neighbors(n).chain(graph.in_neighbors(n)) {
            if removed.contains(&m) {
                continue;
            }
            let d = degree.get_mut(&m).expect("neighbor is a node");
            let was = *d;
            *d -= 1;
            if was == k {
                queue.push_back(m);
            }
        }
    }

    graph.induced_subgraph(|n| !removed.contains(&n))
}

/// Core number of every node: the largest `k` whose k-core contains it.
pub fn core_numbers(graph: &DirectedGraph) -> BTreeMap<NodeId, usize> {
    let mut degree: BTreeMap<NodeId, usize> = graph.nodes().map(|n| (n, graph.degree(n))).collect();
    let mut core = BTreeMap::new();
    let mut alive: std::collections::BTreeSet<(usize, NodeId)> = degree.iter().map(|(&n, &d)| (d, n)).collect();
    let mut current = 0;
    while let Some(&(d, n)) = alive.iter().next() {
        alive.remove(&(d, n));
        current = current.max(d);
        core.insert(n, current);
        for m in graph.out_neighbors(n).chain(graph.in_neighbors(n)) {
            if core.contains_key(&m) {
                continue;
            }
            let dm = degree.get_mut(&m).expect("neighbor is a node");
            alive.remove(&(*dm, m));
            *dm -= 1;
            alive.insert((*dm, m));
        }
    }
    core
}
