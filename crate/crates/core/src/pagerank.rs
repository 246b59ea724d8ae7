//! PageRank by power iteration.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum PageRankError {
    #[error("pagerank of an empty graph")]
    EmptyGraph,
    #[error("damping must lie in (0, 1), got {0}")]
    Damping(f64),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankConfig<T> {
    pub damping: T,
    pub tolerance: T,
    pub max_iters: usize,
}

impl<T: Real> Default for PageRankConfig<T> {
    fn default() -> Self {
        Self { damping: T::lit(0.85), tolerance: T::lit(1e-9), max_iters: 200 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank<T> {
    pub scores: BTreeMap<NodeId, T>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub delta: T,
    /// `false` when `max_iters` ran out before the change fell below tolerance.
    pub converged: bool,
}

/// Uniform teleport; the mass of nodes without out-edges is spread uniformly.
pub fn pagerank<T: Real>(graph: &DirectedGraph, config: &PageRankConfig<T>) -> Result<PageRank<T>, PageRankError> {
    if graph.is_empty() {
        return Err(PageRankError::EmptyGraph);
    }
    let d = config.damping;
    if !(d > T::zero() && d < T::one()) {
        return Err(PageRankError::Damping(d.to_f64().unwrap_or(f64::NAN)));
    }
    if config.tolerance.is_nan() || config.tolerance <= T::zero() {
        return Err(PageRankError::Tolerance(config.tolerance.to_f64().unwrap_or(f64::NAN)));
    }

    let nodes: Vec<NodeId> = graph.nodes().collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let out: Vec<Vec<usize>> = nodes.iter().map(|&n| graph.out_neighbors(n).map(|m| index[&m]).collect()).collect();

    let count = T::from_count(nodes.len());
    let mut scores = vec![T::one() / count; nodes.len()];
    let mut next = vec![T::zero(); nodes.len()];
    let mut iterations = 0;
    let mut delta = T::infinity();

    while iterations < config.max_iters {
        iterations += 1;
        let dangling: T = out.iter().zip(&scores).filter(|(o, _)| o.is_empty()).map(|(_, &s)| s).sum();
        let base = (T::one() - d) / count + d * dangling / count;
        next.fill(base);
        for (u, targets) in out.iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let share = d * scores[u] / T::from_count(targets.len());
            for &v in targets {
                next[v] += share;
            }
        }
        delta = scores.iter().zip(&next).map(|(&a, &b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if delta < config.tolerance {
            break;
        }
    }

    Ok(PageRank {
        scores: nodes.into_iter().zip(scores).collect(),
        iterations,
        delta,
        converged: delta < config.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n(i: u64) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn cycle_is_uniform() {
        let g = DirectedGraph::from_edges((0..4).map(|i| (n(i), n((i + 1) % 4)))).unwrap();
        let pr = pagerank::<f64>(&g, &PageRankConfig::default()).unwrap();
        assert!(pr.converged);
        for s in pr.scores.values() {
            assert!((s - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn two_nodes_match_stationary_solution() {
        // a -> b with b dangling. The fixed point satisfies
        //   x_a = (1-d)/2 + d x_b / 2,  x_a + x_b = 1
        // so x_b = (1 - (1-d)/2) / (1 + d/2).
        let d = 0.85_f64;
        let xb = (1.0 - (1.0 - d) / 2.0) / (1.0 + d / 2.0);
        let xa = 1.0 - xb;

        let g = DirectedGraph::from_edges([(n(0), n(1))]).unwrap();
        let cfg = PageRankConfig { damping: d, tolerance: 1e-14, max_iters: 1000 };
        let pr = pagerank(&g, &cfg).unwrap();
        assert!((pr.scores[&n(0)] - xa).abs() < 1e-9);
        assert!((pr.scores[&n(1)] - xb).abs() < 1e-9);
    }

    #[test]
    fn works_in_single_precision() {
        let g = DirectedGraph::from_edges([(n(0), n(1)), (n(1), n(2))]).unwrap();
        let pr = pagerank::<f32>(&g, &PageRankConfig { tolerance: 1e-6, ..Default::default() }).unwrap();
        let total: f32 = pr.scores.values().sum();
        assert!((total - 1.0).abs() < 1e-5);
    }

    #[test]
    fn flags_non_convergence() {
        let g = DirectedGraph::from_edges([(n(0), n(1)), (n(1), n(2)), (n(2), n(0)), (n(0), n(2))]).unwrap();
        let pr = pagerank(&g, &PageRankConfig { damping: 0.85, tolerance: 1e-15, max_iters: 2 }).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(pagerank::<f64>(&DirectedGraph::new(), &PageRankConfig::default()), Err(PageRankError::EmptyGraph));
        let g = DirectedGraph::from_edges([(n(0), n(1))]).unwrap();
        assert!(matches!(
            pagerank(&g, &PageRankConfig { damping: 1.0, tolerance: 1e-9, max_iters: 10 }),
            Err(PageRankError::Damping(_))
        ));
    }

    #[test]
    fn random_graphs_stay_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut g = DirectedGraph::new();
            for i in 0..40u64 {
                g.add_node(n(i));
                for j in 0..40u64 {
                    if i != j && rng.random_bool(0.05) {
                        g.add_edge(n(i), n(j)).unwrap();
                    }
                }
            }
            let pr = pagerank::<f64>(&g, &PageRankConfig::default()).unwrap();
            let total: f64 = pr.scores.values().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(pr.scores.values().all(|&s| s >= 0.0));
        }
    }

    #[test]
    fn complete_digraph_is_uniform() {
        let mut g = DirectedGraph::new();
        for i in 0..6u64 {
            for j in 0..6u64 {
                if i != j {
                    g.add_edge(n(i), n(j)).unwrap();
                }
            }
        }
        let pr = pagerank::<f64>(&g, &PageRankConfig::default()).unwrap();
        for s in pr.scores.values() {
            assert!((s - 1.0 / 6.0).abs() < 1e-12);
        }
    }
}
