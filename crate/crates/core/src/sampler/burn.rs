use std::collections::HashSet;
use std::sync::Mutex;

use crate::graph::{Edge, NodeId};

#[derive(Default)]
struct Log {
    set: HashSet<Edge>,
    order: Vec<Edge>,
}

/// Directed edges already walked. Append-only; shared by all walkers.
#[derive(Default)]
pub struct BurnStore {
    inner: Mutex<Log>,
}

impl BurnStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_log(edges: impl IntoIterator<Item = Edge>) -> Self {
        let store = Self::new();
        for e in edges {
            store.try_burn(e);
        }
        store
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Log> {
        self.inner.lock().expect("burn store poisoned")
    }

    pub fn is_burned(&self, edge: Edge) -> bool {
        self.lock().set.contains(&edge)
    }

    /// Burns `edge`; `false` if it was already burned.
    pub fn try_burn(&self, edge: Edge) -> bool {
        let mut log = self.lock();
        let fresh = log.set.insert(edge);
        if fresh {
            log.order.push(edge);
        }
        fresh
    }

    /// Picks a target for `source` and burns the edge to it as one atomic
    /// step, so two walkers can never claim the same edge.
    pub fn claim<F>(&self, source: NodeId, choose: F) -> Option<NodeId>
    where
        F: FnOnce(&dyn Fn(Edge) -> bool) -> Option<NodeId>,
    {
        let mut log = self.lock();
        let target = {
            let set = &log.set;
            choose(&|e| set.contains(&e))
        }?;
        let fresh = log.set.insert((source, target));
        assert!(fresh, "chosen edge {source} -> {target} was already burned");
        log.order.push((source, target));
        Some(target)
    }

    pub fn len(&self) -> usize {
        self.lock().order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Burned edges in the order they were burned.
    pub fn log(&self) -> Vec<Edge> {
        self.lock().order.clone()
    }
}
