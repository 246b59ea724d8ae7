use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::NodeId;
use crate::profile::Profiles;
use crate::rng;

/// Accounts walkers may (re)start from. Draws are uniform with replacement.
#[derive(Clone, Debug)]
pub struct SeedPool {
    nodes: Vec<NodeId>,
    rng: ChaCha8Rng,
}

impl SeedPool {
    pub fn new(nodes: Vec<NodeId>, rng_seed: u64) -> Self {
        Self { nodes, rng: rng::substream(rng_seed, rng::SEED_POOL) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn draw(&mut self) -> Option<NodeId> {
        if self.nodes.is_empty() {
            return None;
        }
        let i = self.rng.random_range(0..self.nodes.len());
        Some(self.nodes[i])
    }

    /// The next `n` draws, without consuming them.
    pub fn preview(&self, n: usize) -> Vec<NodeId> {
        let mut copy = self.clone();
        (0..n).filter_map(|_| copy.draw()).collect()
    }

    /// Drops pool entries whose profile is missing or in another language.
    pub fn retain_language(&mut self, profiles: &Profiles, language: &str) {
        self.nodes.retain(|n| profiles.get(n).is_some_and(|p| p.language == language));
    }

    pub(crate) fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub(crate) fn set_word_pos(&mut self, pos: u128) {
        self.rng.set_word_pos(pos);
    }
}
