use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

/// Per-account metadata as served by the network API.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeProfile {
    pub node: NodeId,
    pub follower_count: u64,
    /// Accounts this node follows, most recently followed first.
    pub friends_recent_first: Vec<NodeId>,
    pub language: String,
    pub protected: bool,
    /// Account creation, unix seconds.
    pub created_at: i64,
    pub status_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_status_at: Option<i64>,
}

pub type Profiles = BTreeMap<NodeId, NodeProfile>;

impl NodeProfile {
    /// Reason the profile breaks its own invariants, if any.
    pub fn check(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::with_capacity(self.friends_recent_first.len());
        for &f in &self.friends_recent_first {
            if f == self.node {
                return Err(format!("node {} lists itself as a friend", self.node));
            }
            if !seen.insert(f) {
                return Err(format!("node {} lists friend {} twice", self.node, f));
            }
        }
        Ok(())
    }
}
