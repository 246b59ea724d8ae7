//! The network API the sampler talks to.
//!
//! [`SimulatedOracle`] answers from a fixed ground-truth graph and profile
//! table, charging every call against per-key, per-endpoint rate budgets on a
//! simulated clock. A call that finds every key exhausted does not fail: the
//! clock jumps to the earliest window expiry and the call proceeds.

mod budget;
mod clock;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use budget::{RateBudget, RateLimit};
pub use clock::SimulatedClock;

use crate::graph::{DirectedGraph, NodeId};
use crate::profile::{NodeProfile, Profiles};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("node {0} not found")]
    NotFound(NodeId),
    #[error("node {0} is protected")]
    Protected(NodeId),
    #[error("oracle failure: {0}")]
    Other(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("profiles inconsistent with graph at nodes {nodes:?}")]
pub struct ConsistencyError {
    pub nodes: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Friends,
    Profiles,
}

/// One page of a node's friends, most recent first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FriendsPage {
    pub friends: Vec<NodeId>,
    /// The node follows more accounts than fit on one page.
    pub truncated: bool,
}

/// Result of a profile lookup; unknown ids are listed rather than failing the batch.
#[derive(Clone, Debug, Default)]
pub struct ProfileBatch {
    pub profiles: Vec<Arc<NodeProfile>>,
    pub missing: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCounts {
    pub friends: u64,
    pub profiles: u64,
}

/// What a walker needs from the platform.
pub trait NetworkApi: Send + Sync {
    /// Most recent friends of `node`, up to the page size. One call.
    fn get_friends(&self, node: NodeId) -> Result<FriendsPage, OracleError>;

    /// Profiles for `nodes`, charged per batch.
    fn get_profiles(&self, nodes: &[NodeId]) -> Result<ProfileBatch, OracleError>;

    fn get_profile(&self, node: NodeId) -> Result<Arc<NodeProfile>, OracleError> {
        self.get_profiles(&[node])?.profiles.pop().ok_or(OracleError::NotFound(node))
    }

    /// Whether `source` follows `target`. Not charged: answered from the
    /// fixed friend-connection cache.
    fn follows(&self, source: NodeId, target: NodeId) -> Result<bool, OracleError>;

    /// Current simulated time in seconds.
    fn now(&self) -> f64;

    fn call_counts(&self) -> CallCounts;
}

/// Budget and paging parameters. A `None` limit means unlimited.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub key_count: usize,
    pub friends_limit: Option<RateLimit>,
    pub profiles_limit: Option<RateLimit>,
    pub page_size: usize,
    pub profile_batch: usize,
    pub clock_start: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            key_count: 12,
            friends_limit: Some(RateLimit::FRIENDS),
            profiles_limit: Some(RateLimit::PROFILES),
            page_size: 5000,
            profile_batch: 100,
            clock_start: 0.0,
        }
    }
}

impl OracleConfig {
    /// No rate limits and one key; the clock never moves.
    pub fn unlimited() -> Self {
        Self { key_count: 1, friends_limit: None, profiles_limit: None, ..Self::default() }
    }
}

/// One charged call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub t: f64,
    pub key: usize,
    pub endpoint: Endpoint,
    pub nodes: Vec<NodeId>,
    /// Calls left on this key in the current window; `None` when unlimited.
    pub calls_remaining: Option<u32>,
    /// Friend ids returned (friends endpoint only).
    #[serde(default)]
    pub records: usize,
}

struct State {
    clock: SimulatedClock,
    friends: Option<RateBudget>,
    profiles: Option<RateBudget>,
    log: Vec<CallRecord>,
    counts: CallCounts,
}

impl State {
    fn charge(&mut self, endpoint: Endpoint, nodes: Vec<NodeId>, records: usize) {
        let budget = match endpoint {
            Endpoint::Friends => self.friends.as_mut(),
            Endpoint::Profiles => self.profiles.as_mut(),
        };
        let (key, calls_remaining) = match budget {
            Some(b) => {
                let (k, left) = b.acquire(&mut self.clock);
                (k, Some(left))
            }
            None => (0, None),
        };
        match endpoint {
            Endpoint::Friends => self.counts.friends += 1,
            Endpoint::Profiles => self.counts.profiles += 1,
        }
        self.log.push(CallRecord { t: self.clock.now(), key, endpoint, nodes, calls_remaining, records });
    }
}

/// API simulator over a static snapshot of the network.
pub struct SimulatedOracle {
    graph: DirectedGraph,
    profiles: BTreeMap<NodeId, Arc<NodeProfile>>,
    config: OracleConfig,
    state: Mutex<State>,
}

impl SimulatedOracle {
    /// Checks that every node has a profile and that every profile's friend
    /// list is exactly the node's out-neighbourhood. Profiles of nodes absent
    /// from the graph are admitted as isolated accounts.
    pub fn new(graph: &DirectedGraph, profiles: &Profiles, config: OracleConfig) -> Result<Self, ConsistencyError> {
        assert!(config.page_size > 0 && config.profile_batch > 0 && config.key_count > 0);
        let mut bad = BTreeSet::new();
        let mut graph = graph.clone();
        for (&node, p) in profiles {
            if p.node != node || p.check().is_err() {
                bad.insert(node);
            }
            graph.add_node(node);
        }
        for node in graph.nodes() {
            match profiles.get(&node) {
                None => {
                    bad.insert(node);
                }
                Some(p) => {
                    let listed: BTreeSet<NodeId> = p.friends_recent_first.iter().copied().collect();
                    let actual: BTreeSet<NodeId> = graph.out_neighbors(node).collect();
                    if listed != actual || listed.len() != p.friends_recent_first.len() {
                        bad.insert(node);
                    }
                }
            }
        }
        if !bad.is_empty() {
            return Err(ConsistencyError { nodes: bad.into_iter().collect() });
        }

        let state = State {
            clock: SimulatedClock::starting_at(config.clock_start),
            friends: config.friends_limit.map(|l| RateBudget::new(l, config.key_count)),
            profiles: config.profiles_limit.map(|l| RateBudget::new(l, config.key_count)),
            log: Vec::new(),
            counts: CallCounts::default(),
        };
        Ok(Self {
            graph,
            profiles: profiles.iter().map(|(&n, p)| (n, Arc::new(p.clone()))).collect(),
            config,
            state: Mutex::new(state),
        })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Copy of the call log so far.
    pub fn call_log(&self) -> Vec<CallRecord> {
        self.lock().log.clone()
    }

    /// Moves the simulated clock forward, e.g. between collection sessions.
    pub fn advance_clock(&self, seconds: f64) {
        self.lock().clock.advance(seconds);
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().expect("oracle state poisoned")
    }
}

impl NetworkApi for SimulatedOracle {
    fn get_friends(&self, node: NodeId) -> Result<FriendsPage, OracleError> {
        let profile = self.profiles.get(&node);
        let outcome = match profile {
            None => Err(OracleError::NotFound(node)),
            Some(p) if p.protected => Err(OracleError::Protected(node)),
            Some(p) => {
                let all = &p.friends_recent_first;
                let take = all.len().min(self.config.page_size);
                Ok(FriendsPage { friends: all[..take].to_vec(), truncated: all.len() > take })
            }
        };
        let records = outcome.as_ref().map_or(0, |page| page.friends.len());
        self.lock().charge(Endpoint::Friends, vec![node], records);
        outcome
    }

    fn get_profiles(&self, nodes: &[NodeId]) -> Result<ProfileBatch, OracleError> {
        let mut batch = ProfileBatch::default();
        if nodes.is_empty() {
            return Ok(batch);
        }
        let mut state = self.lock();
        for chunk in nodes.chunks(self.config.profile_batch) {
            state.charge(Endpoint::Profiles, chunk.to_vec(), 0);
            for n in chunk {
                match self.profiles.get(n) {
                    Some(p) => batch.profiles.push(Arc::clone(p)),
                    None => batch.missing.push(*n),
                }
            }
        }
        Ok(batch)
    }

    fn follows(&self, source: NodeId, target: NodeId) -> Result<bool, OracleError> {
        Ok(self.graph.contains_edge(source, target))
    }

    fn now(&self) -> f64 {
        self.lock().clock.now()
    }

    fn call_counts(&self) -> CallCounts {
        self.lock().counts
    }
}

pub fn write_call_log<W: Write>(log: &[CallRecord], mut w: W) -> io::Result<()> {
    for r in log {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

/// A key that held more than the allowed calls inside one window.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("key {key} made {calls} {endpoint:?} calls in the window ending at t = {at}")]
pub struct BudgetViolation {
    pub key: usize,
    pub endpoint: Endpoint,
    pub at: f64,
    pub calls: usize,
}

/// Largest number of calls any single key made on `endpoint` within any
/// half-open window `(t - window, t]`, with the key and instant where it
/// occurred. The maximum is always attained at a call instant.
pub fn peak_window_load(log: &[CallRecord], endpoint: Endpoint, window_seconds: f64) -> Option<BudgetViolation> {
    let mut per_key: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in log.iter().filter(|r| r.endpoint == endpoint) {
        per_key.entry(r.key).or_default().push(r.t);
    }
    let mut peak: Option<BudgetViolation> = None;
    for (key, mut times) in per_key {
        times.sort_by(f64::total_cmp);
        let mut lo = 0;
        for hi in 0..times.len() {
            while times[lo] <= times[hi] - window_seconds {
                lo += 1;
            }
            // Later calls at the same instant belong to this window too.
            let mut end = hi;
            while end + 1 < times.len() && times[end + 1] == times[hi] {
                end += 1;
            }
            let calls = end - lo + 1;
            if peak.as_ref().is_none_or(|p| calls > p.calls) {
                peak = Some(BudgetViolation { key, endpoint, at: times[hi], calls });
            }
        }
    }
    peak
}

/// Replays a call log against a limit.
pub fn verify_budget(log: &[CallRecord], endpoint: Endpoint, limit: RateLimit) -> Result<(), BudgetViolation> {
    match peak_window_load(log, endpoint, limit.window_seconds) {
        Some(p) if p.calls > limit.calls_per_window as usize => Err(p),
        _ => Ok(()),
    }
}

/// Most friend records retrieved across all keys in any window `(t - window, t]`.
pub fn peak_friend_records(log: &[CallRecord], window_seconds: f64) -> usize {
    let mut calls: Vec<(f64, usize)> =
        log.iter().filter(|r| r.endpoint == Endpoint::Friends).map(|r| (r.t, r.records)).collect();
    calls.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0;
    let mut lo = 0;
    let mut sum = 0;
    let mut hi = 0;
    while hi < calls.len() {
        let t = calls[hi].0;
        while hi < calls.len() && calls[hi].0 == t {
            sum += calls[hi].1;
            hi += 1;
        }
        while calls[lo].0 <= t - window_seconds {
            sum -= calls[lo].1;
            lo += 1;
        }
        best = best.max(sum);
    }
    best
}
