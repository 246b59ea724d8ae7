//! Rank-degree walk adapted to directed follow networks.
//!
//! Each walker sits on an account `w`, fetches the most recent page of its
//! friends and moves to the friend with the most followers, subject to two
//! filters: the edge `w -> v` must not have been walked before, and `v` must
//! use the target language. The walked edge is burned and added to the
//! sample together with `v -> w` when the follow is mutual; only `w -> v` is
//! burned, so the reverse edge can still be walked later. A walker with no
//! admissible friend jumps to a fresh draw from the seed pool.
//!
//! Walkers never merge: several of them may sit on the same account and each
//! carries on by itself. Target selection and burning happen under one lock.

mod burn;
mod resume;
mod sample;
mod seeds;

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use burn::BurnStore;
pub use resume::{read_resume, write_resume, ResumeState};
pub use sample::{EdgeProvenance, NodeFlags, SampleGraph};
pub use seeds::SeedPool;

use crate::graph::{Edge, NodeId};
use crate::oracle::{CallCounts, NetworkApi, OracleError};
use crate::profile::NodeProfile;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {0}")]
    Config(String),
    #[error("seed pool is empty")]
    EmptySeedPool,
    #[error("oracle failure at node {node}: {source}")]
    Oracle {
        node: NodeId,
        #[source]
        source: OracleError,
    },
}

/// When to end a run. Checked after every completed walker step.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopConditions {
    pub max_sample_nodes: Option<usize>,
    pub max_sample_edges: Option<usize>,
    pub max_burned_edges: Option<usize>,
    pub max_simulated_seconds: Option<f64>,
    pub max_steps: Option<u64>,
    /// Ends a run after this many consecutive steps without a new burn.
    pub stall_steps: Option<u64>,
}

impl StopConditions {
    fn any_set(&self) -> bool {
        self.max_sample_nodes.is_some()
            || self.max_sample_edges.is_some()
            || self.max_burned_edges.is_some()
            || self.max_simulated_seconds.is_some()
            || self.max_steps.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub target_language: String,
    pub page_size: usize,
    pub walker_count: usize,
    pub stop: StopConditions,
    pub rng_seed: u64,
    /// Only walk to friends whose language is `target_language`.
    pub language_filter_enabled: bool,
    /// Treat a seed in another language as a dead end.
    pub seed_language_check: bool,
    pub add_symmetric_edge: bool,
    /// Single-threaded round-robin scheduling with reproducible output.
    pub deterministic: bool,
    /// Worker threads in concurrent mode; defaults to available parallelism.
    pub threads: Option<usize>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            target_language: "de".into(),
            page_size: 5000,
            walker_count: 200,
            stop: StopConditions { stall_steps: Some(100_000), ..Default::default() },
            rng_seed: 0,
            language_filter_enabled: true,
            seed_language_check: false,
            add_symmetric_edge: true,
            deterministic: true,
            threads: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !self.stop.any_set() {
            return Err(SamplerError::Config("no stop condition set".into()));
        }
        if self.walker_count == 0 {
            return Err(SamplerError::Config("walker_count must be positive".into()));
        }
        if self.page_size == 0 {
            return Err(SamplerError::Config("page_size must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(SamplerError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    fn language(&self) -> Option<&str> {
        self.language_filter_enabled.then_some(self.target_language.as_str())
    }
}

/// Position of one walker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkerState {
    pub walker_id: usize,
    pub current: NodeId,
    pub hops_since_jump: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeadEnd {
    /// No friend passed the burn and language filters.
    NoTarget,
    NotFound,
    Protected,
    /// The seed itself is in another language.
    LanguageMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Walked { from: NodeId, to: NodeId, symmetric: bool },
    Jumped { from: NodeId, to: NodeId, reason: DeadEnd },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SampleNodes,
    SampleEdges,
    BurnedEdges,
    SimulatedSeconds,
    Steps,
    Stalled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub simulated_seconds: f64,
    pub edges: usize,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: u64,
    pub walked: u64,
    pub symmetric_added: u64,
    pub jumps: u64,
    /// Steps that issued a friends lookup.
    pub friends_fetches: u64,
    /// Oracle calls charged during this run, by endpoint.
    pub calls: CallCounts,
    pub started_at: f64,
    pub finished_at: f64,
    pub simulated_seconds: f64,
    pub sample_nodes: usize,
    pub sample_edges: usize,
    pub burned_edges: usize,
    pub stop_reason: StopReason,
    #[serde(skip)]
    pub growth: Vec<GrowthPoint>,
}

impl RunStats {
    pub fn write_growth_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "simulated_seconds,edges,nodes")?;
        for p in &self.growth {
            writeln!(w, "{},{},{}", p.simulated_seconds, p.edges, p.nodes)?;
        }
        Ok(())
    }
}

/// Everything a finished run leaves behind.
#[derive(Debug)]
pub struct SampleRun {
    pub sample: SampleGraph,
    pub stats: RunStats,
    pub burn_log: Vec<Edge>,
    pub resume: ResumeState,
}

/// Picks the friend with the most followers among those reachable over an
/// unburned edge and, when `language` is set, using that language. Ties go
/// to the lowest id. Friends without a known profile are skipped.
pub fn select_target<'p, P, B>(
    source: NodeId,
    friends: &[NodeId],
    profile_of: P,
    is_burned: B,
    language: Option<&str>,
) -> Option<NodeId>
where
    P: Fn(NodeId) -> Option<&'p NodeProfile>,
    B: Fn(Edge) -> bool,
{
    friends
        .iter()
        .filter(|&&v| v != source && !is_burned((source, v)))
        .filter_map(|&v| profile_of(v).map(|p| (v, p)))
        .filter(|(_, p)| language.is_none_or(|l| p.language == l))
        .max_by(|(a, pa), (b, pb)| pa.follower_count.cmp(&pb.follower_count).then(b.cmp(a)))
        .map(|(v, _)| v)
}

#[derive(Default)]
struct ProfileCache {
    known: RwLock<HashMap<NodeId, Arc<NodeProfile>>>,
    missing: RwLock<HashSet<NodeId>>,
}

impl ProfileCache {
    fn ensure<A: NetworkApi + ?Sized>(&self, oracle: &A, nodes: &[NodeId]) -> Result<(), OracleError> {
        let wanted: Vec<NodeId> = {
            let known = self.known.read().expect("profile cache poisoned");
            let missing = self.missing.read().expect("profile cache poisoned");
            let mut seen = HashSet::new();
            nodes
                .iter()
                .copied()
                .filter(|n| !known.contains_key(n) && !missing.contains(n) && seen.insert(*n))
                .collect()
        };
        if wanted.is_empty() {
            return Ok(());
        }
        let batch = oracle.get_profiles(&wanted)?;
        let mut known = self.known.write().expect("profile cache poisoned");
        for p in batch.profiles {
            known.insert(p.node, p);
        }
        self.missing.write().expect("profile cache poisoned").extend(batch.missing);
        Ok(())
    }

    fn language_of(&self, node: NodeId) -> Option<String> {
        self.known.read().expect("profile cache poisoned").get(&node).map(|p| p.language.clone())
    }
}

#[derive(Default)]
struct Counters {
    steps: AtomicU64,
    walked: AtomicU64,
    symmetric: AtomicU64,
    jumps: AtomicU64,
    fetches: AtomicU64,
    last_progress: AtomicU64,
}

struct Collected {
    sample: SampleGraph,
    growth: Vec<GrowthPoint>,
}

/// A sampling run over one oracle.
pub struct Sampler<'a, A: NetworkApi + ?Sized> {
    oracle: &'a A,
    config: SamplerConfig,
    burn: BurnStore,
    collected: Mutex<Collected>,
    seeds: Mutex<SeedPool>,
    cache: ProfileCache,
    counters: Counters,
    origin: f64,
    calls_at_start: CallCounts,
    walkers: Vec<WalkerState>,
    next_walker: usize,
}

impl<'a, A: NetworkApi + ?Sized> Sampler<'a, A> {
    pub fn new(config: SamplerConfig, oracle: &'a A, seed_pool: SeedPool) -> Result<Self, SamplerError> {
        config.validate()?;
        if seed_pool.is_empty() {
            return Err(SamplerError::EmptySeedPool);
        }
        Ok(Self {
            oracle,
            burn: BurnStore::new(),
            collected: Mutex::new(Collected { sample: SampleGraph::new(), growth: Vec::new() }),
            seeds: Mutex::new(seed_pool),
            cache: ProfileCache::default(),
            counters: Counters::default(),
            origin: oracle.now(),
            calls_at_start: oracle.call_counts(),
            walkers: Vec::new(),
            next_walker: 0,
            config,
        })
    }

    /// Continues an interrupted run. `seed_pool` must be built from the same
    /// nodes and seed as the original run; its stream position is restored.
    pub fn resume(
        config: SamplerConfig,
        oracle: &'a A,
        mut seed_pool: SeedPool,
        state: ResumeState,
    ) -> Result<Self, SamplerError> {
        seed_pool.set_word_pos(state.seed_rng_word_pos);
        let mut s = Self::new(config, oracle, seed_pool)?;
        s.burn = BurnStore::from_log(state.burned.iter().copied());
        {
            let c = s.collected.get_mut().expect("fresh mutex");
            for &node in &state.seeds {
                c.sample.mark_seed(node);
            }
            for &((src, dst), prov) in &state.edges {
                match prov {
                    EdgeProvenance::Walked => c.sample.add_walked(src, dst),
                    EdgeProvenance::Symmetric => c.sample.add_symmetric(src, dst),
                };
            }
        }
        let k = &s.counters;
        k.steps.store(state.steps, Ordering::SeqCst);
        k.walked.store(state.walked, Ordering::SeqCst);
        k.symmetric.store(state.symmetric_added, Ordering::SeqCst);
        k.jumps.store(state.jumps, Ordering::SeqCst);
        k.fetches.store(state.friends_fetches, Ordering::SeqCst);
        k.last_progress.store(state.steps, Ordering::SeqCst);
        s.origin = state.origin;
        s.walkers = state.walkers;
        s.next_walker = state.next_walker;
        let currents: Vec<NodeId> = s.walkers.iter().map(|w| w.current).collect();
        s.fetch_profiles(&currents, None)?;
        Ok(s)
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn walkers(&self) -> &[WalkerState] {
        &self.walkers
    }

    fn fetch_profiles(&self, nodes: &[NodeId], at: Option<NodeId>) -> Result<(), SamplerError> {
        self.cache.ensure(self.oracle, nodes).map_err(|source| SamplerError::Oracle {
            node: at.or_else(|| nodes.first().copied()).unwrap_or(NodeId(0)),
            source,
        })
    }

    fn draw_seed(&self) -> NodeId {
        let seed = self.seeds.lock().expect("seed pool poisoned").draw().expect("seed pool checked non-empty");
        self.collected.lock().expect("sample poisoned").sample.mark_seed(seed);
        seed
    }

    /// Places `walker_count` walkers on independent seed draws.
    pub fn spawn_walkers(&mut self) -> Result<(), SamplerError> {
        let starts: Vec<NodeId> = (0..self.config.walker_count).map(|_| self.draw_seed()).collect();
        self.fetch_profiles(&starts, None)?;
        self.walkers = starts
            .into_iter()
            .enumerate()
            .map(|(walker_id, current)| WalkerState { walker_id, current, hops_since_jump: 0 })
            .collect();
        self.next_walker = 0;
        Ok(())
    }

    /// One step of one walker: fetch the friends page, pick and burn a
    /// target, or jump to a new seed.
    pub fn walker_step(&self, state: &mut WalkerState) -> Result<StepOutcome, SamplerError> {
        let w = state.current;
        let step = self.counters.steps.fetch_add(1, Ordering::SeqCst) + 1;

        if self.config.seed_language_check && state.hops_since_jump == 0 {
            if let Some(lang) = self.cache.language_of(w) {
                if lang != self.config.target_language {
                    return self.jump(state, DeadEnd::LanguageMismatch);
                }
            }
        }

        self.counters.fetches.fetch_add(1, Ordering::SeqCst);
        let page = match self.oracle.get_friends(w) {
            Ok(page) => page,
            Err(OracleError::NotFound(_)) => return self.jump(state, DeadEnd::NotFound),
            Err(OracleError::Protected(_)) => return self.jump(state, DeadEnd::Protected),
            Err(source) => return Err(SamplerError::Oracle { node: w, source }),
        };
        let friends = &page.friends[..page.friends.len().min(self.config.page_size)];
        self.fetch_profiles(friends, Some(w))?;

        let target = {
            let known = self.cache.known.read().expect("profile cache poisoned");
            let language = self.config.language();
            self.burn
                .claim(w, |burned| select_target(w, friends, |n| known.get(&n).map(|p| p.as_ref()), burned, language))
        };
        let Some(v) = target else {
            return self.jump(state, DeadEnd::NoTarget);
        };

        let symmetric = self.config.add_symmetric_edge
            && self.oracle.follows(v, w).map_err(|source| SamplerError::Oracle { node: v, source })?;
        let now = self.oracle.now();
        {
            let mut c = self.collected.lock().expect("sample poisoned");
            let before = c.sample.edge_count();
            c.sample.add_walked(w, v);
            if symmetric && c.sample.add_symmetric(v, w) {
                self.counters.symmetric.fetch_add(1, Ordering::SeqCst);
            }
            if c.sample.edge_count() != before {
                let point = GrowthPoint {
                    simulated_seconds: now - self.origin,
                    edges: c.sample.edge_count(),
                    nodes: c.sample.node_count(),
                };
                c.growth.push(point);
            }
        }
        self.counters.walked.fetch_add(1, Ordering::SeqCst);
        self.counters.last_progress.fetch_max(step, Ordering::SeqCst);
        state.current = v;
        state.hops_since_jump += 1;
        Ok(StepOutcome::Walked { from: w, to: v, symmetric })
    }

    fn jump(&self, state: &mut WalkerState, reason: DeadEnd) -> Result<StepOutcome, SamplerError> {
        let from = state.current;
        let to = self.draw_seed();
        self.fetch_profiles(&[to], Some(to))?;
        self.counters.jumps.fetch_add(1, Ordering::SeqCst);
        state.current = to;
        state.hops_since_jump = 0;
        Ok(StepOutcome::Jumped { from, to, reason })
    }

    /// First stop condition that currently holds.
    pub fn stop_reason(&self) -> Option<StopReason> {
        let stop = &self.config.stop;
        let (nodes, edges) = {
            let c = self.collected.lock().expect("sample poisoned");
            (c.sample.node_count(), c.sample.edge_count())
        };
        let steps = self.counters.steps.load(Ordering::SeqCst);
        if stop.max_sample_edges.is_some_and(|m| edges >= m) {
            return Some(StopReason::SampleEdges);
        }
        if stop.max_sample_nodes.is_some_and(|m| nodes >= m) {
            return Some(StopReason::SampleNodes);
        }
        if stop.max_burned_edges.is_some_and(|m| self.burn.len() >= m) {
            return Some(StopReason::BurnedEdges);
        }
        if stop.max_simulated_seconds.is_some_and(|m| self.oracle.now() - self.origin >= m) {
            return Some(StopReason::SimulatedSeconds);
        }
        if stop.max_steps.is_some_and(|m| steps >= m) {
            return Some(StopReason::Steps);
        }
        let idle = steps - self.counters.last_progress.load(Ordering::SeqCst).min(steps);
        if stop.stall_steps.is_some_and(|m| idle >= m) {
            return Some(StopReason::Stalled);
        }
        None
    }

    /// Steps the walkers until a stop condition holds.
    pub fn run(mut self) -> Result<SampleRun, SamplerError> {
        if let Some(reason) = self.stop_reason() {
            return Ok(self.finish(reason));
        }
        if self.walkers.is_empty() {
            self.spawn_walkers()?;
        }
        let reason = if self.config.deterministic { self.run_round_robin()? } else { self.run_concurrent()? };
        Ok(self.finish(reason))
    }

    fn run_round_robin(&mut self) -> Result<StopReason, SamplerError> {
        let mut walkers = std::mem::take(&mut self.walkers);
        let mut i = self.next_walker % walkers.len();
        let reason = loop {
            self.walker_step(&mut walkers[i])?;
            i = (i + 1) % walkers.len();
            if let Some(reason) = self.stop_reason() {
                break reason;
            }
        };
        self.walkers = walkers;
        self.next_walker = i;
        Ok(reason)
    }

    fn run_concurrent(&mut self) -> Result<StopReason, SamplerError> {
        let mut walkers = std::mem::take(&mut self.walkers);
        let threads = self
            .config
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(4, |n| n.get()))
            .min(walkers.len());
        let chunk = walkers.len().div_ceil(threads);
        let stop = AtomicBool::new(false);
        let reason: Mutex<Option<StopReason>> = Mutex::new(None);
        let failure: Mutex<Option<SamplerError>> = Mutex::new(None);

        std::thread::scope(|scope| {
            for group in walkers.chunks_mut(chunk) {
                let (this, stop, reason, failure) = (&*self, &stop, &reason, &failure);
                scope.spawn(move || {
                    'run: while !stop.load(Ordering::SeqCst) {
                        for walker in group.iter_mut() {
                            if stop.load(Ordering::SeqCst) {
                                break 'run;
                            }
                            if let Err(e) = this.walker_step(walker) {
                                failure.lock().expect("poisoned").get_or_insert(e);
                                stop.store(true, Ordering::SeqCst);
                                break 'run;
                            }
                            if let Some(r) = this.stop_reason() {
                                reason.lock().expect("poisoned").get_or_insert(r);
                                stop.store(true, Ordering::SeqCst);
                                break 'run;
                            }
                        }
                    }
                });
            }
        });

        self.walkers = walkers;
        self.next_walker = 0;
        if let Some(e) = failure.into_inner().expect("poisoned") {
            return Err(e);
        }
        Ok(reason.into_inner().expect("poisoned").expect("loop ends on a stop reason"))
    }

    fn finish(self, stop_reason: StopReason) -> SampleRun {
        let now = self.oracle.now();
        let calls_now = self.oracle.call_counts();
        let Collected { sample, growth } = self.collected.into_inner().expect("sample poisoned");
        let k = &self.counters;
        let burn_log = self.burn.log();
        let stats = RunStats {
            steps: k.steps.load(Ordering::SeqCst),
            walked: k.walked.load(Ordering::SeqCst),
            symmetric_added: k.symmetric.load(Ordering::SeqCst),
            jumps: k.jumps.load(Ordering::SeqCst),
            friends_fetches: k.fetches.load(Ordering::SeqCst),
            calls: CallCounts {
                friends: calls_now.friends - self.calls_at_start.friends,
                profiles: calls_now.profiles - self.calls_at_start.profiles,
            },
            started_at: self.origin,
            finished_at: now,
            simulated_seconds: now - self.origin,
            sample_nodes: sample.node_count(),
            sample_edges: sample.edge_count(),
            burned_edges: burn_log.len(),
            stop_reason,
            growth,
        };
        let resume = ResumeState {
            origin: self.origin,
            now,
            steps: stats.steps,
            walked: stats.walked,
            symmetric_added: stats.symmetric_added,
            jumps: stats.jumps,
            friends_fetches: stats.friends_fetches,
            next_walker: self.next_walker,
            seed_rng_word_pos: self.seeds.into_inner().expect("seed pool poisoned").word_pos(),
            burned: burn_log.clone(),
            edges: sample.edges().collect(),
            seeds: sample.seeds().iter().copied().collect(),
            walkers: self.walkers,
        };
        SampleRun { sample, stats, burn_log, resume }
    }
}

/// Runs a fresh sampling job to completion.
pub fn run_sample<A: NetworkApi + ?Sized>(
    config: SamplerConfig,
    oracle: &A,
    seed_pool: SeedPool,
) -> Result<SampleRun, SamplerError> {
    Sampler::new(config, oracle, seed_pool)?.run()
}
