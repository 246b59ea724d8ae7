//! Synthetic ground truth: follow graphs, consistent profiles and tweets.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, LogNormal, Poisson, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, Edge, NodeId};
use crate::keywords::Tweet;
use crate::profile::{NodeProfile, Profiles};
use crate::rng::{substream, GENERATOR, PROFILES, TWEETS};

const DAY: i64 = 86_400;
/// 2007-01-01T00:00:00Z.
const EARLIEST_ACCOUNT: i64 = 1_167_609_600;
/// 2019-06-01T00:00:00Z.
pub const DEFAULT_OBSERVED_AT: i64 = 1_559_347_200;

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    Param(String),
}

fn param(msg: impl Into<String>) -> GenerateError {
    GenerateError::Param(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    /// New nodes follow `edges_per_node` existing nodes with probability
    /// proportional to in-degree + 1. The first `edges_per_node` nodes start
    /// without edges, so the graph has `(nodes - m) * m` edges.
    PreferentialAttachment { nodes: usize, edges_per_node: usize },
    /// Each unordered pair is linked in both directions with probability `p`.
    ReciprocalEr { nodes: usize, p: f64 },
    /// A small class of nodes is `factor` times as likely to be followed.
    TwoClass { nodes: usize, influencer_fraction: f64, factor: f64, mean_out_degree: f64 },
}

/// Model plus optional group structure.
///
/// Node `i` belongs to group `i % groups`. With probability `homophily` a
/// new edge is drawn inside the source's group; reciprocal-ER ignores groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub model: Model,
    #[serde(default = "one")]
    pub groups: usize,
    #[serde(default)]
    pub homophily: f64,
}

fn one() -> usize {
    1
}

impl GraphSpec {
    pub fn new(model: Model) -> Self {
        Self { model, groups: 1, homophily: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticGraph {
    pub graph: DirectedGraph,
    /// Edges in the order they were created.
    pub edge_order: Vec<Edge>,
    pub group_of: BTreeMap<NodeId, usize>,
    /// High-weight class of the two-class model; empty otherwise.
    pub influencers: BTreeSet<NodeId>,
}

pub fn generate_graph(spec: &GraphSpec, rng_seed: u64) -> Result<SyntheticGraph, GenerateError> {
    if spec.groups == 0 {
        return Err(param("groups must be at least 1"));
    }
    if !(0.0..=1.0).contains(&spec.homophily) {
        return Err(param("homophily must lie in [0, 1]"));
    }
    let mut rng = substream(rng_seed, GENERATOR);
    let n = match spec.model {
        Model::PreferentialAttachment { nodes, .. }
        | Model::ReciprocalEr { nodes, .. }
        | Model::TwoClass { nodes, .. } => nodes,
    };
    let group_of: BTreeMap<NodeId, usize> = (0..n).map(|i| (NodeId(i as u64), i % spec.groups)).collect();
    let mut out =
        SyntheticGraph { graph: DirectedGraph::new(), edge_order: Vec::new(), group_of, influencers: BTreeSet::new() };
    for i in 0..n {
        out.graph.add_node(NodeId(i as u64));
    }
    match spec.model {
        Model::PreferentialAttachment { nodes, edges_per_node } => {
            preferential_attachment(&mut out, nodes, edges_per_node, spec, &mut rng)?
        }
        Model::ReciprocalEr { nodes, p } => reciprocal_er(&mut out, nodes, p, &mut rng)?,
        Model::TwoClass { nodes, influencer_fraction, factor, mean_out_degree } => {
            two_class(&mut out, nodes, influencer_fraction, factor, mean_out_degree, spec, &mut rng)?
        }
    }
    Ok(out)
}

fn push(out: &mut SyntheticGraph, s: NodeId, t: NodeId) {
    if out.graph.add_edge(s, t).expect("generators avoid loops") {
        out.edge_order.push((s, t));
    }
}

fn preferential_attachment(
    out: &mut SyntheticGraph,
    n: usize,
    m: usize,
    spec: &GraphSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(), GenerateError> {
    if m == 0 || m >= n {
        return Err(param("preferential attachment needs 0 < edges_per_node < nodes"));
    }
    // every node appears once, plus once per follower
    let mut global: Vec<NodeId> = Vec::new();
    let mut by_group: Vec<Vec<NodeId>> = vec![Vec::new(); spec.groups];
    let mut members = vec![0usize; spec.groups];
    for i in 0..m {
        let g = i % spec.groups;
        global.push(NodeId(i as u64));
        by_group[g].push(NodeId(i as u64));
        members[g] += 1;
    }
    for i in m..n {
        let source = NodeId(i as u64);
        let g = i % spec.groups;
        let local_ok = members[g] >= m;
        let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
        while chosen.len() < m {
            let pool = if local_ok && rng.random_bool(spec.homophily) { &by_group[g] } else { &global };
            let t = pool[rng.random_range(0..pool.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            push(out, source, t);
            let tg = out.group_of[&t];
            global.push(t);
            by_group[tg].push(t);
        }
        global.push(source);
        by_group[g].push(source);
        members[g] += 1;
    }
    Ok(())
}

fn reciprocal_er(out: &mut SyntheticGraph, n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<(), GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param("edge probability must lie in [0, 1]"));
    }
    for i in 0..n as u64 {
        for j in i + 1..n as u64 {
            if rng.random_bool(p) {
                push(out, NodeId(i), NodeId(j));
                push(out, NodeId(j), NodeId(i));
            }
        }
    }
    Ok(())
}

fn two_class(
    out: &mut SyntheticGraph,
    n: usize,
    fraction: f64,
    factor: f64,
    mean_out: f64,
    spec: &GraphSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(), GenerateError> {
    if n < 2 {
        return Err(param("two-class model needs at least 2 nodes"));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(param("influencer fraction must lie in [0, 1]"));
    }
    if !(factor >= 1.0 && factor.is_finite()) {
        return Err(param("factor must be at least 1"));
    }
    if !(mean_out > 0.0 && mean_out.is_finite()) {
        return Err(param("mean out-degree must be positive"));
    }
    let k = ((fraction * n as f64).round() as usize).max(usize::from(fraction > 0.0));
    out.influencers = index::sample(rng, n, k).into_iter().map(|i| NodeId(i as u64)).collect();
    let weight = |i: usize| if out.influencers.contains(&NodeId(i as u64)) { factor } else { 1.0 };

    let all: Vec<usize> = (0..n).collect();
    let global = WeightedIndex::new(all.iter().map(|&i| weight(i))).expect("positive weights");
    let groups: Vec<(Vec<usize>, WeightedIndex<f64>)> = (0..spec.groups)
        .map(|g| {
            let ids: Vec<usize> = (g..n).step_by(spec.groups).collect();
            let w = WeightedIndex::new(ids.iter().map(|&i| weight(i))).unwrap_or_else(|_| global.clone());
            (ids, w)
        })
        .collect();
    let degree = Poisson::new(mean_out).map_err(|e| param(e.to_string()))?;

    for i in 0..n {
        let source = NodeId(i as u64);
        let (ids, local) = &groups[i % spec.groups];
        let d = (degree.sample(rng) as usize).min(n - 1);
        let local_ok = ids.len() > d + 1;
        let mut chosen: Vec<usize> = Vec::with_capacity(d);
        while chosen.len() < d {
            let t =
                if local_ok && rng.random_bool(spec.homophily) { ids[local.sample(rng)] } else { global.sample(rng) };
            if t != i && !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for t in chosen {
            push(out, source, NodeId(t as u64));
        }
    }
    Ok(())
}

/// How profiles are derived from a synthetic graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileSpec {
    pub language: String,
    /// Share of nodes using `language`; the rest use `other_language`.
    pub language_fraction: f64,
    pub other_language: String,
    pub protected_fraction: f64,
    /// Standard deviation of a log-normal factor applied to follower counts.
    pub follower_noise: Option<f64>,
    pub observed_at: i64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            language: "de".into(),
            language_fraction: 1.0,
            other_language: "en".into(),
            protected_fraction: 0.0,
            follower_noise: None,
            observed_at: DEFAULT_OBSERVED_AT,
        }
    }
}

/// Profiles whose follower counts equal in-degree and whose friend lists
/// run from the newest edge to the oldest.
pub fn generate_profiles(synth: &SyntheticGraph, spec: &ProfileSpec, rng_seed: u64) -> Result<Profiles, GenerateError> {
    for (name, f) in [("language", spec.language_fraction), ("protected", spec.protected_fraction)] {
        if !(0.0..=1.0).contains(&f) {
            return Err(param(format!("{name} fraction must lie in [0, 1]")));
        }
    }
    let noise = match spec.follower_noise {
        Some(sigma) => Some(LogNormal::new(0.0, sigma).map_err(|e| param(e.to_string()))?),
        None => None,
    };
    let mut rng = substream(rng_seed, PROFILES);
    let mut friends: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(s, t) in synth.edge_order.iter().rev() {
        friends.entry(s).or_default().push(t);
    }
    let rate_noise = LogNormal::new(0.0, 1.0).expect("valid");
    let latest_creation = spec.observed_at - 30 * DAY;

    let mut profiles = Profiles::new();
    for node in synth.graph.nodes() {
        let in_degree = synth.graph.in_degree(node) as u64;
        let follower_count = match &noise {
            Some(d) => (in_degree as f64 * d.sample(&mut rng)).round() as u64,
            None => in_degree,
        };
        let language = if rng.random_bool(spec.language_fraction) { &spec.language } else { &spec.other_language };
        let protected = rng.random_bool(spec.protected_fraction);
        let created_at = rng.random_range(EARLIEST_ACCOUNT..=latest_creation.max(EARLIEST_ACCOUNT));
        let age_days = (spec.observed_at - created_at) as f64 / DAY as f64;
        let per_day = 0.05 * (1.0 + in_degree as f64).sqrt() * rate_noise.sample(&mut rng);
        let status_count = (per_day * age_days).round() as u64;
        let last_status_at = (status_count > 0).then(|| {
            let gap = Exp::new(per_day).expect("positive rate").sample(&mut rng).min(age_days);
            spec.observed_at - (gap * DAY as f64) as i64
        });
        profiles.insert(
            node,
            NodeProfile {
                node,
                follower_count,
                friends_recent_first: friends.remove(&node).unwrap_or_default(),
                language: language.clone(),
                protected,
                created_at,
                status_count,
                last_status_at,
            },
        );
    }
    Ok(profiles)
}

/// Profiles for an arbitrary graph: follower count = in-degree, friends by
/// descending id, everything else fixed.
pub fn closed_world_profiles(graph: &DirectedGraph, language: &str) -> Profiles {
    graph
        .nodes()
        .map(|node| {
            let p = NodeProfile {
                node,
                follower_count: graph.in_degree(node) as u64,
                friends_recent_first: graph.out_neighbors(node).collect::<Vec<_>>().into_iter().rev().collect(),
                language: language.into(),
                protected: false,
                created_at: EARLIEST_ACCOUNT,
                status_count: 0,
                last_status_at: None,
            };
            (node, p)
        })
        .collect()
}

/// Parameters of the synthetic tweet corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TweetSpec {
    pub mean_per_node: f64,
    pub start: i64,
    pub end: i64,
    pub vocabulary: usize,
    /// Probability that a word comes from the author's group vocabulary.
    pub topic_share: f64,
    pub topic_words: usize,
}

impl Default for TweetSpec {
    fn default() -> Self {
        Self {
            mean_per_node: 20.0,
            start: DEFAULT_OBSERVED_AT - 7 * DAY,
            end: DEFAULT_OBSERVED_AT,
            vocabulary: 2000,
            topic_share: 0.25,
            topic_words: 30,
        }
    }
}

const SYLLABLES: [&str; 16] =
    ["ka", "lo", "mi", "ne", "ru", "sa", "ti", "ve", "zu", "bo", "da", "fe", "gi", "ho", "ja", "pu"];
const FILLERS: [&str; 8] = ["und", "der", "die", "das", "ist", "nicht", "mit", "auf"];

fn word(mut k: usize) -> String {
    let mut w = String::new();
    for _ in 0..3 {
        w.push_str(SYLLABLES[k % SYLLABLES.len()]);
        k /= SYLLABLES.len();
    }
    while k > 0 {
        w.push_str(SYLLABLES[k % SYLLABLES.len()]);
        k /= SYLLABLES.len();
    }
    w
}

/// Tweets for every unprotected node. Each group has its own topic words
/// and hashtags on top of a shared Zipf-distributed vocabulary.
pub fn generate_tweets(
    synth: &SyntheticGraph,
    profiles: &Profiles,
    spec: &TweetSpec,
    rng_seed: u64,
) -> Result<Vec<Tweet>, GenerateError> {
    if spec.end < spec.start {
        return Err(param("tweet window end precedes start"));
    }
    if spec.vocabulary == 0 || spec.topic_words == 0 {
        return Err(param("vocabulary sizes must be positive"));
    }
    if !(0.0..=1.0).contains(&spec.topic_share) {
        return Err(param("topic share must lie in [0, 1]"));
    }
    let mut rng = substream(rng_seed, TWEETS);
    let count = Poisson::new(spec.mean_per_node).map_err(|e| param(e.to_string()))?;
    let zipf = Zipf::new(spec.vocabulary as f64, 1.1).map_err(|e| param(e.to_string()))?;
    let mut tweets = Vec::new();
    for node in synth.graph.nodes() {
        if profiles.get(&node).is_some_and(|p| p.protected) {
            continue;
        }
        let group = synth.group_of.get(&node).copied().unwrap_or(0);
        let topic_base = 1_000_000 + group * spec.topic_words;
        for _ in 0..count.sample(&mut rng) as usize {
            let ts = rng.random_range(spec.start..=spec.end);
            let len = rng.random_range(6..16);
            let mut words: Vec<String> = Vec::with_capacity(len + 1);
            for _ in 0..len {
                let w = if rng.random_bool(spec.topic_share) {
                    word(topic_base + rng.random_range(0..spec.topic_words))
                } else if rng.random_bool(0.2) {
                    FILLERS[rng.random_range(0..FILLERS.len())].to_string()
                } else {
                    word(zipf.sample(&mut rng) as usize - 1)
                };
                words.push(w);
            }
            if rng.random_bool(0.3) {
                words.push(format!("#{}", word(topic_base + rng.random_range(0..spec.topic_words.min(5)))));
            }
            tweets.push(Tweet { node, ts, text: words.join(" ") });
        }
    }
    Ok(tweets)
}

/// Stopwords matching the filler words of [`generate_tweets`].
pub fn filler_stopwords() -> HashSet<String> {
    FILLERS.iter().map(|s| s.to_string()).collect()
}
