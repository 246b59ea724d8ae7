//! Flat run configuration shared by every command.

use std::path::PathBuf;

use rankwalk::generate::{GraphSpec, Model, ProfileSpec, TweetSpec, DEFAULT_OBSERVED_AT};
use rankwalk::keywords::CapRule;
use rankwalk::oracle::{OracleConfig, RateLimit};
use rankwalk::sampler::{SamplerConfig, StopConditions};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

const DAY: i64 = 86_400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    PreferentialAttachment,
    ReciprocalEr,
    TwoClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rng_seed: u64,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,

    // inputs; unset paths fall back to the standard file names in out_dir
    pub graph: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    pub seed_pool: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub sample: Option<PathBuf>,
    pub core: Option<PathBuf>,
    pub assignment: Option<PathBuf>,

    // generate
    pub model: ModelKind,
    pub nodes: usize,
    pub edges_per_node: usize,
    pub edge_probability: f64,
    pub influencer_fraction: f64,
    pub influence_factor: f64,
    pub mean_out_degree: f64,
    pub groups: usize,
    pub homophily: f64,
    pub language_fraction: f64,
    pub other_language: String,
    pub protected_fraction: f64,
    pub follower_noise: Option<f64>,
    pub observed_at: i64,
    pub tweets_per_node: f64,
    pub tweet_start: Option<i64>,
    pub tweet_end: Option<i64>,
    pub vocabulary: usize,
    pub topic_share: f64,
    pub topic_words: usize,

    // sample
    pub target_language: String,
    pub walker_count: usize,
    pub language_filter_enabled: bool,
    pub seed_language_check: bool,
    pub add_symmetric_edge: bool,
    pub max_sample_nodes: Option<usize>,
    pub max_sample_edges: Option<usize>,
    pub max_burned_edges: Option<usize>,
    pub max_simulated_seconds: Option<f64>,
    pub max_steps: Option<u64>,
    pub stall_steps: Option<u64>,

    // oracle
    pub rate_limited: bool,
    pub key_count: usize,
    pub calls_per_window: u32,
    pub window_seconds: f64,
    pub profile_calls_per_window: u32,
    pub page_size: usize,
    pub profile_batch: usize,

    // reference
    pub reference_sample_size: usize,
    pub reference_seeds: usize,
    pub reference_rho: Option<f64>,
    pub reference_collapse: bool,
    /// Static ranking, directed removal and pool-scripted reseeds.
    pub reference_bridge: bool,

    // evaluate
    pub test_size: usize,
    pub include_all: bool,
    pub bins_per_decade: usize,

    // kcore
    pub min_in_degree: usize,
    pub k: usize,

    // pagerank
    pub damping: f64,
    pub pagerank_tolerance: f64,
    pub pagerank_max_iters: usize,

    // communities
    pub min_community_size: usize,
    pub min_edge_weight: u64,
    pub lpa_max_iters: usize,
    pub window_start: Option<i64>,
    pub window_end: Option<i64>,

    // keywords
    pub top_n: usize,
    pub min_user_fraction: f64,
    pub per_node_cap: Option<usize>,
    pub cap_rule: CapRule,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sampler = SamplerConfig::default();
        let oracle = OracleConfig::default();
        let profile = ProfileSpec::default();
        let tweets = TweetSpec::default();
        Self {
            rng_seed: 0,
            deterministic: false,
            threads: None,
            out_dir: PathBuf::from("out"),
            graph: None,
            profiles: None,
            seed_pool: None,
            tweets: None,
            stopwords: None,
            sample: None,
            core: None,
            assignment: None,
            model: ModelKind::PreferentialAttachment,
            nodes: 1000,
            edges_per_node: 3,
            edge_probability: 0.01,
            influencer_fraction: 0.01,
            influence_factor: 10.0,
            mean_out_degree: 10.0,
            groups: 1,
            homophily: 0.0,
            language_fraction: profile.language_fraction,
            other_language: profile.other_language,
            protected_fraction: profile.protected_fraction,
            follower_noise: profile.follower_noise,
            observed_at: DEFAULT_OBSERVED_AT,
            tweets_per_node: tweets.mean_per_node,
            tweet_start: None,
            tweet_end: None,
            vocabulary: tweets.vocabulary,
            topic_share: tweets.topic_share,
            topic_words: tweets.topic_words,
            target_language: sampler.target_language,
            walker_count: sampler.walker_count,
            language_filter_enabled: sampler.language_filter_enabled,
            seed_language_check: sampler.seed_language_check,
            add_symmetric_edge: sampler.add_symmetric_edge,
            max_sample_nodes: None,
            max_sample_edges: None,
            max_burned_edges: None,
            max_simulated_seconds: Some(DAY as f64),
            max_steps: None,
            stall_steps: sampler.stop.stall_steps,
            rate_limited: true,
            key_count: oracle.key_count,
            calls_per_window: RateLimit::FRIENDS.calls_per_window,
            window_seconds: RateLimit::FRIENDS.window_seconds,
            profile_calls_per_window: RateLimit::PROFILES.calls_per_window,
            page_size: oracle.page_size,
            profile_batch: oracle.profile_batch,
            reference_sample_size: 1000,
            reference_seeds: 1,
            reference_rho: None,
            reference_collapse: true,
            reference_bridge: false,
            test_size: 1000,
            include_all: false,
            bins_per_decade: 5,
            min_in_degree: 1,
            k: 3,
            damping: 0.85,
            pagerank_tolerance: 1e-9,
            pagerank_max_iters: 200,
            min_community_size: 100,
            min_edge_weight: 1,
            lpa_max_iters: 100,
            window_start: None,
            window_end: None,
            top_n: 50,
            min_user_fraction: 0.05,
            per_node_cap: None,
            cap_rule: CapRule::NewestFirst,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Applies `key=value` overrides. Values parse as JSON and fall back to
    /// plain strings, so `model=two-class` and `nodes=500` both work.
    pub fn with_overrides(self, pairs: &[String]) -> Result<Self, CliError> {
        if pairs.is_empty() {
            return Ok(self);
        }
        let mut map: Map<String, Value> = match serde_json::to_value(&self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("config serialises to an object"),
        };
        for pair in pairs {
            let (key, raw) =
                pair.split_once('=').ok_or_else(|| CliError::Config(format!("override `{pair}` is not key=value")))?;
            if !map.contains_key(key) {
                return Err(CliError::Config(format!("unknown config key `{key}`")));
            }
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            map.insert(key.to_string(), value);
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn graph_spec(&self) -> GraphSpec {
        let model = match self.model {
            ModelKind::PreferentialAttachment => {
                Model::PreferentialAttachment { nodes: self.nodes, edges_per_node: self.edges_per_node }
            }
            ModelKind::ReciprocalEr => Model::ReciprocalEr { nodes: self.nodes, p: self.edge_probability },
            ModelKind::TwoClass => Model::TwoClass {
                nodes: self.nodes,
                influencer_fraction: self.influencer_fraction,
                factor: self.influence_factor,
                mean_out_degree: self.mean_out_degree,
            },
        };
        GraphSpec { model, groups: self.groups, homophily: self.homophily }
    }

    pub fn profile_spec(&self) -> ProfileSpec {
        ProfileSpec {
            language: self.target_language.clone(),
            language_fraction: self.language_fraction,
            other_language: self.other_language.clone(),
            protected_fraction: self.protected_fraction,
            follower_noise: self.follower_noise,
            observed_at: self.observed_at,
        }
    }

    pub fn tweet_spec(&self) -> TweetSpec {
        TweetSpec {
            mean_per_node: self.tweets_per_node,
            start: self.tweet_start.unwrap_or(self.observed_at - 7 * DAY),
            end: self.tweet_end.unwrap_or(self.observed_at),
            vocabulary: self.vocabulary,
            topic_share: self.topic_share,
            topic_words: self.topic_words,
        }
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            target_language: self.target_language.clone(),
            page_size: self.page_size,
            walker_count: self.walker_count,
            stop: StopConditions {
                max_sample_nodes: self.max_sample_nodes,
                max_sample_edges: self.max_sample_edges,
                max_burned_edges: self.max_burned_edges,
                max_simulated_seconds: self.max_simulated_seconds,
                max_steps: self.max_steps,
                stall_steps: self.stall_steps,
            },
            rng_seed: self.rng_seed,
            language_filter_enabled: self.language_filter_enabled,
            seed_language_check: self.seed_language_check,
            add_symmetric_edge: self.add_symmetric_edge,
            deterministic: self.deterministic,
            threads: if self.deterministic { Some(1) } else { self.threads },
        }
    }

    pub fn oracle_config(&self, clock_start: f64) -> Result<OracleConfig, CliError> {
        if self.key_count == 0 || self.page_size == 0 || self.profile_batch == 0 {
            return Err(CliError::Config("key_count, page_size and profile_batch must be positive".into()));
        }
        let limit = |calls| {
            self.rate_limited.then_some(RateLimit { calls_per_window: calls, window_seconds: self.window_seconds })
        };
        Ok(OracleConfig {
            key_count: self.key_count,
            friends_limit: limit(self.calls_per_window),
            profiles_limit: limit(self.profile_calls_per_window),
            page_size: self.page_size,
            profile_batch: self.profile_batch,
            clock_start,
        })
    }

    /// `[window_start, window_end]`, unbounded where unset.
    pub fn window(&self) -> (i64, i64) {
        (self.window_start.unwrap_or(i64::MIN), self.window_end.unwrap_or(i64::MAX))
    }
}
