//! One function per subcommand. Inputs default to the standard file names
//! inside the output directory, so a pipeline can run with no path flags.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rankwalk::communities::{
    active_accounts, community_graph, label_propagation, load_assignment, read_assignment, write_assignment,
    write_sizes_csv, ActivityEvidence, CommunityAssignment,
};
use rankwalk::evaluation::{
    activity, baseline_sample, coverage_report, influencer_sample, log_histogram, monthly_histogram, rank_coverage,
    rank_reach, total_reach, write_histogram_csv, write_monthly_csv, write_rank_csv, write_rank_reach_csv, TestSample,
};
use rankwalk::generate::{filler_stopwords, generate_graph, generate_profiles, generate_tweets};
use rankwalk::io::{read_edge_list, read_node_list, read_profiles, write_edge_list_to, write_profiles_to};
use rankwalk::kcore::{core_numbers, k_core};
use rankwalk::keywords::{
    build_docs, extract_keywords, read_stopwords, read_tweets, window_docs, write_keywords_csv, write_tweets_to,
    TokenDoc, Tweet,
};
use rankwalk::oracle::{write_call_log, SimulatedOracle};
use rankwalk::pagerank::pagerank;
use rankwalk::reference::{bridge_config, rank_degree, RankDegreeConfig, SeedSchedule, TopK, UndirectedGraph};
use rankwalk::sampler::{read_resume, run_sample, write_resume, SampleGraph, Sampler, SeedPool};
use rankwalk::{DirectedGraph, KeywordResult, NodeId, NodeProfile, PageRankConfig, Profiles};

use crate::config::RunConfig;
use crate::error::CliError;

pub const GRAPH: &str = "graph.csv";
pub const PROFILES: &str = "profiles.jsonl";
pub const TWEETS: &str = "tweets.csv";
pub const STOPWORDS: &str = "stopwords.txt";
pub const SAMPLE: &str = "sample.csv";
pub const CORE: &str = "core.csv";
pub const COMMUNITIES: &str = "communities.csv";

/// Resolves inputs and writes outputs under `out_dir`, refusing to
/// overwrite any file it has read.
pub struct Workspace<'a> {
    pub cfg: &'a RunConfig,
    inputs: RefCell<Vec<PathBuf>>,
}

impl<'a> Workspace<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Self { cfg, inputs: RefCell::new(Vec::new()) }
    }

    fn path(&self, set: &Option<PathBuf>, default: &str) -> PathBuf {
        set.clone().unwrap_or_else(|| self.cfg.out_dir.join(default))
    }

    fn input(&self, set: &Option<PathBuf>, default: &str) -> PathBuf {
        let p = self.path(set, default);
        self.inputs.borrow_mut().push(p.clone());
        p
    }

    /// Like [`Self::input`], but `None` when the file was not named and the
    /// default does not exist.
    fn optional_input(&self, set: &Option<PathBuf>, default: &str) -> Option<PathBuf> {
        (set.is_some() || self.path(set, default).exists()).then(|| self.input(set, default))
    }

    fn write<F>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let dir = &self.cfg.out_dir;
        let path = dir.join(name);
        let out_err = |source| CliError::Output { path: path.clone(), source };
        fs::create_dir_all(dir).map_err(out_err)?;
        if let Ok(target) = path.canonicalize() {
            if self.inputs.borrow().iter().any(|i| i.canonicalize().is_ok_and(|c| c == target)) {
                return Err(CliError::OverwritesInput(path));
            }
        }
        let mut w = BufWriter::new(File::create(&path).map_err(out_err)?);
        body(&mut w).and_then(|_| w.flush()).map_err(out_err)?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }
}

fn read_graph(path: &Path) -> Result<DirectedGraph, CliError> {
    let list = read_edge_list(path).map_err(|e| CliError::input(path, e))?;
    if list.duplicates > 0 {
        log::warn!("{}: {} duplicate edges ignored", path.display(), list.duplicates);
    }
    Ok(list.graph)
}

fn load_profiles(path: &Path) -> Result<Profiles, CliError> {
    read_profiles(path).map_err(|e| CliError::input(path, e))
}

fn load_tweets(path: &Path) -> Result<Vec<Tweet>, CliError> {
    read_tweets(path).map_err(|e| CliError::input(path, e))
}

fn load_stopwords(path: Option<PathBuf>) -> Result<HashSet<String>, CliError> {
    match path {
        Some(p) => read_stopwords(&p).map_err(|e| CliError::input(p, e)),
        None => Ok(HashSet::new()),
    }
}

fn seed_nodes(ws: &Workspace, graph: &DirectedGraph) -> Result<Vec<NodeId>, CliError> {
    match &ws.cfg.seed_pool {
        Some(p) => {
            ws.inputs.borrow_mut().push(p.clone());
            read_node_list(p).map_err(|e| CliError::input(p, e))
        }
        None => Ok(graph.nodes().collect()),
    }
}

fn write_nodes<'n, W: Write>(nodes: impl IntoIterator<Item = &'n NodeId>, w: &mut W) -> io::Result<()> {
    for n in nodes {
        writeln!(w, "{n}")?;
    }
    Ok(())
}

fn write_json<T: serde::Serialize, W: Write>(value: &T, w: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

pub fn generate(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let synth = generate_graph(&cfg.graph_spec(), cfg.rng_seed)?;
    let profiles = generate_profiles(&synth, &cfg.profile_spec(), cfg.rng_seed)?;
    log::info!("generated {} nodes, {} edges", synth.graph.node_count(), synth.graph.edge_count());
    ws.write(GRAPH, |w| write_edge_list_to(&synth.graph, w))?;
    ws.write(PROFILES, |w| write_profiles_to(&profiles, w))?;
    if cfg.tweets_per_node > 0.0 {
        let tweets = generate_tweets(&synth, &profiles, &cfg.tweet_spec(), cfg.rng_seed)?;
        ws.write(TWEETS, |w| write_tweets_to(&tweets, w))?;
        let stop: BTreeSet<String> = filler_stopwords().into_iter().collect();
        ws.write(STOPWORDS, |w| stop.iter().try_for_each(|s| writeln!(w, "{s}")))?;
    }
    Ok(())
}

pub fn sample(ws: &Workspace, resume: Option<&Path>) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.graph, GRAPH))?;
    let profiles = load_profiles(&ws.input(&cfg.profiles, PROFILES))?;
    let pool = SeedPool::new(seed_nodes(ws, &graph)?, cfg.rng_seed);

    let state = match resume {
        Some(p) => {
            ws.inputs.borrow_mut().push(p.to_path_buf());
            let file = File::open(p).map_err(|e| CliError::input(p, e))?;
            Some(read_resume(BufReader::new(file)).map_err(|e| CliError::input(p, e))?)
        }
        None => None,
    };
    // a resumed session starts one full window later, so every key is fresh
    let clock_start = match &state {
        Some(s) if cfg.rate_limited => s.now + cfg.window_seconds,
        Some(s) => s.now,
        None => 0.0,
    };
    let oracle = SimulatedOracle::new(&graph, &profiles, cfg.oracle_config(clock_start)?)?;
    let run = match state {
        Some(s) => Sampler::resume(cfg.sampler_config(), &oracle, pool, s)?.run()?,
        None => run_sample(cfg.sampler_config(), &oracle, pool)?,
    };
    log::info!(
        "{} steps, {} sample edges, stopped by {:?}",
        run.stats.steps,
        run.stats.sample_edges,
        run.stats.stop_reason
    );

    ws.write(SAMPLE, |w| run.sample.write_csv(w))?;
    ws.write("burn_log.csv", |w| {
        writeln!(w, "step,source,target")?;
        run.burn_log.iter().enumerate().try_for_each(|(i, (s, t))| writeln!(w, "{},{s},{t}", i + 1))
    })?;
    ws.write("calls.jsonl", |w| write_call_log(&oracle.call_log(), w))?;
    ws.write("growth.csv", |w| run.stats.write_growth_csv(w))?;
    ws.write("run_stats.json", |w| write_json(&run.stats, w))?;
    ws.write("resume.jsonl", |w| write_resume(&run.resume, w))?;
    Ok(())
}

fn distinct_seeds(pool: &SeedPool, k: usize) -> Result<Vec<NodeId>, CliError> {
    let distinct: BTreeSet<NodeId> = pool.nodes().iter().copied().collect();
    if k == 0 || k > distinct.len() {
        return Err(CliError::Config(format!("reference_seeds must lie in 1..={}, got {k}", distinct.len())));
    }
    let mut seen = BTreeSet::new();
    let mut seeds = Vec::with_capacity(k);
    let mut draws = pool.clone();
    while seeds.len() < k {
        let n = draws.draw().expect("non-empty pool");
        if seen.insert(n) {
            seeds.push(n);
        }
    }
    Ok(seeds)
}

pub fn reference(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.graph, GRAPH))?;
    let pool = SeedPool::new(seed_nodes(ws, &graph)?, cfg.rng_seed);
    if pool.is_empty() {
        return Err(CliError::Config("seed pool is empty".into()));
    }
    let size = cfg.reference_sample_size;
    let config = if cfg.reference_bridge {
        bridge_config(&pool.preview(2 * graph.edge_count() + 10 * size + 100), size)
    } else {
        RankDegreeConfig {
            top_k: cfg.reference_rho.map_or(TopK::One, TopK::Proportional),
            collapse: cfg.reference_collapse,
            reseed: SeedSchedule::Random { rng_seed: cfg.rng_seed },
            ..RankDegreeConfig::new(distinct_seeds(&pool, cfg.reference_seeds)?, size)
        }
    };
    let result = rank_degree(&UndirectedGraph::from_directed(&graph), &config)?;
    if result.exhausted {
        log::warn!("graph exhausted after {} picks", result.picks.len());
    }
    ws.write("reference_picks.csv", |w| {
        writeln!(w, "step,source,target")?;
        result.picks.iter().enumerate().try_for_each(|(i, (s, t))| writeln!(w, "{},{s},{t}", i + 1))
    })?;
    ws.write("reference_sample.csv", |w| result.sample.write_csv(w))?;
    ws.write("reference_stats.json", |w| {
        let stats = serde_json::json!({
            "picks": result.picks.len(),
            "rounds": result.rounds,
            "reseeds": result.reseeds,
            "exhausted": result.exhausted,
        });
        write_json(&stats, w)
    })?;
    Ok(())
}

fn profiles_of<'p>(nodes: &BTreeSet<NodeId>, profiles: &'p Profiles) -> Vec<&'p NodeProfile> {
    nodes.iter().filter_map(|n| profiles.get(n)).collect()
}

pub fn evaluate(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.graph, GRAPH))?;
    let profiles = load_profiles(&ws.input(&cfg.profiles, PROFILES))?;
    let sample_path = ws.input(&cfg.sample, SAMPLE);
    let sample = SampleGraph::read_csv_file(&sample_path).map_err(|e| CliError::input(&sample_path, e))?;

    let population: Vec<NodeId> =
        profiles.values().filter(|p| p.language == cfg.target_language).map(|p| p.node).collect();
    let influencers = influencer_sample(&sample);
    let baseline = baseline_sample(&population, influencers.len(), cfg.rng_seed)?;
    let test = TestSample::draw(&graph, &population, cfg.test_size, cfg.rng_seed)?;
    let report = coverage_report::<f64>(&test, &influencers, &baseline, cfg.include_all)?;
    let restricted = test.restricted(cfg.include_all);

    ws.write("influencers.txt", |w| write_nodes(&influencers, w))?;
    ws.write("baseline.txt", |w| write_nodes(&baseline, w))?;
    ws.write("test_sample.txt", |w| write_nodes(test.members.keys(), w))?;
    ws.write("coverage_table.csv", |w| report.write_csv(w))?;

    let mut total = Vec::new();
    for (name, set) in [("influencer", &influencers), ("baseline", &baseline)] {
        let ranked = rank_coverage::<f64>(&restricted, set)?;
        ws.write(&format!("coverage_rank_{name}.csv"), |w| write_rank_csv(&ranked, w))?;
        let reach = rank_reach::<f64>(set, &restricted)?;
        ws.write(&format!("reach_{name}.csv"), |w| write_rank_reach_csv(&reach, w))?;
        total.push((name, total_reach::<f64>(set, &restricted)?));

        let members = profiles_of(set, &profiles);
        let act = members.iter().map(|p| activity::<f64>(p, cfg.observed_at)).collect::<Result<Vec<_>, _>>()?;
        let bins = log_histogram(&act, cfg.bins_per_decade.max(1));
        ws.write(&format!("activity_{name}.csv"), |w| write_histogram_csv(&bins, w))?;
        let followers: Vec<f64> = members.iter().map(|p| p.follower_count as f64).collect();
        let bins = log_histogram(&followers, cfg.bins_per_decade.max(1));
        ws.write(&format!("followers_{name}.csv"), |w| write_histogram_csv(&bins, w))?;
        let last: Vec<i64> = members.iter().filter_map(|p| p.last_status_at).collect();
        let months = monthly_histogram(&last);
        ws.write(&format!("last_status_{name}.csv"), |w| write_monthly_csv(&months, w))?;
    }
    ws.write("total_reach.csv", |w| {
        writeln!(w, "sample,total_reach")?;
        total.iter().try_for_each(|(name, v)| writeln!(w, "{name},{v}"))
    })?;
    Ok(())
}

pub fn kcore(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.sample, SAMPLE))?;
    let filtered = graph.filter_in_degree(cfg.min_in_degree);
    let core = k_core(&filtered, cfg.k);
    log::info!(
        "in-degree >= {}: {} nodes; {}-core: {} nodes, {} edges",
        cfg.min_in_degree,
        filtered.node_count(),
        cfg.k,
        core.node_count(),
        core.edge_count()
    );
    ws.write(CORE, |w| write_edge_list_to(&core, w))?;
    let numbers = core_numbers(&filtered);
    ws.write("core_numbers.csv", |w| {
        writeln!(w, "node,core")?;
        numbers.iter().try_for_each(|(n, c)| writeln!(w, "{n},{c}"))
    })?;
    Ok(())
}

pub fn pagerank_cmd(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.core, CORE))?;
    let config =
        PageRankConfig { damping: cfg.damping, tolerance: cfg.pagerank_tolerance, max_iters: cfg.pagerank_max_iters };
    let pr = pagerank(&graph, &config)?;
    if !pr.converged {
        log::warn!("pagerank stopped after {} iterations with change {}", pr.iterations, pr.delta);
    }
    ws.write("pagerank.csv", |w| {
        writeln!(w, "node,score")?;
        pr.scores.iter().try_for_each(|(n, s)| writeln!(w, "{n},{s}"))
    })?;
    Ok(())
}

pub fn communities(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let graph = read_graph(&ws.input(&cfg.core, CORE))?;
    let assignment = match &cfg.assignment {
        Some(p) => {
            ws.inputs.borrow_mut().push(p.clone());
            let file = File::open(p).map_err(|e| CliError::input(p, e))?;
            load_assignment(file, &graph).map_err(|e| CliError::input(p, e))?
        }
        None => label_propagation(&graph, cfg.rng_seed, cfg.lpa_max_iters),
    };

    let (t0, t1) = cfg.window();
    let active = if let Some(p) = ws.optional_input(&cfg.tweets, TWEETS) {
        let tweets = load_tweets(&p)?;
        Some(active_accounts(&assignment, t0, t1, ActivityEvidence::Tweets(&tweets))?)
    } else if let Some(p) = ws.optional_input(&cfg.profiles, PROFILES) {
        let profiles = load_profiles(&p)?;
        Some(active_accounts(&assignment, t0, t1, ActivityEvidence::Profiles(&profiles))?)
    } else {
        None
    };

    let mut meta = community_graph(&graph, &assignment, cfg.min_community_size, cfg.min_edge_weight)?;
    if let Some(active) = &active {
        meta.sizes.retain(|c, _| active.get(c).copied().unwrap_or(0) >= cfg.min_community_size);
        let kept = meta.sizes.clone();
        meta.weights.retain(|(a, b), _| kept.contains_key(a) && kept.contains_key(b));
    }
    log::info!("{} communities, {} pass the size filter", assignment.sizes().len(), meta.sizes.len());

    ws.write(COMMUNITIES, |w| write_assignment(&assignment, w))?;
    ws.write("community_sizes.csv", |w| write_sizes_csv(&assignment.sizes(), active.as_ref(), w))?;
    ws.write("community_graph.csv", |w| meta.write_csv(w))?;
    Ok(())
}

fn docs_by_community(docs: Vec<TokenDoc>, assignment: &CommunityAssignment) -> BTreeMap<usize, Vec<TokenDoc>> {
    let mut out: BTreeMap<usize, Vec<TokenDoc>> = BTreeMap::new();
    for d in docs {
        if let Some(c) = assignment.community_of(d.node) {
            out.entry(c).or_default().push(d);
        }
    }
    out
}

pub fn keywords(ws: &Workspace) -> Result<(), CliError> {
    let cfg = ws.cfg;
    let apath = ws.input(&cfg.assignment, COMMUNITIES);
    let file = File::open(&apath).map_err(|e| CliError::input(&apath, e))?;
    let assignment = read_assignment(file).map_err(|e| CliError::input(&apath, e))?;
    let tweets = load_tweets(&ws.input(&cfg.tweets, TWEETS))?;
    let stopwords = load_stopwords(ws.optional_input(&cfg.stopwords, STOPWORDS))?;

    let (t0, t1) = cfg.window();
    let window = window_docs(&tweets, t0, t1, cfg.per_node_cap.unwrap_or(usize::MAX), cfg.cap_rule)?;
    let grouped = docs_by_community(build_docs(&window, &stopwords), &assignment);

    let mut results: Vec<KeywordResult> = Vec::new();
    for (&id, docs) in &grouped {
        if docs.len() < cfg.min_community_size {
            continue;
        }
        if docs.iter().all(|d| d.tokens.is_empty()) {
            log::warn!("community {id} has no tokens; skipped");
            continue;
        }
        let rest: Vec<TokenDoc> =
            grouped.iter().filter(|(&c, _)| c != id).flat_map(|(_, d)| d.iter().cloned()).collect();
        results.push(extract_keywords(id, docs, &rest, cfg.top_n, cfg.min_user_fraction)?);
    }
    log::info!("keywords for {} communities", results.len());
    ws.write("keywords.csv", |w| write_keywords_csv(&results, w))?;
    Ok(())
}
