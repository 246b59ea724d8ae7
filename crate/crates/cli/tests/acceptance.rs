//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankwalk::communities::read_assignment;
use rankwalk::evaluation::{
    baseline_sample, coverage, coverage_report, influencer_sample, rank_reach, total_reach, TestSample,
};
use rankwalk::generate::{closed_world_profiles, generate_graph, generate_profiles, GraphSpec, Model, ProfileSpec};
use rankwalk::io::{read_edge_list, read_profiles};
use rankwalk::kcore::k_core;
use rankwalk::keywords::{chi_squared_keyness, read_keywords_csv, read_tweets};
use rankwalk::oracle::{
    peak_friend_records, peak_window_load, verify_budget, Endpoint, OracleConfig, RateLimit, SimulatedOracle,
};
use rankwalk::pagerank::pagerank;
use rankwalk::reference::{bridge_config, rank_degree, UndirectedGraph};
use rankwalk::sampler::{run_sample, SampleGraph, SamplerConfig, SeedPool, StopConditions, StopReason};
use rankwalk::{DirectedGraph, Edge, NodeId, PageRankConfig};

type Check = fn() -> Verdict;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn n(i: u64) -> NodeId {
    NodeId(i)
}

fn within(elapsed: Duration, limit: Duration) -> Option<String> {
    (elapsed > limit).then(|| format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()))
}

fn walk_config(walkers: usize, stop: StopConditions) -> SamplerConfig {
    SamplerConfig {
        walker_count: walkers,
        language_filter_enabled: false,
        deterministic: true,
        stop,
        ..Default::default()
    }
}

// 1 -------------------------------------------------------------------------

fn reference_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut cases, mut matched, mut arcs_total) = (0, 0, 0);
    let mut first_failure = None;
    let mut case = 0u64;
    while cases < 120 {
        case += 1;
        let nodes = rng.random_range(2..=200);
        let p = rng.random_range(0.005..0.2);
        let graph = generate_graph(&GraphSpec::new(Model::ReciprocalEr { nodes, p }), case).unwrap().graph;
        let arcs = graph.edge_count();
        if arcs == 0 {
            continue;
        }
        cases += 1;
        arcs_total += arcs;
        let pool = SeedPool::new(graph.nodes().collect(), case);
        let draws = 20 * arcs + 100;
        let seeds = pool.preview(draws);
        let oracle =
            SimulatedOracle::new(&graph, &closed_world_profiles(&graph, "de"), OracleConfig::unlimited()).unwrap();
        let stop =
            StopConditions { max_sample_edges: Some(arcs), max_steps: Some(draws as u64 - 1), ..Default::default() };
        let run = run_sample(walk_config(1, stop), &oracle, pool).unwrap();
        let reference = rank_degree(&UndirectedGraph::from_directed(&graph), &bridge_config(&seeds, arcs)).unwrap();
        if run.burn_log == reference.picks && run.stats.stop_reason == StopReason::SampleEdges {
            matched += 1;
        } else if first_failure.is_none() {
            first_failure = Some(case);
        }
    }
    let slow = within(start.elapsed(), Duration::from_secs(60));
    let detail = format!(
        "{matched}/{cases} graphs (n <= 200, {arcs_total} arcs) burned identical edge sequences{}{}",
        first_failure.map(|c| format!("; first mismatch in case {c}")).unwrap_or_default(),
        slow.as_deref().map(|s| format!("; {s}")).unwrap_or_default()
    );
    verdict(matched == cases && slow.is_none(), detail)
}

// 2 -------------------------------------------------------------------------

fn budget_safety() -> Verdict {
    let start = Instant::now();
    let synth =
        generate_graph(&GraphSpec::new(Model::PreferentialAttachment { nodes: 10_000, edges_per_node: 5 }), 2).unwrap();
    let profiles = generate_profiles(&synth, &ProfileSpec::default(), 2).unwrap();
    let oracle = SimulatedOracle::new(&synth.graph, &profiles, OracleConfig::default()).unwrap();
    let config = SamplerConfig {
        walker_count: 200,
        deterministic: false,
        stop: StopConditions { max_simulated_seconds: Some(6.0 * 3600.0), ..Default::default() },
        ..Default::default()
    };
    let run = run_sample(config, &oracle, SeedPool::new(synth.graph.nodes().collect(), 2)).unwrap();
    let log = oracle.call_log();
    let keys: BTreeSet<usize> = log.iter().map(|r| r.key).collect();
    let friends = verify_budget(&log, Endpoint::Friends, RateLimit::FRIENDS);
    let profiles_ok = verify_budget(&log, Endpoint::Profiles, RateLimit::PROFILES);
    let peak = peak_window_load(&log, Endpoint::Friends, 900.0).map_or(0, |p| p.calls);
    let slow = within(start.elapsed(), Duration::from_secs(60));
    let detail = format!(
        "{} friends calls over {:.0} simulated s on {} keys, peak {} per key per 900 s{}{}",
        run.stats.calls.friends,
        run.stats.simulated_seconds,
        keys.len(),
        peak,
        friends.as_ref().err().map(|v| format!("; {v}")).unwrap_or_default(),
        slow.as_deref().map(|s| format!("; {s}")).unwrap_or_default()
    );
    let pass =
        friends.is_ok() && profiles_ok.is_ok() && keys.len() == 12 && run.stats.calls.friends > 0 && slow.is_none();
    verdict(pass, detail)
}

// 3 -------------------------------------------------------------------------

/// 30 hub accounts that follow each other and 5,001 of 6,000 small
/// accounts; every small account follows every hub. Hubs get the highest
/// ids so their mutual follows are the most recent.
fn hub_graph() -> (DirectedGraph, Vec<NodeId>) {
    const SMALL: u64 = 6000;
    const HUBS: u64 = 30;
    let hubs: Vec<NodeId> = (SMALL..SMALL + HUBS).map(n).collect();
    let mut g = DirectedGraph::new();
    for (i, &h) in hubs.iter().enumerate() {
        for s in 0..5001u64 {
            g.add_edge(h, n((s + 200 * i as u64) % SMALL)).unwrap();
        }
        for &other in &hubs {
            if other != h {
                g.add_edge(h, other).unwrap();
            }
        }
    }
    for s in 0..SMALL {
        for &h in &hubs {
            g.add_edge(n(s), h).unwrap();
        }
    }
    (g, hubs)
}

fn throughput_arithmetic() -> Verdict {
    let (graph, hubs) = hub_graph();
    let profiles = closed_world_profiles(&graph, "de");
    let mut lines = Vec::new();
    let mut pass = true;
    for (keys, walkers) in [(1usize, 1usize), (12, 200)] {
        let oracle =
            SimulatedOracle::new(&graph, &profiles, OracleConfig { key_count: keys, ..OracleConfig::default() })
                .unwrap();
        let stop = StopConditions { max_simulated_seconds: Some(3600.0), ..Default::default() };
        run_sample(walk_config(walkers, stop), &oracle, SeedPool::new(hubs.clone(), 3)).unwrap();
        let peak = peak_friend_records(&oracle.call_log(), 900.0);
        let ceiling = 75_000 * keys;
        let ok = peak <= ceiling && peak as f64 >= 0.99 * ceiling as f64;
        pass &= ok;
        lines.push(format!("{keys} key(s): peak {peak} of {ceiling} records per 900 s"));
    }
    verdict(pass, lines.join("; "))
}

// 4 -------------------------------------------------------------------------

fn influence_capture() -> Verdict {
    let start = Instant::now();
    let mut captured = Vec::new();
    for seed in 0..10u64 {
        let graph =
            generate_graph(&GraphSpec::new(Model::PreferentialAttachment { nodes: 10_000, edges_per_node: 3 }), seed)
                .unwrap()
                .graph;
        let mut by_in: Vec<NodeId> = graph.nodes().collect();
        by_in.sort_by(|a, b| graph.in_degree(*b).cmp(&graph.in_degree(*a)).then(a.cmp(b)));
        let top: BTreeSet<NodeId> = by_in.into_iter().take(100).collect();

        let oracle =
            SimulatedOracle::new(&graph, &closed_world_profiles(&graph, "de"), OracleConfig::unlimited()).unwrap();
        let stop = StopConditions { max_burned_edges: Some(graph.edge_count() / 5), ..Default::default() };
        let mut config = walk_config(200, stop);
        config.rng_seed = seed;
        let run = run_sample(config, &oracle, SeedPool::new(graph.nodes().collect(), seed)).unwrap();
        let nodes: BTreeSet<NodeId> = run.sample.graph().nodes().collect();
        captured.push(top.intersection(&nodes).count());
    }
    let slow = within(start.elapsed(), Duration::from_secs(120));
    let worst = *captured.iter().min().unwrap();
    let detail = format!(
        "top-100 in-degree nodes captured at 20% burned: {captured:?} (min {worst}, need 80){}",
        slow.as_deref().map(|s| format!("; {s}")).unwrap_or_default()
    );
    verdict(worst >= 80 && slow.is_none(), detail)
}

// 5 -------------------------------------------------------------------------

fn brute_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// mean, std (population), min, 25%, 50%, 75%, max.
fn brute_stats(values: &[f64]) -> [f64; 7] {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let len = v.len() as f64;
    let mean = v.iter().sum::<f64>() / len;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / len;
    [
        mean,
        var.sqrt(),
        v[0],
        brute_quantile(&v, 0.25),
        brute_quantile(&v, 0.5),
        brute_quantile(&v, 0.75),
        v[v.len() - 1],
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

fn evaluation_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for fixture in 0..50u64 {
        let size = rng.random_range(20..150u64);
        let p = rng.random_range(0.01..0.3);
        let mut graph = DirectedGraph::new();
        for a in 0..size {
            graph.add_node(n(a));
            for b in 0..size {
                if a != b && rng.random_bool(p) {
                    graph.add_edge(n(a), n(b)).unwrap();
                }
            }
        }
        let nodes: Vec<NodeId> = graph.nodes().collect();
        let k = rng.random_range(1..nodes.len() / 2);
        let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<NodeId> {
            index::sample(rng, nodes.len(), k).into_iter().map(|i| nodes[i]).collect()
        };
        let sample = pick(&mut rng);
        let baseline = pick(&mut rng);
        let test = TestSample::draw(&graph, &nodes, rng.random_range(5..nodes.len()), fixture).unwrap();
        let restricted = test.restricted(false);
        if restricted.is_empty() {
            continue;
        }

        // coverage, member by member
        for (member, friends) in &restricted.members {
            let truth: BTreeSet<NodeId> = graph.out_neighbors(*member).collect();
            let hit = truth.iter().filter(|f| sample.contains(f)).count();
            let want = 100.0 * hit as f64 / truth.len() as f64;
            checks += 1;
            if !close(coverage::<f64>(friends, &sample).unwrap(), want) {
                failures.push(format!("coverage {fixture}/{member}"));
            }
        }
        // reach of every sample node, and the rank order
        let ranked = rank_reach::<f64>(&sample, &restricted).unwrap();
        let m = restricted.len() as f64;
        for w in ranked.windows(2) {
            if w[0].2 < w[1].2 || (w[0].2 == w[1].2 && w[0].1 > w[1].1) {
                failures.push(format!("rank order {fixture}"));
            }
        }
        for (_, node, value) in &ranked {
            let followers = restricted.members.keys().filter(|t| graph.contains_edge(**t, *node)).count();
            checks += 1;
            if !close(*value, 100.0 * followers as f64 / m) {
                failures.push(format!("reach {fixture}/{node}"));
            }
        }
        // total reach
        let reached =
            restricted.members.keys().filter(|t| graph.out_neighbors(**t).any(|f| sample.contains(&f))).count();
        checks += 1;
        if !close(total_reach::<f64>(&sample, &restricted).unwrap(), 100.0 * reached as f64 / m) {
            failures.push(format!("total reach {fixture}"));
        }
        // report statistics
        let report = coverage_report::<f64>(&test, &sample, &baseline, false).unwrap();
        let cov = |s: &BTreeSet<NodeId>| -> Vec<f64> {
            restricted
                .members
                .keys()
                .map(|t| {
                    let f: Vec<NodeId> = graph.out_neighbors(*t).collect();
                    100.0 * f.iter().filter(|x| s.contains(x)).count() as f64 / f.len() as f64
                })
                .collect()
        };
        let friends: Vec<f64> = restricted.members.keys().map(|t| graph.out_degree(*t) as f64).collect();
        for (got, want) in [
            (report.friend_count.row(), brute_stats(&friends)),
            (report.pct_in_influencer.row(), brute_stats(&cov(&sample))),
            (report.pct_in_baseline.row(), brute_stats(&cov(&baseline))),
        ] {
            checks += 7;
            if got.iter().zip(want).any(|(g, w)| !close(*g, w)) {
                failures.push(format!("report {fixture}"));
            }
        }
        if report.n != restricted.len() {
            failures.push(format!("report count {fixture}"));
        }
    }
    let detail = format!(
        "{checks} values on 50 fixtures within 1e-9{}",
        failures.first().map(|f| format!("; {} mismatches, first {f}", failures.len())).unwrap_or_default()
    );
    verdict(failures.is_empty() && checks > 0, detail)
}

// 6 -------------------------------------------------------------------------

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    brute_quantile(&v, 0.5)
}

fn two_class_separation() -> Verdict {
    let spec = GraphSpec::new(Model::TwoClass {
        nodes: 5000,
        influencer_fraction: 0.02,
        factor: 100.0,
        mean_out_degree: 20.0,
    });
    let synth = generate_graph(&spec, 6).unwrap();
    let profiles = generate_profiles(&synth, &ProfileSpec::default(), 6).unwrap();
    let oracle = SimulatedOracle::new(&synth.graph, &profiles, OracleConfig::unlimited()).unwrap();
    let stop = StopConditions { max_sample_nodes: Some(250), ..Default::default() };
    let run = run_sample(walk_config(20, stop), &oracle, SeedPool::new(synth.graph.nodes().collect(), 6)).unwrap();

    let population: Vec<NodeId> = synth.graph.nodes().collect();
    let influencers = influencer_sample(&run.sample);
    let baseline = baseline_sample(&population, influencers.len(), 6).unwrap();
    let test = TestSample::draw(&synth.graph, &population, 1000, 6).unwrap().restricted(false);
    let mi = median(test.coverages(&influencers).unwrap());
    let mb = median(test.coverages(&baseline).unwrap());
    let ri = rank_reach::<f64>(&influencers, &test).unwrap()[0].2;
    let rb = rank_reach::<f64>(&baseline, &test).unwrap()[0].2;
    let detail = format!(
        "{} influencer-sample nodes; median coverage {mi:.1}% vs baseline {mb:.1}%; top reach {ri:.1}% vs {rb:.1}%",
        influencers.len()
    );
    verdict(mi > 0.0 && mi >= 10.0 * mb && ri > rb, detail)
}

// 7 -------------------------------------------------------------------------

fn direct_chi2(a: i64, b: i64, c: i64, d: i64) -> f64 {
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let n = a + b + c + d;
    let e = [(a + b) * (a + c) / n, (a + b) * (b + d) / n, (c + d) * (a + c) / n, (c + d) * (b + d) / n];
    [a, b, c, d].iter().zip(e).map(|(o, e)| (o - e) * (o - e) / e).sum()
}

fn chi_squared_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let chi = |a, b, c, d| chi_squared_keyness::<f64>(a, b, c, d).unwrap();
    let (mut worst, mut zero_bad, mut scale_worst, mut scale_exact, mut scale_checks) = (0.0f64, 0, 0.0f64, 0, 0);
    let mut zeros = 0;
    for i in 0..1000 {
        let mut t: [i64; 4] = std::array::from_fn(|_| rng.random_range(1..100_000));
        if i % 4 == 0 {
            // proportional rows
            let (x, y) = (rng.random_range(1..1000), rng.random_range(1..1000));
            let (p, q) = (rng.random_range(1..50), rng.random_range(1..50));
            t = [p * x, p * y, q * x, q * y];
        }
        let [a, b, c, d] = t;
        let got = chi(a, b, c, d);
        let want = direct_chi2(a, b, c, d);
        worst = worst.max((got - want).abs() / want.abs().max(1.0));
        let independent = i128::from(a) * i128::from(d) == i128::from(b) * i128::from(c);
        zeros += usize::from(independent);
        if (got == 0.0) != independent {
            zero_bad += 1;
        }
        for m in [2i64, 3, 7, 10, 37, 100] {
            let scaled = chi(m * a, m * b, m * c, m * d);
            let expect = m as f64 * got;
            scale_checks += 1;
            if scaled == expect {
                scale_exact += 1;
            }
            scale_worst = scale_worst.max((scaled - expect).abs() / expect.abs().max(1.0));
        }
    }
    let detail = format!(
        "1000 tables: max relative gap to the direct formula {worst:.1e}; {zeros} tables with ad=bc, {zero_bad} zero mismatches; \
         scaling m<=100: {scale_exact}/{scale_checks} bit-identical, max relative gap {scale_worst:.1e}"
    );
    verdict(worst <= 1e-9 && zero_bad == 0 && scale_worst <= 1e-12, detail)
}

// 8 -------------------------------------------------------------------------

fn brute_core(graph: &DirectedGraph, k: usize) -> BTreeSet<NodeId> {
    let mut alive: BTreeSet<NodeId> = graph.nodes().collect();
    loop {
        let degree = |v: NodeId, alive: &BTreeSet<NodeId>| {
            graph.out_neighbors(v).filter(|m| alive.contains(m)).count()
                + graph.in_neighbors(v).filter(|m| alive.contains(m)).count()
        };
        let drop: Vec<NodeId> = alive.iter().copied().filter(|&v| degree(v, &alive) < k).collect();
        if drop.is_empty() {
            return alive;
        }
        for v in drop {
            alive.remove(&v);
        }
    }
}

fn kcore_pagerank() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut core_bad = 0;
    let mut pr_worst = 0.0f64;
    for _ in 0..100 {
        let size = rng.random_range(1..80u64);
        let p = rng.random_range(0.0..0.15);
        let mut g = DirectedGraph::new();
        for a in 0..size {
            g.add_node(n(a));
            for b in 0..size {
                if a != b && rng.random_bool(p) {
                    g.add_edge(n(a), n(b)).unwrap();
                }
            }
        }
        let k = rng.random_range(0..8);
        let core = k_core(&g, k);
        let want = brute_core(&g, k);
        let want_edges: Vec<Edge> = g.edges().filter(|(s, t)| want.contains(s) && want.contains(t)).collect();
        if core.nodes().collect::<BTreeSet<_>>() != want || core.edges().collect::<Vec<_>>() != want_edges {
            core_bad += 1;
        }
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        pr_worst = pr_worst.max((pr.scores.values().sum::<f64>() - 1.0).abs());
    }
    let mut cycle_worst = 0.0f64;
    for len in [2u64, 3, 10, 101] {
        let g = DirectedGraph::from_edges((0..len).map(|i| (n(i), n((i + 1) % len)))).unwrap();
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        for s in pr.scores.values() {
            cycle_worst = cycle_worst.max((s - 1.0 / len as f64).abs());
        }
    }
    let detail = format!(
        "k-core mismatches on 100 graphs: {core_bad}; max |sum - 1| {pr_worst:.1e}; max deviation from uniform on cycles {cycle_worst:.1e}"
    );
    verdict(core_bad == 0 && pr_worst <= 1e-9 && cycle_worst <= 1e-9, detail)
}

// 9 and 10 --------------------------------------------------------------------

fn rankwalk(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rankwalk"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok).map(|e| (PathBuf::from(e.file_name()), fs::read(e.path()).unwrap())).collect()
        })
        .unwrap_or_default()
}

const PIPELINE: [&[&str]; 8] = [
    &["generate"],
    &["sample"],
    &["evaluate"],
    &["reference"],
    &["kcore"],
    &["pagerank"],
    &["communities"],
    &["keywords"],
];

fn determinism() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let common = [
        "--seed",
        "9",
        "--deterministic",
        "--set",
        "nodes=1500",
        "--set",
        "groups=3",
        "--set",
        "homophily=0.8",
        "--set",
        "max_simulated_seconds=20000",
        "--set",
        "test_size=400",
        "--set",
        "reference_sample_size=500",
        "--set",
        "min_community_size=20",
    ];
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let dir = root.path().join(run);
        let mut per_command = Vec::new();
        for cmd in PIPELINE {
            let before = snapshot(&dir);
            let args: Vec<&str> = common.iter().chain(cmd.iter()).copied().collect();
            if let Err(e) = rankwalk(&dir, &args) {
                return verdict(false, e);
            }
            let after = snapshot(&dir);
            let written: BTreeMap<_, _> = after.into_iter().filter(|(k, v)| before.get(k) != Some(v)).collect();
            per_command.push((cmd[0], written));
        }
        outputs.push(per_command);
    }
    let differing: Vec<&str> = outputs[0].iter().zip(&outputs[1]).filter(|(a, b)| a != b).map(|(a, _)| a.0).collect();
    let files: usize = outputs[0].iter().map(|(_, w)| w.len()).sum();
    let detail = if differing.is_empty() {
        format!("{} commands, {files} output files byte-identical across two runs", PIPELINE.len())
    } else {
        format!("outputs differ for {differing:?}")
    };
    verdict(differing.is_empty() && files > 0, detail)
}

fn end_to_end() -> Verdict {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let common = [
        "--seed",
        "10",
        "--deterministic",
        "--set",
        "nodes=5000",
        "--set",
        "edges_per_node=4",
        "--set",
        "groups=4",
        "--set",
        "homophily=0.9",
        "--set",
        "max_simulated_seconds=86400",
    ];
    for cmd in ["generate", "sample", "kcore", "communities", "keywords"] {
        let args: Vec<&str> = common.iter().copied().chain([cmd]).collect();
        if let Err(e) = rankwalk(p, &args) {
            return verdict(false, e);
        }
    }
    let check = || -> Result<String, String> {
        let e = |what: &str, err: &dyn std::fmt::Display| format!("{what}: {err}");
        let graph = read_edge_list(p.join("graph.csv")).map_err(|x| e("graph", &x))?.graph;
        let profiles = read_profiles(p.join("profiles.jsonl")).map_err(|x| e("profiles", &x))?;
        let tweets = read_tweets(p.join("tweets.csv")).map_err(|x| e("tweets", &x))?;
        let sample = SampleGraph::read_csv_file(p.join("sample.csv")).map_err(|x| e("sample", &x))?;
        let core = read_edge_list(p.join("core.csv")).map_err(|x| e("core", &x))?.graph;
        let file = |name: &str| fs::File::open(p.join(name)).map_err(|x| e(name, &x));
        let assignment = read_assignment(file("communities.csv")?).map_err(|x| e("communities", &x))?;
        let keywords = read_keywords_csv::<f64, _>(file("keywords.csv")?).map_err(|x| e("keywords", &x))?;
        let sizes = fs::read_to_string(p.join("community_sizes.csv")).map_err(|x| e("sizes", &x))?;
        let meta = fs::read_to_string(p.join("community_graph.csv")).map_err(|x| e("meta", &x))?;

        if profiles.len() != graph.node_count() || tweets.is_empty() {
            return Err("profiles or tweets do not match the graph".into());
        }
        if !sample.graph().edges().all(|(s, t)| graph.contains_edge(s, t)) {
            return Err("sample edge missing from the ground truth".into());
        }
        let filtered = sample.graph().filter_in_degree(1);
        if !core.nodes().all(|v| core.degree(v) >= 3 && filtered.contains_node(v)) {
            return Err("core violates the 3-core or in-degree filter".into());
        }
        if assignment.len() != core.node_count() {
            return Err("assignment does not cover the core".into());
        }
        let mut active: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for line in sizes.lines().skip(1) {
            let cols: Vec<usize> =
                line.split(',').map(|c| c.parse().map_err(|x| e("sizes", &x))).collect::<Result<_, _>>()?;
            active.insert(cols[0], (cols[1], cols[2]));
        }
        let big: BTreeSet<usize> =
            active.iter().filter(|(_, (s, a))| *s >= 100 && *a >= 100).map(|(c, _)| *c).collect();
        for line in meta.lines().skip(1) {
            let cols: Vec<usize> =
                line.split(',').map(|c| c.parse().map_err(|x| e("meta", &x))).collect::<Result<_, _>>()?;
            if !big.contains(&cols[0]) || !big.contains(&cols[1]) {
                return Err(format!("meta-graph keeps a community under 100 active accounts: {line}"));
            }
        }
        if keywords.is_empty() {
            return Err("no keywords".into());
        }
        for r in &keywords {
            if !big.contains(&r.community) || r.keywords.len() > 50 || r.keywords.iter().any(|k| k.user_fraction < 0.05)
            {
                return Err(format!("keyword filters violated for community {}", r.community));
            }
        }
        Ok(format!(
            "graph {} edges, sample {} edges, 3-core {} nodes, {} communities ({} with >= 100 active), {} keyword lists",
            graph.edge_count(),
            sample.edge_count(),
            core.node_count(),
            active.len(),
            big.len(),
            keywords.len()
        ))
    };
    match check() {
        Ok(summary) => {
            let slow = within(start.elapsed(), Duration::from_secs(300));
            let detail = format!("{summary}{}", slow.as_deref().map(|s| format!("; {s}")).unwrap_or_default());
            verdict(slow.is_none(), detail)
        }
        Err(e) => verdict(false, e),
    }
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("reference equivalence", reference_equivalence),
        ("rate-budget safety", budget_safety),
        ("throughput arithmetic", throughput_arithmetic),
        ("influence capture", influence_capture),
        ("evaluation oracle equivalence", evaluation_equivalence),
        ("two-class separation", two_class_separation),
        ("chi-squared correctness", chi_squared_correctness),
        ("k-core and pagerank oracles", kcore_pagerank),
        ("determinism", determinism),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = std::panic::catch_unwind(check).unwrap_or_else(|_| verdict(false, "panicked"));
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {} [{:.1}s]", i + 1, v.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
