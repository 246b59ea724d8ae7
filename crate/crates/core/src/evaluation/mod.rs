//! Sample quality: coverage, reach, activity and baseline comparison.

mod histogram;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use rand::seq::index;
use thiserror::Error;

pub use histogram::{log_histogram, monthly_histogram, write_histogram_csv, write_monthly_csv, Bin};
pub use stats::{quantile_sorted, Summary, STATISTICS};

use crate::graph::{DirectedGraph, NodeId};
use crate::profile::NodeProfile;
use crate::rng::{substream, BASELINE, TEST_SAMPLE};
use crate::sampler::SampleGraph;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("friend set is empty")]
    EmptyFriends,
    #[error("test sample is empty")]
    EmptyTest,
    #[error("cannot draw {n} nodes from a population of {population}")]
    TooLarge { n: usize, population: usize },
    #[error("influencer sample has {influencer} nodes but baseline has {baseline}")]
    SizeMismatch { influencer: usize, baseline: usize },
    #[error("node {node}: observation time precedes account creation")]
    BeforeCreation { node: NodeId },
}

/// Sample nodes with at least one incoming sample edge.
pub fn influencer_sample(sample: &SampleGraph) -> BTreeSet<NodeId> {
    sample.influencer_nodes()
}

/// Percentage of `friends` that lie in `sample`.
pub fn coverage<T: Real>(friends: &BTreeSet<NodeId>, sample: &BTreeSet<NodeId>) -> Result<T, EvalError> {
    if friends.is_empty() {
        return Err(EvalError::EmptyFriends);
    }
    let hit = friends.iter().filter(|f| sample.contains(f)).count();
    Ok(T::hundred() * T::from_count(hit) / T::from_count(friends.len()))
}

/// Test accounts with their full ground-truth friend sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestSample {
    pub members: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl TestSample {
    pub fn new(members: BTreeMap<NodeId, BTreeSet<NodeId>>) -> Self {
        Self { members }
    }

    /// Draws `n` accounts uniformly without replacement from `population`.
    pub fn draw(graph: &DirectedGraph, population: &[NodeId], n: usize, rng_seed: u64) -> Result<Self, EvalError> {
        if n > population.len() {
            return Err(EvalError::TooLarge { n, population: population.len() });
        }
        let mut rng = substream(rng_seed, TEST_SAMPLE);
        let members = index::sample(&mut rng, population.len(), n)
            .into_iter()
            .map(|i| {
                let node = population[i];
                (node, graph.out_neighbors(node).collect())
            })
            .collect();
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members with at least two friends, or at least one with `include_all`.
    pub fn restricted(&self, include_all: bool) -> Self {
        let min = if include_all { 1 } else { 2 };
        Self { members: self.members.iter().filter(|(_, f)| f.len() >= min).map(|(&n, f)| (n, f.clone())).collect() }
    }

    /// Coverage of every member, in member order.
    pub fn coverages<T: Real>(&self, sample: &BTreeSet<NodeId>) -> Result<Vec<T>, EvalError> {
        self.members.values().map(|f| coverage(f, sample)).collect()
    }
}

/// Percentage of test members that follow `node`.
pub fn reach<T: Real>(node: NodeId, test: &TestSample) -> Result<T, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let hit = test.members.values().filter(|f| f.contains(&node)).count();
    Ok(T::hundred() * T::from_count(hit) / T::from_count(test.len()))
}

/// Reach of every sample node, highest first, ties by id. Ranks start at 1.
pub fn rank_reach<T: Real>(sample: &BTreeSet<NodeId>, test: &TestSample) -> Result<Vec<(usize, NodeId, T)>, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let mut hits: BTreeMap<NodeId, usize> = sample.iter().map(|&n| (n, 0)).collect();
    for friends in test.members.values() {
        for f in friends {
            if let Some(h) = hits.get_mut(f) {
                *h += 1;
            }
        }
    }
    let mut ranked: Vec<(NodeId, usize)> = hits.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let total = T::from_count(test.len());
    Ok(ranked.into_iter().enumerate().map(|(i, (n, h))| (i + 1, n, T::hundred() * T::from_count(h) / total)).collect())
}

/// Percentage of test members with at least one friend in `sample`.
/// Callers pass the restricted test sample.
pub fn total_reach<T: Real>(sample: &BTreeSet<NodeId>, test: &TestSample) -> Result<T, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let hit = test.members.values().filter(|f| f.iter().any(|x| sample.contains(x))).count();
    Ok(T::hundred() * T::from_count(hit) / T::from_count(test.len()))
}

/// Coverage values sorted from highest to lowest.
pub fn rank_coverage<T: Real>(test: &TestSample, sample: &BTreeSet<NodeId>) -> Result<Vec<T>, EvalError> {
    let mut values = test.coverages::<T>(sample)?;
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite coverage"));
    Ok(values)
}

/// Statuses per day since creation, with elapsed time floored at one day.
pub fn activity<T: Real>(profile: &NodeProfile, as_of: i64) -> Result<T, EvalError> {
    if as_of < profile.created_at {
        return Err(EvalError::BeforeCreation { node: profile.node });
    }
    let days = T::from_i64(as_of - profile.created_at).expect("fits") / T::lit(86_400.0);
    Ok(T::from_u64(profile.status_count).expect("fits") / days.max(T::one()))
}

/// `n` distinct nodes drawn uniformly from `population`.
pub fn baseline_sample(population: &[NodeId], n: usize, rng_seed: u64) -> Result<BTreeSet<NodeId>, EvalError> {
    if n > population.len() {
        return Err(EvalError::TooLarge { n, population: population.len() });
    }
    let mut rng = substream(rng_seed, BASELINE);
    Ok(index::sample(&mut rng, population.len(), n).into_iter().map(|i| population[i]).collect())
}

/// Friend counts and coverage of both samples over the restricted test sample.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport<T> {
    pub n: usize,
    pub friend_count: Summary<T>,
    pub pct_in_influencer: Summary<T>,
    pub pct_in_baseline: Summary<T>,
}

pub fn coverage_report<T: Real>(
    test: &TestSample,
    influencer: &BTreeSet<NodeId>,
    baseline: &BTreeSet<NodeId>,
    include_all: bool,
) -> Result<CoverageReport<T>, EvalError> {
    if influencer.len() != baseline.len() {
        return Err(EvalError::SizeMismatch { influencer: influencer.len(), baseline: baseline.len() });
    }
    let test = test.restricted(include_all);
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let friends: Vec<T> = test.members.values().map(|f| T::from_count(f.len())).collect();
    let summary = |xs: &[T]| Summary::of(xs).expect("non-empty, finite");
    Ok(CoverageReport {
        n: test.len(),
        friend_count: summary(&friends),
        pct_in_influencer: summary(&test.coverages(influencer)?),
        pct_in_baseline: summary(&test.coverages(baseline)?),
    })
}

impl<T: Real> CoverageReport<T> {
    /// Table with a `statistic` column and one column per measure, values to
    /// one decimal place.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "statistic,friends,pct_influencer,pct_baseline")?;
        writeln!(w, "count,{n},{n},{n}", n = self.n)?;
        let cols = [self.friend_count.row(), self.pct_in_influencer.row(), self.pct_in_baseline.row()];
        for (i, name) in STATISTICS.iter().enumerate() {
            writeln!(w, "{name},{:.1},{:.1},{:.1}", cols[0][i], cols[1][i], cols[2][i])?;
        }
        Ok(())
    }
}

/// `rank,value` with ranks from 1.
pub fn write_rank_csv<T: Real, W: Write>(values: &[T], mut w: W) -> io::Result<()> {
    writeln!(w, "rank,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, v)?;
    }
    Ok(())
}

/// `rank,node,reach` for [`rank_reach`] output.
pub fn write_rank_reach_csv<T: Real, W: Write>(ranked: &[(usize, NodeId, T)], mut w: W) -> io::Result<()> {
    writeln!(w, "rank,node,reach")?;
    for (r, n, v) in ranked {
        writeln!(w, "{r},{n},{v}")?;
    }
    Ok(())
}
