use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::text::tokenize;
use super::KeywordError;
use crate::graph::NodeId;
use crate::io::FormatError;

/// One posted text. Timestamps are Unix seconds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub node: NodeId,
    pub ts: i64,
    pub text: String,
}

pub fn read_tweets(path: impl AsRef<Path>) -> Result<Vec<Tweet>, FormatError> {
    read_tweets_from(BufReader::new(File::open(path)?))
}

pub fn read_tweets_from<R: BufRead>(reader: R) -> Result<Vec<Tweet>, FormatError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tweet = serde_json::from_str(&line)
            .map_err(|e| FormatError::Malformed { line: idx as u64 + 1, message: e.to_string() })?;
        out.push(tweet);
    }
    Ok(out)
}

pub fn write_tweets_to<W: Write>(tweets: &[Tweet], mut w: W) -> io::Result<()> {
    for t in tweets {
        serde_json::to_writer(&mut w, t)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_tweets(tweets: &[Tweet], path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_tweets_to(tweets, &mut w)?;
    w.flush()
}

/// Which texts survive the per-node cap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapRule {
    #[default]
    NewestFirst,
    OldestFirst,
}

/// Texts with `t0 <= ts <= t1`, at most `per_node_cap` per node, in input order.
pub fn window_docs(
    tweets: &[Tweet],
    t0: i64,
    t1: i64,
    per_node_cap: usize,
    rule: CapRule,
) -> Result<Vec<Tweet>, KeywordError> {
    if t1 < t0 {
        return Err(KeywordError::Window { t0, t1 });
    }
    let mut by_node: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, t) in tweets.iter().enumerate() {
        if (t0..=t1).contains(&t.ts) {
            by_node.entry(t.node).or_default().push(i);
        }
    }
    let mut keep = vec![false; tweets.len()];
    for idx in by_node.values_mut() {
        match rule {
            CapRule::NewestFirst => idx.sort_by_key(|&i| (std::cmp::Reverse(tweets[i].ts), i)),
            CapRule::OldestFirst => idx.sort_by_key(|&i| (tweets[i].ts, i)),
        }
        for &i in idx.iter().take(per_node_cap) {
            keep[i] = true;
        }
    }
    Ok(tweets.iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t.clone()).collect())
}

/// All tokens one node produced, with the timestamps of its texts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenDoc {
    pub node: NodeId,
    pub tokens: Vec<String>,
    pub timestamps: Vec<i64>,
}

/// One document per node, ordered by node id.
pub fn build_docs(tweets: &[Tweet], stopwords: &HashSet<String>) -> Vec<TokenDoc> {
    let mut docs: BTreeMap<NodeId, TokenDoc> = BTreeMap::new();
    for t in tweets {
        let doc =
            docs.entry(t.node).or_insert_with(|| TokenDoc { node: t.node, tokens: Vec::new(), timestamps: Vec::new() });
        doc.tokens.extend(tokenize(&t.text, stopwords));
        doc.timestamps.push(t.ts);
    }
    docs.into_values().collect()
}
