//! JSONL snapshot of an interrupted run: burn log, sample, seeds and walkers.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::sample::EdgeProvenance;
use super::WalkerState;
use crate::graph::{Edge, NodeId};
use crate::io::FormatError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResumeState {
    pub origin: f64,
    pub now: f64,
    pub steps: u64,
    pub walked: u64,
    pub symmetric_added: u64,
    pub jumps: u64,
    pub friends_fetches: u64,
    pub next_walker: usize,
    pub seed_rng_word_pos: u128,
    pub burned: Vec<Edge>,
    pub edges: Vec<(Edge, EdgeProvenance)>,
    pub seeds: Vec<NodeId>,
    pub walkers: Vec<WalkerState>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record {
    Meta {
        origin: f64,
        now: f64,
        steps: u64,
        walked: u64,
        symmetric_added: u64,
        jumps: u64,
        friends_fetches: u64,
        next_walker: usize,
        // u128 does not survive every JSON reader; kept as a decimal string.
        seed_rng_word_pos: String,
    },
    Burn {
        source: NodeId,
        target: NodeId,
    },
    Edge {
        source: NodeId,
        target: NodeId,
        provenance: EdgeProvenance,
    },
    Seed {
        node: NodeId,
    },
    Walker(WalkerState),
}

pub fn write_resume<W: Write>(state: &ResumeState, mut w: W) -> io::Result<()> {
    let mut put = |r: &Record| -> io::Result<()> {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)
    };
    put(&Record::Meta {
        origin: state.origin,
        now: state.now,
        steps: state.steps,
        walked: state.walked,
        symmetric_added: state.symmetric_added,
        jumps: state.jumps,
        friends_fetches: state.friends_fetches,
        next_walker: state.next_walker,
        seed_rng_word_pos: state.seed_rng_word_pos.to_string(),
    })?;
    for &(source, target) in &state.burned {
        put(&Record::Burn { source, target })?;
    }
    for &((source, target), provenance) in &state.edges {
        put(&Record::Edge { source, target, provenance })?;
    }
    for &node in &state.seeds {
        put(&Record::Seed { node })?;
    }
    for walker in &state.walkers {
        put(&Record::Walker(walker.clone()))?;
    }
    Ok(())
}

pub fn read_resume<R: BufRead>(reader: R) -> Result<ResumeState, FormatError> {
    let mut state = ResumeState::default();
    let mut saw_meta = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .map_err(|e| FormatError::Malformed { line: line_no, message: e.to_string() })?;
        match record {
            Record::Meta {
                origin,
                now,
                steps,
                walked,
                symmetric_added,
                jumps,
                friends_fetches,
                next_walker,
                seed_rng_word_pos,
            } => {
                saw_meta = true;
                state.origin = origin;
                state.now = now;
                state.steps = steps;
                state.walked = walked;
                state.symmetric_added = symmetric_added;
                state.jumps = jumps;
                state.friends_fetches = friends_fetches;
                state.next_walker = next_walker;
                state.seed_rng_word_pos = seed_rng_word_pos.parse().map_err(|_| FormatError::Malformed {
                    line: line_no,
                    message: format!("bad rng position `{seed_rng_word_pos}`"),
                })?;
            }
            Record::Burn { source, target } => state.burned.push((source, target)),
            Record::Edge { source, target, provenance } => state.edges.push(((source, target), provenance)),
            Record::Seed { node } => state.seeds.push(node),
            Record::Walker(w) => state.walkers.push(w),
        }
    }
    if !saw_meta {
        return Err(FormatError::Malformed { line: 0, message: "resume file has no meta record".into() });
    }
    Ok(state)
}
