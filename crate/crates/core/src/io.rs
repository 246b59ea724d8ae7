//! Edge-list CSV, profile JSONL and id-list files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{DirectedGraph, NodeId};
use crate::profile::{NodeProfile, Profiles};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: u64, node: NodeId },
    #[error("line {line}: duplicate node {node}")]
    DuplicateNode { line: u64, node: NodeId },
}

/// A parsed edge list plus the number of repeated edges that were skipped.
#[derive(Debug)]
pub struct EdgeList {
    pub graph: DirectedGraph,
    pub duplicates: usize,
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeList, FormatError> {
    read_edge_list_from(File::open(path)?)
}

/// Parses `source,target` CSV. Columns after the second are ignored, so
/// sample files with a provenance column read back as plain graphs.
pub fn read_edge_list_from<R: Read>(reader: R) -> Result<EdgeList, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || &header[0] != "source" || &header[1] != "target" {
        return Err(FormatError::Header {
            expected: "source,target".into(),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut graph = DirectedGraph::new();
    let mut duplicates = 0;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() < 2 {
            return Err(FormatError::Malformed { line, message: "expected two columns".into() });
        }
        let source = parse_id(&record[0], line)?;
        let target = parse_id(&record[1], line)?;
        if source == target {
            return Err(FormatError::SelfLoop { line, node: source });
        }
        if !graph.add_edge(source, target).expect("checked self-loop") {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        log::warn!("skipped {duplicates} duplicate edges");
    }
    Ok(EdgeList { graph, duplicates })
}

fn parse_id(field: &str, line: u64) -> Result<NodeId, FormatError> {
    field
        .parse::<u64>()
        .map(NodeId)
        .map_err(|_| FormatError::Malformed { line, message: format!("`{field}` is not a node id") })
}

pub(crate) fn csv_error(e: csv::Error) -> FormatError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => FormatError::Io(io),
        other => FormatError::Malformed { line, message: format!("{other:?}") },
    }
}

pub fn write_edge_list(graph: &DirectedGraph, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_edge_list_to(graph, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_edge_list_to<W: Write>(graph: &DirectedGraph, mut w: W) -> io::Result<()> {
    writeln!(w, "source,target")?;
    for (s, t) in graph.edges() {
        writeln!(w, "{s},{t}")?;
    }
    Ok(())
}

pub fn read_profiles(path: impl AsRef<Path>) -> Result<Profiles, FormatError> {
    read_profiles_from(BufReader::new(File::open(path)?))
}

/// One JSON object per line. Blank lines are skipped.
pub fn read_profiles_from<R: BufRead>(reader: R) -> Result<Profiles, FormatError> {
    let mut profiles = Profiles::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let profile: NodeProfile = serde_json::from_str(&line)
            .map_err(|e| FormatError::Malformed { line: line_no, message: e.to_string() })?;
        profile.check().map_err(|message| FormatError::Malformed { line: line_no, message })?;
        let node = profile.node;
        if profiles.insert(node, profile).is_some() {
            return Err(FormatError::DuplicateNode { line: line_no, node });
        }
    }
    Ok(profiles)
}

pub fn write_profiles(profiles: &Profiles, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_profiles_to(profiles, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_profiles_to<W: Write>(profiles: &Profiles, mut w: W) -> io::Result<()> {
    for p in profiles.values() {
        serde_json::to_writer(&mut w, p)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads one node id per line (seed pools, node subsets).
pub fn read_node_list(path: impl AsRef<Path>) -> Result<Vec<NodeId>, FormatError> {
    let reader = BufReader::new(File::open(path)?);
    let mut nodes = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        nodes.push(parse_id(t, idx as u64 + 1)?);
    }
    Ok(nodes)
}

pub fn write_node_list<'a, I>(nodes: I, path: impl AsRef<Path>) -> Result<(), FormatError>
where
    I: IntoIterator<Item = &'a NodeId>,
{
    let mut w = BufWriter::new(File::create(path)?);
    for n in nodes {
        writeln!(w, "{n}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<EdgeList, FormatError> {
        read_edge_list_from(text.as_bytes())
    }

    #[test]
    fn reads_reciprocal_pair() {
        let el = parse("source,target\n1,2\n2,1\n").unwrap();
        let edges: Vec<_> = el.graph.edges().collect();
        assert_eq!(edges, vec![(NodeId(1), NodeId(2)), (NodeId(2), NodeId(1))]);
        assert_eq!(el.duplicates, 0);
    }

    #[test]
    fn self_loop_names_line() {
        let err = parse("source,target\n1,2\n1,1\n").unwrap_err();
        assert!(matches!(err, FormatError::SelfLoop { line: 3, node: NodeId(1) }), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn malformed_names_line() {
        let err = parse("source,target\n1,2\n3,x\n").unwrap_err();
        assert!(matches!(err, FormatError::Malformed { line: 3, .. }), "{err}");
    }

    #[test]
    fn counts_duplicates() {
        let el = parse("source,target\n1,2\n1,2\n").unwrap();
        assert_eq!(el.graph.edge_count(), 1);
        assert_eq!(el.duplicates, 1);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(parse("from,to\n1,2\n"), Err(FormatError::Header { .. })));
    }

    #[test]
    fn extra_columns_are_ignored() {
        let el = parse("source,target,provenance\n1,2,walked\n2,1,symmetric\n").unwrap();
        assert_eq!(el.graph.edge_count(), 2);
    }

    fn profile(node: u64) -> NodeProfile {
        NodeProfile {
            node: NodeId(node),
            follower_count: 42,
            friends_recent_first: vec![NodeId(7), NodeId(5)],
            language: "de".into(),
            protected: false,
            created_at: 1_500_000_000,
            status_count: 10,
            last_status_at: None,
        }
    }

    #[test]
    fn reads_full_profile_line() {
        let line = r#"{"node":3,"follower_count":42,"friends_recent_first":[7,5],"language":"de","protected":false,"created_at":1500000000,"status_count":10,"last_status_at":1600000000}"#;
        let ps = read_profiles_from(line.as_bytes()).unwrap();
        let p = &ps[&NodeId(3)];
        assert_eq!(p.follower_count, 42);
        assert_eq!(p.friends_recent_first, vec![NodeId(7), NodeId(5)]);
        assert_eq!(p.last_status_at, Some(1_600_000_000));
    }

    #[test]
    fn optional_last_status_defaults_to_none() {
        let line = r#"{"node":3,"follower_count":1,"friends_recent_first":[],"language":"de","protected":true,"created_at":0,"status_count":0}"#;
        let ps = read_profiles_from(line.as_bytes()).unwrap();
        assert_eq!(ps[&NodeId(3)].last_status_at, None);
    }

    #[test]
    fn missing_field_names_line_and_field() {
        let text = format!(
            "{}\n{}\n",
            serde_json::to_string(&profile(1)).unwrap(),
            r#"{"node":2,"friends_recent_first":[],"language":"de","protected":false,"created_at":0,"status_count":0}"#
        );
        let err = read_profiles_from(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("follower_count"), "{err}");
    }

    #[test]
    fn duplicate_profile_is_an_error() {
        let line = serde_json::to_string(&profile(1)).unwrap();
        let text = format!("{line}\n{line}\n");
        assert!(matches!(
            read_profiles_from(text.as_bytes()),
            Err(FormatError::DuplicateNode { line: 2, node: NodeId(1) })
        ));
    }

    #[test]
    fn profile_listing_itself_is_rejected() {
        let mut p = profile(7);
        p.friends_recent_first = vec![NodeId(7)];
        let text = serde_json::to_string(&p).unwrap();
        assert!(read_profiles_from(text.as_bytes()).is_err());
    }

    #[test]
    fn thousand_edge_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut g = DirectedGraph::new();
        while g.edge_count() < 1000 {
            let s = NodeId(rng.random_range(0..300));
            let t = NodeId(rng.random_range(0..300));
            if s != t {
                g.add_edge(s, t).unwrap();
            }
        }
        let mut buf = Vec::new();
        write_edge_list_to(&g, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap().graph, g);
    }

    fn arb_profile() -> impl Strategy<Value = NodeProfile> {
        (
            0u64..1000,
            any::<u64>(),
            proptest::collection::btree_set(1000u64..2000, 0..8),
            "[a-z]{2}",
            any::<bool>(),
            any::<i64>(),
            any::<u64>(),
            proptest::option::of(any::<i64>()),
        )
            .prop_map(|(node, fc, friends, language, protected, created_at, sc, last)| NodeProfile {
                node: NodeId(node),
                follower_count: fc,
                friends_recent_first: friends.into_iter().rev().map(NodeId).collect(),
                language,
                protected,
                created_at,
                status_count: sc,
                last_status_at: last,
            })
    }

    proptest! {
        #[test]
        fn profiles_round_trip(list in proptest::collection::vec(arb_profile(), 0..100)) {
            let profiles: Profiles = list.into_iter().map(|p| (p.node, p)).collect();
            let mut buf = Vec::new();
            write_profiles_to(&profiles, &mut buf).unwrap();
            prop_assert_eq!(read_profiles_from(buf.as_slice()).unwrap(), profiles);
        }

        #[test]
        fn edge_lists_round_trip(edges in proptest::collection::vec((0u64..50, 0u64..50), 0..200)) {
            let g = DirectedGraph::from_edges(
                edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (NodeId(a), NodeId(b))),
            ).unwrap();
            let mut buf = Vec::new();
            write_edge_list_to(&g, &mut buf).unwrap();
            prop_assert_eq!(read_edge_list_from(buf.as_slice()).unwrap().graph, g);
        }
    }
}
