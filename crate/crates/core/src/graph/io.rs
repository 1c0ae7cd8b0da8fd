//! Edge-list text format.
//!
//! One arc per line, `src dst [weight]`, fields split on ASCII whitespace.
//! The weight defaults to 1.0. Lines starting with `#` and blank lines are
//! ignored. A stream is either a directory of `NNNN.edges` files (taken in
//! lexicographic order) or a single file where `T <index>` lines open each
//! snapshot.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{NodeId, Snapshot};
use crate::error::{Error, Result};

pub fn load_snapshot(source: &str, time_index: u64) -> Result<Snapshot> {
    let mut builder = EdgeListBuilder::default();
    for (n, line) in source.lines().enumerate() {
        builder.push_line(n + 1, line)?;
    }
    builder.finish(time_index)
}

pub fn read_snapshot_file(path: &Path, time_index: u64) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_snapshot(&text, time_index).map_err(|e| with_path(e, path))
}

/// Parses a single-file stream with `T <index>` separators. Indices must
/// start at 0 and increase by one.
pub fn parse_stream(source: &str) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    let mut current: Option<(u64, EdgeListBuilder)> = None;
    for (n, line) in source.lines().enumerate() {
        let lineno = n + 1;
        let mut fields = line.split_ascii_whitespace();
        if fields.next() == Some("T") {
            let index = match (fields.next(), fields.next()) {
                (Some(tok), None) => tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid time index `{tok}`"),
                })?,
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "expected `T <index>`".into(),
                    })
                }
            };
            let expected = out.len() as u64 + u64::from(current.is_some());
            if index != expected {
                return Err(Error::Sequencing {
                    expected,
                    found: index,
                });
            }
            if let Some((t, b)) = current.take() {
                out.push(b.finish(t)?);
            }
            current = Some((index, EdgeListBuilder::default()));
            continue;
        }
        match current.as_mut() {
            Some((_, b)) => b.push_line(lineno, line)?,
            None if is_blank_or_comment(line) => {}
            None => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "edge before the first `T <index>` line".into(),
                })
            }
        }
    }
    if let Some((t, b)) = current {
        out.push(b.finish(t)?);
    }
    Ok(out)
}

/// Loads a stream from a directory of `*.edges` files or a `T`-separated file.
pub fn load_stream(path: &Path) -> Result<Vec<Snapshot>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "edges") && p.is_file() {
                files.push(p);
            }
        }
        files.sort();
        files
            .iter()
            .enumerate()
            .map(|(t, p)| read_snapshot_file(p, t as u64))
            .collect()
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let has_separators = text
            .lines()
            .any(|l| l.split_ascii_whitespace().next() == Some("T"));
        if has_separators {
            parse_stream(&text).map_err(|e| with_path(e, path))
        } else {
            Ok(vec![load_snapshot(&text, 0).map_err(|e| with_path(e, path))?])
        }
    }
}

/// File name of snapshot `t` in a stream directory.
pub fn snapshot_file_name(time_index: u64) -> String {
    format!("{time_index:04}.edges")
}

/// Renders a snapshot as edge-list text, arcs ordered by `(src, dst)`.
/// Self-loops and isolated nodes have no representation and are rejected.
pub fn write_snapshot(snapshot: &Snapshot) -> Result<String> {
    let mut out = String::new();
    for (src, dst, w) in snapshot.edges() {
        if src == dst {
            return Err(Error::SelfLoopPresent(src));
        }
        writeln!(out, "{src} {dst} {w}").expect("writing to a String");
    }
    for &node in snapshot.nodes() {
        if snapshot.in_edges(node).next().is_none() && snapshot.out_edges(node).next().is_none()
        {
            return Err(Error::Domain(format!(
                "isolated node {node} cannot be written as an edge list"
            )));
        }
    }
    Ok(out)
}

pub fn write_snapshot_file(snapshot: &Snapshot, path: &Path) -> Result<()> {
    let text = write_snapshot(snapshot)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn with_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

fn is_blank_or_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

#[derive(Default)]
struct EdgeListBuilder {
    edges: Vec<(NodeId, NodeId, f64)>,
}

impl EdgeListBuilder {
    fn push_line(&mut self, lineno: usize, line: &str) -> Result<()> {
        if is_blank_or_comment(line) {
            return Ok(());
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `src dst [weight]`, got {} fields", fields.len()),
            });
        }
        let node = |tok: &str| {
            tok.parse::<u64>().map(NodeId).map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id `{tok}`"),
            })
        };
        let src = node(fields[0])?;
        let dst = node(fields[1])?;
        let weight = match fields.get(2) {
            Some(tok) => tok.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight `{tok}`"),
            })?,
            None => 1.0,
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::NonPositiveWeight {
                line: lineno,
                weight,
            });
        }
        if src == dst {
            return Err(Error::Domain(format!(
                "line {lineno}: self-loop {src} -> {dst} in input data"
            )));
        }
        self.edges.push((src, dst, weight));
        Ok(())
    }

    fn finish(self, time_index: u64) -> Result<Snapshot> {
        Snapshot::from_edges(time_index, self.edges, [])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_weight_is_one() {
        let s = load_snapshot("1 2\n2 3", 0).unwrap();
        assert_eq!(s.nodes(), &[NodeId(1), NodeId(2), NodeId(3)]);
        let e: Vec<_> = s.edges().collect();
        assert_eq!(
            e,
            vec![(NodeId(1), NodeId(2), 1.0), (NodeId(2), NodeId(3), 1.0)]
        );
    }

    #[test]
    fn explicit_weights_and_comments() {
        let s = load_snapshot("1 2 0.5\n# comment\n2 1 2.5", 3).unwrap();
        assert_eq!(s.node_count(), 2);
        assert_eq!(s.time_index(), 3);
        assert_eq!(s.weight(NodeId(1), NodeId(2)), Some(0.5));
        assert_eq!(s.weight(NodeId(2), NodeId(1)), Some(2.5));
    }

    #[test]
    fn negative_weight_is_a_domain_error() {
        let err = load_snapshot("1 2 -1", 0).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { line: 1, .. }));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = load_snapshot("1 2\n\n1 x", 0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = load_snapshot("1 2 3 4", 0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = load_snapshot("1", 0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_lines_are_rejected() {
        let err = load_snapshot("1 2\n1 2 3.0", 0).unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { .. }));
    }

    #[test]
    fn separated_stream() {
        let text = "# header\nT 0\n1 2\nT 1\n1 2\n2 3 2\n";
        let s = parse_stream(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].time_index(), 1);
        assert_eq!(s[1].weight(NodeId(2), NodeId(3)), Some(2.0));
        assert!(matches!(
            parse_stream("T 0\n1 2\nT 2\n1 2").unwrap_err(),
            Error::Sequencing { expected: 1, found: 2 }
        ));
    }

    #[test]
    fn written_text_reloads_identically() {
        let s = load_snapshot("5 1 0.1\n1 5 3\n2 5 1e-3", 0).unwrap();
        let again = load_snapshot(&write_snapshot(&s).unwrap(), 0).unwrap();
        assert_eq!(s, again);
    }
}
