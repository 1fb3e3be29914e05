use std::io::{BufRead, Write};

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{AccountId, EdgeKind, GraphBuilder, GraphError, InteractionGraph};
use crate::content::{normalize_domain, BaseDomain};

/// Result of reading an edge list: the graph plus ingestion counters.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: InteractionGraph,
    pub records: usize,
    pub self_loops_skipped: usize,
    pub duplicates_collapsed: usize,
}

/// Yields `(line_number, fields)` for every non-blank, non-comment line.
fn records<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, Vec<String>), GraphError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(GraphError::Io(e))),
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        let fields = line.trim_end_matches(['\r', '\n']).split('\t').map(|f| f.trim().to_string()).collect();
        Some(Ok((i + 1, fields)))
    })
}

fn account(field: &str, line: usize, what: &str) -> Result<AccountId, GraphError> {
    AccountId::new(field).map_err(|_| GraphError::Malformed { line, reason: format!("empty {what} account") })
}

/// Reads a tab-separated `src<TAB>dst[<TAB>kind]` edge list.
///
/// Lines starting with `#` and blank lines are ignored. The optional third
/// column overrides `kind` for that record. A line with a single id declares
/// a node without edges. Self-loops are skipped and counted; duplicates
/// collapse.
pub fn load_edge_list<R: BufRead>(reader: R, kind: EdgeKind) -> Result<EdgeListLoad, GraphError> {
    let mut builder = GraphBuilder::new();
    let mut count = 0;
    for rec in records(reader) {
        let (line, fields) = rec?;
        if fields.len() == 1 {
            builder.add_node(account(&fields[0], line, "node")?);
            continue;
        }
        if fields.len() > 3 {
            return Err(GraphError::Malformed {
                line,
                reason: format!("expected 1 to 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let src = account(&fields[0], line, "source")?;
        let dst = account(&fields[1], line, "target")?;
        let edge_kind = match fields.get(2) {
            Some(k) => {
                k.parse().map_err(|_| GraphError::Malformed { line, reason: format!("unknown edge kind `{k}`") })?
            }
            None => kind,
        };
        count += 1;
        if src == dst {
            log::warn!("line {line}: self-loop on `{src}` skipped");
        }
        builder.add_edge(src, dst, edge_kind);
    }
    let self_loops_skipped = builder.self_loops_skipped();
    let duplicates_collapsed = builder.duplicates_collapsed();
    Ok(EdgeListLoad { graph: builder.build(), records: count, self_loops_skipped, duplicates_collapsed })
}

/// Writes the graph as a sorted `src<TAB>dst<TAB>kind` edge list, followed
/// by one line per isolated node.
pub fn write_edge_list<W: Write>(graph: &InteractionGraph, mut out: W) -> std::io::Result<()> {
    let mut touched = vec![false; graph.node_count()];
    for e in graph.indexed_edges() {
        writeln!(out, "{}\t{}\t{}", graph.id(e.src), graph.id(e.dst), e.kind)?;
        touched[e.src] = true;
        touched[e.dst] = true;
    }
    for (i, _) in touched.iter().enumerate().filter(|(_, t)| !**t) {
        writeln!(out, "{}", graph.id(i))?;
    }
    Ok(())
}

/// One account id per line; `#` comments allowed. Order preserved, duplicates dropped.
pub fn load_seeds<R: BufRead>(reader: R) -> Result<Vec<AccountId>, GraphError> {
    let mut seeds: Vec<AccountId> = Vec::new();
    for rec in records(reader) {
        let (line, fields) = rec?;
        if fields.len() != 1 {
            return Err(GraphError::Malformed { line, reason: "seed lines hold exactly one account".into() });
        }
        let id = account(&fields[0], line, "seed")?;
        if !seeds.contains(&id) {
            seeds.push(id);
        }
    }
    Ok(seeds)
}

/// A URL shared by an account, with the post's reshare count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub account: AccountId,
    pub url: String,
    pub base_domain: BaseDomain,
    pub shares: u64,
    pub posted_at: Option<DateTime<FixedOffset>>,
}

/// Reads `account<TAB>url<TAB>shares[<TAB>rfc3339-timestamp]` records.
pub fn load_citations<R: BufRead>(reader: R) -> Result<Vec<CitationRecord>, GraphError> {
    let mut out = Vec::new();
    for rec in records(reader) {
        let (line, fields) = rec?;
        if fields.len() < 3 || fields.len() > 4 {
            return Err(GraphError::Malformed {
                line,
                reason: format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let account = account(&fields[0], line, "citing")?;
        let url = fields[1].clone();
        let base_domain = normalize_domain(&url).map_err(|e| GraphError::Malformed { line, reason: e.to_string() })?;
        let shares = fields[2].parse::<u64>().map_err(|_| GraphError::Malformed {
            line,
            reason: format!("share count `{}` is not a non-negative integer", fields[2]),
        })?;
        let posted_at = match fields.get(3).filter(|f| !f.is_empty()) {
            Some(ts) => Some(
                DateTime::parse_from_rfc3339(ts)
                    .map_err(|e| GraphError::Malformed { line, reason: format!("bad timestamp `{ts}`: {e}") })?,
            ),
            None => None,
        };
        out.push(CitationRecord { account, url, base_domain, shares, posted_at });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_stream_gives_empty_graph() {
        let load = load_edge_list("".as_bytes(), EdgeKind::Follow).unwrap();
        assert_eq!(load.graph.node_count(), 0);
        assert_eq!(load.graph.edge_count(), 0);
    }

    #[test]
    fn duplicate_records_collapse() {
        let load = load_edge_list("a\tb\na\tb\nb\tc\n".as_bytes(), EdgeKind::Follow).unwrap();
        assert_eq!(load.graph.node_count(), 3);
        assert_eq!(load.graph.edge_count(), 2);
        assert_eq!(load.records, 3);
        assert_eq!(load.duplicates_collapsed, 1);
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let text = "# header\n\na\tb\r\n  # indented comment\nb\tc\tmention\n";
        let load = load_edge_list(text.as_bytes(), EdgeKind::Like).unwrap();
        assert!(load.graph.has_edge("a", "b", EdgeKind::Like));
        assert!(load.graph.has_edge("b", "c", EdgeKind::Mention));
    }

    #[test]
    fn malformed_record_names_line() {
        let err = load_edge_list("a\tb\na\tb\tfollow\textra\n".as_bytes(), EdgeKind::Follow).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 2, .. }), "{err}");
        let err = load_edge_list("a\tb\n\tb\n".as_bytes(), EdgeKind::Follow).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 2, .. }), "{err}");
        let err = load_edge_list("a\tb\tretweet\n".as_bytes(), EdgeKind::Follow).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 1, .. }), "{err}");
    }

    #[test]
    fn single_id_line_declares_node() {
        let g = load_edge_list("a\tb\nlonely\n".as_bytes(), EdgeKind::Follow).unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_loops_are_counted_not_stored() {
        let load = load_edge_list("a\ta\na\tb\n".as_bytes(), EdgeKind::Follow).unwrap();
        assert_eq!(load.self_loops_skipped, 1);
        assert_eq!(load.graph.edge_count(), 1);
        assert_eq!(load.graph.node_count(), 2);
    }

    #[test]
    fn snapshot_round_trip() {
        let load = load_edge_list("z\ty\na\tb\tlike\nb\ta\n".as_bytes(), EdgeKind::Follow).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&load.graph, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a\tb\tlike\nb\ta\tfollow\nz\ty\tfollow\n");
        let again = load_edge_list(buf.as_slice(), EdgeKind::Mention).unwrap();
        assert_eq!(again.graph, load.graph);
    }

    #[test]
    fn seeds_dedup_and_keep_order() {
        let seeds = load_seeds("# seeds\nveteranstoday\nsouthfront\nveteranstoday\n".as_bytes()).unwrap();
        let names: Vec<_> = seeds.iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["veteranstoday", "southfront"]);
    }

    #[test]
    fn citations_parse_and_normalize() {
        let text =
            "acct1\thttps://www.VeteransToday.com/2017/a-post\t12\t2017-06-01T12:00:00Z\nacct2\thttp://rt.com/x\t0\n";
        let recs = load_citations(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].base_domain.as_str(), "veteranstoday.com");
        assert_eq!(recs[0].shares, 12);
        assert!(recs[0].posted_at.is_some());
        assert_eq!(recs[1].posted_at, None);
    }

    #[test]
    fn citation_errors_carry_line() {
        let err = load_citations("a\thttp://rt.com\t-3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 1, .. }));
        let err = load_citations("a\thttp://rt.com\t1\nb\tnot a url\t2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 2, .. }), "{err}");
    }
}
