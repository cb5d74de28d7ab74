use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::graph::connected_components;
use super::{CatalogError, ContentCatalog, RelationCase, UtilityGraph};

/// A malformed input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub source: &'static str,
    pub line: usize,
    pub message: &'static str,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} line {}: {}", self.source, self.line, self.message)
    }
}

impl core::error::Error for ParseError {}

/// A related-content dataset after preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestedDataset {
    pub catalog: ContentCatalog,
    /// Symmetric Case 1 relation graph.
    pub graph: UtilityGraph,
    /// Original id of each dense content index.
    pub ids: Vec<String>,
}

fn records<'a>(
    text: &'a str,
    source: &'static str,
) -> impl Iterator<Item = Result<(usize, &'a str, &'a str), ParseError>> + 'a {
    text.lines().enumerate().filter_map(move |(n, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let mut tokens = line.split_whitespace();
        Some(match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => Ok((n + 1, a, b)),
            _ => Err(ParseError {
                source,
                line: n + 1,
                message: "expected exactly two whitespace-separated fields",
            }),
        })
    })
}

/// Preprocesses a related-content crawl into a catalog and relation graph.
///
/// `edge_text` holds one `id id` pair per line ("the second id is related to
/// the first"); `popularity_text` one `id count` pair per line. `#` lines are
/// comments. Contents with zero or missing popularity are dropped, relations
/// are made symmetric, and only the largest connected component survives
/// (ties go to the component holding the smallest id). Dense indices follow
/// first appearance in the edge list.
pub fn ingest_related_graph(edge_text: &str, popularity_text: &str) -> Result<IngestedDataset, CatalogError> {
    let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
    for rec in records(popularity_text, "popularity file") {
        let (line, id, count) = rec?;
        let err = |message| ParseError {
            source: "popularity file",
            line,
            message,
        };
        let value: f64 = count.parse().map_err(|_| err("count is not a number"))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(err("count must be a nonnegative number").into());
        }
        if counts.insert(id, value).is_some() {
            return Err(err("duplicate id").into());
        }
    }

    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut ids: Vec<&str> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for rec in records(edge_text, "edge file") {
        let (_, a, b) = rec?;
        let alive = |id: &str| counts.get(id).is_some_and(|&c| c > 0.0);
        if !(alive(a) && alive(b)) || a == b {
            continue;
        }
        let mut slot = |id| {
            *index.entry(id).or_insert_with(|| {
                ids.push(id);
                ids.len() - 1
            })
        };
        let (i, j) = (slot(a), slot(b));
        edges.push((i, j));
    }
    if ids.is_empty() {
        return Err(CatalogError::InvalidDataset(
            "no relation survives popularity filtering",
        ));
    }

    let full = UtilityGraph::from_edges(ids.len(), edges, RelationCase::Binary, true)?;
    let comps = connected_components(&full);
    let mut sizes = vec![0usize; comps.count];
    let mut smallest_id: Vec<Option<&str>> = vec![None; comps.count];
    for (node, &c) in comps.label.iter().enumerate() {
        sizes[c] += 1;
        let id = ids[node];
        if smallest_id[c].is_none_or(|s| id < s) {
            smallest_id[c] = Some(id);
        }
    }
    let keep = (0..comps.count)
        .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(smallest_id[b].cmp(&smallest_id[a])))
        .expect("at least one component");
    if sizes[keep] < 2 {
        return Err(CatalogError::InvalidDataset("largest component has no relations"));
    }

    let mut remap = vec![usize::MAX; ids.len()];
    let mut kept_ids = Vec::with_capacity(sizes[keep]);
    for (node, &c) in comps.label.iter().enumerate() {
        if c == keep {
            remap[node] = kept_ids.len();
            kept_ids.push(ids[node]);
        }
    }
    let rows: Vec<Vec<usize>> = full
        .rows()
        .iter()
        .enumerate()
        .filter(|(node, _)| remap[*node] != usize::MAX)
        .map(|(_, row)| row.iter().map(|&j| remap[j]).collect())
        .collect();
    let graph = UtilityGraph::new(rows, RelationCase::Binary)?;
    let weights = kept_ids.iter().map(|id| counts[id]).collect();
    Ok(IngestedDataset {
        catalog: ContentCatalog::from_weights(weights)?,
        graph,
        ids: kept_ids.into_iter().map(ToString::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let d = ingest_related_graph("a b\n", "a 10\nb 30\n").unwrap();
        assert_eq!(d.ids, ["a", "b"]);
        assert_eq!(d.catalog.popularity(), &[0.25, 0.75]);
        assert_eq!(d.graph.row(0), &[1]);
        assert_eq!(d.graph.row(1), &[0]);
    }

    #[test]
    fn equal_components_keep_smallest_id() {
        let d = ingest_related_graph("d c\nb a\n", "a 1\nb 1\nc 1\nd 1\n").unwrap();
        assert_eq!(d.ids, ["b", "a"]);
        assert_eq!(d.catalog.popularity(), &[0.5, 0.5]);
    }

    #[test]
    fn zero_popularity_isolates_everything() {
        let err = ingest_related_graph("a b\n", "a 10\nb 0\n").unwrap_err();
        assert!(matches!(err, CatalogError::InvalidDataset(_)));
        let err = ingest_related_graph("a b\n", "a 10\n").unwrap_err();
        assert!(matches!(err, CatalogError::InvalidDataset(_)));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = ingest_related_graph("# header\na b\nc\n", "a 1\nb 1\n").unwrap_err();
        assert_eq!(
            err,
            CatalogError::Parse(ParseError {
                source: "edge file",
                line: 3,
                message: "expected exactly two whitespace-separated fields"
            })
        );
        let err = ingest_related_graph("a b\n", "a 1\nb x\n").unwrap_err();
        assert!(matches!(err, CatalogError::Parse(ParseError { line: 2, .. })));
        let err = ingest_related_graph("a b\n", "a 1\nb -3\n").unwrap_err();
        assert!(matches!(err, CatalogError::Parse(ParseError { line: 2, .. })));
    }

    #[test]
    fn keeps_largest_component_and_renormalizes() {
        let edges = "x y\ny z\nz x\np q\nx x\n";
        let pops = "x 1\ny 1\nz 2\np 100\nq 100\n";
        let d = ingest_related_graph(edges, pops).unwrap();
        assert_eq!(d.ids, ["x", "y", "z"]);
        assert_eq!(d.catalog.popularity(), &[0.25, 0.25, 0.5]);
        assert!(d.graph.is_symmetric());
        assert_eq!(d.graph.edge_count(), 6);
    }
}
