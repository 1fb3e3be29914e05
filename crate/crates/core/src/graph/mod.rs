//! Account interaction graph: data model, ingestion, snowball sampling and
//! k-core reduction.

mod io;
mod kcore;
mod snowball;

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{load_citations, load_edge_list, load_seeds, write_edge_list, CitationRecord, EdgeListLoad};
pub use kcore::{core_numbers, kcore_decompose, reduce, select_k_for_target, KCoreParams, KCoreSelection};
pub use snowball::snowball_expand;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("account id must be non-empty")]
    EmptyAccountId,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unknown edge kind `{0}` (expected follow, like or mention)")]
    UnknownEdgeKind(String),
    #[error("seed accounts not present in graph: {}", .0.join(", "))]
    MissingSeeds(Vec<String>),
    #[error("snowball depth must be at least 1")]
    InvalidDepth,
    #[error("target core size must be at least 1")]
    InvalidTarget,
    #[error("target core size {target} exceeds graph size {nodes}")]
    TargetTooLarge { target: usize, nodes: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Platform handle or page id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Result<Self, GraphError> {
        let id = id.into();
        if id.is_empty() {
            return Err(GraphError::EmptyAccountId);
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AccountId {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<AccountId> for String {
    fn from(id: AccountId) -> Self {
        id.0
    }
}

impl Borrow<str> for AccountId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Follow,
    Like,
    Mention,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::Follow, EdgeKind::Like, EdgeKind::Mention];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Follow => "follow",
            EdgeKind::Like => "like",
            EdgeKind::Mention => "mention",
        }
    }
}

impl FromStr for EdgeKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "follow" | "follows" => Ok(EdgeKind::Follow),
            "like" | "likes" => Ok(EdgeKind::Like),
            "mention" | "mentions" => Ok(EdgeKind::Mention),
            _ => Err(GraphError::UnknownEdgeKind(s.to_string())),
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: AccountId,
    pub dst: AccountId,
    pub kind: EdgeKind,
}

/// Node-indexed edge; indices refer to [`InteractionGraph::nodes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

/// Directed, typed, simple graph of accounts.
///
/// Nodes are kept sorted by id, so node indices and the edge order are a
/// pure function of the content. Parallel edges of the same kind collapse;
/// self-loops are never stored.
#[derive(Debug, Clone, Default)]
pub struct InteractionGraph {
    nodes: Vec<AccountId>,
    index: HashMap<AccountId, usize>,
    edges: Vec<IndexedEdge>,
    out_adj: Vec<Vec<(usize, EdgeKind)>>,
    in_adj: Vec<Vec<(usize, EdgeKind)>>,
}

impl PartialEq for InteractionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for InteractionGraph {}

impl InteractionGraph {
    fn from_parts(nodes: Vec<AccountId>, mut edges: Vec<IndexedEdge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let index = nodes.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        for e in &edges {
            out_adj[e.src].push((e.dst, e.kind));
            in_adj[e.dst].push((e.src, e.kind));
        }
        for list in in_adj.iter_mut() {
            list.sort_unstable();
        }
        Self { nodes, index, edges, out_adj, in_adj }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count_of(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Accounts in ascending id order.
    pub fn nodes(&self) -> &[AccountId] {
        &self.nodes
    }

    pub fn id(&self, index: usize) -> &AccountId {
        &self.nodes[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Edges sorted by (src, dst, kind).
    pub fn indexed_edges(&self) -> &[IndexedEdge] {
        &self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|e| Edge { src: self.nodes[e.src].clone(), dst: self.nodes[e.dst].clone(), kind: e.kind })
    }

    pub fn has_edge(&self, src: &str, dst: &str, kind: EdgeKind) -> bool {
        match (self.index_of(src), self.index_of(dst)) {
            (Some(s), Some(d)) => self.out_adj[s].binary_search(&(d, kind)).is_ok(),
            _ => false,
        }
    }

    /// Targets of `node`'s outgoing edges, optionally restricted to one kind.
    pub fn out_neighbors(&self, node: usize, kind: Option<EdgeKind>) -> impl Iterator<Item = usize> + '_ {
        self.out_adj[node].iter().filter(move |(_, k)| kind.is_none_or(|want| *k == want)).map(|(n, _)| *n)
    }

    pub fn in_neighbors(&self, node: usize, kind: Option<EdgeKind>) -> impl Iterator<Item = usize> + '_ {
        self.in_adj[node].iter().filter(move |(_, k)| kind.is_none_or(|want| *k == want)).map(|(n, _)| *n)
    }

    /// Distinct neighbours on the undirected projection, all kinds merged.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.src].push(e.dst);
            adj[e.dst].push(e.src);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Unordered distinct node pairs `(lo, hi)` joined by any edge.
    pub fn undirected_ties(&self) -> Vec<(usize, usize)> {
        let mut ties: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.src.min(e.dst), e.src.max(e.dst))).collect();
        ties.sort_unstable();
        ties.dedup();
        ties
    }

    /// Subgraph on the nodes for which `keep` holds, with all induced edges.
    pub fn induced_subgraph(&self, keep: impl Fn(usize) -> bool) -> InteractionGraph {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, id) in self.nodes.iter().enumerate() {
            if keep(i) {
                remap[i] = nodes.len();
                nodes.push(id.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.src] != usize::MAX && remap[e.dst] != usize::MAX)
            .map(|e| IndexedEdge { src: remap[e.src], dst: remap[e.dst], kind: e.kind })
            .collect();
        Self::from_parts(nodes, edges)
    }

    /// Induced subgraph on a set of account ids; unknown ids are ignored.
    pub fn restrict_to<'a>(&self, ids: impl IntoIterator<Item = &'a AccountId>) -> InteractionGraph {
        let mut keep = vec![false; self.nodes.len()];
        for id in ids {
            if let Some(i) = self.index_of(id.as_str()) {
                keep[i] = true;
            }
        }
        self.induced_subgraph(|i| keep[i])
    }

    /// Same node set, only edges of `kind`.
    pub fn with_kind(&self, kind: EdgeKind) -> InteractionGraph {
        self.with_kinds(&[kind])
    }

    /// Same node set, only edges whose kind is listed.
    pub fn with_kinds(&self, kinds: &[EdgeKind]) -> InteractionGraph {
        let edges = self.edges.iter().copied().filter(|e| kinds.contains(&e.kind)).collect();
        Self::from_parts(self.nodes.clone(), edges)
    }
}

/// Accumulates nodes and edges, collapsing duplicates and dropping self-loops.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<AccountId>,
    edges: BTreeSet<(AccountId, AccountId, EdgeKind)>,
    self_loops: usize,
    duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: AccountId) -> &mut Self {
        self.nodes.insert(id);
        self
    }

    /// Returns `false` when the edge was a self-loop or a duplicate.
    pub fn add_edge(&mut self, src: AccountId, dst: AccountId, kind: EdgeKind) -> bool {
        if src == dst {
            self.self_loops += 1;
            return false;
        }
        self.nodes.insert(src.clone());
        self.nodes.insert(dst.clone());
        let fresh = self.edges.insert((src, dst, kind));
        if !fresh {
            self.duplicates += 1;
        }
        fresh
    }

    pub fn self_loops_skipped(&self) -> usize {
        self.self_loops
    }

    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates
    }

    pub fn build(self) -> InteractionGraph {
        let nodes: Vec<AccountId> = self.nodes.into_iter().collect();
        let index: HashMap<&AccountId, usize> = nodes.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let edges = self.edges.iter().map(|(s, d, k)| IndexedEdge { src: index[s], dst: index[d], kind: *k }).collect();
        InteractionGraph::from_parts(nodes, edges)
    }
}

#[cfg(test)]
pub(crate) fn graph_from_pairs(pairs: &[(&str, &str)], kind: EdgeKind) -> InteractionGraph {
    let mut b = GraphBuilder::new();
    for (s, d) in pairs {
        b.add_edge(AccountId::new(*s).unwrap(), AccountId::new(*d).unwrap(), kind);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    #[test]
    fn account_id_rejects_empty() {
        assert!(matches!(AccountId::new(""), Err(GraphError::EmptyAccountId)));
    }

    #[test]
    fn builder_collapses_duplicates_and_self_loops() {
        let mut b = GraphBuilder::new();
        assert!(b.add_edge(id("a"), id("b"), EdgeKind::Follow));
        assert!(!b.add_edge(id("a"), id("b"), EdgeKind::Follow));
        assert!(b.add_edge(id("a"), id("b"), EdgeKind::Mention));
        assert!(!b.add_edge(id("c"), id("c"), EdgeKind::Like));
        assert_eq!(b.duplicates_collapsed(), 1);
        assert_eq!(b.self_loops_skipped(), 1);
        let g = b.build();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_count_of(EdgeKind::Follow), 1);
        assert!(g.has_edge("a", "b", EdgeKind::Mention));
        assert!(!g.has_edge("b", "a", EdgeKind::Follow));
    }

    #[test]
    fn adjacency_in_both_directions() {
        let g = graph_from_pairs(&[("a", "b"), ("c", "a")], EdgeKind::Like);
        let a = g.index_of("a").unwrap();
        let out: Vec<_> = g.out_neighbors(a, None).map(|i| g.id(i).as_str()).collect();
        let inn: Vec<_> = g.in_neighbors(a, Some(EdgeKind::Like)).map(|i| g.id(i).as_str()).collect();
        assert_eq!(out, ["b"]);
        assert_eq!(inn, ["c"]);
        assert_eq!(g.in_neighbors(a, Some(EdgeKind::Follow)).count(), 0);
    }

    #[test]
    fn undirected_projection_merges_reciprocal_edges() {
        let g = graph_from_pairs(&[("a", "b"), ("b", "a"), ("b", "c")], EdgeKind::Follow);
        assert_eq!(g.undirected_ties(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.undirected_adjacency()[1], vec![0, 2]);
    }

    #[test]
    fn induced_subgraph_keeps_only_internal_edges() {
        let g = graph_from_pairs(&[("a", "b"), ("b", "c"), ("c", "a")], EdgeKind::Follow);
        let sub = g.restrict_to(&[id("a"), id("b")]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![Edge { src: id("a"), dst: id("b"), kind: EdgeKind::Follow }]);
    }

    #[test]
    fn edge_kind_parses_case_insensitively() {
        assert_eq!("Follow".parse::<EdgeKind>().unwrap(), EdgeKind::Follow);
        assert_eq!("likes".parse::<EdgeKind>().unwrap(), EdgeKind::Like);
        assert!("retweet".parse::<EdgeKind>().is_err());
    }
}
