use std::num::NonZeroUsize;

use super::{GraphError, InteractionGraph};

/// How a k-core reduction is driven: a fixed degree threshold or a target core size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KCoreParams {
    Fixed(usize),
    TargetSize(NonZeroUsize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCoreSelection {
    pub k: usize,
    pub core: InteractionGraph,
}

impl KCoreSelection {
    pub fn size(&self) -> usize {
        self.core.node_count()
    }
}

/// Core number of every node on the undirected projection.
///
/// Bucket-based peeling (Batagelj and Zaversnik), linear in the number of ties.
pub fn core_numbers(graph: &InteractionGraph) -> Vec<usize> {
    let adj = graph.undirected_adjacency();
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = vec![0usize; max_deg + 1];
    let mut sum = 0;
    for d in 0..=max_deg {
        start[d] = sum;
        sum += bin[d];
    }

    let mut vert = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = start.clone();
    for v in 0..n {
        pos[v] = next[deg[v]];
        vert[pos[v]] = v;
        next[deg[v]] += 1;
    }

    for i in 0..n {
        let v = vert[i];
        for &u in &adj[v] {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = start[du];
                let w = vert[pw];
                if u != w {
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                    pos[u] = pw;
                }
                start[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Maximal induced subgraph in which every node has at least `k` distinct
/// neighbours (undirected, all edge kinds merged).
pub fn kcore_decompose(graph: &InteractionGraph, k: usize) -> InteractionGraph {
    if k == 0 {
        return graph.clone();
    }
    let core = core_numbers(graph);
    graph.induced_subgraph(|i| core[i] >= k)
}

/// Largest `k` whose core still holds at least `target_size` nodes.
pub fn select_k_for_target(graph: &InteractionGraph, target_size: usize) -> Result<KCoreSelection, GraphError> {
    if target_size == 0 {
        return Err(GraphError::InvalidTarget);
    }
    if target_size > graph.node_count() {
        return Err(GraphError::TargetTooLarge { target: target_size, nodes: graph.node_count() });
    }
    let core = core_numbers(graph);
    let max_core = core.iter().copied().max().unwrap_or(0);
    // sizes[k] = number of nodes with core number >= k
    let mut sizes = vec![0usize; max_core + 2];
    for &c in &core {
        sizes[c] += 1;
    }
    for k in (0..=max_core).rev() {
        sizes[k] += sizes[k + 1];
    }
    let k = (0..=max_core).rev().find(|&k| sizes[k] >= target_size).unwrap_or(0);
    log::info!("k-core: selected k = {k} with {} nodes (target {target_size})", sizes[k]);
    Ok(KCoreSelection { k, core: graph.induced_subgraph(|i| core[i] >= k) })
}

pub fn reduce(graph: &InteractionGraph, params: KCoreParams) -> Result<KCoreSelection, GraphError> {
    match params {
        KCoreParams::Fixed(k) => Ok(KCoreSelection { k, core: kcore_decompose(graph, k) }),
        KCoreParams::TargetSize(t) => select_k_for_target(graph, t.get()),
    }
}
