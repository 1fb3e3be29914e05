#![allow(dead_code)]

use netmap_core::graph::{AccountId, EdgeKind, GraphBuilder, InteractionGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> AccountId {
    AccountId::new(s).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directed Erdos-Renyi graph on `n` nodes named `n000`.. with every node present.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> InteractionGraph {
    let mut r = rng(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(id(&format!("n{i:03}")));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && r.random_bool(p) {
                b.add_edge(id(&format!("n{i:03}")), id(&format!("n{j:03}")), EdgeKind::Follow);
            }
        }
    }
    b.build()
}

/// Plain undirected neighbour sets straight from the edge list.
pub fn neighbour_sets(g: &InteractionGraph) -> Vec<std::collections::BTreeSet<usize>> {
    let mut adj = vec![std::collections::BTreeSet::new(); g.node_count()];
    for e in g.indexed_edges() {
        adj[e.src].insert(e.dst);
        adj[e.dst].insert(e.src);
    }
    adj
}

/// Repeatedly delete any node with fewer than `k` live neighbours until nothing changes.
pub fn peel(g: &InteractionGraph, k: usize) -> Vec<bool> {
    let adj = neighbour_sets(g);
    let mut alive = vec![true; g.node_count()];
    loop {
        let mut changed = false;
        for v in 0..alive.len() {
            if alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}
