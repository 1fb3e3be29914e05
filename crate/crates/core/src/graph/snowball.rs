use std::collections::{BTreeSet, VecDeque};

use super::{AccountId, GraphError, InteractionGraph};

/// Seeds plus every account within `depth` steps, following edges in either
/// direction and of any kind.
pub fn snowball_expand<'a>(
    graph: &InteractionGraph,
    seeds: impl IntoIterator<Item = &'a AccountId>,
    depth: usize,
) -> Result<BTreeSet<AccountId>, GraphError> {
    if depth == 0 {
        return Err(GraphError::InvalidDepth);
    }
    let mut missing = Vec::new();
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = VecDeque::new();
    for seed in seeds {
        match graph.index_of(seed.as_str()) {
            Some(i) if dist[i] == usize::MAX => {
                dist[i] = 0;
                queue.push_back(i);
            }
            Some(_) => {}
            None => missing.push(seed.to_string()),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(GraphError::MissingSeeds(missing));
    }
    while let Some(v) = queue.pop_front() {
        if dist[v] == depth {
            continue;
        }
        for u in graph.out_neighbors(v, None).chain(graph.in_neighbors(v, None)) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Ok(dist.iter().enumerate().filter(|(_, d)| **d != usize::MAX).map(|(i, _)| graph.id(i).clone()).collect())
}
