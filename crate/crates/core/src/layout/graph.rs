use std::collections::HashMap;

use super::LayoutError;
use crate::clustering::Grouping;
use crate::graph::InteractionGraph;
use crate::metrics::HeterophilyMatrix;
use crate::scalar::Scalar;

/// Undirected weighted graph ready for placement.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutGraph<T> {
    pub nodes: Vec<String>,
    /// Positive display size per node.
    pub sizes: Vec<T>,
    /// `(a, b, weight)` with `a < b`, weight `> 0`.
    pub edges: Vec<(usize, usize, T)>,
    /// Colour class per node (index into the style palette).
    pub classes: Vec<usize>,
}

impl<T: Scalar> LayoutGraph<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Anything that can be turned into a [`LayoutGraph`].
pub trait LayoutSource<T> {
    fn to_layout_graph(&self) -> LayoutGraph<T>;
}

impl<T: Scalar> LayoutSource<T> for LayoutGraph<T> {
    fn to_layout_graph(&self) -> LayoutGraph<T> {
        self.clone()
    }
}

/// Unit-weight ties; a node's size is one plus the number of other map
/// nodes pointing at it.
impl<T: Scalar> LayoutSource<T> for InteractionGraph {
    fn to_layout_graph(&self) -> LayoutGraph<T> {
        let sizes = (0..self.node_count())
            .map(|i| {
                let mut inn: Vec<usize> = self.in_neighbors(i, None).collect();
                inn.dedup();
                T::from_count(1 + inn.len())
            })
            .collect();
        LayoutGraph {
            nodes: self.nodes().iter().map(|n| n.to_string()).collect(),
            sizes,
            edges: self.undirected_ties().into_iter().map(|(a, b)| (a, b, T::one())).collect(),
            classes: vec![0; self.node_count()],
        }
    }
}

/// One node per group, joined by heterophily-weighted edges.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupGraph<T> {
    pub labels: Vec<String>,
    pub member_counts: Vec<usize>,
    /// Off-diagonal pairs with a non-zero index, `(a, b, index)` with `a < b`.
    pub edges: Vec<(usize, usize, T)>,
}

impl<T: Scalar> LayoutSource<T> for GroupGraph<T> {
    fn to_layout_graph(&self) -> LayoutGraph<T> {
        LayoutGraph {
            nodes: self.labels.clone(),
            sizes: self.member_counts.iter().map(|&c| T::from_count(c.max(1))).collect(),
            edges: self.edges.clone(),
            classes: (0..self.labels.len()).collect(),
        }
    }
}

pub fn aggregate_group_graph<T: Scalar>(
    grouping: &Grouping,
    heterophily: &HeterophilyMatrix<T>,
) -> Result<GroupGraph<T>, LayoutError> {
    let labels: Vec<String> = grouping.groups().iter().map(|g| g.label.clone()).collect();
    let pos: HashMap<&str, usize> = heterophily.labels().iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let missing: Vec<&str> = labels.iter().map(String::as_str).filter(|l| !pos.contains_key(l)).collect();
    if !missing.is_empty() || labels.len() != heterophily.group_count() {
        let extra: Vec<&str> =
            heterophily.labels().iter().map(String::as_str).filter(|l| !labels.iter().any(|x| x == l)).collect();
        return Err(LayoutError::LabelMismatch(format!(
            "missing from heterophily: [{}]; missing from grouping: [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    let mut edges = Vec::new();
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let w = heterophily.index(pos[labels[a].as_str()], pos[labels[b].as_str()]);
            if w > T::zero() {
                edges.push((a, b, w));
            }
        }
    }
    Ok(GroupGraph { member_counts: (0..labels.len()).map(|g| grouping.group_size(g)).collect(), labels, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_from_pairs, AccountId, EdgeKind};
    use crate::metrics::{heterophily, TieCounts};

    fn grouping(groups: &[(&str, usize)]) -> Grouping {
        let mut next = 0;
        Grouping::from_groups(
            groups
                .iter()
                .map(|(l, n)| {
                    let members = (0..*n)
                        .map(|_| {
                            next += 1;
                            AccountId::new(format!("u{next:04}")).unwrap()
                        })
                        .collect();
                    (l.to_string(), members)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_group_single_node() {
        let gr = grouping(&[("All", 5)]);
        let counts = TieCounts::new(vec!["All".into()], vec![5], vec![4]).unwrap();
        let h = heterophily::<f64>(&counts).unwrap();
        let gg = aggregate_group_graph(&gr, &h).unwrap();
        assert_eq!(gg.labels, ["All"]);
        assert_eq!(gg.member_counts, [5]);
        assert!(gg.edges.is_empty());
    }

    #[test]
    fn two_groups_one_edge() {
        let gr = grouping(&[("A", 3), ("B", 3)]);
        // A-B 6 ties, within 0: expected A-B = (6*3 + 6*3)/12 = 3, ratio 2
        let counts = TieCounts::new(vec!["A".into(), "B".into()], vec![3, 3], vec![0, 6, 6, 0]).unwrap();
        let h = heterophily::<f64>(&counts).unwrap();
        let gg = aggregate_group_graph(&gr, &h).unwrap();
        assert_eq!(gg.edges.len(), 1);
        assert_eq!((gg.edges[0].0, gg.edges[0].1), (0, 1));
        assert!((gg.edges[0].2 - h.index(0, 1)).abs() < 1e-12);
    }

    #[test]
    fn label_mismatch() {
        let gr = grouping(&[("A", 3), ("C", 3)]);
        let counts = TieCounts::new(vec!["A".into(), "B".into()], vec![3, 3], vec![0, 6, 6, 0]).unwrap();
        let h = heterophily::<f64>(&counts).unwrap();
        match aggregate_group_graph(&gr, &h) {
            Err(LayoutError::LabelMismatch(msg)) => assert!(msg.contains('C') && msg.contains('B'), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interaction_graph_sizes_follow_in_degree() {
        let g = graph_from_pairs(&[("a", "c"), ("b", "c"), ("c", "a")], EdgeKind::Follow);
        let lg: LayoutGraph<f64> = g.to_layout_graph();
        assert_eq!(lg.sizes, vec![2.0, 1.0, 3.0]);
        assert_eq!(lg.edges.len(), 2);
    }
}
