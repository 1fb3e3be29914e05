use std::collections::{BTreeMap, BTreeSet};

use super::ClusterError;
use crate::graph::{AccountId, EdgeKind, InteractionGraph};
use crate::scalar::Scalar;

/// Binary incidence between map accounts (rows) and the entities they
/// affiliate with (columns), stored as sorted column lists per row.
///
/// Every column has at least one incidence. Rows with none are allowed and
/// reported by [`AffiliationMatrix::zero_rows`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffiliationMatrix {
    rows: Vec<AccountId>,
    cols: Vec<AccountId>,
    cells: Vec<Vec<usize>>,
}

impl AffiliationMatrix {
    /// Builds a matrix from per-row column indices into `cols`.
    ///
    /// Columns without any incidence are dropped and the rest renumbered in
    /// their original order.
    pub fn new(rows: Vec<AccountId>, cols: Vec<AccountId>, cells: Vec<Vec<usize>>) -> Result<Self, ClusterError> {
        assert_eq!(rows.len(), cells.len(), "one cell list per row");
        let mut seen = BTreeSet::new();
        for r in &rows {
            if !seen.insert(r) {
                return Err(ClusterError::DuplicateRow(r.to_string()));
            }
        }
        let mut used = vec![false; cols.len()];
        for (row, list) in cells.iter().enumerate() {
            for &c in list {
                if c >= cols.len() {
                    return Err(ClusterError::ColumnOutOfRange { row, col: c, cols: cols.len() });
                }
                used[c] = true;
            }
        }
        let mut remap = vec![usize::MAX; cols.len()];
        let mut kept = Vec::new();
        for (i, col) in cols.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(col);
            }
        }
        let cells = cells
            .into_iter()
            .map(|list| {
                let mut list: Vec<usize> = list.into_iter().map(|c| remap[c]).collect();
                list.sort_unstable();
                list.dedup();
                list
            })
            .collect();
        Ok(Self { rows, cols: kept, cells })
    }

    pub fn rows(&self) -> &[AccountId] {
        &self.rows
    }

    pub fn cols(&self) -> &[AccountId] {
        &self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    /// Sorted column indices set in `row`.
    pub fn row(&self, row: usize) -> &[usize] {
        &self.cells[row]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row].binary_search(&col).is_ok()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&r| self.cells[r].is_empty()).collect()
    }

    /// Number of columns shared by two rows.
    pub fn overlap(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.cells[a], &self.cells[b]);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Pairwise cosine similarities of all rows.
    pub fn similarity_matrix<T: Scalar>(&self) -> SimilarityMatrix<T> {
        let n = self.rows.len();
        let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); self.cols.len()];
        for (r, list) in self.cells.iter().enumerate() {
            for &c in list {
                by_col[c].push(r);
            }
        }
        let mut values = vec![T::zero(); n * n.saturating_sub(1) / 2];
        let mut counts = vec![0usize; n];
        for a in 0..n {
            let row_a = &self.cells[a];
            if row_a.is_empty() {
                continue;
            }
            for &c in row_a {
                // by_col lists are ascending in row index
                let col = &by_col[c];
                let start = col.partition_point(|&r| r <= a);
                for &b in &col[start..] {
                    counts[b] += 1;
                }
            }
            for b in a + 1..n {
                if counts[b] > 0 {
                    let norm = T::from_count(row_a.len() * self.cells[b].len()).sqrt();
                    values[condensed_index(n, a, b)] = T::from_count(counts[b]) / norm;
                    counts[b] = 0;
                }
            }
        }
        SimilarityMatrix { n, values }
    }
}

/// Cosine similarity of two binary rows; 0 when either row is empty.
pub fn similarity<T: Scalar>(matrix: &AffiliationMatrix, a: usize, b: usize) -> T {
    let (la, lb) = (matrix.row(a).len(), matrix.row(b).len());
    if la == 0 || lb == 0 {
        return T::zero();
    }
    if a == b {
        return T::one();
    }
    T::from_count(matrix.overlap(a, b)) / T::from_count(la * lb).sqrt()
}

pub(crate) fn condensed_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Upper triangle of a symmetric similarity matrix, diagonal excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> SimilarityMatrix<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => T::one(),
            std::cmp::Ordering::Less => self.values[condensed_index(self.n, a, b)],
            std::cmp::Ordering::Greater => self.values[condensed_index(self.n, b, a)],
        }
    }
}

/// Incidence of `map_accounts` against every account they reach through a
/// `relation` edge, inside or outside the map.
pub fn build_affiliation<'a>(
    graph: &InteractionGraph,
    map_accounts: impl IntoIterator<Item = &'a AccountId>,
    relation: EdgeKind,
) -> Result<AffiliationMatrix, ClusterError> {
    let accounts: BTreeSet<&AccountId> = map_accounts.into_iter().collect();
    if accounts.is_empty() {
        return Err(ClusterError::EmptyMapAccounts);
    }
    let unknown: Vec<String> = accounts.iter().filter(|a| !graph.contains(a.as_str())).map(|a| a.to_string()).collect();
    if !unknown.is_empty() {
        return Err(ClusterError::UnknownAccounts(unknown));
    }
    let mut col_index: BTreeMap<usize, usize> = BTreeMap::new();
    let row_targets: Vec<Vec<usize>> = accounts
        .iter()
        .map(|a| {
            let node = graph.index_of(a.as_str()).expect("checked above");
            graph.out_neighbors(node, Some(relation)).collect()
        })
        .collect();
    for targets in &row_targets {
        for &t in targets {
            col_index.entry(t).or_insert(0);
        }
    }
    // graph node order is id order, so columns come out sorted by id
    for (i, v) in col_index.values_mut().enumerate() {
        *v = i;
    }
    let cols: Vec<AccountId> = col_index.keys().map(|&n| graph.id(n).clone()).collect();
    let cells = row_targets.into_iter().map(|t| t.into_iter().map(|n| col_index[&n]).collect()).collect();
    let rows: Vec<AccountId> = accounts.into_iter().cloned().collect();
    let matrix = AffiliationMatrix::new(rows, cols, cells)?;
    let zero = matrix.zero_rows().len();
    if zero > 0 {
        log::warn!("{zero} map accounts have no {relation} affiliations");
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_pairs;

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn matrix(rows: &[&[usize]], ncols: usize) -> AffiliationMatrix {
        AffiliationMatrix::new(
            (0..rows.len()).map(|i| id(&format!("r{i:02}"))).collect(),
            (0..ncols).map(|i| id(&format!("c{i:02}"))).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cosine_examples() {
        let m = matrix(&[&[0, 1], &[1, 2], &[0, 1], &[2], &[]], 3);
        assert_eq!(similarity::<f64>(&m, 0, 2), 1.0);
        assert_eq!(similarity::<f64>(&m, 0, 3), 0.0);
        assert!((similarity::<f64>(&m, 0, 1) - 0.5).abs() < 1e-12);
        assert_eq!(similarity::<f64>(&m, 4, 4), 0.0);
        assert_eq!(similarity::<f64>(&m, 0, 0), 1.0);
    }

    #[test]
    fn similarity_matrix_matches_pairwise() {
        let m = matrix(&[&[0, 1, 4], &[1, 2], &[0, 1], &[2, 3, 4], &[], &[4]], 5);
        let s = m.similarity_matrix::<f64>();
        for a in 0..m.row_count() {
            for b in 0..m.row_count() {
                if a != b {
                    assert!((s.get(a, b) - similarity::<f64>(&m, a, b)).abs() < 1e-12, "{a},{b}");
                }
            }
        }
    }

    #[test]
    fn empty_columns_dropped() {
        let m = matrix(&[&[0, 3], &[3]], 5);
        assert_eq!(m.col_count(), 2);
        assert_eq!(m.cols()[1].as_str(), "c03");
        assert_eq!(m.row(0), &[0, 1]);
    }

    #[test]
    fn constructor_checks() {
        assert!(matches!(
            AffiliationMatrix::new(vec![id("a"), id("a")], vec![id("x")], vec![vec![0], vec![0]]),
            Err(ClusterError::DuplicateRow(_))
        ));
        assert!(matches!(
            AffiliationMatrix::new(vec![id("a")], vec![id("x")], vec![vec![3]]),
            Err(ClusterError::ColumnOutOfRange { row: 0, col: 3, cols: 1 })
        ));
    }

    #[test]
    fn build_from_graph_includes_outside_entities() {
        let g = graph_from_pairs(
            &[("a", "x"), ("a", "y"), ("b", "x"), ("b", "y"), ("a", "b"), ("c", "a"), ("q", "z")],
            EdgeKind::Follow,
        );
        let mut g2 = crate::graph::GraphBuilder::new();
        for e in g.edges() {
            g2.add_edge(e.src, e.dst, e.kind);
        }
        g2.add_edge(id("a"), id("w"), EdgeKind::Mention);
        g2.add_node(id("idle"));
        let g = g2.build();
        let m = build_affiliation(&g, &[id("a"), id("b"), id("idle")], EdgeKind::Follow).unwrap();
        let cols: Vec<_> = m.cols().iter().map(|c| c.as_str()).collect();
        assert_eq!(cols, ["b", "x", "y"]);
        assert_eq!(m.rows()[0].as_str(), "a");
        assert_eq!(m.row(0), &[0, 1, 2]);
        assert_eq!(m.row(1), &[1, 2]);
        assert_eq!(m.zero_rows(), vec![2]);
    }

    #[test]
    fn build_errors() {
        let g = graph_from_pairs(&[("a", "b")], EdgeKind::Follow);
        assert!(matches!(build_affiliation(&g, &[], EdgeKind::Follow), Err(ClusterError::EmptyMapAccounts)));
        match build_affiliation(&g, &[id("a"), id("nope")], EdgeKind::Follow) {
            Err(ClusterError::UnknownAccounts(u)) => assert_eq!(u, ["nope"]),
            other => panic!("{other:?}"),
        }
    }
}
