use std::io::Write;

use super::MetricsError;
use crate::clustering::Grouping;
use crate::graph::InteractionGraph;
use crate::scalar::Scalar;

/// Undirected tie counts between and within groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieCounts {
    labels: Vec<String>,
    sizes: Vec<usize>,
    /// Symmetric `g × g`, row-major.
    ties: Vec<usize>,
    total: usize,
    dropped_nodes: usize,
}

impl TieCounts {
    /// `ties` is a symmetric row-major `g × g` matrix; the diagonal holds
    /// within-group ties.
    pub fn new(labels: Vec<String>, sizes: Vec<usize>, ties: Vec<usize>) -> Result<Self, MetricsError> {
        let g = labels.len();
        if g == 0 {
            return Err(MetricsError::EmptyGrouping);
        }
        if sizes.len() != g || ties.len() != g * g {
            return Err(MetricsError::Shape(format!("{g} labels, {} sizes, {} tie cells", sizes.len(), ties.len())));
        }
        for a in 0..g {
            for b in a + 1..g {
                if ties[a * g + b] != ties[b * g + a] {
                    return Err(MetricsError::Asymmetric(a, b));
                }
            }
        }
        let total = (0..g).flat_map(|a| (a..g).map(move |b| (a, b))).map(|(a, b)| ties[a * g + b]).sum();
        Ok(Self { labels, sizes, ties, total, dropped_nodes: 0 })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_count(&self) -> usize {
        self.labels.len()
    }

    pub fn group_index(&self, label: &str) -> Result<usize, MetricsError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| MetricsError::UnknownGroup(label.to_string()))
    }

    pub fn ties(&self, a: usize, b: usize) -> usize {
        self.ties[a * self.labels.len() + b]
    }

    pub fn total_ties(&self) -> usize {
        self.total
    }

    pub fn group_size(&self, g: usize) -> usize {
        self.sizes[g]
    }

    pub fn population(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Tie endpoints held by members of `g`; a within-group tie counts twice.
    pub fn endpoints(&self, g: usize) -> usize {
        (0..self.labels.len()).map(|b| if b == g { 2 * self.ties(g, g) } else { self.ties(g, b) }).sum()
    }

    /// Graph nodes that were not in the grouping.
    pub fn dropped_nodes(&self) -> usize {
        self.dropped_nodes
    }
}

/// Counts each undirected tie of the graph once, on its pair of groups.
///
/// Group sizes come from the grouping. Graph nodes outside the grouping are
/// dropped, along with their ties.
pub fn tie_counts(graph: &InteractionGraph, grouping: &Grouping) -> Result<TieCounts, MetricsError> {
    let g = grouping.group_count();
    if g == 0 {
        return Err(MetricsError::EmptyGrouping);
    }
    let group: Vec<Option<usize>> = graph.nodes().iter().map(|n| grouping.group_of(n.as_str())).collect();
    let dropped = group.iter().filter(|x| x.is_none()).count();
    if dropped > 0 {
        log::warn!("{dropped} graph nodes are not grouped and were left out of tie counts");
    }
    let mut ties = vec![0usize; g * g];
    for (u, v) in graph.undirected_ties() {
        if let (Some(a), Some(b)) = (group[u], group[v]) {
            ties[a * g + b] += 1;
            if a != b {
                ties[b * g + a] += 1;
            }
        }
    }
    let labels = grouping.groups().iter().map(|gr| gr.label.clone()).collect();
    let sizes = (0..g).map(|i| grouping.group_size(i)).collect();
    let mut counts = TieCounts::new(labels, sizes, ties)?;
    counts.dropped_nodes = dropped;
    Ok(counts)
}

fn expected_by_index<T: Scalar>(counts: &TieCounts, a: usize, b: usize) -> T {
    let n = T::from_count(counts.population());
    let (ea, eb) = (T::from_count(counts.endpoints(a)), T::from_count(counts.endpoints(b)));
    let (sa, sb) = (T::from_count(counts.group_size(a)), T::from_count(counts.group_size(b)));
    let two = T::lit(2.0);
    if a == b {
        ea * sa / (two * n)
    } else {
        (ea * sb + eb * sa) / (two * n)
    }
}

fn checked_pair(counts: &TieCounts, a: &str, b: &str) -> Result<(usize, usize), MetricsError> {
    let (ia, ib) = (counts.group_index(a)?, counts.group_index(b)?);
    for (i, label) in [(ia, a), (ib, b)] {
        if counts.group_size(i) == 0 {
            return Err(MetricsError::ZeroSizeGroup(label.to_string()));
        }
    }
    Ok((ia, ib))
}

/// Ties from `from`'s endpoints expected to land in `to` if every endpoint
/// picked its partner uniformly among all map accounts:
/// `endpoints(from) × size(to) / population`.
pub fn expected_ties_from<T: Scalar>(counts: &TieCounts, from: &str, to: &str) -> Result<T, MetricsError> {
    let (a, b) = checked_pair(counts, from, to)?;
    Ok(T::from_count(counts.endpoints(a)) * T::from_count(counts.group_size(b)) / T::from_count(counts.population()))
}

/// Expected ties on an unordered pair under uniform mixing.
///
/// Between groups this averages the two directed expectations; within a
/// group it halves the directed one because each tie uses two endpoints.
pub fn expected_ties<T: Scalar>(counts: &TieCounts, a: &str, b: &str) -> Result<T, MetricsError> {
    let (ia, ib) = checked_pair(counts, a, b)?;
    Ok(expected_by_index(counts, ia, ib))
}

/// Ratio of actual to expected ties for every group pair, with log and
/// shifted-log indices.
#[derive(Debug, Clone, PartialEq)]
pub struct HeterophilyMatrix<T> {
    labels: Vec<String>,
    actual: Vec<usize>,
    expected: Vec<T>,
    raw_ratio: Vec<T>,
    log_ratio: Vec<T>,
    index: Vec<T>,
    epsilon: T,
}

impl<T: Scalar> HeterophilyMatrix<T> {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_count(&self) -> usize {
        self.labels.len()
    }

    fn at(&self, a: usize, b: usize) -> usize {
        a * self.labels.len() + b
    }

    pub fn actual(&self, a: usize, b: usize) -> usize {
        self.actual[self.at(a, b)]
    }

    pub fn expected(&self, a: usize, b: usize) -> T {
        self.expected[self.at(a, b)]
    }

    /// Actual over expected ties, uncorrected (0 for silent pairs).
    pub fn raw_ratio(&self, a: usize, b: usize) -> T {
        self.raw_ratio[self.at(a, b)]
    }

    /// Natural log of the zero-corrected ratio; comparable across maps.
    pub fn log_ratio(&self, a: usize, b: usize) -> T {
        self.log_ratio[self.at(a, b)]
    }

    /// Log ratio shifted so the smallest pair sits at 0.
    pub fn index(&self, a: usize, b: usize) -> T {
        self.index[self.at(a, b)]
    }

    /// Value substituted for a zero ratio before taking the log.
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn index_by_label(&self, a: &str, b: &str) -> Option<T> {
        let ia = self.labels.iter().position(|l| l == a)?;
        let ib = self.labels.iter().position(|l| l == b)?;
        Some(self.index(ia, ib))
    }

    /// Upper-triangle table of indices rounded to integers, `-` below the diagonal.
    pub fn write_triangle_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["Group".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        let g = self.labels.len();
        for a in 0..g {
            let mut rec = vec![self.labels[a].clone()];
            for b in 0..g {
                rec.push(if b < a {
                    "-".to_string()
                } else {
                    format!("{:.0}", self.index(a, b).to_f64().unwrap_or(0.0))
                });
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One line per unordered pair with every stored quantity at full precision.
    pub fn write_pairs_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["group_a", "group_b", "actual", "expected", "raw_ratio", "log_ratio", "index"])?;
        let g = self.labels.len();
        for a in 0..g {
            for b in a..g {
                w.write_record([
                    self.labels[a].clone(),
                    self.labels[b].clone(),
                    self.actual(a, b).to_string(),
                    format!("{:.6}", self.expected(a, b).to_f64().unwrap_or(f64::NAN)),
                    format!("{:.6}", self.raw_ratio(a, b).to_f64().unwrap_or(f64::NAN)),
                    format!("{:.6}", self.log_ratio(a, b).to_f64().unwrap_or(f64::NAN)),
                    format!("{:.6}", self.index(a, b).to_f64().unwrap_or(f64::NAN)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Heterophily of every group pair.
///
/// A zero ratio is replaced by `1 / (2 × total_ties)` before the log; the
/// shifted index subtracts the minimum log ratio so every value is `>= 0`.
pub fn heterophily<T: Scalar>(counts: &TieCounts) -> Result<HeterophilyMatrix<T>, MetricsError> {
    if counts.total_ties() == 0 {
        return Err(MetricsError::NoTies);
    }
    for (i, label) in counts.labels().iter().enumerate() {
        if counts.group_size(i) == 0 {
            return Err(MetricsError::ZeroSizeGroup(label.clone()));
        }
    }
    let g = counts.group_count();
    let epsilon = T::one() / (T::lit(2.0) * T::from_count(counts.total_ties()));
    let mut actual = vec![0; g * g];
    let mut expected = vec![T::zero(); g * g];
    let mut raw_ratio = vec![T::zero(); g * g];
    let mut log_ratio = vec![T::zero(); g * g];
    for a in 0..g {
        for b in 0..g {
            let i = a * g + b;
            actual[i] = counts.ties(a, b);
            expected[i] = expected_by_index::<T>(counts, a, b);
            raw_ratio[i] = if expected[i] > T::zero() { T::from_count(actual[i]) / expected[i] } else { T::zero() };
            let corrected = if raw_ratio[i] > T::zero() { raw_ratio[i] } else { epsilon };
            log_ratio[i] = corrected.ln();
        }
    }
    let min = log_ratio.iter().copied().fold(T::infinity(), T::min);
    let index = log_ratio.iter().map(|&l| l - min).collect();
    Ok(HeterophilyMatrix { labels: counts.labels().to_vec(), actual, expected, raw_ratio, log_ratio, index, epsilon })
}
