use std::collections::BTreeSet;

use serde::Serialize;

use super::{AffiliationMatrix, ClusterError, Segment, RESIDUAL_LABEL};
use crate::graph::AccountId;
use crate::scalar::Scalar;

/// Similarity between two clusters, derived from member similarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Mean pairwise similarity.
    #[default]
    Average,
    /// Least similar pair.
    Complete,
    /// Most similar pair.
    Single,
}

impl std::str::FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "single" => Ok(Linkage::Single),
            other => Err(format!("unknown linkage `{other}` (expected average, complete or single)")),
        }
    }
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Single => "single",
        })
    }
}

/// Where to stop merging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cut<T> {
    /// Final number of segments, counting the residual segment of
    /// affiliation-less accounts when there is one.
    Segments(usize),
    /// Stop once the best available merge is less similar than this.
    Threshold(T),
}

/// Rule for choosing among equally similar candidate merges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lexicographically smallest pair of cluster keys, where a cluster's key
    /// is the rank of its smallest account id.
    #[default]
    LowestAccountPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HacParams<T> {
    pub linkage: Linkage,
    pub cut: Cut<T>,
    pub tie_break: TieBreak,
}

impl<T> HacParams<T> {
    pub fn segments(n: usize) -> Self {
        Self { linkage: Linkage::Average, cut: Cut::Segments(n), tie_break: TieBreak::default() }
    }

    pub fn with_linkage(mut self, linkage: Linkage) -> Self {
        self.linkage = linkage;
        self
    }
}

/// One agglomeration step. Clusters are named by their smallest member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge<T> {
    pub left: AccountId,
    pub right: AccountId,
    pub similarity: T,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering<T> {
    /// Ordered by smallest member id; the residual segment, if any, is last.
    pub segments: Vec<Segment>,
    pub merges: Vec<Merge<T>>,
    /// Rows with no affiliations, collected into the residual segment.
    pub zero_rows: Vec<AccountId>,
}

impl<T> Clustering<T> {
    /// Segment id per matrix row.
    pub fn labels(&self, matrix: &AffiliationMatrix) -> Vec<usize> {
        let row_of: std::collections::HashMap<&AccountId, usize> =
            matrix.rows().iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut out = vec![usize::MAX; matrix.row_count()];
        for seg in &self.segments {
            for m in &seg.members {
                out[row_of[m]] = seg.id;
            }
        }
        out
    }
}

struct Agglomerator<T> {
    n: usize,
    sim: Vec<T>,
    active: Vec<bool>,
    size: Vec<usize>,
    nn: Vec<Option<(usize, T)>>,
    linkage: Linkage,
}

impl<T: Scalar> Agglomerator<T> {
    fn idx(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        super::affiliation::condensed_index(self.n, a, b)
    }

    fn get(&self, a: usize, b: usize) -> T {
        self.sim[self.idx(a, b)]
    }

    /// Best partner with a larger key; ties go to the smaller key.
    fn scan(&self, a: usize) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        for b in a + 1..self.n {
            if !self.active[b] {
                continue;
            }
            let s = self.get(a, b);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((b, s));
            }
        }
        best
    }

    fn best_pair(&self) -> Option<(usize, usize, T)> {
        let mut best: Option<(usize, usize, T)> = None;
        for a in 0..self.n {
            if !self.active[a] {
                continue;
            }
            if let Some((b, s)) = self.nn[a] {
                if best.is_none_or(|(_, _, bs)| s > bs) {
                    best = Some((a, b, s));
                }
            }
        }
        best
    }

    /// Folds `b` into `a` (`a < b`).
    fn merge(&mut self, a: usize, b: usize) {
        let (sa, sb) = (T::from_count(self.size[a]), T::from_count(self.size[b]));
        for k in 0..self.n {
            if !self.active[k] || k == a || k == b {
                continue;
            }
            let (ska, skb) = (self.get(k, a), self.get(k, b));
            let merged = match self.linkage {
                Linkage::Average => (sa * ska + sb * skb) / (sa + sb),
                Linkage::Complete => ska.min(skb),
                Linkage::Single => ska.max(skb),
            };
            let i = self.idx(k, a);
            self.sim[i] = merged;
        }
        self.active[b] = false;
        self.size[a] += self.size[b];
        self.nn[b] = None;

        for k in 0..self.n {
            if !self.active[k] || k == a {
                continue;
            }
            match self.nn[k] {
                Some((p, _)) if p == a || p == b => self.nn[k] = self.scan(k),
                Some((p, s)) if k < a => {
                    let ska = self.get(k, a);
                    if ska > s || (ska == s && a < p) {
                        self.nn[k] = Some((a, ska));
                    }
                }
                None if k < a => self.nn[k] = Some((a, self.get(k, a))),
                _ => {}
            }
        }
        self.nn[a] = self.scan(a);
    }
}

/// Bottom-up agglomerative clustering of the matrix rows on cosine similarity.
///
/// Rows are processed in account-id order, so the result does not depend on
/// the row order of `matrix`. Rows without affiliations do not take part in
/// merging; they form one residual segment labelled [`RESIDUAL_LABEL`].
pub fn hac_cluster<T: Scalar>(
    matrix: &AffiliationMatrix,
    params: &HacParams<T>,
) -> Result<Clustering<T>, ClusterError> {
    let total = matrix.row_count();
    if total == 0 {
        return Err(ClusterError::NoRows);
    }
    match params.cut {
        Cut::Segments(0) => return Err(ClusterError::InvalidCut("segment count must be at least 1".into())),
        Cut::Segments(t) if t > total => return Err(ClusterError::CutTooLarge { target: t, rows: total }),
        Cut::Threshold(t) if !(t >= T::zero() && t <= T::one()) => {
            return Err(ClusterError::InvalidCut(format!("similarity threshold {t} outside [0, 1]")))
        }
        _ => {}
    }

    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| matrix.rows()[a].cmp(&matrix.rows()[b]));
    let (live, zero): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&r| !matrix.row(r).is_empty());

    let target = match params.cut {
        Cut::Segments(t) if !zero.is_empty() && !live.is_empty() => Some(t.saturating_sub(1).max(1)),
        Cut::Segments(t) => Some(t),
        Cut::Threshold(_) => None,
    };
    let threshold = match params.cut {
        Cut::Threshold(t) => Some(t),
        Cut::Segments(_) => None,
    };

    let n = live.len();
    let full = matrix.similarity_matrix::<T>();
    let mut sim = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            sim.push(full.get(live[a], live[b]));
        }
    }
    let mut agg =
        Agglomerator { n, sim, active: vec![true; n], size: vec![1; n], nn: Vec::new(), linkage: params.linkage };
    agg.nn = (0..n).map(|a| agg.scan(a)).collect();

    let name = |k: usize| matrix.rows()[live[k]].clone();
    let mut merges = Vec::new();
    let mut root: Vec<usize> = (0..n).collect();
    let mut clusters = n;
    while clusters > 1 && target.is_none_or(|t| clusters > t) {
        let Some((a, b, s)) = agg.best_pair() else { break };
        if threshold.is_some_and(|t| s < t) {
            break;
        }
        agg.merge(a, b);
        root[b] = a;
        clusters -= 1;
        merges.push(Merge { left: name(a), right: name(b), similarity: s, size: agg.size[a] });
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 0..n {
        let r = find(&mut root, k);
        members[r].push(k);
    }
    let mut segments: Vec<Segment> = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| m.into_iter().map(name).collect::<BTreeSet<_>>())
        .enumerate()
        .map(|(id, members)| Segment { id, members, label: None })
        .collect();
    // clusters were keyed by smallest member, so this is already id order
    let zero_rows: Vec<AccountId> = zero.iter().map(|&r| matrix.rows()[r].clone()).collect();
    if !zero_rows.is_empty() {
        if params.cut == Cut::Segments(1) && !segments.is_empty() {
            segments[0].members.extend(zero_rows.iter().cloned());
        } else {
            segments.push(Segment {
                id: segments.len(),
                members: zero_rows.iter().cloned().collect(),
                label: Some(RESIDUAL_LABEL.to_string()),
            });
        }
    }
    if let Cut::Segments(t) = params.cut {
        if segments.len() != t {
            log::warn!("requested {t} segments, produced {}", segments.len());
        }
    }
    Ok(Clustering { segments, merges, zero_rows })
}

fn find(root: &mut [usize], mut k: usize) -> usize {
    while root[k] != k {
        root[k] = root[root[k]];
        k = root[k];
    }
    k
}
