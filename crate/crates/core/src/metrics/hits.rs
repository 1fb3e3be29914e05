use std::collections::BTreeMap;
use std::io::Write;

use super::MetricsError;
use crate::clustering::Grouping;
use crate::content::{BaseDomain, DomainDictionary, NewsCategory};
use crate::graph::CitationRecord;
use crate::scalar::Scalar;

/// Link counts from each group to each tracked domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitMatrix {
    groups: Vec<String>,
    domains: Vec<BaseDomain>,
    /// `groups × domains`, row-major.
    hits: Vec<u64>,
}

impl HitMatrix {
    pub fn new(groups: Vec<String>, domains: Vec<BaseDomain>) -> Self {
        let hits = vec![0; groups.len() * domains.len()];
        Self { groups, domains, hits }
    }

    pub fn from_counts(groups: Vec<String>, domains: Vec<BaseDomain>, hits: Vec<u64>) -> Result<Self, MetricsError> {
        if hits.len() != groups.len() * domains.len() {
            return Err(MetricsError::Shape(format!(
                "{} groups × {} domains needs {} cells, got {}",
                groups.len(),
                domains.len(),
                groups.len() * domains.len(),
                hits.len()
            )));
        }
        Ok(Self { groups, domains, hits })
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn domains(&self) -> &[BaseDomain] {
        &self.domains
    }

    pub fn get(&self, group: usize, domain: usize) -> u64 {
        self.hits[group * self.domains.len() + domain]
    }

    pub fn add(&mut self, group: usize, domain: usize, count: u64) {
        self.hits[group * self.domains.len() + domain] += count;
    }

    fn group_index(&self, label: &str) -> Result<usize, MetricsError> {
        self.groups.iter().position(|g| g == label).ok_or_else(|| MetricsError::UnknownGroup(label.to_string()))
    }

    pub fn group_total(&self, group: usize) -> u64 {
        (0..self.domains.len()).map(|d| self.get(group, d)).sum()
    }

    pub fn total(&self) -> u64 {
        self.hits.iter().sum()
    }
}

/// Counts citations from grouped accounts to dictionary domains in `tracked` categories.
///
/// Citations resolve to their governing dictionary entry, so a subdomain
/// hit counts against the listed parent domain.
pub fn build_hit_matrix(
    citations: &[CitationRecord],
    grouping: &Grouping,
    dict: &DomainDictionary,
    tracked: &[NewsCategory],
) -> HitMatrix {
    let domains = dict.domains_in(tracked);
    let col: BTreeMap<&BaseDomain, usize> = domains.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let mut m = HitMatrix::new(grouping.groups().iter().map(|g| g.label.clone()).collect(), domains.clone());
    for c in citations {
        let Some(g) = grouping.group_of(c.account.as_str()) else { continue };
        if let Some((d, _)) = dict.resolve(&c.base_domain) {
            if let Some(&j) = col.get(d) {
                m.add(g, j, 1);
            }
        }
    }
    m
}

/// Percent of tracked domains the group linked to at least once.
pub fn coverage<T: Scalar>(hits: &HitMatrix, group: &str) -> Result<T, MetricsError> {
    let g = hits.group_index(group)?;
    if hits.domains.is_empty() {
        return Err(MetricsError::EmptyDictionary);
    }
    let reached = (0..hits.domains.len()).filter(|&d| hits.get(g, d) > 0).count();
    Ok(T::hundred() * T::from_count(reached) / T::from_count(hits.domains.len()))
}

/// Percent of all hits on tracked domains that came from the group.
pub fn consistency<T: Scalar>(hits: &HitMatrix, group: &str) -> Result<T, MetricsError> {
    let g = hits.group_index(group)?;
    let total = hits.total();
    if total == 0 {
        return Err(MetricsError::ZeroHits);
    }
    Ok(T::hundred() * T::from_u64(hits.group_total(g)).unwrap() / T::from_u64(total).unwrap())
}

/// One row of the group size / coverage / consistency table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummaryRow<T> {
    pub label: String,
    pub users: usize,
    pub users_percent: T,
    pub coverage: T,
    pub consistency: T,
}

pub fn group_summary<T: Scalar>(
    grouping: &Grouping,
    hits: &HitMatrix,
) -> Result<Vec<GroupSummaryRow<T>>, MetricsError> {
    let population = grouping.population();
    grouping
        .groups()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let users = grouping.group_size(i);
            Ok(GroupSummaryRow {
                label: g.label.clone(),
                users,
                users_percent: T::hundred() * T::from_count(users) / T::from_count(population.max(1)),
                coverage: coverage(hits, &g.label)?,
                consistency: consistency(hits, &g.label)?,
            })
        })
        .collect()
}

/// CSV with columns `Group, Users N, Users %, Coverage, Consistency` and a
/// closing `Total` row.
pub fn write_group_summary<T: Scalar, W: Write>(rows: &[GroupSummaryRow<T>], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["Group", "Users N", "Users %", "Coverage", "Consistency"])?;
    let pct = |x: T| format!("{:.1}", x.to_f64().unwrap_or(f64::NAN));
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.users.to_string(),
            pct(r.users_percent),
            pct(r.coverage),
            pct(r.consistency),
        ])?;
    }
    let users: usize = rows.iter().map(|r| r.users).sum();
    w.write_record(["Total".to_string(), users.to_string(), String::new(), String::new(), String::new()])?;
    w.flush()?;
    Ok(())
}
