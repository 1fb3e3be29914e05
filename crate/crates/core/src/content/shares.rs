use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{classify_source, ContentError, DomainDictionary, NewsCategory};
use crate::clustering::Grouping;
use crate::graph::{AccountId, CitationRecord};
use crate::scalar::Scalar;

/// Percentages of classified links per category, in [`NewsCategory::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareRow<T> {
    pub label: String,
    pub counts: [usize; 4],
    pub percent: [T; 4],
}

impl<T: Scalar> ShareRow<T> {
    fn from_counts(label: String, counts: [usize; 4]) -> Self {
        let n: usize = counts.iter().sum();
        let percent =
            counts.map(|c| if n == 0 { T::zero() } else { T::hundred() * T::from_count(c) / T::from_count(n) });
        Self { label, counts, percent }
    }

    /// Number of classified links.
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn total_percent(&self) -> T {
        self.percent.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn percent_of(&self, category: NewsCategory) -> T {
        self.percent[category.index()]
    }
}

/// Per-group mix of news categories among shared links.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable<T> {
    /// One row per group, in grouping order.
    pub rows: Vec<ShareRow<T>>,
    pub overall: ShareRow<T>,
    /// Citations whose account is not in the grouping.
    pub unmapped: usize,
    /// Mapped citations whose domain is not in the dictionary.
    pub unclassified: usize,
}

impl<T: Scalar> ShareTable<T> {
    /// CSV with columns `Group, Junk News %, Professional News %,
    /// State Sponsored News %, VetOps %, Total %, N`; percentages to 1 dp.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["Group".to_string()];
        header.extend(NewsCategory::ALL.iter().map(|c| format!("{} %", c.title())));
        header.push("Total %".into());
        header.push("N".into());
        w.write_record(&header)?;
        for row in self.rows.iter().chain(std::iter::once(&self.overall)) {
            let mut rec = vec![row.label.clone()];
            rec.extend(row.percent.iter().map(|p| format!("{:.1}", p.to_f64().unwrap_or(0.0))));
            rec.push(format!("{:.1}", row.total_percent().to_f64().unwrap_or(0.0)));
            rec.push(row.n().to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Label of the all-groups row.
pub const OVERALL_LABEL: &str = "Total";

/// Tabulates classified link occurrences per group.
///
/// Links whose domain is unclassified are excluded from the denominators;
/// citations by ungrouped accounts are dropped and counted.
pub fn share_table<T: Scalar>(
    citations: &[CitationRecord],
    grouping: &Grouping,
    dict: &DomainDictionary,
) -> Result<ShareTable<T>, ContentError> {
    let mut counts = vec![[0usize; 4]; grouping.group_count()];
    let (mut unmapped, mut unclassified) = (0, 0);
    for c in citations {
        let Some(g) = grouping.group_of(c.account.as_str()) else {
            unmapped += 1;
            continue;
        };
        match classify_source(&c.base_domain, dict) {
            Some(cat) => counts[g][cat.index()] += 1,
            None => unclassified += 1,
        }
    }
    if unmapped > 0 {
        log::warn!("{unmapped} citations from accounts outside the grouping were dropped");
    }
    let mut overall = [0usize; 4];
    for row in &counts {
        for (o, c) in overall.iter_mut().zip(row) {
            *o += c;
        }
    }
    if overall.iter().sum::<usize>() == 0 {
        return Err(ContentError::NoClassifiedCitations);
    }
    let rows = grouping.groups().iter().zip(counts).map(|(g, c)| ShareRow::from_counts(g.label.clone(), c)).collect();
    Ok(ShareTable { rows, overall: ShareRow::from_counts(OVERALL_LABEL.into(), overall), unmapped, unclassified })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmplifierThresholds {
    /// Minimum number of junk or state-sponsored links posted.
    pub min_shares: u64,
    /// Largest median reshare count of those posts that still counts as "not picked up".
    pub max_median_reshare: u64,
}

impl Default for AmplifierThresholds {
    fn default() -> Self {
        Self { min_shares: 50, max_median_reshare: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifierEntry {
    pub account: AccountId,
    pub out_share_count: usize,
    pub median_reshares: f64,
    pub categories: Vec<NewsCategory>,
}

/// Accounts that post many junk or state-sponsored links that nobody reshares.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AmplifierReport {
    /// Descending by `out_share_count`, then ascending by account.
    pub accounts: Vec<AmplifierEntry>,
}

impl AmplifierReport {
    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["account", "out_shares", "median_reshares", "categories"])?;
        for e in &self.accounts {
            let cats: Vec<&str> = e.categories.iter().map(|c| c.as_str()).collect();
            w.write_record([
                e.account.to_string(),
                e.out_share_count.to_string(),
                format!("{:.1}", e.median_reshares),
                cats.join(";"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn median(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] as f64 + values[n / 2] as f64) / 2.0
    }
}

/// Flags accounts with at least `min_shares` junk/state-sponsored links whose
/// median reshare count is at most `max_median_reshare`.
pub fn detect_amplifiers(
    citations: &[CitationRecord],
    dict: &DomainDictionary,
    thresholds: AmplifierThresholds,
) -> Result<AmplifierReport, ContentError> {
    if thresholds.min_shares == 0 {
        return Err(ContentError::InvalidThreshold);
    }
    let mut per_account: BTreeMap<&AccountId, (Vec<u64>, [bool; 4])> = BTreeMap::new();
    for c in citations {
        let cat = match classify_source(&c.base_domain, dict) {
            Some(cat @ (NewsCategory::Junk | NewsCategory::StateSponsored)) => cat,
            _ => continue,
        };
        let entry = per_account.entry(&c.account).or_default();
        entry.0.push(c.shares);
        entry.1[cat.index()] = true;
    }
    let mut accounts: Vec<AmplifierEntry> = per_account
        .into_iter()
        .filter(|(_, (shares, _))| shares.len() as u64 >= thresholds.min_shares)
        .filter_map(|(account, (mut shares, seen))| {
            let med = median(&mut shares);
            (med <= thresholds.max_median_reshare as f64).then(|| AmplifierEntry {
                account: account.clone(),
                out_share_count: shares.len(),
                median_reshares: med,
                categories: NewsCategory::ALL.into_iter().filter(|c| seen[c.index()]).collect(),
            })
        })
        .collect();
    accounts.sort_by(|a, b| b.out_share_count.cmp(&a.out_share_count).then_with(|| a.account.cmp(&b.account)));
    Ok(AmplifierReport { accounts })
}
