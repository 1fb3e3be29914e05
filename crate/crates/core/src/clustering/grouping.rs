use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use super::ClusterError;
use crate::graph::AccountId;

/// Label given to the segment of accounts with no affiliations.
pub const RESIDUAL_LABEL: &str = "Other";

/// Accounts sharing an affiliation pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: usize,
    pub members: BTreeSet<AccountId>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub label: String,
    pub segments: Vec<usize>,
}

/// Two-level partition: accounts into segments, segments into groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    segments: Vec<Segment>,
    groups: Vec<Group>,
    account_group: HashMap<AccountId, usize>,
    group_sizes: Vec<usize>,
}

impl Grouping {
    /// Validates disjoint non-empty segments, unique group labels and that
    /// every segment sits in exactly one group. Groups are ordered by label.
    pub fn new(segments: Vec<Segment>, groups: Vec<(String, Vec<usize>)>) -> Result<Self, ClusterError> {
        let assignment: Vec<(usize, String)> =
            groups.iter().flat_map(|(label, ids)| ids.iter().map(move |&id| (id, label.clone()))).collect();
        let mut labels = BTreeSet::new();
        for (label, _) in &groups {
            if !labels.insert(label) {
                return Err(ClusterError::DuplicateGroupLabel(label.clone()));
            }
        }
        group_segments(segments, &assignment)
    }

    /// One segment per group, in the given order of ids.
    pub fn from_groups(groups: Vec<(String, Vec<AccountId>)>) -> Result<Self, ClusterError> {
        let mut segments = Vec::new();
        let mut layout = Vec::new();
        for (id, (label, members)) in groups.into_iter().enumerate() {
            segments.push(Segment { id, members: members.into_iter().collect(), label: Some(label.clone()) });
            layout.push((label, vec![id]));
        }
        Self::new(segments, layout)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.label.as_str()).collect()
    }

    pub fn group_index(&self, label: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.label == label)
    }

    /// Group index of an account, if it was clustered.
    pub fn group_of(&self, account: &str) -> Option<usize> {
        self.account_group.get(account).copied()
    }

    pub fn group_size(&self, group: usize) -> usize {
        self.group_sizes[group]
    }

    pub fn population(&self) -> usize {
        self.account_group.len()
    }

    pub fn segment(&self, id: usize) -> Option<&Segment> {
        self.segments.iter().find(|s| s.id == id)
    }

    pub fn group_members(&self, group: usize) -> impl Iterator<Item = &AccountId> + '_ {
        self.groups[group]
            .segments
            .iter()
            .flat_map(move |&id| self.segment(id).into_iter().flat_map(|s| s.members.iter()))
    }
}

/// Places segments into groups according to `(segment_id, group_label)` pairs.
///
/// Unknown ids, ids assigned more than once and unassigned segments are all
/// collected before failing.
pub fn group_segments(mut segments: Vec<Segment>, assignment: &[(usize, String)]) -> Result<Grouping, ClusterError> {
    segments.sort_by_key(|s| s.id);
    let mut account_segment: HashMap<AccountId, usize> = HashMap::new();
    for seg in &segments {
        if seg.members.is_empty() {
            return Err(ClusterError::EmptySegment(seg.id));
        }
        for m in &seg.members {
            if account_segment.insert(m.clone(), seg.id).is_some() {
                return Err(ClusterError::OverlappingSegments(m.to_string()));
            }
        }
    }
    let known: BTreeSet<usize> = segments.iter().map(|s| s.id).collect();
    if known.len() != segments.len() {
        let mut seen = BTreeSet::new();
        let dup: Vec<usize> = segments.iter().map(|s| s.id).filter(|id| !seen.insert(*id)).collect();
        return Err(ClusterError::Malformed { line: 0, reason: format!("duplicate segment ids {dup:?}") });
    }

    let mut unknown = BTreeSet::new();
    let mut duplicate = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (id, label) in assignment {
        if !known.contains(id) {
            unknown.insert(*id);
            continue;
        }
        if !seen.insert(*id) {
            duplicate.insert(*id);
            continue;
        }
        by_label.entry(label.as_str()).or_default().push(*id);
    }
    let missing: Vec<usize> = known.difference(&seen).copied().collect();
    if !unknown.is_empty() || !duplicate.is_empty() || !missing.is_empty() {
        return Err(ClusterError::Assignment {
            unknown: unknown.into_iter().collect(),
            duplicate: duplicate.into_iter().collect(),
            missing,
        });
    }

    let groups: Vec<Group> = by_label
        .into_iter()
        .map(|(label, mut ids)| {
            ids.sort_unstable();
            Group { label: label.to_string(), segments: ids }
        })
        .collect();
    let mut seg_group = HashMap::new();
    for (gi, g) in groups.iter().enumerate() {
        for &id in &g.segments {
            seg_group.insert(id, gi);
        }
    }
    let mut group_sizes = vec![0; groups.len()];
    let account_group: HashMap<AccountId, usize> = account_segment
        .into_iter()
        .map(|(acct, seg)| {
            let g = seg_group[&seg];
            group_sizes[g] += 1;
            (acct, g)
        })
        .collect();
    Ok(Grouping { segments, groups, account_group, group_sizes })
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, Vec<String>), ClusterError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('#') => None,
        Ok(l) => Some(Ok((i + 1, l.trim_end_matches('\r').split('\t').map(|f| f.trim().to_string()).collect()))),
    })
}

fn parse_id(field: &str, line: usize) -> Result<usize, ClusterError> {
    field.parse().map_err(|_| ClusterError::Malformed { line, reason: format!("`{field}` is not a segment id") })
}

/// Reads `segment_id<TAB>group_label` lines.
pub fn load_assignment<R: BufRead>(reader: R) -> Result<Vec<(usize, String)>, ClusterError> {
    let mut out = Vec::new();
    for rec in data_lines(reader) {
        let (line, fields) = rec?;
        if fields.len() != 2 || fields[1].is_empty() {
            return Err(ClusterError::Malformed { line, reason: "expected `segment_id<TAB>group_label`".into() });
        }
        out.push((parse_id(&fields[0], line)?, fields[1].clone()));
    }
    Ok(out)
}

/// Writes `segment_id<TAB>account<TAB>segment_label` lines, one per member.
pub fn write_segments<W: Write>(segments: &[Segment], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# segment_id\taccount\tsegment_label")?;
    for seg in segments {
        for m in &seg.members {
            writeln!(out, "{}\t{}\t{}", seg.id, m, seg.label.as_deref().unwrap_or(""))?;
        }
    }
    Ok(())
}

pub fn read_segments<R: BufRead>(reader: R) -> Result<Vec<Segment>, ClusterError> {
    let mut by_id: BTreeMap<usize, Segment> = BTreeMap::new();
    for rec in data_lines(reader) {
        let (line, fields) = rec?;
        if fields.len() < 2 || fields.len() > 3 {
            return Err(ClusterError::Malformed {
                line,
                reason: "expected `segment_id<TAB>account[<TAB>label]`".into(),
            });
        }
        let id = parse_id(&fields[0], line)?;
        let account = AccountId::new(fields[1].clone())
            .map_err(|_| ClusterError::Malformed { line, reason: "empty account".into() })?;
        let label = fields.get(2).filter(|l| !l.is_empty()).cloned();
        let seg = by_id.entry(id).or_insert_with(|| Segment { id, members: BTreeSet::new(), label: label.clone() });
        seg.members.insert(account);
    }
    Ok(by_id.into_values().collect())
}

/// Writes `group_label<TAB>segment_id<TAB>account<TAB>segment_label` lines.
pub fn write_grouping<W: Write>(grouping: &Grouping, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# group_label\tsegment_id\taccount\tsegment_label")?;
    for g in grouping.groups() {
        for &id in &g.segments {
            let seg = grouping.segment(id).expect("grouped segment exists");
            for m in &seg.members {
                writeln!(out, "{}\t{}\t{}\t{}", g.label, id, m, seg.label.as_deref().unwrap_or(""))?;
            }
        }
    }
    Ok(())
}

pub fn read_grouping<R: BufRead>(reader: R) -> Result<Grouping, ClusterError> {
    let mut segs: BTreeMap<usize, Segment> = BTreeMap::new();
    let mut assignment: BTreeMap<usize, String> = BTreeMap::new();
    for rec in data_lines(reader) {
        let (line, fields) = rec?;
        if fields.len() < 3 || fields.len() > 4 || fields[0].is_empty() {
            return Err(ClusterError::Malformed {
                line,
                reason: "expected `group_label<TAB>segment_id<TAB>account[<TAB>segment_label]`".into(),
            });
        }
        let id = parse_id(&fields[1], line)?;
        if let Some(prev) = assignment.insert(id, fields[0].clone()) {
            if prev != fields[0] {
                return Err(ClusterError::Malformed { line, reason: format!("segment {id} listed under two groups") });
            }
        }
        let account = AccountId::new(fields[2].clone())
            .map_err(|_| ClusterError::Malformed { line, reason: "empty account".into() })?;
        let label = fields.get(3).filter(|l| !l.is_empty()).cloned();
        segs.entry(id).or_insert_with(|| Segment { id, members: BTreeSet::new(), label }).members.insert(account);
    }
    group_segments(segs.into_values().collect(), &assignment.into_iter().collect::<Vec<_>>())
}
