use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BaseDomain, ContentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsCategory {
    Junk,
    Professional,
    StateSponsored,
    VetOps,
}

impl NewsCategory {
    /// Column order of the share table.
    pub const ALL: [NewsCategory; 4] =
        [NewsCategory::Junk, NewsCategory::Professional, NewsCategory::StateSponsored, NewsCategory::VetOps];

    pub fn as_str(self) -> &'static str {
        match self {
            NewsCategory::Junk => "junk",
            NewsCategory::Professional => "professional",
            NewsCategory::StateSponsored => "state_sponsored",
            NewsCategory::VetOps => "vetops",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            NewsCategory::Junk => "Junk News",
            NewsCategory::Professional => "Professional News",
            NewsCategory::StateSponsored => "State Sponsored News",
            NewsCategory::VetOps => "VetOps",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for NewsCategory {
    type Err = ContentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !matches!(c, ' ' | '_' | '-')).collect::<String>().to_ascii_lowercase();
        let key = key.strip_suffix("news").unwrap_or(&key);
        match key {
            "junk" => Ok(NewsCategory::Junk),
            "professional" => Ok(NewsCategory::Professional),
            "statesponsored" | "state" => Ok(NewsCategory::StateSponsored),
            "vetops" => Ok(NewsCategory::VetOps),
            _ => Err(ContentError::UnknownCategory(s.to_string())),
        }
    }
}

impl fmt::Display for NewsCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Base domain to news category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainDictionary {
    entries: BTreeMap<BaseDomain, NewsCategory>,
}

impl DomainDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry; a domain already mapped to a different category is rejected.
    pub fn insert(&mut self, domain: BaseDomain, category: NewsCategory) -> Result<(), NewsCategory> {
        match self.entries.get(&domain) {
            Some(&existing) if existing != category => Err(existing),
            _ => {
                self.entries.insert(domain, category);
                Ok(())
            }
        }
    }

    /// Reads `domain<TAB>category` lines; `#` comments and blank lines skipped.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, ContentError> {
        let mut dict = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |reason: String| ContentError::Dictionary { line: line_no, reason };
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(err(format!("expected 2 tab-separated fields, found {}", fields.len())));
            }
            let domain = BaseDomain::parse(fields[0]).map_err(|e| err(e.to_string()))?;
            let category: NewsCategory = fields[1].parse().map_err(|e: ContentError| err(e.to_string()))?;
            dict.insert(domain.clone(), category)
                .map_err(|prev| err(format!("`{domain}` already classified as {prev}")))?;
        }
        Ok(dict)
    }

    pub fn get(&self, domain: &BaseDomain) -> Option<NewsCategory> {
        self.entries.get(domain).copied()
    }

    /// Dictionary entry governing `domain`: the exact entry, or the nearest
    /// parent entry no higher than the registrable domain.
    pub fn resolve(&self, domain: &BaseDomain) -> Option<(&BaseDomain, NewsCategory)> {
        if let Some((d, c)) = self.entries.get_key_value(domain) {
            return Some((d, *c));
        }
        domain.lookup_chain().iter().skip(1).find_map(|d| self.entries.get_key_value(d)).map(|(d, c)| (d, *c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BaseDomain, NewsCategory)> {
        self.entries.iter().map(|(d, c)| (d, *c))
    }

    /// Domains whose category is in `categories`, ascending.
    pub fn domains_in(&self, categories: &[NewsCategory]) -> Vec<BaseDomain> {
        self.iter().filter(|(_, c)| categories.contains(c)).map(|(d, _)| d.clone()).collect()
    }
}

/// Dictionary category of `domain`, or `None` (unclassified).
///
/// An exact entry wins; otherwise parent domains are tried up to the
/// registrable domain, so `edition.cnn.com` inherits `cnn.com`.
pub fn classify_source(domain: &BaseDomain, dict: &DomainDictionary) -> Option<NewsCategory> {
    dict.resolve(domain).map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> BaseDomain {
        BaseDomain::parse(s).unwrap()
    }

    fn sample() -> DomainDictionary {
        DomainDictionary::load(
            "# domain\tcategory\nveteranstoday.com\tvetops\nrt.com\tState Sponsored\nwww.nytimes.com\tprofessional\ncnn.com\tprofessional_news\nbeforeitsnews.com\tJunk\n"
                .as_bytes(),
        )
        .unwrap()
    }

    #[test]
    fn seed_domains_and_state_media() {
        let dict = sample();
        assert_eq!(classify_source(&d("veteranstoday.com"), &dict), Some(NewsCategory::VetOps));
        assert_eq!(classify_source(&d("rt.com"), &dict), Some(NewsCategory::StateSponsored));
    }

    #[test]
    fn unknown_domain_is_unclassified() {
        assert_eq!(classify_source(&d("someones-blog.net"), &sample()), None);
    }

    #[test]
    fn dictionary_domains_are_normalized() {
        let dict = sample();
        assert_eq!(dict.get(&d("nytimes.com")), Some(NewsCategory::Professional));
        assert_eq!(dict.len(), 5);
    }

    #[test]
    fn parent_domain_fallback() {
        let dict = sample();
        assert_eq!(classify_source(&d("edition.cnn.com"), &dict), Some(NewsCategory::Professional));
        assert_eq!(classify_source(&d("cnn.com.evil.net"), &dict), None);
    }

    #[test]
    fn conflicting_entries_rejected() {
        let err = DomainDictionary::load("rt.com\tjunk\nRT.com\tstate_sponsored\n".as_bytes()).unwrap_err();
        assert!(matches!(err, ContentError::Dictionary { line: 2, .. }), "{err}");
        DomainDictionary::load("rt.com\tjunk\nrt.com\tjunk\n".as_bytes()).unwrap();
    }

    #[test]
    fn bad_category_and_shape() {
        assert!(matches!(
            DomainDictionary::load("rt.com\ttabloid\n".as_bytes()),
            Err(ContentError::Dictionary { line: 1, .. })
        ));
        assert!(matches!(
            DomainDictionary::load("rt.com junk\n".as_bytes()),
            Err(ContentError::Dictionary { line: 1, .. })
        ));
    }

    #[test]
    fn category_spellings() {
        for (s, c) in [
            ("Junk News", NewsCategory::Junk),
            ("professional", NewsCategory::Professional),
            ("state-sponsored", NewsCategory::StateSponsored),
            ("StateSponsored", NewsCategory::StateSponsored),
            ("Vet Ops", NewsCategory::VetOps),
        ] {
            assert_eq!(s.parse::<NewsCategory>().unwrap(), c);
            assert_eq!(c.as_str().parse::<NewsCategory>().unwrap(), c);
        }
    }
}
