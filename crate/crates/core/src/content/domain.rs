use std::fmt;
use std::sync::OnceLock;

use publicsuffix::{List, Psl};
use serde::{Deserialize, Serialize};
use url::Url;

use super::ContentError;

static SUFFIX_SNAPSHOT: &str = include_str!("../../data/public_suffix_list.dat");

fn suffix_list() -> &'static List {
    static LIST: OnceLock<List> = OnceLock::new();
    LIST.get_or_init(|| SUFFIX_SNAPSHOT.parse().expect("bundled suffix snapshot parses"))
}

/// Lowercase host with scheme, path and any leading `www.` removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BaseDomain(String);

impl BaseDomain {
    pub fn parse(raw: &str) -> Result<Self, ContentError> {
        normalize_domain(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Public suffix plus one label, per the bundled suffix snapshot.
    /// `None` for hosts that are themselves a public suffix or an IP literal.
    pub fn registrable(&self) -> Option<BaseDomain> {
        if self.is_ip() {
            return None;
        }
        suffix_list()
            .domain(self.0.as_bytes())
            .and_then(|d| std::str::from_utf8(d.as_bytes()).ok())
            .map(|d| BaseDomain(d.to_string()))
    }

    /// Self, then each parent domain down to (and including) the registrable domain.
    pub fn lookup_chain(&self) -> Vec<BaseDomain> {
        let mut chain = vec![self.clone()];
        let Some(stop) = self.registrable() else {
            return chain;
        };
        let mut rest = self.0.as_str();
        while rest.len() > stop.0.len() {
            match rest.split_once('.') {
                Some((_, parent)) => {
                    rest = parent;
                    chain.push(BaseDomain(rest.to_string()));
                }
                None => break,
            }
        }
        chain
    }

    fn is_ip(&self) -> bool {
        self.0.starts_with('[') || self.0.parse::<std::net::Ipv4Addr>().is_ok()
    }
}

impl TryFrom<String> for BaseDomain {
    type Error = ContentError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        normalize_domain(&value)
    }
}

impl From<BaseDomain> for String {
    fn from(d: BaseDomain) -> Self {
        d.0
    }
}

impl fmt::Display for BaseDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reduces a URL (or bare host) to its base domain.
///
/// Scheme, credentials, port, path, query and fragment are dropped; the host
/// is lowercased and stripped of leading `www.` labels as long as what
/// remains is still a registrable name. Other subdomains are preserved.
pub fn normalize_domain(raw: &str) -> Result<BaseDomain, ContentError> {
    let bad = || ContentError::InvalidUrl(raw.to_string());
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(bad());
    }
    let candidate = if trimmed.contains("://") {
        trimmed.to_string()
    } else if let Some(rest) = trimmed.strip_prefix("//") {
        format!("http://{rest}")
    } else if has_opaque_scheme(trimmed) {
        return Err(bad());
    } else {
        format!("http://{trimmed}")
    };
    let url = Url::parse(&candidate).map_err(|_| bad())?;
    let host = url.host_str().filter(|h| !h.is_empty()).ok_or_else(bad)?;
    let mut host = host.trim_end_matches('.').to_ascii_lowercase();
    if host.is_empty() {
        return Err(bad());
    }
    while let Some(rest) = host.strip_prefix("www.") {
        let stripped = BaseDomain(rest.to_string());
        if stripped.registrable().is_none() {
            break;
        }
        host = stripped.0;
    }
    Ok(BaseDomain(host))
}

/// `mailto:x@y`, `javascript:...` and the like: a scheme with no authority.
/// `host:8080/path` is not one because the part after the colon is a port.
fn has_opaque_scheme(s: &str) -> bool {
    let head = s.split(['/', '?', '#']).next().unwrap_or("");
    match head.split_once(':') {
        Some((scheme, rest)) => {
            !scheme.is_empty()
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || c == '+' || c == '-')
                && !rest.chars().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}
