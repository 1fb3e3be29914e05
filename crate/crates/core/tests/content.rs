mod common;

use std::collections::BTreeMap;

use common::{id, rng};
use netmap_core::clustering::Grouping;
use netmap_core::content::{
    classify_source, detect_amplifiers, normalize_domain, share_table, AmplifierThresholds, DomainDictionary,
    NewsCategory, OVERALL_LABEL,
};
use netmap_core::graph::{AccountId, CitationRecord};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn messy_urls_match_audited_answers() {
    let mut checked = 0;
    for line in include_str!("fixtures/messy_urls.tsv").lines().filter(|l| !l.starts_with('#')) {
        let (raw, want) = line.split_once('\t').unwrap();
        match raw.strip_prefix('!') {
            Some(bad) => assert!(normalize_domain(bad).is_err(), "{bad:?} should be rejected"),
            None => assert_eq!(normalize_domain(raw).map(|d| d.to_string()).ok().as_deref(), Some(want), "{raw:?}"),
        }
        checked += 1;
    }
    assert_eq!(checked, 50);
}

fn dict() -> DomainDictionary {
    DomainDictionary::load(
        "veteranstoday.com\tvetops\nrt.com\tstate_sponsored\ninfowars.com\tjunk\nnytimes.com\tprofessional\n"
            .as_bytes(),
    )
    .unwrap()
}

#[test]
fn classification_examples() {
    let d = dict();
    let c = |s: &str| classify_source(&normalize_domain(s).unwrap(), &d);
    assert_eq!(c("veteranstoday.com"), Some(NewsCategory::VetOps));
    assert_eq!(c("rt.com"), Some(NewsCategory::StateSponsored));
    assert_eq!(c("francais.rt.com"), Some(NewsCategory::StateSponsored));
    assert_eq!(c("someones-blog.net"), None);
}

fn cite(account: &str, url: &str, shares: u64) -> CitationRecord {
    CitationRecord {
        account: id(account),
        url: url.into(),
        base_domain: normalize_domain(url).unwrap(),
        shares,
        posted_at: None,
    }
}

const SITES: [(&str, NewsCategory); 8] = [
    ("junk-a.com", NewsCategory::Junk),
    ("junk-b.net", NewsCategory::Junk),
    ("press-a.com", NewsCategory::Professional),
    ("press-b.co.uk", NewsCategory::Professional),
    ("press-c.org", NewsCategory::Professional),
    ("state-a.ru", NewsCategory::StateSponsored),
    ("vetops-a.com", NewsCategory::VetOps),
    ("unlisted.info", NewsCategory::Professional), // left out of the dictionary
];

fn site_dict() -> DomainDictionary {
    let mut d = DomainDictionary::new();
    for (s, c) in &SITES[..7] {
        d.insert(normalize_domain(s).unwrap(), *c).unwrap();
    }
    d
}

fn random_corpus(seed: u64, n: usize) -> (Vec<CitationRecord>, Grouping) {
    let mut r = rng(seed);
    let groups: Vec<(String, Vec<AccountId>)> = ["Left", "Right", "Vets"]
        .iter()
        .map(|g| (g.to_string(), (0..5).map(|i| id(&format!("{g}{i}"))).collect()))
        .collect();
    let grouping = Grouping::from_groups(groups).unwrap();
    let names = ["Left", "Right", "Vets", "Nobody"];
    let cites = (0..n)
        .map(|_| {
            let who = format!("{}{}", names[r.random_range(0..4)], r.random_range(0..5));
            let (site, _) = SITES[r.random_range(0..SITES.len())];
            let sub = if r.random_bool(0.2) { "www." } else { "" };
            cite(&who, &format!("https://{sub}{site}/story/{}", r.random_range(0..1000)), r.random_range(0..5))
        })
        .collect();
    (cites, grouping)
}

#[test]
fn share_table_matches_spreadsheet_recomputation() {
    let (cites, grouping) = random_corpus(7, 600);
    let t = share_table::<f64>(&cites, &grouping, &site_dict()).unwrap();
    // spreadsheet: pivot of (group prefix, category) over rows whose site is listed
    let cat_of: BTreeMap<&str, usize> = SITES[..7].iter().map(|(s, c)| (*s, c.index())).collect();
    let mut pivot: BTreeMap<String, [f64; 4]> = BTreeMap::new();
    let mut overall = [0.0; 4];
    for c in &cites {
        let group = c.account.as_str().trim_end_matches(char::is_numeric);
        if group == "Nobody" {
            continue;
        }
        let site = c.url.trim_start_matches("https://").trim_start_matches("www.").split('/').next().unwrap();
        if let Some(&k) = cat_of.get(site) {
            pivot.entry(group.to_string()).or_default()[k] += 1.0;
            overall[k] += 1.0;
        }
    }
    let check = |label: &str, counts: &[f64; 4]| {
        let row = if label == OVERALL_LABEL { &t.overall } else { t.rows.iter().find(|r| r.label == label).unwrap() };
        let n: f64 = counts.iter().sum();
        assert_eq!(row.n() as f64, n);
        for k in 0..4 {
            assert!((row.percent[k] - 100.0 * counts[k] / n).abs() < 1e-9, "{label} column {k}");
        }
        assert!((row.total_percent() - 100.0).abs() < 0.5);
    };
    for (g, counts) in &pivot {
        check(g, counts);
    }
    check(OVERALL_LABEL, &overall);
    assert_eq!(t.unmapped, cites.iter().filter(|c| c.account.as_str().starts_with("Nobody")).count());
}

#[test]
fn one_group_three_to_one() {
    let grouping = Grouping::from_groups(vec![("All".into(), vec![id("a")])]).unwrap();
    let cites = [
        cite("a", "https://press-a.com/1", 0),
        cite("a", "https://press-a.com/2", 0),
        cite("a", "https://press-b.co.uk/3", 0),
        cite("a", "https://junk-a.com/4", 0),
    ];
    let t = share_table::<f64>(&cites, &grouping, &site_dict()).unwrap();
    assert_eq!(t.rows[0].percent, [25.0, 75.0, 0.0, 0.0]);
    assert_eq!(t.rows[0].n(), 4);
}

#[test]
fn amplifier_examples() {
    let d = site_dict();
    let flooder: Vec<_> = (0..100).map(|i| cite("flood", &format!("https://junk-a.com/{i}"), 0)).collect();
    let r = detect_amplifiers(&flooder, &d, AmplifierThresholds { min_shares: 50, max_median_reshare: 2 }).unwrap();
    assert_eq!(r.accounts.len(), 1);
    assert_eq!(r.accounts[0].account.as_str(), "flood");
    let pro: Vec<_> = (0..100).map(|i| cite("pro", &format!("https://press-a.com/{i}"), 0)).collect();
    assert!(detect_amplifiers(&pro, &d, AmplifierThresholds { min_shares: 50, max_median_reshare: 2 })
        .unwrap()
        .is_empty());
    let few: Vec<_> = (0..10).map(|i| cite("few", &format!("https://junk-a.com/{i}"), 0)).collect();
    assert!(detect_amplifiers(&few, &d, AmplifierThresholds::default()).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normalize_is_idempotent(
        scheme in prop_oneof![Just(""), Just("http://"), Just("HTTPS://"), Just("//")],
        www in prop_oneof![Just(""), Just("www."), Just("WWW.www.")],
        labels in prop::collection::vec("[a-z0-9]{1,8}", 1..4),
        tld in prop_oneof![Just("com"), Just("co.uk"), Just("org"), Just("blogspot.com"), Just("ru")],
        path in "(/[a-z0-9]{0,6}){0,3}",
    ) {
        let url = format!("{scheme}{www}{}.{tld}{path}", labels.join("."));
        let once = normalize_domain(&url).unwrap();
        let twice = normalize_domain(once.as_str()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.as_str(), once.as_str().to_lowercase());
    }

    #[test]
    fn share_rows_sum_to_hundred(seed in any::<u64>(), n in 30usize..400) {
        let (cites, grouping) = random_corpus(seed, n);
        if let Ok(t) = share_table::<f64>(&cites, &grouping, &site_dict()) {
            for row in t.rows.iter().chain([&t.overall]) {
                if row.n() > 0 {
                    prop_assert!((row.total_percent() - 100.0).abs() < 0.5);
                }
            }
        }
    }

    #[test]
    fn citation_order_irrelevant(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (cites, grouping) = random_corpus(seed, 200);
        let mut shuffled = cites.clone();
        let mut r = rng(shuffle);
        for i in (1..shuffled.len()).rev() { shuffled.swap(i, r.random_range(0..=i)); }
        let d = site_dict();
        prop_assert_eq!(share_table::<f64>(&cites, &grouping, &d).unwrap(), share_table::<f64>(&shuffled, &grouping, &d).unwrap());
        let th = AmplifierThresholds { min_shares: 5, max_median_reshare: 2 };
        prop_assert_eq!(detect_amplifiers(&cites, &d, th).unwrap(), detect_amplifiers(&shuffled, &d, th).unwrap());
    }

    #[test]
    fn raising_min_shares_shrinks_report(seed in any::<u64>(), lo in 1u64..20, step in 0u64..20, med in 0u64..5) {
        let (cites, _) = random_corpus(seed, 500);
        let d = site_dict();
        let small = detect_amplifiers(&cites, &d, AmplifierThresholds { min_shares: lo + step, max_median_reshare: med }).unwrap();
        let big = detect_amplifiers(&cites, &d, AmplifierThresholds { min_shares: lo, max_median_reshare: med }).unwrap();
        for e in &small.accounts {
            prop_assert!(big.accounts.iter().any(|b| b.account == e.account));
        }
        prop_assert!(big.accounts.windows(2).all(|w| w[0].out_share_count >= w[1].out_share_count));
    }
}
