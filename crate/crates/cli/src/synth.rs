//! Planted-structure dataset for exercising the whole pipeline.
//!
//! A thousand accounts are split into eight groups. Each group follows its
//! own set of outside pages and mostly follows its own members, so the
//! affiliation clustering has something real to find. A few percent of the
//! accounts are drifters hanging off a single seed page; the k-core step is
//! expected to drop them. Citations are drawn from a 40-domain dictionary
//! with a per-group category mix, and a dozen accounts are planted as
//! amplifiers: many junk or state-sponsored links that nobody reshares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use netmap_core::clustering::RESIDUAL_LABEL;
use netmap_core::content::NewsCategory;
use netmap_core::graph::EdgeKind;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::validate_config;
use crate::manifest::write_atomic;
use crate::pipeline::{core_graph, load_graph, load_seed_file, sample_graph, segment_core};

pub const DEFAULT_SEED: u64 = 2017;
pub const ACCOUNTS: usize = 1000;
pub const CITATIONS: usize = 5000;
pub const CONFIG_FILE: &str = "netmap.toml";

pub const SEED_PAGES: [&str; 3] = ["veteranstoday", "veteransnewsnow", "southfront"];

/// Label, relative population, and link mix over
/// (professional, junk, state-sponsored, vetops, unclassified).
const GROUPS: [(&str, usize, [u32; 5]); 8] = [
    ("Conservative Politics", 1637, [55, 14, 3, 6, 22]),
    ("Euro-Right", 398, [45, 14, 14, 4, 23]),
    ("Government and Public Policy", 1168, [72, 3, 2, 3, 20]),
    ("International Conspiracy Theory", 1364, [30, 30, 12, 8, 20]),
    ("Liberal Politics", 840, [75, 2, 1, 2, 20]),
    (RESIDUAL_LABEL, 3355, [60, 6, 3, 5, 26]),
    ("Russia Focused", 1545, [30, 12, 35, 5, 18]),
    ("Veterans & Military", 2106, [45, 10, 5, 22, 18]),
];

// how readily members of one group follow into another (symmetric, same order as GROUPS)
#[rustfmt::skip]
const AFFINITY: [[u32; 8]; 8] = [
    [0, 4, 3, 2, 1, 2, 2, 4],
    [4, 0, 1, 3, 1, 2, 4, 1],
    [3, 1, 0, 1, 3, 2, 1, 3],
    [2, 3, 1, 0, 1, 2, 4, 2],
    [1, 1, 3, 1, 0, 2, 1, 1],
    [2, 2, 2, 2, 2, 0, 2, 2],
    [2, 4, 1, 4, 1, 2, 0, 1],
    [4, 1, 3, 2, 1, 2, 1, 0],
];

const PROFESSIONAL: [&str; 14] = [
    "nytimes.com",
    "washingtonpost.com",
    "wsj.com",
    "reuters.com",
    "apnews.com",
    "bbc.co.uk",
    "theguardian.com",
    "cnn.com",
    "foxnews.com",
    "npr.org",
    "usatoday.com",
    "politico.com",
    "latimes.com",
    "abc.net.au",
];
const JUNK: [&str; 14] = [
    "eaglewatch-report.com",
    "liberty-signal.net",
    "truepatriot-daily.com",
    "deepstate-files.org",
    "wakeup-wire.net",
    "red-alert-bulletin.info",
    "frontline-truth.com",
    "hidden-agenda-post.net",
    "patriot-flash.com",
    "globalist-watch.org",
    "real-news-radar.com",
    "shadow-gov-report.net",
    "vigilant-citizen-wire.com",
    "open-eyes-daily.org",
];
const STATE: [&str; 6] = ["rt.com", "sputniknews.com", "tass.com", "presstv.com", "globaltimes.cn", "cgtn.com"];
const VETOPS: [&str; 6] = [
    "veteranstoday.com",
    "veteransnewsnow.com",
    "southfront.org",
    "vets-frontline.org",
    "military-voice-daily.com",
    "ops-veteran-news.net",
];
// shared links that the dictionary does not classify
const UNCLASSIFIED: [&str; 6] =
    ["youtube.com", "facebook.com", "wikipedia.org", "imgur.com", "freedomtalk.blogspot.com", "medium.com"];

pub fn dictionary_domains() -> Vec<(&'static str, NewsCategory)> {
    let mut out = Vec::new();
    for (list, cat) in [
        (&PROFESSIONAL[..], NewsCategory::Professional),
        (&JUNK[..], NewsCategory::Junk),
        (&STATE[..], NewsCategory::StateSponsored),
        (&VETOPS[..], NewsCategory::VetOps),
    ] {
        out.extend(list.iter().map(|d| (*d, cat)));
    }
    out
}

fn domains_of(category: Option<NewsCategory>) -> &'static [&'static str] {
    match category {
        Some(NewsCategory::Professional) => &PROFESSIONAL,
        Some(NewsCategory::Junk) => &JUNK,
        Some(NewsCategory::StateSponsored) => &STATE,
        Some(NewsCategory::VetOps) => &VETOPS,
        None => &UNCLASSIFIED,
    }
}

const MIX_ORDER: [Option<NewsCategory>; 5] = [
    Some(NewsCategory::Professional),
    Some(NewsCategory::Junk),
    Some(NewsCategory::StateSponsored),
    Some(NewsCategory::VetOps),
    None,
];

/// A URL for `domain` in one of the shapes seen in scraped posts.
fn messy_url(rng: &mut ChaCha8Rng, domain: &str) -> String {
    let n: u32 = rng.random_range(1000..99999);
    match rng.random_range(0..7) {
        0 => format!("https://www.{domain}/{}/{:02}/story-{n}", rng.random_range(2015..2018), rng.random_range(1..13)),
        1 => format!("http://{domain}/article?id={n}&utm_source=twitter"),
        2 => format!("https://m.{domain}/news/{n}"),
        3 => format!("HTTPS://WWW.{}/{n}.html", domain.to_ascii_uppercase()),
        4 => format!("{domain}/{n}"),
        5 => format!("https://amp.{domain}/amp/{n}#top"),
        _ => format!("https://{domain}:443/p/{n}/"),
    }
}

fn timestamp(rng: &mut ChaCha8Rng) -> String {
    format!(
        "2017-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        rng.random_range(1..13),
        rng.random_range(1..29),
        rng.random_range(0..24),
        rng.random_range(0..60),
        rng.random_range(0..60)
    )
}

/// Reshare count of an ordinary post: mostly small with a long tail.
fn reshares(rng: &mut ChaCha8Rng) -> u64 {
    let u: f64 = rng.random();
    (u.powi(4) * 500.0) as u64
}

/// `n` citation lines (`account<TAB>url<TAB>shares<TAB>timestamp`) with
/// categories drawn from `mix` (weights over professional, junk,
/// state-sponsored, vetops, unclassified) and accounts drawn uniformly.
pub fn draw_citations(accounts: &[String], mix: [u32; 5], n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(mix).expect("mix has a positive weight");
    let mut out = String::new();
    for _ in 0..n {
        let account = accounts.choose(&mut rng).expect("at least one account");
        let domain = domains_of(MIX_ORDER[pick.sample(&mut rng)]).choose(&mut rng).expect("non-empty pool");
        let url = messy_url(&mut rng, domain);
        let shares = reshares(&mut rng);
        let ts = timestamp(&mut rng);
        let _ = writeln!(out, "{account}\t{url}\t{shares}\t{ts}");
    }
    out
}

/// Generated inputs, as file contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub edges: String,
    pub seeds: String,
    pub citations: String,
    pub dictionary: String,
    /// `account<TAB>group` for every planted account.
    pub planted: BTreeMap<String, String>,
    pub amplifiers: Vec<String>,
    pub drifters: Vec<String>,
}

fn group_sizes(total: usize) -> Vec<usize> {
    let weight: usize = GROUPS.iter().map(|g| g.1).sum();
    let mut sizes: Vec<usize> = GROUPS.iter().map(|g| g.1 * total / weight).collect();
    let mut rest: Vec<usize> = (0..GROUPS.len()).collect();
    rest.sort_by_key(|&i| (std::cmp::Reverse(GROUPS[i].1 * total % weight), i));
    let short = total - sizes.iter().sum::<usize>();
    for &i in rest.iter().take(short) {
        sizes[i] += 1;
    }
    sizes
}

pub fn generate(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = group_sizes(ACCOUNTS);
    let other = GROUPS.iter().position(|g| g.0 == RESIDUAL_LABEL).expect("residual group listed");

    let mut group_of: Vec<usize> = sizes.iter().enumerate().flat_map(|(g, &n)| std::iter::repeat_n(g, n)).collect();
    group_of.shuffle(&mut rng);
    let ids: Vec<String> = (1..=ACCOUNTS).map(|i| format!("u{i:04}")).collect();
    let drifter: Vec<bool> = (0..ACCOUNTS).map(|_| rng.random_bool(0.06)).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); GROUPS.len()];
    for a in 0..ACCOUNTS {
        if !drifter[a] {
            members[group_of[a]].push(a);
        }
    }
    let pages: Vec<Vec<String>> =
        (0..GROUPS.len()).map(|g| (1..=15).map(|j| format!("page{g}x{j:02}")).collect()).collect();
    let all_pages: Vec<&String> = pages.iter().flatten().collect();

    let mut edges: BTreeSet<(String, String, EdgeKind)> = BTreeSet::new();
    let mut add = |a: &str, b: &str, kind| {
        if a != b {
            edges.insert((a.to_string(), b.to_string(), kind));
        }
    };
    for a in 0..ACCOUNTS {
        let me = &ids[a];
        let g = group_of[a];
        if drifter[a] {
            add(me, SEED_PAGES.choose(&mut rng).unwrap(), EdgeKind::Follow);
            add(me, pages[g].choose(&mut rng).unwrap(), EdgeKind::Follow);
            continue;
        }
        let n_seeds = rng.random_range(1..=3);
        for s in SEED_PAGES.choose_multiple(&mut rng, n_seeds) {
            add(me, s, EdgeKind::Follow);
        }
        if g == other {
            for p in &all_pages {
                if rng.random_bool(0.03) {
                    add(me, p, EdgeKind::Follow);
                }
            }
            for _ in 0..rng.random_range(4..9) {
                let pool = &members[rng.random_range(0..GROUPS.len())];
                add(me, &ids[*pool.choose(&mut rng).unwrap()], EdgeKind::Follow);
            }
        } else {
            for (h, ps) in pages.iter().enumerate() {
                let p = if h == g { 0.6 } else { 0.015 };
                for page in ps {
                    if rng.random_bool(p) {
                        add(me, page, EdgeKind::Follow);
                    }
                }
            }
            for _ in 0..rng.random_range(5..10) {
                add(me, &ids[*members[g].choose(&mut rng).unwrap()], EdgeKind::Follow);
            }
            let weights: Vec<usize> = (0..GROUPS.len()).map(|h| AFFINITY[g][h] as usize * sizes[h]).collect();
            let cross = WeightedIndex::new(&weights).expect("some affinity");
            for _ in 0..rng.random_range(1..4) {
                let h = cross.sample(&mut rng);
                add(me, &ids[*members[h].choose(&mut rng).unwrap()], EdgeKind::Follow);
            }
        }
        for _ in 0..rng.random_range(0..3) {
            add(me, &ids[*members[g].choose(&mut rng).unwrap()], EdgeKind::Mention);
        }
        if rng.random_bool(0.3) {
            add(me, &ids[*members[g].choose(&mut rng).unwrap()], EdgeKind::Like);
        }
    }
    let mut edge_text = String::from("# source\ttarget\tkind\n");
    for (a, b, k) in &edges {
        let _ = writeln!(edge_text, "{a}\t{b}\t{k}");
    }

    let mut seeds = String::from("# seed pages\n");
    for s in SEED_PAGES {
        let _ = writeln!(seeds, "{s}");
    }

    let mut dictionary = String::from("# domain\tcategory\n");
    for (d, c) in dictionary_domains() {
        let _ = writeln!(dictionary, "{d}\t{c}");
    }

    // amplifiers come from the groups that lean on junk and state media
    let mut candidates: Vec<usize> = [3usize, 6, 1].iter().flat_map(|&g| members[g].iter().copied()).collect();
    candidates.sort_unstable();
    let amplifier_idx: Vec<usize> = candidates.choose_multiple(&mut rng, 12).copied().collect();
    let mut citations = String::from("# account\turl\tshares\tposted_at\n");
    let mut written = 0;
    for &a in &amplifier_idx {
        for _ in 0..rng.random_range(55..90) {
            let pool = if rng.random_bool(0.6) { &JUNK[..] } else { &STATE[..] };
            let domain = pool.choose(&mut rng).unwrap();
            let shares = if rng.random_bool(0.85) { rng.random_range(0..2) } else { rng.random_range(2..40) };
            let url = messy_url(&mut rng, domain);
            let ts = timestamp(&mut rng);
            let _ = writeln!(citations, "{}\t{url}\t{shares}\t{ts}", ids[a]);
            written += 1;
        }
    }
    let activity: Vec<f64> =
        (0..ACCOUNTS).map(|a| if drifter[a] { 0.3 } else { 0.2 + rng.random::<f64>().powi(2) * 3.0 }).collect();
    let who = WeightedIndex::new(&activity).expect("positive activity");
    let mixes: Vec<WeightedIndex<u32>> = GROUPS.iter().map(|g| WeightedIndex::new(g.2).unwrap()).collect();
    while written < CITATIONS {
        let a = who.sample(&mut rng);
        let category = MIX_ORDER[mixes[group_of[a]].sample(&mut rng)];
        let domain = domains_of(category).choose(&mut rng).unwrap();
        let url = messy_url(&mut rng, domain);
        let shares = reshares(&mut rng);
        let ts = timestamp(&mut rng);
        let _ = writeln!(citations, "{}\t{url}\t{shares}\t{ts}", ids[a]);
        written += 1;
    }

    let mut amplifiers: Vec<String> = amplifier_idx.iter().map(|&a| ids[a].clone()).collect();
    amplifiers.sort();
    Dataset {
        edges: edge_text,
        seeds,
        citations,
        dictionary,
        planted: (0..ACCOUNTS).map(|a| (ids[a].clone(), GROUPS[group_of[a]].0.to_string())).collect(),
        amplifiers,
        drifters: (0..ACCOUNTS).filter(|&a| drifter[a]).map(|a| ids[a].clone()).collect(),
    }
}

fn config_text(seed: u64, with_assignment: bool) -> String {
    let assignment = if with_assignment { "assignment = \"assignment.tsv\"\n" } else { "" };
    format!(
        r#"# Synthetic dataset generated with `netmap synth --seed {seed}`.
output_dir = "out"

[inputs]
edges = "edges.tsv"
citations = "citations.tsv"
dictionary = "dictionary.tsv"
seeds = "seeds.txt"
{assignment}
[kcore]
target_size = 900

[cluster]
relation = "follow"
linkage = "average"
segments = 45

[layout]
seed = 7
account_iterations = 200
"#
    )
}

/// Segment id to group label by majority of planted labels; segments
/// without planted members, and the residual segment, go to the residual group.
fn majority_assignment(segments: &[netmap_core::clustering::Segment], planted: &BTreeMap<String, String>) -> String {
    let mut out = String::from("# segment_id\tgroup\n");
    for seg in segments {
        let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
        if seg.label.as_deref() != Some(RESIDUAL_LABEL) {
            for m in &seg.members {
                if let Some(g) = planted.get(m.as_str()) {
                    *votes.entry(g.as_str()).or_default() += 1;
                }
            }
        }
        // highest count wins; BTreeMap order makes the alphabetically first label win a tie
        let label = votes
            .iter()
            .fold(None::<(&str, usize)>, |best, (&l, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((l, c)),
            })
            .map_or(RESIDUAL_LABEL, |(l, _)| l);
        let _ = writeln!(out, "{}\t{label}", seg.id);
    }
    out
}

/// Writes the dataset, a config, and an assignment derived by running the
/// clustering stages on it.
pub fn write_bundle(dir: &Path, seed: u64) -> anyhow::Result<Dataset> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let data = generate(seed);
    let mut planted = String::from("# account\tplanted_group\n");
    for (a, g) in &data.planted {
        let _ = writeln!(planted, "{a}\t{g}");
    }
    for (name, text) in [
        ("edges.tsv", &data.edges),
        ("seeds.txt", &data.seeds),
        ("citations.tsv", &data.citations),
        ("dictionary.tsv", &data.dictionary),
        ("planted.tsv", &planted),
    ] {
        write_atomic(&dir.join(name), text.as_bytes()).with_context(|| format!("writing {name}"))?;
    }
    let config_path = dir.join(CONFIG_FILE);
    write_atomic(&config_path, config_text(seed, false).as_bytes())?;
    let config = validate_config(&config_path)?;

    let full = load_graph(&config.inputs.edges.resolved, config.inputs.edge_kind)?;
    let seeds = load_seed_file(&config.inputs.seeds.resolved)?;
    let sample = sample_graph(&full, &seeds, config.snowball_depth)?;
    let (core, _) = core_graph(&sample, &config)?;
    let (_, clustering) = segment_core(&full, &core, &config)?;
    let assignment = majority_assignment(&clustering.segments, &data.planted);
    write_atomic(&dir.join("assignment.tsv"), assignment.as_bytes())?;
    write_atomic(&config_path, config_text(seed, true).as_bytes())?;
    Ok(data)
}
