use std::fmt;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use netmap_core::clustering::{Cut, HacParams, Linkage, TieBreak};
use netmap_core::content::{AmplifierThresholds, NewsCategory};
use netmap_core::graph::{EdgeKind, KCoreParams};
use netmap_core::layout::{LayoutConfig, SvgStyle};
use toml::{Table, Value};

/// Every problem found in a config file, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// An input path as written in the config and as resolved against the config's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputPath {
    pub written: String,
    pub resolved: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub edges: InputPath,
    pub edge_kind: EdgeKind,
    pub citations: InputPath,
    pub dictionary: InputPath,
    pub seeds: InputPath,
    pub assignment: Option<InputPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub output_dir: InputPath,
    pub snowball_depth: usize,
    pub kcore: KCoreParams,
    /// Edge kinds whose undirected projection drives the k-core degree.
    pub kcore_kinds: Vec<EdgeKind>,
    pub relation: EdgeKind,
    pub hac: HacParams<f64>,
    pub tracked: Vec<NewsCategory>,
    pub amplifiers: AmplifierThresholds,
    pub layout: LayoutConfig<f64>,
    /// Iterations for the account-level map; the group map uses `layout.iterations`.
    pub account_iterations: usize,
    pub style: SvgStyle,
}

fn kind_list(kinds: &[EdgeKind]) -> String {
    kinds.iter().map(|k| format!("\"{k}\"")).collect::<Vec<_>>().join(", ")
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

impl PipelineConfig {
    /// The configuration with every default filled in, as TOML.
    pub fn effective_toml(&self) -> String {
        let mut s = String::new();
        let opt = |p: &Option<InputPath>| {
            p.as_ref().map_or(String::from("# assignment = (unset)"), |p| format!("assignment = {}", quote(&p.written)))
        };
        s += &format!("output_dir = {}\n\n", quote(&self.output_dir.written));
        s += "[inputs]\n";
        s += &format!("edges = {}\n", quote(&self.inputs.edges.written));
        s += &format!("edge_kind = \"{}\"\n", self.inputs.edge_kind);
        s += &format!("citations = {}\n", quote(&self.inputs.citations.written));
        s += &format!("dictionary = {}\n", quote(&self.inputs.dictionary.written));
        s += &format!("seeds = {}\n", quote(&self.inputs.seeds.written));
        s += &format!("{}\n\n", opt(&self.inputs.assignment));
        s += &format!("[snowball]\ndepth = {}\n\n", self.snowball_depth);
        s += "[kcore]\n";
        match self.kcore {
            KCoreParams::Fixed(k) => s += &format!("k = {k}\n"),
            KCoreParams::TargetSize(t) => s += &format!("target_size = {t}\n"),
        }
        s += &format!("edge_kinds = [{}]\n\n", kind_list(&self.kcore_kinds));
        s += "[cluster]\n";
        s += &format!("relation = \"{}\"\nlinkage = \"{}\"\n", self.relation, self.hac.linkage);
        match self.hac.cut {
            Cut::Segments(n) => s += &format!("segments = {n}\n\n"),
            Cut::Threshold(t) => s += &format!("threshold = {t:?}\n\n"),
        }
        let tracked: Vec<String> = self.tracked.iter().map(|c| format!("\"{}\"", c.as_str())).collect();
        s += &format!("[metrics]\ntracked = [{}]\n\n", tracked.join(", "));
        s += &format!(
            "[amplifiers]\nmin_shares = {}\nmax_median_reshare = {}\n\n",
            self.amplifiers.min_shares, self.amplifiers.max_median_reshare
        );
        let l = &self.layout;
        s += &format!(
            "[layout]\nwidth = {:?}\nheight = {:?}\niterations = {}\naccount_iterations = {}\ninitial_temperature = {:?}\nseed = {}\n\n",
            l.width, l.height, l.iterations, self.account_iterations, l.initial_temperature, l.seed
        );
        s += "[style]\n";
        s += &toml::to_string(&self.style).expect("style serializes");
        s
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Pulls typed keys out of a table, remembering every problem instead of
/// stopping at the first.
struct Walker {
    errors: Vec<String>,
}

impl Walker {
    fn err(&mut self, path: &str, msg: impl fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn section(&mut self, root: &mut Table, name: &str) -> Table {
        match root.remove(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t,
            Some(other) => {
                self.err(name, format!("expected a table, found {}", other.type_str()));
                Table::new()
            }
        }
    }

    fn finish(&mut self, prefix: &str, table: Table) {
        for key in table.keys() {
            self.err(&join(prefix, key), "unknown key");
        }
    }

    fn string(&mut self, t: &mut Table, path: &str, key: &str) -> Option<String> {
        match t.remove(key) {
            None => None,
            Some(Value::String(s)) if !s.trim().is_empty() => Some(s),
            Some(Value::String(_)) => {
                self.err(&join(path, key), "must not be empty");
                None
            }
            Some(v) => {
                self.err(&join(path, key), format!("expected a string, found {}", v.type_str()));
                None
            }
        }
    }

    fn int(&mut self, t: &mut Table, path: &str, key: &str, min: i64) -> Option<u64> {
        match t.remove(key) {
            None => None,
            Some(Value::Integer(i)) if i >= min => Some(i as u64),
            Some(Value::Integer(i)) => {
                self.err(&join(path, key), format!("must be at least {min}, found {i}"));
                None
            }
            Some(v) => {
                self.err(&join(path, key), format!("expected an integer, found {}", v.type_str()));
                None
            }
        }
    }

    fn float(&mut self, t: &mut Table, path: &str, key: &str) -> Option<f64> {
        match t.remove(key) {
            None => None,
            Some(Value::Float(x)) => Some(x),
            Some(Value::Integer(i)) => Some(i as f64),
            Some(v) => {
                self.err(&join(path, key), format!("expected a number, found {}", v.type_str()));
                None
            }
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, t: &mut Table, path: &str, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.string(t, path, key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.err(&join(path, key), e);
                None
            }
        }
    }

    fn list<T: std::str::FromStr>(&mut self, t: &mut Table, path: &str, key: &str) -> Option<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let full = join(path, key);
        match t.remove(key) {
            None => None,
            Some(Value::Array(items)) => {
                let mut out = Vec::new();
                for (i, item) in items.into_iter().enumerate() {
                    match item {
                        Value::String(s) => match s.parse() {
                            Ok(v) => out.push(v),
                            Err(e) => self.err(&format!("{full}[{i}]"), e),
                        },
                        other => {
                            self.err(&format!("{full}[{i}]"), format!("expected a string, found {}", other.type_str()))
                        }
                    }
                }
                if out.is_empty() {
                    self.err(&full, "must list at least one value");
                    return None;
                }
                Some(out)
            }
            Some(v) => {
                self.err(&full, format!("expected an array, found {}", v.type_str()));
                None
            }
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Reads and validates a pipeline config file.
///
/// Relative paths are resolved against the config file's directory. All
/// problems are collected before returning.
pub fn validate_config(path: &Path) -> Result<PipelineConfig, ConfigErrors> {
    let text = fs::read_to_string(path).map_err(|e| ConfigErrors(vec![format!("{}: {e}", path.display())]))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, &base).map_err(|mut e| {
        for msg in &mut e.0 {
            *msg = format!("{}: {msg}", path.display());
        }
        e
    })
}

/// Validates config text; `base` is the directory relative paths hang off.
pub fn parse_config(text: &str, base: &Path) -> Result<PipelineConfig, ConfigErrors> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| {
        let at = e.span().map(|s| line_col(text, s.start));
        let msg = e.message().trim().to_string();
        ConfigErrors(vec![match at {
            Some((l, c)) => format!("syntax error at line {l}, column {c}: {msg}"),
            None => format!("syntax error: {msg}"),
        }])
    })?;
    let mut w = Walker { errors: Vec::new() };

    let resolve = |written: String| {
        let p = PathBuf::from(&written);
        let resolved = if p.is_absolute() { p } else { base.join(p) };
        InputPath { written, resolved }
    };

    let output_dir = resolve(w.string(&mut root, "", "output_dir").unwrap_or_else(|| "out".into()));

    let mut inputs = w.section(&mut root, "inputs");
    let mut required = |w: &mut Walker, key: &str| {
        let v = w.string(&mut inputs, "inputs", key);
        if v.is_none() && !w.errors.iter().any(|e| e.starts_with(&format!("inputs.{key}:"))) {
            w.err(&format!("inputs.{key}"), "required");
        }
        v.map(resolve)
    };
    let edges = required(&mut w, "edges");
    let citations = required(&mut w, "citations");
    let dictionary = required(&mut w, "dictionary");
    let seeds = required(&mut w, "seeds");
    let assignment = w.string(&mut inputs, "inputs", "assignment").map(resolve);
    let edge_kind = w.parsed(&mut inputs, "inputs", "edge_kind").unwrap_or(EdgeKind::Follow);
    w.finish("inputs", inputs);
    for p in [&edges, &citations, &dictionary, &seeds, &assignment].into_iter().flatten() {
        if !p.resolved.is_file() {
            w.err("inputs", format!("file `{}` does not exist", p.resolved.display()));
        }
    }

    let mut sb = w.section(&mut root, "snowball");
    let depth = w.int(&mut sb, "snowball", "depth", 1).unwrap_or(1) as usize;
    w.finish("snowball", sb);

    let mut kc = w.section(&mut root, "kcore");
    let k = w.int(&mut kc, "kcore", "k", 0);
    let target = w.int(&mut kc, "kcore", "target_size", 1);
    let kcore = match (k, target) {
        (Some(_), Some(_)) => {
            w.err("kcore", "set either `k` or `target_size`, not both");
            KCoreParams::Fixed(0)
        }
        (_, Some(t)) => KCoreParams::TargetSize(NonZeroUsize::new(t as usize).expect("checked >= 1")),
        (k, None) => KCoreParams::Fixed(k.unwrap_or(0) as usize),
    };
    let kcore_kinds = w.list(&mut kc, "kcore", "edge_kinds").unwrap_or_else(|| EdgeKind::ALL.to_vec());
    w.finish("kcore", kc);

    let mut cl = w.section(&mut root, "cluster");
    let relation = w.parsed(&mut cl, "cluster", "relation").unwrap_or(EdgeKind::Follow);
    let linkage: Linkage = w.parsed(&mut cl, "cluster", "linkage").unwrap_or_default();
    let segments = w.int(&mut cl, "cluster", "segments", 1);
    let threshold = w.float(&mut cl, "cluster", "threshold");
    let cut = match (segments, threshold) {
        (Some(_), Some(_)) => {
            w.err("cluster", "set either `segments` or `threshold`, not both");
            Cut::Segments(1)
        }
        (None, Some(t)) => {
            if !(0.0..=1.0).contains(&t) {
                w.err("cluster.threshold", format!("must lie in [0, 1], found {t}"));
            }
            Cut::Threshold(t)
        }
        (s, None) => Cut::Segments(s.unwrap_or(45) as usize),
    };
    w.finish("cluster", cl);

    let mut me = w.section(&mut root, "metrics");
    let tracked = w
        .list(&mut me, "metrics", "tracked")
        .unwrap_or_else(|| vec![NewsCategory::Junk, NewsCategory::StateSponsored, NewsCategory::VetOps]);
    w.finish("metrics", me);

    let mut am = w.section(&mut root, "amplifiers");
    let defaults = AmplifierThresholds::default();
    let amplifiers = AmplifierThresholds {
        min_shares: w.int(&mut am, "amplifiers", "min_shares", 1).unwrap_or(defaults.min_shares),
        max_median_reshare: w
            .int(&mut am, "amplifiers", "max_median_reshare", 0)
            .unwrap_or(defaults.max_median_reshare),
    };
    w.finish("amplifiers", am);

    let mut la = w.section(&mut root, "layout");
    let d = LayoutConfig::<f64>::default();
    let layout = LayoutConfig {
        width: w.float(&mut la, "layout", "width").unwrap_or(d.width),
        height: w.float(&mut la, "layout", "height").unwrap_or(d.height),
        iterations: w.int(&mut la, "layout", "iterations", 1).map_or(d.iterations, |i| i as usize),
        initial_temperature: w.float(&mut la, "layout", "initial_temperature").unwrap_or(d.initial_temperature),
        seed: w.int(&mut la, "layout", "seed", 0).unwrap_or(d.seed),
    };
    let account_iterations =
        w.int(&mut la, "layout", "account_iterations", 1).map_or(layout.iterations, |i| i as usize);
    if let Err(e) = layout.validate() {
        w.err("layout", e);
    }
    w.finish("layout", la);

    let style = match root.remove("style") {
        None => SvgStyle::default(),
        Some(v) => match v.try_into::<SvgStyle>() {
            Ok(s) => s,
            Err(e) => {
                w.err("style", e.message().trim());
                SvgStyle::default()
            }
        },
    };
    w.finish("", root);

    if !w.errors.is_empty() {
        return Err(ConfigErrors(w.errors));
    }
    Ok(PipelineConfig {
        inputs: Inputs {
            edges: edges.expect("reported"),
            edge_kind,
            citations: citations.expect("reported"),
            dictionary: dictionary.expect("reported"),
            seeds: seeds.expect("reported"),
            assignment,
        },
        output_dir,
        snowball_depth: depth,
        kcore,
        kcore_kinds,
        relation,
        hac: HacParams { linkage, cut, tie_break: TieBreak::default() },
        tracked,
        amplifiers,
        layout,
        account_iterations,
        style,
    })
}

impl PipelineConfig {
    /// Command-line overrides: a different output directory (taken as
    /// written, relative to the working directory) and layout seed.
    pub fn with_overrides(mut self, out: Option<&Path>, seed: Option<u64>) -> Self {
        if let Some(out) = out {
            self.output_dir = InputPath { written: out.display().to_string(), resolved: out.to_path_buf() };
        }
        if let Some(seed) = seed {
            self.layout.seed = seed;
        }
        self
    }
}

/// Makes sure `dir` exists (creating it if needed) and accepts new files.
pub fn check_output_dir(dir: &Path) -> Result<(), ConfigErrors> {
    let fail = |m: String| Err(ConfigErrors(vec![format!("output_dir: {m}")]));
    if dir.exists() && !dir.is_dir() {
        return fail(format!("`{}` is not a directory", dir.display()));
    }
    if let Err(e) = fs::create_dir_all(dir) {
        return fail(format!("cannot create `{}`: {e}", dir.display()));
    }
    let probe = dir.join(".netmap-write-probe");
    match fs::write(&probe, b"") {
        Ok(()) => {
            let _ = fs::remove_file(probe);
            Ok(())
        }
        Err(e) => fail(format!("`{}` is not writable: {e}", dir.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn workspace() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for f in ["edges.tsv", "citations.tsv", "dict.tsv", "seeds.txt", "assign.tsv"] {
            fs::write(dir.path().join(f), "").unwrap();
        }
        dir
    }

    const MINIMAL: &str = r#"
[inputs]
edges = "edges.tsv"
citations = "citations.tsv"
dictionary = "dict.tsv"
seeds = "seeds.txt"
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let dir = workspace();
        let c = parse_config(MINIMAL, dir.path()).unwrap();
        assert_eq!(c.snowball_depth, 1);
        assert_eq!(c.kcore, KCoreParams::Fixed(0));
        assert_eq!(c.hac.cut, Cut::Segments(45));
        assert_eq!(c.hac.linkage, Linkage::Average);
        assert_eq!(c.amplifiers, AmplifierThresholds { min_shares: 50, max_median_reshare: 1 });
        assert_eq!(c.layout, LayoutConfig::default());
        assert_eq!(c.inputs.edges.resolved, dir.path().join("edges.tsv"));
        assert_eq!(c.output_dir.resolved, dir.path().join("out"));
        assert!(c.inputs.assignment.is_none());
    }

    #[test]
    fn every_problem_is_reported() {
        let dir = workspace();
        let text = r#"
[inputs]
edges = "edges.tsv"
citations = "citations.tsv"
dictionary = "missing.tsv"
edge_kind = "retweet"

[kcore]
k = 3
target_size = 10

[cluster]
linkage = "ward"
bogus = 1
"#;
        let errs = parse_config(text, dir.path()).unwrap_err().0;
        let joined = errs.join("\n");
        for needle in [
            "inputs.seeds: required",
            "inputs.edge_kind",
            "missing.tsv",
            "not both",
            "cluster.linkage",
            "cluster.bogus: unknown key",
        ] {
            assert!(joined.contains(needle), "missing `{needle}` in:\n{joined}");
        }
        assert_eq!(errs.len(), 6, "{joined}");
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_config("[inputs]\nedges = \"a\nseeds = 1\n", Path::new(".")).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(err.0[0].starts_with("syntax error at line 2,"), "{}", err.0[0]);
    }

    #[test]
    fn style_overrides_merge_with_defaults() {
        let dir = workspace();
        let text = format!("{MINIMAL}\n[style]\nlabels = false\nmax_radius = 12.0\n");
        let c = parse_config(&text, dir.path()).unwrap();
        assert!(!c.style.labels);
        assert_eq!(c.style.max_radius, 12.0);
        assert_eq!(c.style.min_radius, SvgStyle::default().min_radius);
        let bad = format!("{MINIMAL}\n[style]\nradius = 1\n");
        assert!(parse_config(&bad, dir.path()).unwrap_err().0[0].starts_with("style:"));
    }

    #[test]
    fn effective_dump_reparses_to_same_config() {
        let dir = workspace();
        let c = parse_config(MINIMAL, dir.path()).unwrap();
        let again = parse_config(&c.effective_toml(), dir.path()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn threshold_cut_and_target_size() {
        let dir = workspace();
        let text = format!("{MINIMAL}\n[kcore]\ntarget_size = 40\n[cluster]\nthreshold = 0.25\n");
        let c = parse_config(&text, dir.path()).unwrap();
        assert_eq!(c.kcore, KCoreParams::TargetSize(NonZeroUsize::new(40).unwrap()));
        assert_eq!(c.hac.cut, Cut::Threshold(0.25));
        let out = parse_config(&format!("{MINIMAL}\n[cluster]\nthreshold = 1.5\n"), dir.path()).unwrap_err();
        assert!(out.0[0].contains("[0, 1]"));
    }
}
