use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context};
use netmap_core::clustering::{
    build_affiliation, group_segments, hac_cluster, load_assignment, read_grouping, read_segments, write_grouping,
    write_segments, AffiliationMatrix, Clustering, Cut, Grouping,
};
use netmap_core::content::{detect_amplifiers, share_table, DomainDictionary};
use netmap_core::graph::{
    load_citations, load_edge_list, load_seeds, reduce, snowball_expand, write_edge_list, AccountId, CitationRecord,
    EdgeKind, InteractionGraph,
};
use netmap_core::layout::{aggregate_group_graph, fr_layout, render_svg, LayoutConfig, LayoutSource, SvgStyle};
use netmap_core::metrics::{
    build_hit_matrix, group_summary, heterophily, tie_counts, write_group_summary, HeterophilyMatrix,
};
use serde::Serialize;

use crate::config::{check_output_dir, ConfigErrors, PipelineConfig};
use crate::manifest::{digest_file, sha256_hex, tmp_path, write_atomic, RunManifest, StageTiming};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Snowball,
    Kcore,
    Cluster,
    Group,
    Metrics,
    Classify,
    Layout,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Snowball, Stage::Kcore, Stage::Cluster, Stage::Group, Stage::Metrics, Stage::Classify, Stage::Layout];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Snowball => "snowball",
            Stage::Kcore => "kcore",
            Stage::Cluster => "cluster",
            Stage::Group => "group",
            Stage::Metrics => "metrics",
            Stage::Classify => "classify",
            Stage::Layout => "layout",
        }
    }

    /// Files this stage writes into the output directory.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Snowball => &[SAMPLE],
            Stage::Kcore => &[CORE, "kcore.json"],
            Stage::Cluster => &[SEGMENTS, "cluster_report.json"],
            Stage::Group => &[GROUPING],
            Stage::Metrics => &["groups.csv", "heterophily.csv", "heterophily_pairs.csv"],
            Stage::Classify => &["share_table.csv", "amplifiers.csv"],
            Stage::Layout => &["group_map.svg", "group_positions.csv", "account_map.svg", "account_positions.csv"],
        }
    }

    /// Upstream artifacts this stage reads.
    pub fn needs(self) -> &'static [(&'static str, Stage)] {
        match self {
            Stage::Snowball => &[],
            Stage::Kcore => &[(SAMPLE, Stage::Snowball)],
            Stage::Cluster => &[(CORE, Stage::Kcore)],
            Stage::Group => &[(SEGMENTS, Stage::Cluster)],
            Stage::Metrics | Stage::Layout => &[(CORE, Stage::Kcore), (GROUPING, Stage::Group)],
            Stage::Classify => &[(GROUPING, Stage::Group)],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

const SAMPLE: &str = "sample.tsv";
const CORE: &str = "core.tsv";
const SEGMENTS: &str = "segments.tsv";
const GROUPING: &str = "grouping.tsv";

/// The headline artifacts of a full run: reduced graph, segments, grouping,
/// the three tables, the amplifier report and both maps.
pub const PRIMARY_ARTIFACTS: [&str; 9] = [
    CORE,
    SEGMENTS,
    GROUPING,
    "groups.csv",
    "heterophily.csv",
    "share_table.csv",
    "amplifiers.csv",
    "group_map.svg",
    "account_map.svg",
];

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("stage `{stage}` failed: {cause:#}")]
    Stage { stage: Stage, cause: anyhow::Error },
    #[error("could not write run manifest: {0}")]
    Manifest(#[source] std::io::Error),
}

impl PipelineError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Runs every stage in order and writes the manifest.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    run_stages(config, &Stage::ALL)
}

/// Runs the given stages in order, reading upstream artifacts from the
/// output directory, then refreshes the manifest.
pub fn run_stages(config: &PipelineConfig, stages: &[Stage]) -> Result<RunManifest, PipelineError> {
    let out = &config.output_dir.resolved;
    check_output_dir(out)?;
    if let Some(&first) = stages.first() {
        let mut problems = Vec::new();
        for &(file, from) in first.needs() {
            if !out.join(file).is_file() && !stages.contains(&from) {
                problems.push(format!("`{file}` is missing from {}; run the `{from}` stage first", out.display()));
            }
        }
        if stages.contains(&Stage::Group) && config.inputs.assignment.is_none() {
            problems.push("inputs.assignment: required by the `group` stage".into());
        }
        if !problems.is_empty() {
            return Err(ConfigErrors(problems).into());
        }
    }
    let previous = RunManifest::load(out).ok().flatten();
    let mut timings: Vec<StageTiming> = previous.map(|m| m.stages).unwrap_or_default();
    for &stage in stages {
        let start = Instant::now();
        log::info!("stage {stage}: starting");
        run_one(config, stage).map_err(|cause| PipelineError::Stage { stage, cause })?;
        let seconds = start.elapsed().as_secs_f64();
        log::info!("stage {stage}: done in {seconds:.2}s");
        timings.retain(|t| t.stage != stage.name());
        timings.push(StageTiming { stage: stage.name().into(), seconds });
    }
    timings.sort_by_key(|t| Stage::from_str(&t.stage).ok());
    let manifest = build_manifest(config, timings).map_err(PipelineError::Manifest)?;
    manifest.write(out).map_err(PipelineError::Manifest)?;
    Ok(manifest)
}

fn build_manifest(config: &PipelineConfig, stages: Vec<StageTiming>) -> std::io::Result<RunManifest> {
    let out = &config.output_dir.resolved;
    let i = &config.inputs;
    let mut inputs = Vec::new();
    for p in [&i.edges, &i.citations, &i.dictionary, &i.seeds].into_iter().chain(i.assignment.as_ref()) {
        inputs.push(digest_file(&p.resolved, &p.written)?);
    }
    let mut artifacts = Vec::new();
    for stage in Stage::ALL {
        for name in stage.outputs() {
            let path = out.join(name);
            if path.is_file() {
                artifacts.push(digest_file(&path, name)?);
            }
        }
    }
    Ok(RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(config.effective_toml().as_bytes()),
        seed: config.layout.seed,
        inputs,
        stages,
        artifacts,
    })
}

/// Computes every output in memory, then moves them into place. If any
/// write fails, whatever this stage already placed is removed again.
fn run_one(config: &PipelineConfig, stage: Stage) -> anyhow::Result<()> {
    let out = &config.output_dir.resolved;
    let files = match stage {
        Stage::Snowball => snowball(config)?,
        Stage::Kcore => kcore(config)?,
        Stage::Cluster => cluster(config)?,
        Stage::Group => group(config)?,
        Stage::Metrics => metrics(config)?,
        Stage::Classify => classify(config)?,
        Stage::Layout => layout(config)?,
    };
    debug_assert_eq!(files.iter().map(|f| f.0).collect::<Vec<_>>(), stage.outputs());
    let mut placed: Vec<PathBuf> = Vec::new();
    for (name, bytes) in &files {
        let path = out.join(name);
        if let Err(e) = write_atomic(&path, bytes) {
            for p in &placed {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(tmp_path(&path));
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        placed.push(path);
    }
    Ok(())
}

type Files = Vec<(&'static str, Vec<u8>)>;

fn reader(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

pub fn load_graph(path: &Path, kind: EdgeKind) -> anyhow::Result<InteractionGraph> {
    let load = load_edge_list(reader(path)?, kind).with_context(|| format!("reading {}", path.display()))?;
    if load.self_loops_skipped > 0 {
        log::warn!("{}: skipped {} self-loops", path.display(), load.self_loops_skipped);
    }
    Ok(load.graph)
}

fn artifact(config: &PipelineConfig, name: &str) -> PathBuf {
    config.output_dir.resolved.join(name)
}

fn load_grouping(config: &PipelineConfig) -> anyhow::Result<Grouping> {
    let path = artifact(config, GROUPING);
    read_grouping(reader(&path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_content(config: &PipelineConfig) -> anyhow::Result<(Vec<CitationRecord>, DomainDictionary)> {
    let c = &config.inputs.citations.resolved;
    let d = &config.inputs.dictionary.resolved;
    let cites = load_citations(reader(c)?).with_context(|| format!("reading {}", c.display()))?;
    let dict = DomainDictionary::load(reader(d)?).with_context(|| format!("reading {}", d.display()))?;
    Ok((cites, dict))
}

fn edge_list_bytes(g: &InteractionGraph) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf)?;
    Ok(buf)
}

fn json_bytes(value: &impl Serialize) -> anyhow::Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Accounts reachable from the seeds, with every tie among them.
pub fn sample_graph(full: &InteractionGraph, seeds: &[AccountId], depth: usize) -> anyhow::Result<InteractionGraph> {
    if seeds.is_empty() {
        bail!("the seed file lists no accounts");
    }
    let reached = snowball_expand(full, seeds, depth)?;
    Ok(full.restrict_to(&reached))
}

/// Reduced graph: degree is judged on the configured kinds, but the core
/// keeps every tie among its members.
pub fn core_graph(sample: &InteractionGraph, config: &PipelineConfig) -> anyhow::Result<(InteractionGraph, usize)> {
    let projection = sample.with_kinds(&config.kcore_kinds);
    let selection = reduce(&projection, config.kcore)?;
    Ok((sample.restrict_to(selection.core.nodes()), selection.k))
}

/// Affiliation matrix of the core accounts against the full graph, and its clustering.
pub fn segment_core(
    full: &InteractionGraph,
    core: &InteractionGraph,
    config: &PipelineConfig,
) -> anyhow::Result<(AffiliationMatrix, Clustering<f64>)> {
    if core.is_empty() {
        bail!("the reduced graph is empty; lower the k-core threshold");
    }
    let matrix = build_affiliation(full, core.nodes(), config.relation)?;
    let clustering = hac_cluster(&matrix, &config.hac)?;
    Ok((matrix, clustering))
}

pub fn load_seed_file(path: &Path) -> anyhow::Result<Vec<AccountId>> {
    load_seeds(reader(path)?).with_context(|| format!("reading {}", path.display()))
}

fn snowball(config: &PipelineConfig) -> anyhow::Result<Files> {
    let full = load_graph(&config.inputs.edges.resolved, config.inputs.edge_kind)?;
    let seeds = load_seed_file(&config.inputs.seeds.resolved)?;
    let sample = sample_graph(&full, &seeds, config.snowball_depth)?;
    log::info!("snowball: {} seeds reached {} of {} accounts", seeds.len(), sample.node_count(), full.node_count());
    Ok(vec![(SAMPLE, edge_list_bytes(&sample)?)])
}

#[derive(Serialize)]
struct KcoreReport<'a> {
    k: usize,
    core_size: usize,
    core_edges: usize,
    sample_size: usize,
    edge_kinds: Vec<&'a str>,
}

fn kcore(config: &PipelineConfig) -> anyhow::Result<Files> {
    let sample = load_graph(&artifact(config, SAMPLE), config.inputs.edge_kind)?;
    let (core, k) = core_graph(&sample, config)?;
    log::info!("kcore: k = {k} keeps {} of {} accounts", core.node_count(), sample.node_count());
    let report = KcoreReport {
        k,
        core_size: core.node_count(),
        core_edges: core.edge_count(),
        sample_size: sample.node_count(),
        edge_kinds: config.kcore_kinds.iter().map(|k| k.as_str()).collect(),
    };
    Ok(vec![(CORE, edge_list_bytes(&core)?), ("kcore.json", json_bytes(&report)?)])
}

#[derive(Serialize)]
struct SegmentSummary {
    id: usize,
    size: usize,
    label: Option<String>,
}

#[derive(Serialize)]
struct ClusterReport {
    rows: usize,
    columns: usize,
    relation: String,
    linkage: String,
    cut: String,
    segments: Vec<SegmentSummary>,
    zero_rows: Vec<String>,
    merges: Vec<netmap_core::clustering::Merge<f64>>,
}

fn cluster(config: &PipelineConfig) -> anyhow::Result<Files> {
    let core = load_graph(&artifact(config, CORE), config.inputs.edge_kind)?;
    let full = load_graph(&config.inputs.edges.resolved, config.inputs.edge_kind)?;
    let (matrix, clustering) = segment_core(&full, &core, config)?;
    if !clustering.zero_rows.is_empty() {
        log::warn!(
            "cluster: {} accounts have no `{}` ties and go to the residual segment",
            clustering.zero_rows.len(),
            config.relation
        );
    }
    let mut segments = Vec::new();
    write_segments(&clustering.segments, &mut segments)?;
    let report = ClusterReport {
        rows: matrix.row_count(),
        columns: matrix.col_count(),
        relation: config.relation.to_string(),
        linkage: config.hac.linkage.to_string(),
        cut: match config.hac.cut {
            Cut::Segments(n) => format!("segments={n}"),
            Cut::Threshold(t) => format!("threshold={t}"),
        },
        segments: clustering
            .segments
            .iter()
            .map(|s| SegmentSummary { id: s.id, size: s.members.len(), label: s.label.clone() })
            .collect(),
        zero_rows: clustering.zero_rows.iter().map(|a| a.to_string()).collect(),
        merges: clustering.merges,
    };
    Ok(vec![(SEGMENTS, segments), ("cluster_report.json", json_bytes(&report)?)])
}

fn group(config: &PipelineConfig) -> anyhow::Result<Files> {
    let Some(assignment) = &config.inputs.assignment else {
        bail!("no `inputs.assignment` file configured");
    };
    let seg_path = artifact(config, SEGMENTS);
    let segments = read_segments(reader(&seg_path)?).with_context(|| format!("reading {}", seg_path.display()))?;
    let pairs = load_assignment(reader(&assignment.resolved)?)
        .with_context(|| format!("reading {}", assignment.resolved.display()))?;
    let grouping = group_segments(segments, &pairs)?;
    let mut buf = Vec::new();
    write_grouping(&grouping, &mut buf)?;
    Ok(vec![(GROUPING, buf)])
}

fn heterophily_of(config: &PipelineConfig, grouping: &Grouping) -> anyhow::Result<HeterophilyMatrix<f64>> {
    let core = load_graph(&artifact(config, CORE), config.inputs.edge_kind)?;
    let counts = tie_counts(&core, grouping)?;
    if counts.dropped_nodes() > 0 {
        log::warn!("{} reduced-graph accounts are not in any group", counts.dropped_nodes());
    }
    Ok(heterophily(&counts)?)
}

fn metrics(config: &PipelineConfig) -> anyhow::Result<Files> {
    let grouping = load_grouping(config)?;
    let h = heterophily_of(config, &grouping)?;
    let (cites, dict) = load_content(config)?;
    let hits = build_hit_matrix(&cites, &grouping, &dict, &config.tracked);
    let rows = group_summary::<f64>(&grouping, &hits)?;
    let (mut summary, mut triangle, mut pairs) = (Vec::new(), Vec::new(), Vec::new());
    write_group_summary(&rows, &mut summary)?;
    h.write_triangle_csv(&mut triangle)?;
    h.write_pairs_csv(&mut pairs)?;
    Ok(vec![("groups.csv", summary), ("heterophily.csv", triangle), ("heterophily_pairs.csv", pairs)])
}

fn classify(config: &PipelineConfig) -> anyhow::Result<Files> {
    let grouping = load_grouping(config)?;
    let (cites, dict) = load_content(config)?;
    let table = share_table::<f64>(&cites, &grouping, &dict)?;
    if table.unmapped > 0 {
        log::warn!("classify: {} citations come from accounts outside every group", table.unmapped);
    }
    let amplifiers = detect_amplifiers(&cites, &dict, config.amplifiers)?;
    let (mut shares, mut amps) = (Vec::new(), Vec::new());
    table.write_csv(&mut shares)?;
    amplifiers.write_csv(&mut amps)?;
    Ok(vec![("share_table.csv", shares), ("amplifiers.csv", amps)])
}

fn layout(config: &PipelineConfig) -> anyhow::Result<Files> {
    let grouping = load_grouping(config)?;
    let h = heterophily_of(config, &grouping)?;
    let groups = aggregate_group_graph(&grouping, &h)?;
    let group_layout = fr_layout(&groups, &config.layout)?;
    let group_svg = render_svg(&group_layout, &groups, &config.style)?;

    let core = load_graph(&artifact(config, CORE), config.inputs.edge_kind)?;
    let mut accounts = LayoutSource::<f64>::to_layout_graph(&core);
    let ungrouped = grouping.group_count();
    accounts.classes = core.nodes().iter().map(|n| grouping.group_of(n.as_str()).unwrap_or(ungrouped)).collect();
    let account_config = LayoutConfig { iterations: config.account_iterations, ..config.layout };
    let account_layout = fr_layout(&accounts, &account_config)?;
    let account_style = SvgStyle { labels: false, ..config.style.clone() };
    let account_svg = render_svg(&account_layout, &accounts, &account_style)?;

    let (mut gpos, mut apos) = (Vec::new(), Vec::new());
    group_layout.write_csv(&mut gpos)?;
    account_layout.write_csv(&mut apos)?;
    Ok(vec![
        ("group_map.svg", group_svg.into_bytes()),
        ("group_positions.csv", gpos),
        ("account_map.svg", account_svg.into_bytes()),
        ("account_positions.csv", apos),
    ])
}
