use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn netmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netmap")).args(args).output().expect("binary runs")
}

fn bundled_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic/netmap.toml")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn dry_run_validates_without_writing() {
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("never");
    let o = netmap(&["run", bundled_config().to_str().unwrap(), "--out", target.to_str().unwrap(), "--dry-run"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("snowball, kcore, cluster, group, metrics, classify, layout"));
    assert!(!target.exists());
}

#[test]
fn invalid_config_exits_one_with_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[inputs]\nedges = \"nope.tsv\"\n[cluster]\nlinkage = \"ward\"\n").unwrap();
    let o = netmap(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    for needle in ["inputs.citations", "inputs.dictionary", "inputs.seeds", "nope.tsv", "cluster.linkage"] {
        assert!(err.contains(needle), "`{needle}` not in:\n{err}");
    }
}

#[test]
fn syntax_error_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[inputs]\nedges = \"a.tsv\"\nseeds = = 3\n").unwrap();
    let o = netmap(&["config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("line 3"), "{}", text(&o.stderr));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(netmap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(netmap(&["run"]).status.code(), Some(1));
    assert_eq!(netmap(&["--help"]).status.code(), Some(0));
}

#[test]
fn stage_failure_exits_two() {
    let out = tempfile::tempdir().unwrap();
    fs::write(out.path().join("sample.tsv"), "only\ttoo\tmany\tfields\n").unwrap();
    let o = netmap(&["kcore", bundled_config().to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
    assert!(text(&o.stderr).contains("stage `kcore` failed"), "{}", text(&o.stderr));
}

#[test]
fn missing_upstream_artifact_exits_one() {
    let out = tempfile::tempdir().unwrap();
    let o = netmap(&["layout", bundled_config().to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("run the `kcore` stage first"), "{}", text(&o.stderr));
}

#[test]
fn single_stages_chain_and_seed_override_is_recorded() {
    let out = tempfile::tempdir().unwrap();
    let cfg = bundled_config();
    let (cfg, dir) = (cfg.to_str().unwrap(), out.path().to_str().unwrap());
    for stage in ["snowball", "kcore"] {
        let o = netmap(&[stage, cfg, "--out", dir, "--seed", "42"]);
        assert_eq!(o.status.code(), Some(0), "{stage}: {}", text(&o.stderr));
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    let stages: Vec<&str> =
        manifest["stages"].as_array().unwrap().iter().map(|s| s["stage"].as_str().unwrap()).collect();
    assert_eq!(stages, ["snowball", "kcore"]);
    assert!(out.path().join("core.tsv").is_file());
}

#[test]
fn config_command_prints_effective_config() {
    let o = netmap(&["config", bundled_config().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = text(&o.stdout);
    assert!(s.contains("target_size = 900") && s.contains("account_iterations = 200"), "{s}");
}
