//! Binary-level behavior: exit codes, output files, determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn displace() -> Command {
    Command::new(env!("CARGO_BIN_EXE_displace"))
}

fn reduced_fig1(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("fig1_small.toml");
    fs::write(
        &path,
        "particles = 16\nruns = 2\niters = 300\nreference_iters = 600\nlog_every = 50\n",
    )
    .unwrap();
    path
}

#[test]
fn malformed_toml_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "particles = [not toml").unwrap();
    let status = displace().args(["fig1", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("unknown.toml");
    fs::write(&cfg, "seed = 1\nwhatever = 3\n").unwrap();
    let status = displace().args(["verify", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("invalid.toml");
    fs::write(&cfg, "iters = 0\n").unwrap();
    let status = displace().args(["fig1", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let status = displace().args(["fig1", "--frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn reduced_fig1_writes_stamped_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reduced_fig1(dir.path());
    let out = dir.path().join("out");
    let status = displace()
        .args(["fig1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let csv = fs::read_to_string(out.join("fig1.csv")).unwrap();
    let mut lines = csv.lines();
    let stamp = lines.next().unwrap();
    assert!(stamp.starts_with("# config "));
    let hash = stamp.trim_start_matches("# config ");
    assert_eq!(hash.len(), 16);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(lines.next().unwrap(), "k,mean_suboptimality");
    assert!(lines.count() >= 2);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fig1_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config_hash"].as_str().unwrap(), hash);
    assert!(summary["reference_value"].is_number());
}

#[test]
fn same_config_reproduces_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reduced_fig1(dir.path());
    for name in ["a", "b"] {
        let status = displace()
            .args(["fig1", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("a/fig1.csv")).unwrap();
    let b = fs::read(dir.path().join("b/fig1.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_override_changes_results_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reduced_fig1(dir.path());
    for (name, seed) in [("s0", "0"), ("s1", "1")] {
        let status = displace()
            .args(["fig1", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read_to_string(dir.path().join("s0/fig1.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("s1/fig1.csv")).unwrap();
    assert_ne!(a, b);
    assert_ne!(a.lines().next().unwrap(), b.lines().next().unwrap());
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = displace()
        .args(["verify", "--seed", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.lines().filter(|l| l.starts_with("PASS ")).count() >= 20);
    assert!(!stdout.contains("\nFAIL "));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 3);
    assert!(report["outcomes"].as_array().unwrap().len() >= 20);
}
