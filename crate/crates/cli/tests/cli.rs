use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siot-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small(out: &Path) -> Vec<String> {
    [
        "--population", "40", "--days", "2", "--runs", "3", "--seed", "42", "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([out.display().to_string()])
    .collect()
}

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let mut args = small(out);
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    sim(&refs)
}

#[test]
fn batch_writes_csv_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(
        dir.path(),
        &["--network", "small-world", "--beta", "0.2", "--strategy", "cooperative", "--mobility", "profile"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["batch.csv", "summary.json", "manifest.toml", "runs/run_000.csv", "runs/run_002.csv"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let batch = fs::read_to_string(dir.path().join("batch.csv")).unwrap();
    assert_eq!(batch.lines().count(), 3);
    let manifest = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("population = 40"));
    assert!(manifest.contains("strategy = \"cooperative\""));
    assert!(manifest.contains("beta = 0.2"));
}

#[test]
fn zero_runs_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["--runs", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("runs"));
}

#[test]
fn invalid_config_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["--population", "0", "--k", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("population") && err.contains("k"), "{err}");
}

#[test]
fn beta_on_mesh_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(dir.path(), &["--network", "mesh", "--beta", "0.2", "--runs", "1"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning: beta ignored for mesh network"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = sim(&["--config", "/nonexistent/siot.toml"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cfg.toml");
    fs::write(
        &file,
        "seed = 5\n[world]\npopulation = 30\nhorizon_days = 1\n[social]\nk = 0.25\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = sim(&[
        "--config", file.to_str().unwrap(), "--population", "20", "--runs", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("population = 20"));
    assert!(manifest.contains("k = 0.25"));
    assert!(manifest.contains("seed = 5"));
    assert!(manifest.contains("horizon_days = 1"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_small(a.path(), &["--workers", "1"]).status.success());
    assert!(run_small(b.path(), &["--workers", "3"]).status.success());
    for f in ["batch.csv", "summary.json", "manifest.toml", "runs/run_001.csv", "social_run0.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn matrix_subset_has_nine_cells_and_a_valid_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = sim(&["--cases", "5,17,29", "--runs", "2", "--days", "1", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let index: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("index.json")).unwrap()).unwrap();
    let cells = index["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 9);
    assert!(index["failures"].as_array().unwrap().is_empty());
    for cell in cells {
        assert!(dir.path().join(cell["dir"].as_str().unwrap()).is_dir());
        for f in cell["files"].as_array().unwrap() {
            assert!(dir.path().join(f.as_str().unwrap()).is_file(), "{f}");
        }
    }
    assert!(dir.path().join("case17_random/batch.csv").is_file());
}

#[test]
fn unknown_case_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["--cases", "5,40", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn print_matrix_lists_the_scenario_table() {
    let o = sim(&["--print-matrix"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 36);
    assert_eq!(lines[0], "Case 1 & Competitive & 100 & Mesh");
    assert_eq!(lines[7], "Case 8 & Competitive & 250 & small world (beta = 0.2)");
    assert_eq!(lines[29], "Case 30 & Cooperative-R & 250 & Regular");
}

#[test]
fn snapshot_and_positions_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(
        dir.path(),
        &["--runs", "1", "--days", "1", "--snapshot-at", "720", "--positions-trace", "--mobility", "random"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let snap = fs::read_to_string(dir.path().join("snapshot_720.csv")).unwrap();
    let mut lines = snap.lines();
    assert_eq!(lines.next(), Some("iteration,peer_id,status,x,y"));
    assert_eq!(lines.count(), 40);
    let trace = fs::read_to_string(dir.path().join("positions.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 40 * 1441);
}

#[test]
fn snapshot_past_horizon_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(dir.path(), &["--days", "1", "--snapshot-at", "5000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_feeds_back_as_config() {
    let first = tempfile::tempdir().unwrap();
    assert!(run_small(first.path(), &["--strategy", "cooperative-restricted", "--k", "0.75"]).status.success());
    let manifest = first.path().join("manifest.toml");
    let second = tempfile::tempdir().unwrap();
    let o = sim(&[
        "--config", manifest.to_str().unwrap(), "--runs", "3", "--out", second.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["manifest.toml", "batch.csv"] {
        assert_eq!(fs::read(first.path().join(f)).unwrap(), fs::read(second.path().join(f)).unwrap());
    }
}
