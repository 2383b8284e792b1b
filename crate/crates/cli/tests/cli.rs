use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SURFACE: &str = r#"
[surface]
genus = 2
decomposition = "theta"
lengths = [2.0, 2.0, 2.0]
twists = [0.0, 0.0, 0.0]

[multicurve]
weights = [1.0, 1.0, 1.0]
"#;

fn grafting(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grafting"));
    cmd.args(args).env_remove("GRAFTING_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("GRAFTING_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn malformed_config_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.toml", "[experiment\nname = 3");
    let out = grafting(&["run", &bad], None);
    assert_eq!(out.status.code(), Some(2));
    let missing = tmp.path().join("none.toml");
    assert_eq!(grafting(&["validate", missing.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn area_run_passes_with_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "area.toml", &format!("{SURFACE}\n[experiment]\nname = \"area\"\nsamples = 200000\n"));
    assert_eq!(grafting(&["validate", &cfg], None).status.code(), Some(0));
    let out_dir = tmp.path().join("out");
    let out = grafting(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("area.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("config,genus,hyperbolicArea"));
}

#[test]
fn environment_supplies_the_default_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "[experiment]\nname = \"cantor\"\ndepths = [4, 6]\n");
    let env_dir = tmp.path().join("from-env");
    assert_eq!(grafting(&["run", &cfg], Some(&env_dir)).status.code(), Some(0));
    assert!(env_dir.join("cantor.csv").exists());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "rate.toml",
        &format!("{SURFACE}\n[experiment]\nname = \"deflate-rate\"\nn-pairs = 40\nnet-step = 0.05\nts = [1.0, 0.5]\n"),
    );
    let run = |dir: &str, jobs: &str| {
        let d = tmp.path().join(dir);
        let out = grafting(&["run", &cfg, "--seed", "11", "--jobs", jobs, "--out-dir", d.to_str().unwrap()], None);
        assert!(matches!(out.status.code(), Some(0) | Some(1)));
        fs::read(d.join("deflate-rate.csv")).unwrap()
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 3);
}

#[test]
fn slimness_contract_failure_exits_with_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "s.toml", &format!("{SURFACE}\n[experiment]\nname = \"slimness\"\nts = [1.0, 0.5]\n"));
    let out_dir = tmp.path().join("out");
    let out = grafting(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out_dir.join("slimness.csv").exists());
}

#[test]
fn node_cap_exceeded_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cap.toml",
        &format!("{SURFACE}\n[experiment]\nname = \"degraft\"\nn-pairs = 5\nnode-cap = 10\n"),
    );
    let out_dir = tmp.path().join("out");
    assert_eq!(grafting(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap()], None).status.code(), Some(3));
}

#[test]
fn export_flat_writes_the_surface_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "f.toml", &format!("{SURFACE}\n[experiment]\nname = \"area\"\n"));
    let out = tmp.path().join("flat.txt");
    assert_eq!(grafting(&["export-flat", &cfg, out.to_str().unwrap()], None).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("cylinder ")).count(), 3);
    assert!(text.lines().any(|l| l.starts_with("arc ")));

    let partial = write_config(
        tmp.path(),
        "p.toml",
        &format!("{SURFACE}\n[experiment]\nname = \"area\"\n").replace("[1.0, 1.0, 1.0]", "[1.0, 0.0, 1.0]"),
    );
    assert_eq!(grafting(&["export-flat", &partial, out.to_str().unwrap()], None).status.code(), Some(2));
}
