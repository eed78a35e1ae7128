use std::path::Path;
use std::process::{Command, Output};

const HALF: &str = r#"{"space":"interval","breakpoints":[[0,0],[0.5,0.25],[1,1]]}"#;

fn polyent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyent"))
        .args(args)
        .env("POLYENT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn small_base(extra: &str) -> String {
    format!(
        r#"{{"map":{HALF},"target":"base","n_list":[8,16,32,64,128],"eps_list":[0.2,0.1],"resolution":0.01{extra}}}"#
    )
}

#[test]
fn validate_reports_fixed_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_base(""));
    let out = polyent(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fixed points [0.0, 1.0]"), "{text}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{"map":{HALF},"n_list":[4,8,8]}}"#));
    let out = polyent(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_list[2]"));

    let bad_map = r#"{"map":{"space":"interval","breakpoints":[[0,0],[0.5,0.7],[0.6,0.6],[1,1]]}}"#;
    let cfg = write_config(dir.path(), bad_map);
    let out = polyent(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("breakpoint 2"));

    let out = polyent(&["entropy"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_base(r#","output":{"words":"words.txt"}"#));
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = polyent(&["entropy", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ra = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap());
    let counts = std::fs::read_to_string(a.join("counts.csv")).unwrap();
    assert!(counts.starts_with("target,method,eps,n,count,cloud_size,saturated\n"));
    assert!(counts.contains("f,coding,0,8,9,"));
    let words = std::fs::read_to_string(a.join("words.txt")).unwrap();
    assert!(words.starts_with("# f n=8 words=9\n"));
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_flag_changes_the_provenance_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_base(""));
    let out_dir = dir.path().join("s");
    let out = polyent(&[
        "coding",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["provenance"]["seed"], 7);
    // coding only
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
    assert_eq!(report["rows"][0]["method"], "coding");
}

#[test]
fn missed_bands_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &small_base(r#","method":"separated","tolerances":{"slope_one":0.0}"#),
    );
    let out = polyent(&["entropy", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn singular_queries() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
        "map": {"space":"circle","breakpoints":[[0,0],[0.5,0.7],[1,1]]},
        "singular": {
            "u1": {"kind":"ball","center":"A:0:0.3","radius":0.05},
            "u2": {"kind":"ball","center":"A:0.7:0","radius":0.05},
            "m": 50, "horizon": 120, "expect": "mutually-singular"
        }
    }"#;
    let cfg = write_config(dir.path(), body);
    let out = polyent(&["singular", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"]["verdict"], "mutually-singular");

    let cfg = write_config(dir.path(), &body.replace("\"horizon\": 120", "\"horizon\": 30"));
    let out = polyent(&["singular", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn theorem_harnesses_check_the_space() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_base(""));
    let out = polyent(&["theorem-b", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("circle maps"));
}
