use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMOKE: &str = r#"{
    "algorithm": "mono_fw",
    "horizon": 1024,
    "constraint": {"family": "box", "upper": [1, 1, 1, 1]},
    "objective": {"kind": "quadratic", "noise": 0.5},
    "adversary": {"schedule": "iid"},
    "seed": 1
}"#;

fn submax(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_submax"));
    cmd.args(args).env_remove("SUBMAX_OUT");
    if let Some(dir) = env_out {
        cmd.env("SUBMAX_OUT", dir);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_three_files_and_replays_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.json", SMOKE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = submax(&["run", &cfg, "--out-dir", dir.to_str().unwrap()], None);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for ext in ["csv", "summary.json", "svg"] {
        assert!(a.join(format!("mono_fw_T1024_s1.{ext}")).exists());
    }
    let csv = |d: &Path| fs::read(d.join("mono_fw_T1024_s1.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
    let header = String::from_utf8(csv(&a)).unwrap();
    assert!(header.starts_with("t,block,phase,reward,cum_reward,feasible\n"));

    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("mono_fw_T1024_s1.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["queries"], summary["t_effective"]);
    assert!(summary["generator"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn seed_flag_and_env_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.json", SMOKE);
    let out = submax(&["--quiet", "run", &cfg, "--seed", "9"], Some(tmp.path()));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(tmp.path().join("mono_fw_T1024_s9.csv").exists());
}

#[test]
fn several_configs_get_a_combined_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let first = write_config(tmp.path(), "a.json", SMOKE);
    let second = write_config(tmp.path(), "b.json", &SMOKE.replace("1024", "2048"));
    let out = submax(&["run", &first, &second, "--out-dir", tmp.path().to_str().unwrap()], None);
    assert!(out.status.success());
    let svg = fs::read_to_string(tmp.path().join("combined.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let slopes = fs::read_to_string(tmp.path().join("combined_slopes.csv")).unwrap();
    assert_eq!(slopes.lines().count(), 3);
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", r#"{"algorithm": "mono_fw"}"#);
    let out = submax(&["run", &cfg], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");

    let missing = submax(&["bench", "/nonexistent/config.json"], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn oversized_delta_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let body =
        SMOKE.replace("mono_fw", "bandit_fw").replace("\"seed\": 1", "\"seed\": 1, \"overrides\": {\"delta\": 0.9}");
    let cfg = write_config(tmp.path(), "delta.json", &body);
    let out = submax(&["run", &cfg], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("delta too large for set"));
}

#[test]
fn bench_demo_and_listing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "smoke.json", SMOKE);
    let out = submax(&["bench", &cfg], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mode"], "concave_qp");

    let demo = submax(&["demo-impossibility"], None);
    assert!(demo.status.success());
    let report: serde_json::Value = serde_json::from_slice(&demo.stdout).unwrap();
    assert_eq!(report["samples"].as_array().unwrap().len(), 100);

    let list = submax(&["list-families"], None);
    let v: serde_json::Value = serde_json::from_slice(&list.stdout).unwrap();
    assert!(v["constraints"]["partition_matroid"].is_object());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        submax::ExperimentConfig::from_path(&path).unwrap();
    }
}
