use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn wolffkit(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wolffkit"));
    cmd.args(args).env_remove("WOLFFKIT_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn config_arg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn newtonian_potential_row() {
    let o = wolffkit(&["potential", "--config", &config_arg("newtonian.json")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("# wolffkit-report/1 command=potential\n"));
    let row = out.lines().find(|l| l.starts_with("delta-offset,")).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let value: f64 = fields[5].parse().unwrap();
    assert!((value - 2.5).abs() <= 1e-8);
    assert_eq!(fields[6], "converged");
    let at_atom: Vec<&str> = out.lines().filter(|l| l.starts_with("delta-at-atom,")).collect();
    assert_eq!(at_atom.len(), 2);
    assert!(at_atom.iter().all(|l| l.contains(",diverges,")));
}

#[test]
fn criteria_and_energy_configs_pass() {
    for sub in ["criteria", "hedberg-wolff", "oracle"] {
        let cfg = if sub == "oracle" { "newtonian.json" } else { "criteria.json" };
        let o = wolffkit(&[sub, "--config", &config_arg(cfg)], &[]);
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", stdout(&o));
    }
}

#[test]
fn skipped_probe_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    let o = wolffkit(
        &[
            "verify-bounds",
            "--config",
            &config_arg("newtonian.json"),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["warnings"], 1);
    assert_eq!(summary["failed"], 0);
    assert!(out.join("verify-bounds.csv").exists());
}

#[test]
fn malformed_config_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"n\": 3,\n  \"potential\": [ {\"id\": 7} ]\n}\n");
    let o = wolffkit(&["potential", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");

    let cfg = write_config(dir.path(), r#"{"schema": "wolffkit/9"}"#);
    assert_eq!(wolffkit(&["report", "--config", &cfg], &[]).status.code(), Some(2));

    let missing = dir.path().join("absent.json");
    let o = wolffkit(&["report", "--config", missing.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_instance_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 3, "nfunction": {"family": "power", "p": 0.5},
            "potential": [{"id": "a", "measure": {"type": "zero"}, "x0": [[0,0,0]], "R": [1]}]}"#,
    );
    assert_eq!(wolffkit(&["potential", "--config", &cfg], &[]).status.code(), Some(2));
}

#[test]
fn value_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 3, "nfunction": {"family": "power", "p": 2.0},
            "potential": [{"id": "a", "measure": {"type": "atoms", "atoms": [{"x": [0,0,0], "mass": 1}]},
                           "x0": [[0.1,0,0]], "R": [0.2], "value": 2.4}]}"#,
    );
    let o = wolffkit(&["potential", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",fail,"));
}

#[test]
fn unexpected_divergence_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 3, "nfunction": {"family": "power", "p": 2.0},
            "potential": [{"id": "a", "measure": {"type": "atoms", "atoms": [{"x": [0,0,0], "mass": 1}]},
                           "x0": [[0,0,0]], "R": [0.2]}]}"#,
    );
    assert_eq!(wolffkit(&["potential", "--config", &cfg], &[]).status.code(), Some(1));
}

#[test]
fn empty_measure_list_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"schema": "wolffkit/1", "potential": []}"#);
    let o = wolffkit(&["potential", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2, "{out}");
    assert!(out.lines().nth(1).unwrap().starts_with("id,operation,"));
}

#[test]
fn repeated_and_parallel_runs_are_identical() {
    let cfg = config_arg("newtonian.json");
    let a = stdout(&wolffkit(&["report", "--config", &cfg, "--jobs", "1"], &[]));
    let b = stdout(&wolffkit(&["report", "--config", &cfg, "--jobs", "1"], &[]));
    let c = stdout(&wolffkit(&["report", "--config", &cfg, "--jobs", "8"], &[]));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn tolerance_from_environment() {
    let cfg = config_arg("newtonian.json");
    let default = stdout(&wolffkit(&["potential", "--config", &cfg], &[]));
    let loose = wolffkit(&["potential", "--config", &cfg], &[("WOLFFKIT_TOL", "1e-3")]);
    assert_eq!(loose.status.code(), Some(0));
    assert_ne!(default, stdout(&loose));
    let flag = stdout(&wolffkit(&["potential", "--config", &cfg, "--tol", "1e-3"], &[]));
    assert_eq!(flag, stdout(&loose));
    let bad = wolffkit(&["potential", "--config", &cfg], &[("WOLFFKIT_TOL", "-1")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_format() {
    let o = wolffkit(&["hedberg-wolff", "--config", &config_arg("criteria.json"), "--format", "json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "wolffkit-report/1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["id"], "energy-planar-dirac");
    assert_eq!(rows[0]["status"], "converged");
}
