use std::path::Path;
use std::process::{Command, Output};

fn eipsim(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eipsim"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("EIPSIM_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SIM: &str = r#"{"seed": 5, "trials": 3000, "protocol": {"name": "lambda", "lambda": 2},
  "ensemble": {"kind": "rank3", "fidelity": [0.9, 0.95]}, "n": [6, 10]}"#;

#[test]
fn simulate_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sim.json", SIM);
    let one = eipsim(&["simulate", "--config", &cfg], Some("1"));
    let four = eipsim(&["simulate", "--config", &cfg], Some("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("point,protocol,n,fidelity,trials,yield,"));
    let other = eipsim(&["simulate", "--config", &cfg, "--seed", "6"], None);
    assert_ne!(other.stdout, text.as_bytes());
}

#[test]
fn zero_trials_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sim.json", SIM);
    let out = eipsim(&["simulate", "--config", &cfg, "--trials", "0"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
    let json = eipsim(&["simulate", "--config", &cfg, "--trials", "0", "--format", "json"], None);
    assert!(json.status.success() && json.stdout.is_empty());
}

#[test]
fn json_rows_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sim.json", SIM);
    let out = dir.path().join("rows.jsonl");
    let r = eipsim(
        &["simulate", "--config", &cfg, "--trials", "200", "--format", "json", "--out", out.to_str().unwrap()],
        None,
    );
    assert!(r.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["trials"], 200);
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"trials": 10, "ensemble": {"kind": "rank3", "fidelity": 0.9}, "n": 4}"#,
        r#"{"seed": 1, "ensemble": {"kind": "rank3", "fidelity": 0.9}, "n": 4, "bogus": 1}"#,
        r#"{"seed": 1, "ensemble": {"kind": "rank3", "fidelity": 1.5}, "n": 4}"#,
        r#"{"seed": 1, "ensemble": {"kind": "rank3", "fidelity": []}, "n": 4}"#,
        "not json",
    ];
    for (i, body) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("c{i}.json"), body);
        let out = eipsim(&["simulate", "--config", &cfg, "--trials", "10"], None);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(!out.stderr.is_empty());
    }
    let out = eipsim(&["simulate"], None);
    assert_eq!(out.status.code(), Some(2));
    let bad = eipsim(&["verify"], Some("zero"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn field_path_in_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"seed": 1, "ensemble": {"kind": "rank9", "fidelity": 0.9}, "n": 4}"#,
    );
    let out = eipsim(&["simulate", "--config", &cfg], None);
    assert!(String::from_utf8(out.stderr).unwrap().contains("ensemble.kind"));
}

#[test]
fn analyze_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.json", r#"{"curve": "two_alt", "n": 8}"#);
    let out = eipsim(&["analyze", "--config", &cfg], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "8");
    assert!((row[1].parse::<f64>().unwrap() - 0.159).abs() < 1e-3);

    let cfg = write(dir.path(), "b.json", r#"{"curve": "fidelity_bounds", "n": 16, "fidelity": {"from": 0, "to": 1, "step": 0.25}}"#);
    let out = eipsim(&["analyze", "--config", &cfg], None);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 6);

    let cfg = write(dir.path(), "c.json", r#"{"curve": "damp", "n": [8, 16], "fidelity": 0.95}"#);
    let out = eipsim(&["analyze", "--config", &cfg], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));

    let cfg = write(dir.path(), "d.json", r#"{"curve": "damp", "fidelity": 0.95}"#);
    assert_eq!(eipsim(&["analyze", "--config", &cfg], None).status.code(), Some(2));
}

#[test]
fn compare_lists_references() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"seed": 2, "trials": 500, "protocols": [{"name": "aeip3"}],
            "ensemble": {"kind": "rank3", "fidelity": 0.95}, "n": 16, "recurrence_rounds": 2}"#,
    );
    let out = eipsim(&["compare", "--config", &cfg], None);
    assert!(out.status.success());
    let methods: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(methods, ["lambda2", "aeip3", "hashing", "recurrence1", "recurrence2"]);
}

#[test]
fn verify_passes_and_tolerance_tightens() {
    let out = eipsim(&["verify"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    let strict = eipsim(&["verify", "--tolerance", "0"], None);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8(strict.stderr).unwrap().contains("deviation"));
}
