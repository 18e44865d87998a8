use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn liebconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liebconc"))
        .args(args)
        .env_remove("LIEBCONC_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema_validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/suite_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn strip_timestamp(mut v: Value) -> Value {
    v["meta"]["timestamp"] = Value::Null;
    v
}

#[test]
fn forms_eval_examples() {
    let out = liebconc(&[
        "forms",
        "eval",
        "--form",
        r#"{"kind":"KTrace","k":2}"#,
        "--vector",
        "1,2,3",
    ]);
    assert_eq!(code(&out), 0);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 11f64.sqrt()).abs() < 1e-12);
    assert!((v - 3.316625).abs() < 5e-7);

    let out = liebconc(&[
        "forms",
        "eval",
        "--form",
        r#"{"kind":"Trace"}"#,
        "--vector",
        "1,2,3",
    ]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "6"));

    let out = liebconc(&[
        "forms",
        "eval",
        "--form",
        r#"{"kind":"KTrace""#,
        "--vector",
        "1,2,3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let out = liebconc(&[
        "forms",
        "eval",
        "--form",
        r#"{"kind":"SemiPNorm","p":0.5}"#,
        "--vector",
        "-1,2",
    ]);
    assert_eq!(code(&out), 3);

    let out = liebconc(&[
        "forms",
        "eval",
        "--form",
        r#"{"kind":"SmallestK","k":1}"#,
        "--matrix",
        r#"{"rows":2,"cols":2,"re":[2,1,1,2]}"#,
    ]);
    assert_eq!(code(&out), 0);
    assert!((stdout(&out).trim().parse::<f64>().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn major_examples() {
    let out = liebconc(&["major", "check", "--a", "1,2,3", "--b", "0,2,4"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "strong"));
    let out = liebconc(&["major", "check", "--a", "4,0,0", "--b", "3,1,1"]);
    assert_eq!((code(&out), stdout(&out).trim()), (1, "none"));
    let out = liebconc(&["major", "check", "--a", "1,1", "--b", "3,0"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "weak"));
    let out = liebconc(&["major", "check", "--a", "1,2", "--b", "1,2,3"]);
    assert_eq!(code(&out), 2);

    let out = liebconc(&["major", "certify", "--a", "2,2", "--b", "3,1"]);
    assert_eq!(code(&out), 0);
    let cert: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let transforms = cert["transforms"].as_array().unwrap();
    assert_eq!(transforms.len(), 1);
    assert_eq!(transforms[0]["t"], 0.5);
    let out = liebconc(&["major", "certify", "--a", "1,1", "--b", "3,0"]);
    assert_eq!(code(&out), 1);

    let out = liebconc(&["major", "bridge", "--a", "1,1,0", "--b", "3,0,0"]);
    assert_eq!(code(&out), 0);
    let c: Vec<f64> = stdout(&out)
        .trim()
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(c.iter().sum::<f64>(), 3.0);
    let out = liebconc(&["major", "bridge", "--a", "4,0,0", "--b", "3,1,1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn certify_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = liebconc(&[
        "major",
        "certify",
        "--a",
        "2,2,2",
        "--b",
        "4,1,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let cert = liebconc::io::parse_certificate(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(cert.residual().unwrap() < 1e-12);
}

fn field(text: &str, name: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.starts_with(&format!("{name}:")))
        .unwrap();
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn variational_examples() {
    let out = liebconc(&["variational", "f00", "--a-diag", "1,2,3", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(field(&text, "exact"), 3.0);
    assert!((field(&text, "minimizer") - 3.0).abs() < 1e-12);
    assert!(field(&text, "gap") >= -1e-8);
    assert!(text.contains("seed: 42"));

    let out = liebconc(&[
        "variational",
        "fni0",
        "--a-diag",
        "0,0.6931471805599453",
        "--k",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let objectives: Vec<f64> = stdout(&out)
        .lines()
        .filter(|l| l.starts_with("delta:"))
        .map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(objectives.len(), 5);
    assert!(objectives.windows(2).all(|w| w[1] < w[0]));
    assert!((objectives[4] - 1.0).abs() < 1e-8);

    let out = liebconc(&["variational", "f00", "--a-diag", "1,2,3", "--k", "4"]);
    assert_eq!(code(&out), 2);
    let out = liebconc(&[
        "variational",
        "f00",
        "--a-diag",
        "1,2",
        "--m",
        r#"{"rows":2,"cols":2,"re":[1,1,1,1]}"#,
        "--k",
        "1",
        "--trials",
        "5",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("lifted[1]"));
}

#[test]
fn unknown_flags_and_bad_config_exit_2() {
    assert_eq!(
        code(&liebconc(&["suite", "run", "--map", "lieb", "--bogus"])),
        2
    );
    assert_eq!(code(&liebconc(&["suite", "run", "--map", "nope"])), 2);
    assert_eq!(
        code(&liebconc(&[
            "suite",
            "run",
            "--map",
            "lieb",
            "--tolerance",
            "-1"
        ])),
        2
    );
    assert_eq!(
        code(&liebconc(&[
            "suite", "run", "--map", "lieb", "--dims", "5,2"
        ])),
        2
    );
    assert_eq!(code(&liebconc(&["suite", "run"])), 2);
    let forms = r#"[{"fixed":{"kind":"LargestK","k":1}}]"#;
    assert_eq!(
        code(&liebconc(&[
            "suite", "run", "--map", "lieb", "--forms", forms
        ])),
        2
    );
}

#[test]
fn suite_reports_are_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let validator = schema_validator();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = liebconc(&[
            "suite",
            "run",
            "--map",
            "lieb",
            "--trials",
            "60",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(validator.is_valid(&report));
        assert!(report["meta"]["timestamp"].is_string());
        assert_eq!(report["meta"]["seed"], 7);
        reports.push(strip_timestamp(report));
    }
    assert_eq!(
        serde_json::to_string(&reports[0]).unwrap(),
        serde_json::to_string(&reports[1]).unwrap()
    );

    let a = liebconc(&[
        "suite",
        "run",
        "--map",
        "explog",
        "--trials",
        "20",
        "--no-timestamp",
    ]);
    let b = liebconc(&[
        "suite",
        "run",
        "--map",
        "explog",
        "--trials",
        "20",
        "--no-timestamp",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let other = liebconc(&[
        "suite",
        "run",
        "--map",
        "explog",
        "--trials",
        "20",
        "--no-timestamp",
        "--seed",
        "8",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn seed_env_override() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_liebconc"));
        cmd.args([
            "suite",
            "run",
            "--map",
            "classic",
            "--trials",
            "5",
            "--no-timestamp",
        ]);
        match env {
            Some(v) => cmd.env("LIEBCONC_SEED", v),
            None => cmd.env_remove("LIEBCONC_SEED"),
        };
        let out = cmd.output().unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["meta"]["seed"].clone()
    };
    assert_eq!(run(None), 42);
    assert_eq!(run(Some("99")), 99);
}

#[test]
fn negative_control_is_expected_failure() {
    let out = liebconc(&[
        "suite",
        "run",
        "--map",
        "lieb",
        "--trials",
        "10",
        "--negative-control",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema_validator().is_valid(&report));
    let nc = &report["negative_control"];
    assert!(nc["violations"].as_u64().unwrap() > 0);
    assert!(nc["first_violation"]["inputs"]["x"]["pair"]["a"]["re"].is_array());
}

#[test]
fn zero_trials_and_csv() {
    let out = liebconc(&["suite", "run", "--map", "lieb", "--trials", "0"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema_validator().is_valid(&report));

    let out = liebconc(&[
        "suite", "run", "--map", "classic", "--trials", "4", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_id,map,form,n,m,p,q,s,tau,deficit,scale,pass"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"map":"lieb","trials":3,"seed":5,"forms":[{"fixed":{"kind":"Trace"}}],"n_range":[2,3]}"#,
    )
    .unwrap();
    let out = liebconc(&[
        "suite",
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "4",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["meta"]["trials"], 4);
    assert_eq!(report["meta"]["seed"], 5);
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);
}
