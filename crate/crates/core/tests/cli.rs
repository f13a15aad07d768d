use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specbounds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn inspect_diagonal() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "d.json",
        r#"{"n": 3, "entries": [2, 0, 0, 0, 1, 0, 0, 0, 0]}"#,
    );
    let o = run(&["inspect", &f]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("Thompson               [1, 1]  [4.000000, 5.000000]  actual 5.000000"),
        "{text}"
    );

    let o = run(&["inspect", &f, "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["theorem"] == "Thompson")
        .unwrap();
    assert_eq!(
        (t["lower"].as_f64(), t["upper"].as_f64(), t["actual"].as_f64()),
        (Some(4.0), Some(5.0), Some(5.0))
    );
    assert_eq!(t["window"], serde_json::json!([1, 1]));
    assert!(v["szasz"]["pass"].as_bool().unwrap());
}

#[test]
fn inspect_schur_report() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "a.json",
        r#"{"n": 2, "entries": [[2, 0], [1, 0], [1, 0], [2, 0]]}"#,
    );
    let v: Value = serde_json::from_slice(&run(&["inspect", &f, "--json"]).stdout).unwrap();
    let eig: Vec<f64> = serde_json::from_value(v["schur"]["eigenvalues"].clone()).unwrap();
    assert!((eig[0] - 3.0).abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
    assert_eq!(v["schur"]["diagonal"], serde_json::json!([2.0, 2.0]));
    assert_eq!(v["schur"]["report"]["verdict"], true);
}

#[test]
fn malformed_json_reports_line() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "bad.json",
        "{\n  \"n\": 2,\n  \"entries\": [1, 0 0, 1]\n}\n",
    );
    let o = run(&["inspect", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn non_hermitian_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "u.json", r#"{"n": 2, "entries": [0, 1, 0, 0]}"#);
    let o = run(&["inspect", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Hermitian"));
}

#[test]
fn generate_then_inspect() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let out_s = out.to_str().unwrap();
    let o = run(&[
        "generate",
        "--model",
        "prescribed_spectrum",
        "--n",
        "3",
        "--seed",
        "9",
        "--out",
        out_s,
        "--spectrum",
        "2,1,-1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&run(&["inspect", out_s, "--json"]).stdout).unwrap();
    let spec: Vec<f64> = serde_json::from_value(v["spectrum"].clone()).unwrap();
    for (x, y) in spec.iter().zip([2.0, 1.0, -1.0]) {
        assert!((x - y).abs() < 1e-10);
    }
    let first = fs::read_to_string(&out).unwrap();
    run(&[
        "generate",
        "--model",
        "prescribed_spectrum",
        "--n",
        "3",
        "--seed",
        "9",
        "--out",
        out_s,
        "--spectrum",
        "2,1,-1",
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), first);

    let o = run(&[
        "generate",
        "--model",
        "prescribed_spectrum",
        "--n",
        "3",
        "--out",
        out_s,
        "--spectrum",
        "0,1,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["generate", "--model", "wigner", "--n", "3", "--out", out_s]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn campaign_json_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = [
        "campaign",
        "--seed",
        "3",
        "--trials",
        "40",
        "--nmin",
        "2",
        "--nmax",
        "5",
        "--suites",
        "interlacing,hierarchy,weighted",
    ];
    let o = bin().args(args).args(["--json", a.to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    let o = bin()
        .args(args)
        .args(["--json", b.to_str().unwrap()])
        .env("SPECBOUNDS_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let strip = |p: &Path| {
        let mut v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let (va, vb) = (strip(&a), strip(&b));
    assert_eq!(va, vb);
    assert_eq!(va["schema"], "1");
    assert_eq!(va["all_pass"], true);
    for s in va["suites"].as_array().unwrap() {
        assert_eq!(s["passed"], 40);
    }
}

#[test]
fn campaign_rejects_bad_config() {
    assert_eq!(run(&["campaign", "--suites", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["campaign", "--nmin", "1"]).status.code(), Some(2));
    assert_eq!(run(&["campaign", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["campaign", "--tolerance", "stars"]).status.code(), Some(2));
}

#[test]
fn campaign_tolerance_override_is_recorded() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("r.json");
    let o = run(&[
        "campaign",
        "--trials",
        "5",
        "--suites",
        "stars",
        "--tolerance",
        "stars=1e-6",
        "--json",
        p.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["suites"][0]["tolerance"].as_f64(), Some(1e-6));
}

#[test]
fn secular_with_window() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "p.json", r#"{"poles": [0, 1, 2]}"#);
    let o = run(&["secular", &f, "--window", "1", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let roots: Vec<f64> = serde_json::from_value(v["roots"].clone()).unwrap();
    let r = 1.0 / 3f64.sqrt();
    assert!((roots[0] - 1.0 - r).abs() < 1e-12 && (roots[1] - 1.0 + r).abs() < 1e-12);
    let bounds = v["bounds"].as_array().unwrap();
    assert_eq!(bounds.len(), 2);
    assert!(bounds.iter().all(|b| b["pass"] == true));
    assert_eq!(run(&["secular", &f, "--window", "2", "3"]).status.code(), Some(2));
}
