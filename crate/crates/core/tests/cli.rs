use std::path::PathBuf;

use serde_json::Value;
use teichcalc::cli::{run, Outcome, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_OK};

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn call(args: &[&str]) -> Outcome {
    run(std::iter::once("teichcalc").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    assert_eq!(o.code, EXIT_OK, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_torus_rows() {
    let v = json(&call(&["verify-thm1"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let t = r["t"].as_f64().unwrap();
        let gap = r["gap"].as_f64().unwrap();
        assert!((gap - (-4.0 * t).exp()).abs() < 1e-12);
        assert!(r["lhs"].as_f64().unwrap() >= r["rhs"].as_f64().unwrap());
    }
}

#[test]
fn verify_origami_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = write(&dir, "o.json", r#"{"n":3,"h":[2,3,1],"v":[1,3,2]}"#);
    let v = json(&call(&["verify-thm1", "--origami", s(&o), "--foliation", "1,0,1", "--t", "0,3"]));
    assert_eq!(v["rows"][1]["rhs"].as_f64().unwrap(), 3.0);
    assert!(v["relative_width_at_max_t"].as_f64().unwrap() < 0.05);
}

#[test]
fn bad_json_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", "{coeffs: [1]");
    let good = write(&dir, "good.json", r#"{"coeffs":[1],"areas":[1]}"#);
    let o = call(&["detour", s(&bad), s(&good)]);
    assert_eq!(o.code, EXIT_INPUT);
    let e: Value = serde_json::from_str(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "input");
    assert_eq!(call(&["no-such-command"]).code, EXIT_INPUT);
}

#[test]
fn detour_examples() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.json", r#"{"coeffs":[1,1],"areas":[1,1]}"#);
    let a3 = write(&dir, "a3.json", r#"{"coeffs":[3,3],"areas":[1,1]}"#);
    let b = write(&dir, "b.json", r#"{"coeffs":[1,2],"areas":[1,1]}"#);
    let only1 = write(&dir, "c.json", r#"{"coeffs":[1,0],"areas":[1,1]}"#);
    let only2 = write(&dir, "d.json", r#"{"coeffs":[0,1],"areas":[1,1]}"#);

    let v = json(&call(&["detour", s(&a), s(&a3)]));
    assert_eq!(v["metric"].as_f64().unwrap(), 0.0);
    assert_eq!(v["part"], true);

    let v = json(&call(&["detour", s(&a), s(&b)]));
    assert!((v["metric"].as_f64().unwrap() - 0.5 * 2f64.ln()).abs() < 1e-12);

    let v = json(&call(&["detour", s(&only1), s(&only2)]));
    assert_eq!(v["metric"], serde_json::json!({"inf": true}));
    assert_eq!(v["part"], false);

    let v = json(&call(&["part-check", s(&a), s(&a3)]));
    assert_eq!(v["modular_equivalent"], true);
}

#[test]
fn modular_solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(&dir, "one.json", r#"{"coeffs":[1],"areas":[1]}"#);
    let v = json(&call(&["modular-solve", "--record", s(&one), "--matrix", "2"]));
    assert_eq!(v["lambda_star"], serde_json::json!([1.0]));

    let two = write(&dir, "two.json", r#"{"coeffs":[1,1],"areas":[1,1]}"#);
    let v = json(&call(&["modular-solve", "--record", s(&two), "--matrix", "1,1;1,2", "--random-start", "--seed", "9"]));
    let l = v["lambda_star"].as_array().unwrap();
    assert!((l[1].as_f64().unwrap() / l[0].as_f64().unwrap() - 1.618_033_988_749_895).abs() < 1e-9);

    let o = call(&["modular-solve", "--record", s(&two), "--matrix", "1,1;1,2", "--max-iterations", "2"]);
    assert_eq!(o.code, EXIT_NONCONVERGENCE);
    let e: Value = serde_json::from_str(&o.stderr).unwrap();
    assert!(!e["error"]["residuals"].as_array().unwrap().is_empty());
}

#[test]
fn manifest_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.json", r#"{"coeffs":[1,1],"areas":[1,2]}"#);
    let m = dir.path().join("m.json");
    let args = ["eq-eval", "--record", s(&a), "--foliation", "1,0", "--manifest", m.to_str().unwrap()];
    let first = call(&args);
    let second = call(&args);
    assert_eq!(first, second);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(manifest["command"], "eq-eval");
    use sha2::Digest;
    let digest = hex::encode(sha2::Sha256::digest(std::fs::read(&a).unwrap()));
    assert_eq!(manifest["inputs"][0]["sha256"], digest.as_str());
}

#[test]
fn busemann_and_iet_and_straighten() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(
        &dir,
        "seq.json",
        r#"{"records":[{"coeffs":[1],"areas":[1]}],
            "record_limit":{"coeffs":[1,1],"areas":[1,1]},
            "tracks":[{"kind":"decomposable","coeffs":[1,1]}]}"#,
    );
    let v = json(&call(&["busemann-check", s(&seq)]));
    assert_eq!(v["converges"], false);
    assert_eq!(v["failed"], "decomposable-track");

    let v = json(&call(&["iet", "--lengths", "0.3,0.7", "--perm", "1,0", "--steps", "2"]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);

    let o = write(&dir, "o.json", r#"{"n":1,"h":[1],"v":[1]}"#);
    let v = json(&call(&["iet", "--origami", s(&o), "--golden", "40"]));
    assert_eq!(v["return_area"].as_f64().unwrap(), 1.0);

    let c = write(&dir, "c.json", r#"{"chords":[{"rect":0,"p":[0,0],"q":[1,1]}]}"#);
    let v = json(&call(&["straighten", s(&c)]));
    assert_eq!(v["holonomy_after"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn csv_outputs() {
    let o = call(&["--csv", "extlen", "--t", "0,1"]);
    assert_eq!(o.code, EXIT_OK);
    let mut lines = o.stdout.lines();
    assert_eq!(lines.next(), Some("t,lower,upper,converged"));
    assert_eq!(lines.count(), 2);
}
