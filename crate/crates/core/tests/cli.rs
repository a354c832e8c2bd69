//! End-to-end runs of the `lempertkit` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lempertkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn dist_on_the_axes_matches_the_closed_form() {
    let out = run(&["dist", "--domain", "diamond", "--w", "-0.5,0,0,0", "--z", "0,0,0.3,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let exact = ((0.5f64 + 0.3) / (1.0 + 0.15)).atanh();
    assert!((v["value"].as_f64().unwrap() - exact).abs() < 1e-12);
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["dist", "--domain", "ellipsoid:1.5,3", "--w", "0.2,0,-0.3,0.1", "--z", "-0.4,0.1,0.1,0", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    // outside the domain
    assert_eq!(run(&["dist", "--domain", "diamond", "--w", "0.9,0,0.2,0", "--z", "0,0,0,0"]).status.code(), Some(1));
    // malformed numbers
    assert_eq!(run(&["metric", "--domain", "ball", "--z", "x,0,0,0", "--x", "1,0,0,0"]).status.code(), Some(1));
    // a width target below what the oracle can reach
    let out = run(&[
        "dist", "--domain", "diamond", "--w", "0.2,0.1,0.1,0", "--z", "-0.1,0,0.3,0.2", "--width", "1e-14", "--degree", "2",
        "--restarts", "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    // parameters that parse but leave the diamond
    let bad = r#"{"a":[[0.7,0],[0.5,0]],"alpha":[[0,0],[0,0]],"r":[1,1],"alpha0":[0,0]}"#;
    assert_eq!(run(&["geodesic", "--params", bad]).status.code(), Some(3));
}

#[test]
fn output_file_and_csv() {
    let dir = std::env::temp_dir().join(format!("lempertkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ind.csv");
    let out = run(&[
        "--output",
        path.to_str().unwrap(),
        "indicatrix",
        "--domain",
        "ball",
        "--z",
        "0.1,0,0.2,0",
        "--directions",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("x1_re,x1_im,x2_re,x2_im,radius,flag"));
    assert_eq!(text.lines().count(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn geodesic_from_a_file() {
    let dir = std::env::temp_dir().join(format!("lempertkit-geo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    std::fs::write(&path, r#"{"a":[[0.4,0],[0.6,0]],"alpha":[[0,0],[0,0]],"r":[1,1],"alpha0":[0,0]}"#).unwrap();
    let out = run(&["geodesic", "--params", path.to_str().unwrap(), "--lambda", "0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["evaluations"][0]["point"]["z2"], serde_json::json!([0.3, 0.0]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn small_verify_suite_passes() {
    let out = run(&["verify", "formulas", "--grid", "3", "--directions", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].is_string() && c["tolerance"].is_number()));
}
