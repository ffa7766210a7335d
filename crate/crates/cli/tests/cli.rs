use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn renorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renorm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = renorm(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report-v1.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(doc: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn solve_both_periods() {
    let d3 = json(&["solve", "--period", "3"]);
    let c3 = d3["result"]["c_star"].as_f64().unwrap();
    assert!((c3 - 0.440262).abs() < 1e-5);
    assert!(d3["result"]["identity"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert_valid(&d3);
    let d5 = json(&["solve", "--period", "5"]);
    assert!((d5["result"]["c_star"].as_f64().unwrap() - 0.387226).abs() < 1e-5);
    assert_valid(&d5);
    let loose = json(&["solve", "--period", "3", "--tol", "1e-6"]);
    let cl = loose["result"]["c_star"].as_f64().unwrap();
    assert_eq!(format!("{cl:.6}"), format!("{c3:.6}"));
}

#[test]
fn solve_perturbed() {
    let d = json(&["solve", "--eps", "0.98"]);
    assert!((d["result"]["c_star"].as_f64().unwrap() - 0.44045612).abs() < 1e-7);
    assert_valid(&d);
}

#[test]
fn feasible_rows() {
    let expected = [[0.398039, 0.430159], [0.430159, 0.456310]];
    for step in ["1e-4", "1e-2"] {
        let o = renorm(&["feasible", "--period", "3", "--step", step, "--format", "csv"]);
        assert!(o.status.success());
        let rows = csv_rows(&stdout(&o));
        assert_eq!(rows[0], ["lo", "hi", "binding_condition"]);
        assert_eq!(rows.len(), 3);
        for (row, e) in rows[1..].iter().zip(expected) {
            assert!((row[0].parse::<f64>().unwrap() - e[0]).abs() < 1e-5);
            assert!((row[1].parse::<f64>().unwrap() - e[1]).abs() < 1e-5);
        }
    }
    let o = renorm(&["feasible", "--period", "5", "--format", "csv"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!((rows[1][0].parse::<f64>().unwrap() - 0.379765).abs() < 1e-5);
    assert!((rows[2][1].parse::<f64>().unwrap() - 0.390436).abs() < 1e-5);
    assert_valid(&json(&["feasible", "--period", "5"]));
}

#[test]
fn plot_scaling_grid() {
    let o = renorm(&["plotdata", "scaling", "--period", "3", "--grid", "2000"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["c", "S1", "S2", "S3", "sum"]);
    assert_eq!(rows.len(), 2001);
    for r in &rows[1..] {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[1] + v[2] + v[3] - v[4]).abs() < 1e-14);
    }
}

#[test]
fn plot_return_map_single_crossing() {
    let d = json(&["plotdata", "returnmap", "--period", "3", "--grid", "400", "--format", "json"]);
    assert_valid(&d);
    let s = d["result"]["summary"].as_array().unwrap();
    assert_eq!(s[0]["diagonal_crossings"], 0);
    assert_eq!(s[1]["diagonal_crossings"], 1);
}

#[test]
fn plot_cobweb_follows_orbit() {
    let o = renorm(&["plotdata", "cobweb", "--period", "3"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1 + 7);
    let pts: Vec<(f64, f64)> = rows[1..].iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert_eq!(pts[0], (0.0, 0.0));
    // alternating vertical and horizontal segments
    for w in pts.windows(2) {
        assert!(w[0].0 == w[1].0 || w[0].1 == w[1].1);
    }
    // u^3(0) lands back in I_1 = [0, s_1], so the cycle closes combinatorially
    let last = pts[6];
    assert!(last.0 > 0.0 && last.0 < 0.04);
}

#[test]
fn plot_other_kinds() {
    let o = renorm(&["plotdata", "tower", "--depth", "3"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 1 + 9);
    let o = renorm(&["plotdata", "extension", "--depth", "4"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["x", "y", "deficit", "slope", "level", "tip"]);
    assert!(rows.len() > 4 * 4 * 60);
}

#[test]
fn tower_and_extend_reports() {
    let t = json(&["tower", "--period", "5", "--depth", "6"]);
    assert_valid(&t);
    assert_eq!(t["result"]["nested"], true);
    let w = json(&["tower", "--word", "0,2,1", "--depth", "8"]);
    assert_eq!(w["result"]["sequence"]["rule"], "symbol");
    assert!(w["result"]["hor_rho"].as_f64().unwrap() <= 4.0);
    let e = json(&["extend", "--period", "3"]);
    assert_valid(&e);
    assert!(e["result"]["tip"]["relative_error"].as_f64().unwrap() < 1e-6);
    assert_eq!(e["result"]["unimodal"], true);
}

#[test]
fn horseshoe_report() {
    let d = json(&["horseshoe", "--depth", "6"]);
    assert_valid(&d);
    let counts: Vec<u64> = d["result"]["cylinder_counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(counts, [3, 9, 27, 81, 243, 729]);
}

#[test]
fn verify_suites() {
    let all = json(&["verify", "all", "--period", "3"]);
    assert_valid(&all);
    assert_eq!(all["status"], "pass");
    let names: Vec<String> =
        all["result"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    assert!(names.iter().any(|n| n.contains("s2^2")));
    let h = json(&["verify", "horseshoe"]);
    let counts: Vec<f64> = h["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("cylinder count"))
        .map(|c| c["value"].as_f64().unwrap())
        .collect();
    assert_eq!(&counts[..3], &[3.0, 9.0, 27.0]);
    let e = json(&["verify", "extension", "--period", "5"]);
    assert!(e["result"]["checks"].as_array().unwrap().iter().any(|c| c["name"] == "|s2^2 - s5|"));
}

#[test]
fn exit_codes() {
    assert_eq!(renorm(&["solve", "--period", "4"]).status.code(), Some(2));
    assert_eq!(renorm(&["plotdata", "histogram"]).status.code(), Some(2));
    assert_eq!(renorm(&["solve", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(renorm(&["solve", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(renorm(&["tower", "--depth", "0"]).status.code(), Some(2));
    // branch fixed points out of order: a numerical failure
    assert_eq!(renorm(&["horseshoe", "--eps", "0.98,1.02"]).status.code(), Some(3));
    assert_eq!(renorm(&["verify", "pwa"]).status.code(), Some(0));
}

#[test]
fn deterministic_output() {
    let a = renorm(&["verify", "pwa", "--seed", "7"]);
    let b = renorm(&["verify", "pwa", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let a = renorm(&["plotdata", "extension", "--depth", "3"]);
    let b = renorm(&["plotdata", "extension", "--depth", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn floats_carry_seventeen_digits() {
    let o = renorm(&["solve"]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let c = v["result"]["c_star"].as_f64().unwrap();
    let token = format!("{c:.16e}");
    assert!(text.contains(&token));
    assert_eq!(token.parse::<f64>().unwrap(), c);
}

#[test]
fn out_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.json");
    let o = renorm(&["solve", "--period", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, stdout(&renorm(&["solve", "--period", "5"])));
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"period": 5, "tol": 1e-10}"#).unwrap();
    let from_file = json(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file["provenance"]["config"]["period"], 5);
    let flag_wins = json(&["solve", "--config", cfg.to_str().unwrap(), "--period", "3"]);
    assert_eq!(flag_wins["provenance"]["config"]["period"], 3);
    std::fs::write(&cfg, r#"{"periodd": 5}"#).unwrap();
    assert_eq!(renorm(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
