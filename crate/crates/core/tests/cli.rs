use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monoconv")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV as floats, header skipped.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn convolve_two_point_squares_to_multiples_of_four() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"atoms": [{"angle": 0.0, "weight": 0.5}, {"angle": 3.141592653589793, "weight": 0.5}]}"#);
    let out = stdout(&run(&["convolve", s(&m), s(&m), "--order", "8", "--format", "csv"]));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 8);
    for r in rows {
        let expected = if (r[0] as usize).is_multiple_of(4) { 1.0 } else { 0.0 };
        assert!((r[1] - expected).abs() < 1e-12 && r[2].abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn convolve_with_unit_echoes_moments() {
    let dir = TempDir::new().unwrap();
    let delta = write(&dir, "d.json", r#"{"atoms": [{"angle": 0.0, "weight": 1.0}]}"#);
    let mu = write(&dir, "mu.json", r#"{"atoms": [{"angle": 0.4, "weight": 0.25}, {"angle": 2.0, "weight": 0.75}]}"#);
    let out: Value = serde_json::from_str(&stdout(&run(&["convolve", s(&delta), s(&mu), "--order", "5"]))).unwrap();
    assert_eq!(out["order"], 5);
    let moments = out["moments"].as_array().unwrap();
    for (k, m) in moments.iter().enumerate() {
        let n = (k + 1) as f64;
        let re = 0.25 * (0.4 * n).cos() + 0.75 * (2.0 * n).cos();
        let im = 0.25 * (0.4 * n).sin() + 0.75 * (2.0 * n).sin();
        assert!((m[0].as_f64().unwrap() - re).abs() < 1e-12);
        assert!((m[1].as_f64().unwrap() - im).abs() < 1e-12);
    }
}

#[test]
fn input_errors_have_stable_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"atoms": [{"angle": 0.0, "weight": 0.5}]}"#);
    let out = run(&["convolve", s(&bad), s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[invalid_measure]"));

    let broken = write(&dir, "broken.json", "{\"atoms\": [\n  {\"angle\": 0.0,, }\n]}");
    let out = run(&["convolve", s(&broken), s(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[input]") && err.contains("line 2"), "{err}");

    let out = run(&["convolve", s(&dir.path().join("missing.json")), s(&bad)]);
    assert_eq!(out.status.code(), Some(6));

    assert_eq!(run(&["convolve"]).status.code(), Some(2));
}

#[test]
fn evolve_linear_flow_and_identity_at_zero() {
    let dir = TempDir::new().unwrap();
    let gen = write(&dir, "g.json", r#"{"b": 0.0, "haar_mass": 1.0}"#);
    let grid = write(&dir, "grid.txt", "0.5,0\n0.1,-0.2\n");
    let rows = csv_rows(&stdout(&run(&["evolve", s(&gen), "--t", "0,1", "--grid", s(&grid)])));
    assert_eq!(rows.len(), 4);
    for r in &rows[..2] {
        assert_eq!((r[3], r[4]), (r[1], r[2]));
    }
    assert!((rows[2][3] - 0.5 * (-1.0f64).exp()).abs() < 1e-10);
}

#[test]
fn evolve_yule_matches_closed_form_column() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [("k2.json", r#"{"lambda": {"2": 1.0}}"#), ("k3.json", r#"{"lambda": {"3": 1.0}}"#)] {
        let gen = write(&dir, name, text);
        let grid = write(&dir, "grid.txt", "0.3,0\n0,0.25\n-0.2,0.1\n");
        let out = stdout(&run(&["evolve", s(&gen), "--t", "0.25,0.5,1,2", "--grid", s(&grid)]));
        assert!(out.starts_with("t,re_z,im_z,re_k,im_k,re_closed,im_closed\n"));
        for r in csv_rows(&out) {
            assert!((r[3] - r[5]).abs() < 1e-8 && (r[4] - r[6]).abs() < 1e-8, "{r:?}");
        }
    }
}

#[test]
fn embed_linear_map() {
    let dir = TempDir::new().unwrap();
    let k = write(&dir, "k.json", r#"{"coeffs": [[0, 0], [0.25, 0]]}"#);
    let v: Value = serde_json::from_str(&stdout(&run(&["embed", s(&k)]))).unwrap();
    assert_eq!(v["embeddable"], true);
    assert_eq!(v["reason"], "ok");
    assert!((v["t0"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-9);

    let sq = write(&dir, "sq.json", r#"{"coeffs": [[0, 0], [0, 0], [1, 0]]}"#);
    let v: Value = serde_json::from_str(&stdout(&run(&["embed", s(&sq)]))).unwrap();
    assert_eq!(v["reason"], "derivative_vanishes");
}

#[test]
fn counterexample_second_moments() {
    let v: Value = serde_json::from_str(&stdout(&run(&["counterexample", "--a", "0.5", "--b", "0.5"]))).unwrap();
    assert!((v["second_moment_sqrt_x_y_sqrt_x"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let expected = 1.25 + 0.125 * (1.0 + 0.75f64.sqrt());
    assert!((v["second_moment_sqrt_y_x_sqrt_y"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn gw_deterministic_law_is_exact() {
    let dir = TempDir::new().unwrap();
    let law = write(&dir, "law.json", r#"{"p": [0.0, 1.0]}"#);
    let rows = csv_rows(&stdout(&run(&["gw", s(&law), "--n", "4", "--trials", "50", "--z", "0.3,0.7"])));
    for r in rows {
        assert_eq!(r[2], r[0]);
        assert_eq!(r[4], 0.0);
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let law = write(&dir, "law.json", r#"{"p": [0.0, 0.5, 0.5]}"#);
    let gw = ["gw", s(&law), "--n", "5", "--trials", "2000", "--seed", "9"];
    assert_eq!(stdout(&run(&gw)), stdout(&run(&gw)));
    let ops = ["verify-ops", "--seed", "3", "--cases", "4"];
    assert_eq!(stdout(&run(&ops)), stdout(&run(&ops)));
}

#[test]
fn check_commands_report_small_defects() {
    let v: Value = serde_json::from_str(&stdout(&run(&["cfree-check", "--max-len", "5", "--max-power", "3"]))).unwrap();
    assert_eq!(v["mismatches"], 0);
    assert!(v["words_checked"].as_u64().unwrap() > 0);

    let v: Value = serde_json::from_str(&stdout(&run(&["verify-ops", "--cases", "5"]))).unwrap();
    assert!(v["max_theorem_defect"].as_f64().unwrap() < 1e-10);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.json");
    let out = run(&["counterexample", "--a", "0.3", "--b", "0.9", "--out", s(&target)]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["a"], 0.3);
}
