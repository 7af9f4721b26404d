//! Acceptance criterion 8: identical seeds and different thread counts give
//! byte-identical JSON-lines. Plus exit-code and schema checks of the CLI.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symmin"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symmin-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p); // reports append; start fresh
    p
}

#[test]
fn criterion_8_byte_identical_reports_across_thread_counts() {
    let a = tmp("eigen-t1.jsonl");
    let b = tmp("eigen-t4.jsonl");
    for (threads, path) in [("1", &a), ("4", &b)] {
        let status = bin()
            .args([
                "--threads", threads,
                "verify", "eigen",
                "--space", "gr_h",
                "--m", "1",
                "--n", "2",
                "--samples", "20",
                "--seed", "11",
                "--out", path.to_str().unwrap(),
            ])
            .status()
            .expect("spawn symmin");
        assert!(status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "criterion 8 FAIL: thread count changed the report");

    // Same invocation twice: also identical.
    let c = tmp("eigen-rerun.jsonl");
    let status = bin()
        .args([
            "--threads", "4",
            "verify", "eigen",
            "--space", "gr_h",
            "--m", "1",
            "--n", "2",
            "--samples", "20",
            "--seed", "11",
            "--out", c.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(bytes_b, std::fs::read(&c).unwrap());
    println!("acceptance criterion 8 (byte-identical JSON-lines): PASS");
}

#[test]
fn table_runs_deterministically_and_passes() {
    let a = tmp("table-t2.jsonl");
    let b = tmp("table-t8.jsonl");
    for (threads, path) in [("2", &a), ("8", &b)] {
        let out = bin()
            .args([
                "--threads", threads,
                "table",
                "--samples", "20",
                "--seed", "5",
                "--out", path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8_lossy(&out.stdout);
        // one header + ten family rows, all ok
        assert_eq!(stdout.lines().filter(|l| l.ends_with("ok")).count(), 10);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn report_lines_match_schema() {
    let path = tmp("schema.jsonl");
    let status = bin()
        .args([
            "verify", "invariance",
            "--space", "su_so",
            "--n", "3",
            "--seed", "3",
            "--out", path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    let mut lines = 0;
    for line in content.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for field in [
            "schema_version", "space", "params", "check", "residual",
            "tolerance", "pass", "samples", "seed", "engine", "wall_time_ms",
        ] {
            assert!(v.get(field).is_some(), "missing field {field}");
        }
        let pass = v["pass"].as_bool().unwrap();
        let residual = v["residual"].as_f64().unwrap();
        let tolerance = v["tolerance"].as_f64().unwrap();
        assert_eq!(pass, residual <= tolerance);
        assert_eq!(v["wall_time_ms"].as_u64().unwrap(), 0); // no --timing
        lines += 1;
    }
    assert_eq!(lines, 2);
}

#[test]
fn fibre_points_export_as_json_matrices() {
    let path = tmp("points.json");
    let st = bin()
        .args([
            "verify", "regularity",
            "--space", "su_n",
            "--n", "2",
            "--samples", "3",
            "--seed", "1",
            "--points-out", path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(st.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 3);
    for p in pts {
        let x = p["x"].as_array().unwrap();
        assert_eq!(x.len(), 2); // 2x2 matrices with [re, im] entries
        assert_eq!(x[0].as_array().unwrap()[0].as_array().unwrap().len(), 2);
        assert!(p["converged"].is_boolean());
    }
}

#[test]
fn exit_codes() {
    // Unknown gallery case: config error.
    let st = bin().args(["gallery", "run", "no-such-case"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // Unknown space id: config error.
    let st = bin()
        .args(["verify", "eigen", "--space", "e8", "--n", "3"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    // Too-large size: config error.
    let st = bin()
        .args(["verify", "eigen", "--space", "su_n", "--n", "40"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    // Invalid parameters (non-isotropic a on SO(n)): config error.
    let st = bin()
        .args([
            "verify", "eigen",
            "--space", "so_n",
            "--n", "3",
            "--params", r#"{"a": [[1,0],[0,0],[0,0]], "p": [[1,0],[0,0],[0,0]]}"#,
        ])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    // Expected-critical gallery cases confirm and exit 0.
    let st = bin()
        .args(["verify", "regularity", "--gallery", "so4-u2-old-family"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));

    // Usage error from the parser.
    let st = bin().args(["verify", "eigen"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn all_gallery_cases_run_green() {
    let list = bin().args(["gallery", "list"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&list.stdout);
    let ids: Vec<&str> = stdout
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    assert!(ids.len() >= 5);
    for id in ids {
        let st = bin().args(["gallery", "run", id]).status().unwrap();
        assert_eq!(st.code(), Some(0), "gallery case {id}");
    }
}
