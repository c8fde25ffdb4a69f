use std::path::Path;
use std::process::{Command, Output};

use unfitted_rbffd::cli::{parse_config, CURVE_HEADER, SOLUTION_HEADER};
use unfitted_rbffd::harness::{parse_convergence_csv, SPATIAL_HEADER};

fn meshless(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshless")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

#[test]
fn no_arguments_prints_usage() {
    let out = meshless(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(meshless(&["explode"]).status.code(), Some(2));
}

#[test]
fn smooth_geometry_writes_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("curve.csv");
    let res = meshless(&["smooth-geometry", "--in", &data("diaphragm/vertices.csv"), "--out", out.to_str().unwrap(), "--samples", "50"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CURVE_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 50);
    for r in &rows {
        assert!((r[3].hypot(r[4]) - 1.0).abs() < 1e-12);
        assert!(r[1].abs() <= 1.0 && r[2].abs() <= 1.0);
    }
}

#[test]
fn config_errors_are_one_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "poisson_ratio = 0.6\n").unwrap();
    let out = meshless(&["converge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: kind=config field=poisson_ratio"), "{err}");
    let missing = meshless(&["solve", "--config", "/nonexistent.cfg"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    for name in ["bench1.cfg", "bench2.cfg", "manufactured.cfg"] {
        let cfg = parse_config(Path::new(&data(name))).unwrap();
        assert!(cfg.study.h_list.windows(2).all(|w| w[0] > w[1]), "{name}");
    }
}

#[test]
fn solve_and_converge_outputs_reparse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "mode = manufactured\nsolution = trig\ndomain = circle\nh = 0.1\np = 3\nh_list = 0.05 0.1 0.2\np_list = 2\noutput_dir = out\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let res = meshless(&["solve", "--config", cfg]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let sol = std::fs::read_to_string(tmp.path().join("out/solution.csv")).unwrap();
    assert!(sol.starts_with(SOLUTION_HEADER));
    let summary = std::fs::read_to_string(tmp.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("err_u1="));

    let res = meshless(&["converge", "--config", cfg, "--seed", "7"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let path = tmp.path().join("out/convergence.csv");
    let recs = parse_convergence_csv(&std::fs::read_to_string(&path).unwrap(), &path).unwrap();
    assert_eq!(recs.iter().map(|r| r.h).collect::<Vec<_>>(), vec![0.2, 0.1, 0.05]);
    assert!(recs[2].order[0].is_finite());
    let spatial = std::fs::read_to_string(tmp.path().join("out/spatial_p2.csv")).unwrap();
    assert!(spatial.starts_with(SPATIAL_HEADER));
}

#[test]
fn thread_cap_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c.csv");
    let res = Command::new(env!("CARGO_BIN_EXE_meshless"))
        .env("MESHLESS_THREADS", "1")
        .args(["smooth-geometry", "--in", &data("diaphragm/vertices.csv"), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(res.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_meshless"))
        .env("MESHLESS_THREADS", "many")
        .args(["smooth-geometry", "--in", &data("diaphragm/vertices.csv"), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
