use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rdmgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdmgeo")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

const SMALL: [&str; 10] = ["run", "--model", "hubbard", "--sites", "4", "--U", "4", "--N", "4", "--all"];

#[test]
fn run_writes_summary_tables_figures_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = rdmgeo(&[&SMALL[..], &["--out", &out]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["schema_version"], 1);
    for key in ["I_alpha", "I_beta", "I_gamma", "I_zeta", "delta_e_null", "ratio", "null_dims", "e_exact", "e_var"] {
        assert!(!s[key].is_null(), "missing {key}");
    }
    assert!(s["delta_e"].as_f64().unwrap() <= 1e-6);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["status"], "complete");
    let files: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    for f in ["summary.json", "eigenvalues.csv", "fig1a_projection.csv", "fig3_delta_beta.csv", "rdm_var_D.txt", "config.json"] {
        assert!(files.contains(&f), "{f} not in manifest");
        assert!(dir.path().join(f).exists());
    }
    let table = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(table.lines().count(), 11);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(rdmgeo(&[&SMALL[..], &["--out", &out_arg(d.path())]].concat()).status.success());
    }
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}

#[test]
fn noninteracting_ring_has_no_energy_gap_and_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdmgeo(&["run", "--model", "hubbard", "--sites", "6", "--U", "0", "--N", "6", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    assert!(s["delta_e"].as_f64().unwrap().abs() < 1e-6);
    for (_, v) in s["inequalities"]["max_explicit_delta"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"system": {"model": "hubbard", "sites": 4, "t": 1.0, "u": 2.0}, "n_electrons": 4,
            "conditions": {"t1": false, "t2": false, "t2p": false}, "artifacts": {"figures": false}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = rdmgeo(&["run", "--config", cfg.to_str().unwrap(), "--U", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["system"]["params"]["U"], 3.0);
    assert_eq!(s["conditions"], "D,Q,G");
    assert!(!out.join("fig3_delta_beta.csv").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"system": {"model": "hubbard", "sites": 4, "t": 1, "u": 1}, "n_electrons": 4, "colour": 1}"#).unwrap();
    let o = rdmgeo(&["run", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let o = rdmgeo(&["run", "--model", "hubbard", "--sites", "4", "--N", "7", "--out", &out_arg(dir.path())]);
    assert!(!o.status.success());
}

#[test]
fn solver_failure_leaves_a_partial_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"system": {"model": "hubbard", "sites": 4, "t": 1, "u": 4}, "n_electrons": 4,
            "sdp": {"max_iterations": 2}, "artifacts": {"rdms": true}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = rdmgeo(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["status"], "partial");
    assert!(m["error"].as_str().unwrap().contains("IterationLimit"));
    assert!(out.join("rdm_exact_D.txt").exists());
    assert!(!out.join("summary.json").exists());
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdmgeo(&[
        "sweep", "--model", "hubbard", "--sites", "4", "--N", "4", "--param", "u", "--values", "1,4", "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("u,E_exact,E_var,delta_E,delta_E_null,ratio,I_alpha"));
    assert!(dir.path().join("points/u=4/summary.json").exists());
    assert!(dir.path().join("fig2d_descriptors.csv").exists());
}

#[test]
fn single_point_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(rdmgeo(&["run", "--model", "hubbard", "--sites", "4", "--U", "4", "--N", "4", "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(rdmgeo(&[
        "sweep", "--model", "hubbard", "--sites", "4", "--N", "4", "--param", "u", "--values", "4", "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    let (x, y) = (json(&a.join("summary.json")), json(&b.join("points/u=4/summary.json")));
    assert_eq!(x, y);
}

#[test]
fn failing_sweep_points_are_recorded_in_their_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"system": {"model": "hubbard", "sites": 4, "t": 1, "u": 4}, "n_electrons": 4, "sdp": {"max_iterations": 2},
            "sweep": {"parameter": "u", "values": [1, 2]}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = rdmgeo(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.contains("IterationLimit")));
}

#[test]
fn check_accepts_exact_and_flags_variational_rdms() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    assert!(rdmgeo(&[
        "run", "--model", "hubbard", "--sites", "6", "--U", "10", "--N", "6", "--all", "--out",
        run.to_str().unwrap()
    ])
    .status
    .success());
    for (file, passes) in [("rdm_exact_D.txt", true), ("rdm_var_D.txt", false)] {
        let out = dir.path().join(file);
        let o = rdmgeo(&["check", run.join(file).to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let r = json(&out.join("check.json"));
        assert_eq!(r["passes"], passes, "{file}");
    }
}

#[test]
fn solve_sdp_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.sdp");
    // min tr(C X) with tr(X) = 1 and C = diag(1, 2): the smallest eigenvalue.
    std::fs::write(&problem, "SDP 1 1\nBLOCK 0 2 x\nRHS 1\n0 0 0 0 1\n0 0 1 1 2\n1 0 0 0 1\n1 0 1 1 1\n").unwrap();
    let out = dir.path().join("out");
    let o = rdmgeo(&["solve-sdp", problem.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("solution.json"));
    assert_eq!(s["status"], "Optimal");
    assert!((s["primal_objective"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}
