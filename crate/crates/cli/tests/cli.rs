use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64 as C64;
use serde_json::Value;

use nlwitness_core::dynamics::DephasingModel;
use nlwitness_core::model::{build_dimer, eigenstate, DimerParams};
use nlwitness_core::response::select_phase_matched;

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let path = dir.join("scenario.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_nlwitness"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--output")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(file)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

const DIMER: &str = r#""system": {"kind": "dimer", "omega_a": 10.0, "omega_b": 9.0, "j_coupling": 0.5, "mu_b": 0.3}"#;
const PULSES: &str = r#""pulses": [{"arrival": 0.0}, {"arrival": 0.7}, {"arrival": 1.6}]"#;

#[test]
fn validate_fills_defaults_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["validate"],
        &format!(r#"{{{DIMER}, {PULSES}, "experiment": {{"detection_time": 2.5}}}}"#),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["system"]["mu_a"], 1.0);
    assert_eq!(v["noise"]["gamma"], 0.0);
    assert_eq!(v["pulses"][2]["wavevector"], 3);
    assert_eq!(v["experiment"]["pattern"], "-++");
    assert_eq!(v["experiment"]["input"]["label"], "g");
    assert_eq!(v["output"]["witness_json"], "witness.json");

    let again = run(dir.path(), &["validate"], &text);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn config_errors_exit_with_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            format!(r#"{{{DIMER}, "noise": {{"kind": "uniform", "gamma": -0.1}}, {PULSES}}}"#),
            "noise.gamma",
        ),
        (format!(r#"{{{DIMER}, {PULSES}, "detectoin": 1.0}}"#), "detectoin"),
        ("{\n  \"system\": {\n    \"kind\": \"dimer\",,\n}".to_string(), "line 3"),
        (
            format!(r#"{{{DIMER}, {PULSES}, "experiment": {{"detection_time": 2.5, "input": {{"kind": "eigenstate", "label": "gamma"}}}}}}"#),
            "experiment.input",
        ),
    ];
    for (config, needle) in cases {
        let out = run(dir.path(), &["validate"], &config);
        assert_eq!(out.status.code(), Some(2), "{config}");
        assert!(stderr(&out).contains(needle), "{needle} missing from {}", stderr(&out));
    }
    let out = run(dir.path(), &["validate", "--threads", "0"], &format!("{{{DIMER}, {PULSES}}}"));
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["scan"], &format!("{{{DIMER}, {PULSES}}}"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"{{{DIMER}, {PULSES}, "experiment": {{"detection_time": 2.5, "detection": "per_branch",
            "controls": {{"kind": "gibbs", "betas": [0.1, 0.1, 0.1, 0.1]}}}}}}"#
    );
    let out = run(dir.path(), &["witness"], &config);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("condition"), "{}", stderr(&out));

    // A coherent control input is caught while the config is checked.
    let config = format!(
        r#"{{{DIMER}, {PULSES}, "experiment": {{"kind": "control", "detection_time": 2.5,
            "input": {{"kind": "pure", "re": [0.6, 0.0, 0.8, 0.0]}}}}}}"#
    );
    let out = run(dir.path(), &["witness"], &config);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not classical"));
}

#[test]
fn single_point_scan_matches_direct_call() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"{{{DIMER}, "noise": {{"kind": "uniform", "gamma": 0.2}},
            "pulses": [{{"arrival": 0.0, "area": 0.5}}, {{"arrival": 0.0, "area": 2.0}}, {{"arrival": 0.0, "area": 0.7}}],
            "scan": {{"pattern": "+-+", "t1": {{"start": 0.3}}, "t2": {{"start": 0.4}}, "t3": {{"start": 1.1}}}}}}"#
    );
    let out = run(dir.path(), &["scan"], &config);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = read(dir.path(), "scan.csv");
    assert!(text.starts_with("t1,t2,t3,re_p,im_p,abs2_p,order\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);

    let model = build_dimer(&DimerParams::new(10.0, 9.0, 0.5).with_dipoles(1.0, 0.3)).unwrap();
    let noise = DephasingModel::uniform(4, 0.2).unwrap();
    let g = eigenstate(&model, "g").unwrap();
    let p = select_phase_matched(&"+-+".parse().unwrap(), &[0.3, 0.4, 1.1], &model, &noise, &g).unwrap()
        * (0.5 * 2.0 * 0.7);
    let row = &rows[0];
    assert_eq!(&row[..3], &[0.3, 0.4, 1.1]);
    assert!((C64::new(row[3], row[4]) - p).norm() <= 1e-15 * p.norm().max(1.0));
    assert!((row[5] - p.norm_sqr()).abs() <= 1e-14 * p.norm_sqr());
    assert_eq!(row[6], 3.0);
}

#[test]
fn dark_model_scan_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"system": {"kind": "sites", "site_energies": [10.0, 9.0], "couplings": [[0.0, 0.5], [0.5, 0.0]], "dipoles": [0.0, 0.0]},
        "pulses": [{"arrival": 0.0}, {"arrival": 0.0}, {"arrival": 0.0}],
        "scan": {"t1": {"start": 0.0, "step": 0.3, "count": 3}, "t2": {"start": 0.2}, "t3": {"start": 0.0, "step": 0.3, "count": 4}}}"#;
    let out = run(dir.path(), &["scan"], config);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&read(dir.path(), "scan.csv"));
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[3] == 0.0 && r[4] == 0.0 && r[5] == 0.0));
}

#[test]
fn witness_reports() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = format!(
        r#"{{{DIMER}, {PULSES}, "experiment": {{"detection_time": 2.5,
            "input": {{"kind": "pure", "re": [0.6, 0.0, 0.8, 0.0]}}}}}}"#
    );
    let out = run(dir.path(), &["witness"], &ideal);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&read(dir.path(), "witness.json")).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["violated"], true);
    assert!(v["d_rho"].as_f64().unwrap() > 1e-6);

    let classical = format!(
        r#"{{{DIMER}, "noise": {{"kind": "uniform", "gamma": 0.3}}, {PULSES}, "experiment": {{"detection_time": 2.5,
            "skip_first_pulse": true, "detection": "per_branch",
            "input": {{"kind": "mixture", "populations": [0.4, 0.3, 0.2, 0.1]}}}}}}"#
    );
    let out = run(dir.path(), &["witness"], &classical);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&read(dir.path(), "witness.json")).unwrap();
    assert_eq!(v["violated"], false);
    let d = v["d_rho"].as_f64().unwrap();
    assert!(v["lower"].as_f64().unwrap() <= d + 1e-9 && d <= v["upper"].as_f64().unwrap() + 1e-9);

    // Two temperatures pin down the two levels of a single site.
    let gibbs = r#"{"system": {"kind": "sites", "site_energies": [2.0], "two_exciton": false},
        "noise": {"kind": "uniform", "gamma": 0.1},
        "pulses": [{"arrival": 0.0}, {"arrival": 0.7}, {"arrival": 1.6}],
        "experiment": {"detection_time": 2.5, "detection": "per_branch",
            "controls": {"kind": "gibbs", "betas": [0.0, 0.8]}}}"#;
    let out = run(dir.path(), &["witness"], gibbs);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&read(dir.path(), "witness.json")).unwrap();
    let solve = &v["control_solve"];
    assert_eq!(solve["betas"].as_array().unwrap().len(), 2);
    assert!(solve["residual"].as_f64().unwrap() < 1e-10);

    let main = format!(r#"{{{DIMER}, {PULSES}, "experiment": {{"kind": "main", "detection_time": 2.5}}}}"#);
    let out = run(dir.path(), &["witness"], &main);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&read(dir.path(), "witness.json")).unwrap();
    assert_eq!(v["kind"], "main");
    assert!(v["d"].is_number());
}

/// Order-1 scan of a two-level site whose gap sits exactly on a DFT bin.
fn toy_spectrum(dir: &Path, dipole: f64, count: usize, step: f64) -> Vec<Vec<f64>> {
    let config = format!(
        r#"{{"system": {{"kind": "sites", "site_energies": [3.141592653589793], "dipoles": [{dipole}], "two_exciton": false}},
            "pulses": [{{"arrival": 0.0}}, {{"arrival": 0.0}}, {{"arrival": 0.0}}],
            "scan": {{"order": 1, "t1": {{"start": 0.0, "step": {step}, "count": 4}}, "t2": {{"start": 0.0}},
                      "t3": {{"start": 0.0, "step": {step}, "count": {count}}}}}}}"#
    );
    let out = run(dir, &["spectrum"], &config);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = read(dir, "spectrum.csv");
    assert!(text.starts_with("omega1,omega3,re,im,abs\n"));
    csv_rows(&text)
}

fn peak(rows: &[Vec<f64>]) -> &Vec<f64> {
    rows.iter().max_by(|a, b| a[4].total_cmp(&b[4])).unwrap()
}

#[test]
fn single_coherence_gives_one_dominant_bin() {
    let dir = tempfile::tempdir().unwrap();
    let rows = toy_spectrum(dir.path(), 1.0, 32, 0.25);
    assert_eq!(rows.len(), 4 * 32);
    let top = peak(&rows).clone();
    assert_eq!(top[0], 0.0);
    assert!((top[1].abs() - std::f64::consts::PI).abs() < 1e-12, "{top:?}");
    let others = rows.iter().filter(|r| **r != top).map(|r| r[4]).fold(0.0, f64::max);
    assert!(others < 1e-12 * top[4], "{others} vs {}", top[4]);

    // Twice the samples: same peak on an axis twice as fine.
    let fine = toy_spectrum(dir.path(), 1.0, 64, 0.25);
    let fine_top = peak(&fine);
    assert!((fine_top[1] - top[1]).abs() < 1e-12);
    let spacing = |rows: &[Vec<f64>]| {
        let mut w: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        w.sort_by(f64::total_cmp);
        w.dedup();
        w[1] - w[0]
    };
    assert!((spacing(&rows) - std::f64::consts::PI / 4.0).abs() < 1e-12);
    assert!((spacing(&fine) - std::f64::consts::PI / 8.0).abs() < 1e-12);
}

#[test]
fn zero_input_gives_zero_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let rows = toy_spectrum(dir.path(), 0.0, 16, 0.25);
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[3] == 0.0 && r[4] == 0.0));
}
