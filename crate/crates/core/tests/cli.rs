use std::process::{Command, Output};

use serde_json::Value;

fn qstep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstep"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_rows(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_prints_complex_limit_record() {
    let out = qstep(&[
        "solve", "--v1", "0.75", "--v2", "0", "--v3", "0", "--energy", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["r"], serde_json::json!([0.3333333333333333, 0.0]));
    assert_eq!(v["T"].as_f64(), Some(0.8888888888888888));
    assert_eq!(v["t"][0].as_f64(), Some(4.0 / 3.0));
    for key in [
        "zone",
        "r_tilde",
        "t_tilde",
        "R",
        "theta_n",
        "theta_d",
        "tau_r",
        "tau_t",
        "ill_conditioned",
    ] {
        assert!(!v[key].is_null(), "missing {key}");
    }
    assert!(v["tau_r"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn solve_reports_total_reflection_phase() {
    let out = qstep(&[
        "solve", "--v1", "1", "--v2", "0", "--v3", "0", "--energy", "0.5",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["zone"], "B");
    assert!(v["theta"].is_number());
    assert!(v["theta_n"].is_null());
    assert!(v["tau_t"].is_null());
    assert!((v["tau_r"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let out = qstep(&[
        "solve", "--v1", "0.75", "--v2", "0", "--v3", "0", "--energy", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy must be positive"));

    let out = qstep(&[
        "solve", "--v1", "0.6", "--v2", "0.8", "--v3", "0", "--energy", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let out = qstep(&[
        "field",
        "--v1",
        "0.6",
        "--v2",
        "0.8",
        "--v3",
        "0",
        "--energy",
        "2",
        "-o",
        "/nonexistent-dir/f.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));

    let out = qstep(&[
        "field", "--v1", "0.6", "--v2", "0.8", "--v3", "0", "--energy", "2", "--x-min", "1",
        "--x-max", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // packet support leaves zone B
    let out = qstep(&[
        "packet", "--v1", "1", "--v2", "0", "--v3", "0", "--energy", "0.98", "--sigma", "0.05",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn field_file_has_constant_current() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let out = qstep(&[
        "field",
        "--v1",
        "0.3",
        "--v2",
        "0.5",
        "--v3",
        "0.2",
        "--energy",
        "1.2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1202);
    let (header, rows) = parse_rows(&text);
    assert_eq!(header, "x,phi0,phi1,phi2,phi3,rho,j");
    assert_eq!(rows[0][0], -6.0);
    assert_eq!(rows[1200][0], 6.0);
    let j0 = rows[0][6];
    assert!(j0 > 0.0);
    for r in &rows {
        assert!((r[6] - j0).abs() < 1e-10);
        let rho = r[1] * r[1] + r[2] * r[2] + r[3] * r[3] + r[4] * r[4];
        assert!((rho - r[5]).abs() <= 1e-12 * rho.max(1.0));
    }
}

#[test]
fn field_zone_c_decays_under_envelope() {
    let out = qstep(&[
        "field", "--v1", "0", "--v2", "1", "--v3", "0", "--energy", "0.6",
    ]);
    let (_, rows) = parse_rows(&stdout(&out));
    let sol = qstep::scattering::solve_step(
        &qstep::step::StepPotential::new(0.0, 1.0, 0.0).unwrap(),
        0.6,
    )
    .unwrap();
    let sigma_plus = sol.params.sigma_plus;
    // σ₊ = √(|A|/2) with |A| = √(|W|² − E²) = 0.8
    assert!((sigma_plus - 0.4f64.sqrt()).abs() < 1e-15);
    let amplitude = (sol.params.w * sol.t).norm() + sol.t_tilde.norm();
    let right: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] > 0.0).collect();
    let q = |r: &Vec<f64>| r[3].hypot(r[4]);
    let first = q(right[0]);
    for r in &right {
        assert!(q(r) <= amplitude * (-sigma_plus * r[0]).exp() * (1.0 + 1e-12));
    }
    assert!(q(right.last().unwrap()) < 0.05 * first);
}

#[test]
fn field_json_matches_csv() {
    let base = [
        "field", "--v1", "0.6", "--v2", "0.8", "--v3", "0", "--energy", "2", "-n", "5",
    ];
    let (_, rows) = parse_rows(&stdout(&qstep(&base)));
    let mut args = base.to_vec();
    args.extend(["--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&qstep(&args))).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 5);
    for (row, obj) in rows.iter().zip(arr) {
        assert_eq!(obj["phi2"].as_f64().unwrap(), row[3]);
    }
}

#[test]
fn energy_scan_conserves_probability() {
    let out = qstep(&[
        "scan", "--v1", "0.3", "--v2", "0.5", "--v3", "0.2", "--param", "energy", "--from", "0.7",
        "--to", "3", "--steps", "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_rows(&stdout(&out));
    assert_eq!(header, "value,R,T,tau_r,tau_t");
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r[1]));
        assert!((r[1] + r[2] - 1.0).abs() < 1e-12);
        assert!(r[3].is_finite() && r[4].is_finite());
    }
}

#[test]
fn ratio_scan_crosses_zones() {
    // V0 = 1, E = 1/√2: zone B below |W|/V0 = 1/√2, zone C above
    let out = qstep(&[
        "scan",
        "--v1",
        "0.6",
        "--v2",
        "0.8",
        "--v3",
        "0",
        "--energy",
        "0.7071067811865476",
        "--param",
        "ratio",
        "--from",
        "0.1",
        "--to",
        "0.95",
        "--steps",
        "18",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = parse_rows(&stdout(&out));
    for r in &rows {
        assert!((r[1] - 1.0).abs() < 1e-12 && r[2].abs() < 1e-12);
        assert!(r[4].is_nan());
    }
}

#[test]
fn verify_output_is_reproducible() {
    let args = ["verify", "--cases", "10000", "--rng-seed", "42"];
    let a = qstep(&args);
    let b = qstep(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() == 7);
    assert!(text.contains("all properties passed"));

    let other = qstep(&[
        "verify",
        "--cases",
        "300",
        "--rng-seed",
        "43",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["rng_seed"], 43);
}

#[test]
fn packet_zone_b_delay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let out = qstep(&[
        "packet",
        "--v1",
        "1",
        "--v2",
        "0",
        "--v3",
        "0",
        "--energy",
        "0.5",
        "--sigma",
        "0.02",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let tau = v["tau_r_measured"].as_f64().unwrap();
    assert!((tau - 2.0).abs() < 0.2, "{tau}");
    assert!(v["tau_t_measured"].is_null());

    let (header, rows) = parse_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, "t,abs_psi_refl");
    assert_eq!(rows.len(), 2001);
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((peak[0] - tau).abs() < 0.02);
}

#[test]
fn logging_goes_to_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_qstep"))
        .env("QSTEP_LOG", "info")
        .args([
            "field", "--v1", "0.6", "--v2", "0.8", "--v3", "0", "--energy", "2", "-n", "3",
        ])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("field: zone A"));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn help_documents_units() {
    let out = qstep(&["--help"]);
    assert!(stdout(&out).contains("ħ = 2m = 1"));
}
