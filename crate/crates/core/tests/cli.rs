use std::process::{Command, Output};

use relplasma::sweep::{read_csv, Flag};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relplasma"))
        .args(args)
        .env_remove("RELPLASMA_TOL")
        .output()
        .unwrap()
}

#[test]
fn sweep_light_cone_row_exits_zero() {
    let out = run(&["sweep", "--omega", "0.3", "--q", "0.3,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let records = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].flags, vec![Flag::LightConeSkipped]);
    assert!(records[0].eps.is_none());
    assert!(records[1].eps.is_some());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["sweep", "--zeta", "-1"],
        vec!["sweep", "--omega", "3", "--q", "0"],
        vec!["sweep", "--tol", "0"],
        vec!["sweep", "--regime", "sideways"],
        vec!["sweep", "--q", "1:2"],
        vec!["sweep", "--config", "/nonexistent/config.json"],
        vec!["nonsense"],
        vec!["limits", "--zeta", "-2"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn forced_regime_mismatch_is_usage_error() {
    let out = run(&[
        "sweep",
        "--omega",
        "0.1",
        "--q",
        "0.1",
        "--regime",
        "stationary",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    std::fs::write(
        &cfg,
        r#"{"omega": [0.0], "q": "1e-4:1e-3:3", "format": "json"}"#,
    )
    .unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let records = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(records.len(), 3);
    let chi_m = records[0].chi_m.unwrap();
    assert!((chi_m - 2.0392e-3).abs() < 1e-6);
    assert!(records.iter().all(|r| r.chi_m == Some(chi_m)));
}

#[test]
fn env_tolerance_is_read() {
    let out = Command::new(env!("CARGO_BIN_EXE_relplasma"))
        .args(["sweep"])
        .env("RELPLASMA_TOL", "fast")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn limits_tables() {
    let out = run(&["limits", "--zeta", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("stationary,m_TF^2,closed") && l.ends_with(",ok")));

    let out = run(&[
        "limits",
        "--zeta",
        "1.00005",
        "--regime",
        "stationary",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pl = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["valueLabel"] == "Pauli+Landau" || r["value_label"] == "Pauli+Landau")
        .unwrap();
    assert!(pl["deviation"].as_f64().unwrap() < 5e-3);

    let out = run(&["limits", "--zeta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0, "{line}");
        assert_eq!(cols[5].parse::<f64>().unwrap(), 0.0, "{line}");
    }
}

#[test]
fn dispersion_reports_band() {
    let out = run(&[
        "dispersion",
        "--zeta",
        "2",
        "--n-points",
        "20",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let band = v["negativeBand"].as_array().unwrap();
    assert_eq!(band.len(), 1);
    let hi = band[0][1].as_f64().unwrap();
    assert!((hi - 0.0896587).abs() < 1e-6, "{hi}");
    for r in v["records"].as_array().unwrap() {
        let eps = r["eps"].as_f64().unwrap();
        let mu = 1.0 / r["muInv"].as_f64().unwrap();
        let n = r["nIndex"].as_array().unwrap();
        if eps * mu > 0.0 {
            assert!((n[0].as_f64().unwrap() - (eps * mu).sqrt()).abs() < 1e-9);
        } else {
            assert!(n.is_empty());
        }
    }

    let out = run(&[
        "dispersion",
        "--zeta",
        "1",
        "--n-points",
        "5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["negativeBand"].as_array().unwrap().is_empty());
}
