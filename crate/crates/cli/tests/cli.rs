use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cavcorr::states::gaussian_state;
use cavcorr::{Correlator, Kind, SystemParams, TauGrid};

fn cavcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn values(csv: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(csv)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("tau"))
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn fig5_ground_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cavcorr(&["run", "--g", "2", "--kappa", "5", "--state", "ground", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = values(&dir.path().join("g2tt.csv"));
    assert_eq!(v.len(), 1000);
    assert_eq!(v[0].0, 0.0);
    assert_eq!(v.last().unwrap().0, 10.0);
    assert!((v[0].1 - 1.1).abs() < 0.15, "{}", v[0].1);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["series"][0]["kind"], "g2tt");
    let kinds: Vec<&str> = report["series"][0]["violations"]["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"undershoot"), "{kinds:?}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = cavcorr(&[
            "run", "--state", "mix:0,5", "--kind", "g2tt,htt,hff", "--theta", "0,0.5",
            "--out", d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for f in ["g2tt.csv", "htt_theta0.csv", "htt_theta0.5.csv", "hff_theta0.csv", "hff_theta0.5.csv"] {
        let x = fs::read_to_string(a.path().join(f)).unwrap();
        let y = fs::read_to_string(b.path().join(f)).unwrap();
        // only the output directory line differs
        let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# run: out=")).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&x), strip(&y), "{f}");
    }
}

#[test]
fn csv_header_replays_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = cavcorr(&["run", "--g", "3", "--kappa", "0.1", "--state", "equal:20", "--tau-points", "50", "--out", a.path().to_str().unwrap()]);
    assert!(o.status.success());
    let cfg = a.path().join("g2tt.csv");
    let o = cavcorr(&["run", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(values(&cfg), values(&b.path().join("g2tt.csv")));
}

#[test]
fn bogus_state_is_a_spec_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cavcorr(&["run", "--state", "bogus", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mix:<l1>"));
    assert!(!dir.path().join("g2tt.csv").exists());
}

#[test]
fn invalid_parameters_are_spec_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--g", "-1", "--out", out],
        vec!["run", "--kind", "g3", "--out", out],
        vec!["run", "--tau-points", "0", "--out", out],
        vec!["figset", "fig13", "--out", out],
    ] {
        assert_eq!(cavcorr(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn single_point_scan_matches_direct_correlator() {
    let o = cavcorr(&["scan", "--sweep", "sigma", "--values", "1", "--l-max", "80"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let (sigma, v) = row.split_once(',').unwrap();
    assert_eq!(sigma, "1");
    let p = SystemParams::new(2.2, 10.0, 0.1, 80).unwrap();
    let direct = Correlator::new(&p, &gaussian_state(1.0, 80).unwrap())
        .unwrap()
        .series(Kind::G2Tt, 0.0, &TauGrid::default())
        .unwrap()
        .values[0];
    assert_eq!(v.parse::<f64>().unwrap(), direct - 1.0);
}

#[test]
fn verify_writes_agreement_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let o = cavcorr(&["verify", "--kind", "g2tt,hff", "--tau-points", "100", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let checks = report["verify"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn figset_writes_every_panel() {
    let dir = tempfile::tempdir().unwrap();
    let o = cavcorr(&["figset", "fig8", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for p in ["a", "b", "c", "d"] {
        assert_eq!(values(&dir.path().join(format!("fig8{p}.csv"))).len(), 1000);
    }
    assert!(dir.path().join("fig8_report.json").exists());
}
