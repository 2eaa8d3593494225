mod common;

use common::{golden_dir, golden_mismatches, invoke};

#[test]
fn golden_outputs_are_stable() {
    let bad = golden_mismatches();
    assert!(bad.is_empty(), "golden mismatches: {bad:?}");
}

#[test]
fn usage_errors_exit_one_with_single_line() {
    for args in [
        &["extreme", "--ensemble", "wigner", "--p", "8"][..],
        &["tails", "--fn", "b_star", "--t", "2", "--n", "4"],
        &["tails", "--fn", "no_such_fn"],
        &["sample", "--ensemble", "gue", "--p", "3"],
        &["frobnicate"],
    ] {
        let r = invoke(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty());
        assert_eq!(r.stderr.lines().count(), 1, "{:?}", r.stderr);
        assert!(r.stderr.starts_with("error: "));
    }
}

#[test]
fn domain_errors_exit_two() {
    let r = invoke(&["tails", "--fn", "wigner_tail", "--x", "0.5", "--m", "2"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(r.stderr.lines().count(), 1);
    let r = invoke(&["tails", "--fn", "b_star", "--t", "-1"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(invoke(&["--help"]).code, 0);
    assert_eq!(invoke(&["--version"]).code, 0);
    assert_eq!(invoke(&["mc", "--help"]).code, 0);
}

#[test]
fn tails_list_names_every_function() {
    let r = invoke(&["tails", "--fn", "list"]);
    assert_eq!(r.code, 0);
    for name in ["rate_i", "b_star", "wishart_union", "design_min_n", "closed_form_cdf_m1"] {
        assert!(r.stdout.contains(name), "{name}");
    }
}

#[test]
fn mc_writes_json_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let conf = golden_dir().join("mc_small.conf");
    let r = invoke(&[
        "mc",
        "--config",
        conf.to_str().unwrap(),
        "--workers",
        "2",
        "--out-json",
        json.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let written = std::fs::read_to_string(&json).unwrap();
    let golden = std::fs::read_to_string(golden_dir().join("mc_small.json")).unwrap();
    assert_eq!(written.trim_end(), golden.trim_end());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("ensemble,n,p,m,side,metric,alpha,delta,t,value"));
    assert!(table.lines().count() > 10);
}

#[test]
fn extreme_output_is_valid_json() {
    let r = invoke(&["extreme", "--ensemble", "wigner", "--p", "8", "--m", "2", "--eta", "2", "--seed", "7"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), 2.1477977304601543);
    assert_eq!(v["subset"], serde_json::json!([3, 6]));
}

#[test]
fn missing_config_is_io_error() {
    let r = invoke(&["mc", "--config", "/nonexistent/pminor.conf"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error: "));
}
