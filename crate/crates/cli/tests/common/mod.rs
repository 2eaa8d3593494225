use std::path::{Path, PathBuf};

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn invoke(args: &[&str]) -> Invocation {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pminor").chain(args.iter().copied());
    let code = pminor_cli::run(argv, &mut out, &mut err);
    Invocation {
        code,
        stdout: String::from_utf8(out).expect("utf-8 stdout"),
        stderr: String::from_utf8(err).expect("utf-8 stderr"),
    }
}

/// Golden name and arguments; `{golden}` expands to the golden directory.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("sample_wishart.txt", &["sample", "--ensemble", "wishart", "--n", "5", "--p", "3", "--seed", "1"]),
    ("sample_wigner.txt", &["sample", "--ensemble", "wigner", "--p", "4", "--eta", "2", "--seed", "2"]),
    (
        "extreme_wigner.json",
        &["extreme", "--ensemble", "wigner", "--p", "8", "--m", "2", "--eta", "2", "--mode", "max", "--strategy", "enumerate", "--seed", "7"],
    ),
    (
        "extreme_wishart_min.json",
        &["extreme", "--ensemble", "wishart", "--n", "20", "--p", "10", "--m", "3", "--mode", "min", "--seed", "3"],
    ),
    ("tails_b_star.json", &["tails", "--fn", "b_star", "--t", "2"]),
    ("tails_wishart_union.json", &["tails", "--fn", "wishart_union", "--t", "3", "--n", "1000", "--m", "2", "--p", "200"]),
    ("density_selftest.json", &["density-selftest"]),
    ("rip.json", &["rip", "--n", "30", "--p", "10", "--k", "2", "--t", "2", "--seed", "3"]),
    ("mc_small.json", &["mc", "--config", "{golden}/mc_small.conf"]),
];

pub fn expand(args: &[&str]) -> Vec<String> {
    let dir = golden_dir();
    let dir = dir.to_str().expect("utf-8 path");
    args.iter().map(|a| a.replace("{golden}", dir)).collect()
}

/// Runs every golden case and returns the names whose output differs.
/// With `PMINOR_UPDATE_GOLDEN=1` the files are rewritten instead.
pub fn golden_mismatches() -> Vec<String> {
    let update = std::env::var("PMINOR_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut bad = Vec::new();
    for (name, args) in GOLDEN_CASES {
        let args = expand(args);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let got = invoke(&refs);
        let path = golden_dir().join(name);
        if got.code != 0 {
            bad.push(format!("{name}: exit {} ({})", got.code, got.stderr.trim()));
        } else if update {
            std::fs::write(&path, &got.stdout).expect("write golden");
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(got.stdout.as_str()) {
            bad.push(name.to_string());
        }
    }
    bad
}
