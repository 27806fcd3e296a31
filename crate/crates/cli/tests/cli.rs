use std::path::Path;
use std::process::{Command, Output};

fn altseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altseq"))
        .args(args)
        .env_remove("ALTSEQ_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr holds one JSON record")
}

#[test]
fn exact_three_matches_enumeration() {
    // S_3 has as-values (1,2,3,2,3,2) over its six elements: p_3(2) = 4/6.
    let o = altseq(&["exact", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "3,2,2,3"), "{text}");
    assert_eq!(text.lines().next(), Some("n,k,p_num,p_den"));
}

#[test]
fn exact_json_and_truncation_flags() {
    let o = altseq(&["--format", "json", "exact", "4", "-N", "6", "-D", "8"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 4);
    let o = altseq(&["exact", "6", "-N", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["error"], "out_of_truncation");
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let fresh = altseq(&["exact", "12"]);
    let first = altseq(&["--cache-dir", d, "exact", "12"]);
    assert!(dir.path().join("dist_n0012.csv").exists());
    let hit = altseq(&["--cache-dir", d, "exact", "12"]);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(fresh.stdout, hit.stdout);
    let env_hit = Command::new(env!("CARGO_BIN_EXE_altseq"))
        .args(["--format", "json", "exact", "12"])
        .env("ALTSEQ_CACHE_DIR", d)
        .output()
        .unwrap();
    let json_fresh = altseq(&["--format", "json", "exact", "12"]);
    assert_eq!(env_hit.stdout, json_fresh.stdout);
}

#[test]
fn corrupt_cache_is_a_computational_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("dist_n0005.csv"), "garbage").unwrap();
    let o = altseq(&["--cache-dir", dir.path().to_str().unwrap(), "exact", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "cache");
}

#[test]
fn limit_at_zero_is_one_half() {
    let o = altseq(&["--format", "json", "limit", "0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["K"], 0.5);
    assert_eq!(v[0]["pv"], 0.5);
    let o = altseq(&["limit", "-1", "1"]);
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn sample_is_seed_deterministic() {
    let a = altseq(&["--format", "json", "sample", "20", "5000", "3"]);
    let b = altseq(&["--format", "json", "sample", "20", "5000", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["m"], 5000);
}

#[test]
fn contour_single_and_batch() {
    let o = altseq(&["contour", "8", "--k", "5"]);
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("8,5,"));

    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("q.csv");
    std::fs::write(&batch, "n,k,t\n8,5,\n9,,0\n").unwrap();
    let o = altseq(&["contour", "--batch", batch.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,k,p,imag_residual,M_used,J_used");
    assert_eq!(lines[1], row);
    assert!(lines[2].starts_with("9,6,"));
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["contour", "0", "--k", "0"][..],
        &["contour", "5"],
        &["exact"],
        &["saddle", "--alpha", "1.5"],
        &["exact", "3", "--no-such-flag"],
        &["contour", "10", "--k", "3", "--tol", "-1"],
    ] {
        let o = altseq(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let rec = error_record(&o);
        assert!(rec["message"].is_string(), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.csv");
    let o = altseq(&["--output", path.to_str().unwrap(), "exact", "5"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), altseq(&["exact", "5"]).stdout);
    // A failing run leaves nothing behind.
    let bad = dir.path().join("bad.csv");
    let o = altseq(&["--output", bad.to_str().unwrap(), "exact", "5", "-N", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!Path::new(&bad).exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn saddle_and_descent_outputs() {
    let o = altseq(&["saddle"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["zero_count"], 3);
    assert_eq!(v["saddles"][0]["multiplicity"], 3);
    let o = altseq(&["descent", "--branch", "lower"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("s,re_u,im_u,re_sigma,im_sigma"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(last[2] <= -std::f64::consts::PI + 1e-6 && last[1] >= 0.0);
    let o = altseq(&["--format", "json", "descent"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["branch"], "+pi/4");
}

/// Errors may wobble by floor(2n/3 + t sqrt n) jitter once they are this small.
const CONVERGE_SLACK: f64 = 1e-5;

#[test]
fn converge_error_shrinks_with_n() {
    let o = altseq(&["converge"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rows: Vec<(usize, String, f64)> = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        rows.push((f[0].parse().unwrap(), f[1].to_string(), f[5].parse().unwrap()));
    }
    assert_eq!(rows.len(), 15);
    for t in ["-1.5", "-0.75", "0", "0.75", "1.5"] {
        let errs: Vec<f64> = rows.iter().filter(|r| r.1 == t).map(|r| r.2).collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + CONVERGE_SLACK, "t={t}: {errs:?}");
        }
    }
    assert!(rows.iter().filter(|r| r.0 == 4096).all(|r| r.2 <= 0.05));
}

#[test]
fn converge_uses_exact_rows_for_small_n() {
    let o = altseq(&["converge", "--n", "9,30", "--t", "0,-0.5"]);
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",exact")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("9,0,6,")));
}
