use altseq::exactgf::{build_b_series, dist_table, pnk_exact, DistCache, DistTable, Provenance};
use altseq::numcore::{rat, rat_to_f64};
use altseq::perms::brute_force_distribution;

#[test]
fn generating_function_equals_brute_force() {
    let s = build_b_series(9, 9).unwrap();
    for n in 0..=9 {
        let gf = dist_table(&s, n).unwrap();
        let bf = brute_force_distribution(n).unwrap();
        assert_eq!(gf.cdf(), bf.cdf(), "n={n}");
        assert_eq!(gf.provenance(), Provenance::GeneratingFunction);
    }
}

#[test]
fn truncation_does_not_change_rows() {
    let small = build_b_series(10, 10).unwrap();
    let big = build_b_series(12, 20).unwrap();
    for n in 0..=10 {
        for k in 0..=n as i64 {
            assert_eq!(pnk_exact(&small, n, k).unwrap(), pnk_exact(&big, n, k).unwrap());
        }
    }
}

#[test]
fn moments_follow_closed_forms() {
    let s = build_b_series(40, 40).unwrap();
    let mut drifts = Vec::new();
    for n in [10usize, 20, 40] {
        let (mean, var) = dist_table(&s, n).unwrap().moments();
        assert_eq!(mean, rat(4 * n as i64 + 1, 6), "n={n}");
        assert_eq!(var, rat(32 * n as i64 - 13, 180), "n={n}");
        drifts.push((rat_to_f64(&mean) / n as f64 - 2.0 / 3.0).abs());
    }
    assert!(drifts.windows(2).all(|w| w[1] < w[0]), "{drifts:?}");
    assert!(drifts[2] < 0.02);
}

#[test]
fn cache_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DistCache::new(dir.path());
    let s = build_b_series(15, 15).unwrap();
    let t = dist_table(&s, 15).unwrap();
    cache.store(&t).unwrap();
    let back = cache.load(15).unwrap().unwrap();
    assert_eq!(back, t);
    let again = cache.get_or_compute(15, || panic!("should hit the cache")).unwrap();
    assert_eq!(again.to_csv(), t.to_csv());
    assert!(cache.load(16).unwrap().is_none());
    let parsed = DistTable::from_csv(&t.to_csv(), Provenance::GeneratingFunction).unwrap();
    assert_eq!(parsed, t);
}
