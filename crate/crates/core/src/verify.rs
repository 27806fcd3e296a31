//! The acceptance checks, runnable from tests and from the command line.
//!
//! Every report line is a pure function of the configuration: no timings,
//! no thread-count dependence.

use std::fmt;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    count_saddles, k_limit, limit_pv_integral, taylor_sigma, trace_descent, Branch, DescentOptions, LimitQuery,
    PhaseParams,
};
use crate::contour::{convergence_row, pnk_contour, ContourParams};
use crate::exactgf::{build_b_series, dist_table, pnk_exact, XSeries};
use crate::numcore::{rat, rat_int, rat_to_f64, Rational};
use crate::perms::{
    brute_force_distribution, longest_alternating_dp, longest_alternating_exhaustive, longest_alternating_linear,
    sample_summary,
};
use crate::Result;

pub const DEFAULT_SEED: u64 = 20_240_601;
/// Number of acceptance criteria run by [`Verifier::run_all`].
pub const CRITERIA: u8 = 10;
/// Fluctuation grid for the convergence criterion.
pub const CONVERGENCE_T: [f64; 5] = [-1.5, -0.75, 0.0, 0.75, 1.5];
pub const CONVERGENCE_N: [usize; 3] = [256, 1024, 4096];
/// Largest `n` answered from the generating function in convergence tables.
pub const EXACT_LIMIT_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Monte Carlo trials for the moment criterion.
    pub mc_trials: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, mc_trials: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{status}] {}: {}", self.id, self.name, self.detail)
    }
}

/// One line of the convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub t: f64,
    pub k: usize,
    pub p: f64,
    pub k_limit: f64,
    pub error: f64,
    pub source: String,
}

/// `(n, t, k, p_n(k), K(t), |p - K|)` over the grid, exact rationals for
/// `n <= 64` and contour integrals beyond. Rows come back sorted by `(n, t)`.
pub fn convergence_table(
    ns: &[usize],
    ts: &[f64],
    params: &ContourParams,
    series: Option<&XSeries>,
) -> Result<Vec<ConvergenceRow>> {
    let jobs: Vec<(usize, f64)> = ns.iter().flat_map(|&n| ts.iter().map(move |&t| (n, t))).collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, t)| {
            let q = LimitQuery::new(t)?;
            let (k, p, source) = match series {
                Some(s) if n <= EXACT_LIMIT_N.min(s.n_max()) => {
                    let k = crate::contour::scaled_k(n, t);
                    (k, rat_to_f64(&pnk_exact(s, n, k as i64)?), "exact")
                }
                _ => {
                    let (k, p) = convergence_row(n, t, params)?;
                    (k, p, "contour")
                }
            };
            let kl = k_limit(q);
            Ok(ConvergenceRow { n, t, k, p, k_limit: kl, error: (p - kl).abs(), source: source.into() })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (a.n, a.t).partial_cmp(&(b.n, b.t)).expect("finite grid"));
    Ok(rows)
}

/// `max_t |p_n(k(t)) - K(t)|` for each `n` in the study.
pub fn max_errors(rows: &[ConvergenceRow], ns: &[usize]) -> Vec<f64> {
    ns.iter()
        .map(|&n| rows.iter().filter(|r| r.n == n).map(|r| r.error).fold(0.0, f64::max))
        .collect()
}

pub struct Verifier {
    cfg: VerifyConfig,
    series: OnceLock<Result<XSeries, String>>,
}

fn outcome(id: u8, name: &str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome { id, name: name.into(), passed, detail }
}

fn failed(id: u8, name: &str, err: impl fmt::Display) -> CriterionOutcome {
    outcome(id, name, false, format!("error: {err}"))
}

macro_rules! attempt {
    ($id:expr, $name:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return failed($id, $name, err),
        }
    };
}

impl Verifier {
    pub fn new(cfg: VerifyConfig) -> Self {
        Self { cfg, series: OnceLock::new() }
    }

    /// The `N = D = 64` series, built once and shared by every criterion.
    pub fn series(&self) -> std::result::Result<&XSeries, String> {
        self.series
            .get_or_init(|| build_b_series(EXACT_LIMIT_N, EXACT_LIMIT_N).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: u8) -> CriterionOutcome {
        match id {
            1 => self.oracle_equality(),
            2 => self.rho_elimination(),
            3 => self.subsequence_oracles(),
            4 => self.contour_anchor(),
            5 => self.taylor_coefficients(),
            6 => self.saddle_count(),
            7 => self.descent_path(),
            8 => self.pv_identity(),
            9 => self.gaussian_convergence(),
            10 => self.moments(),
            _ => failed(id, "unknown", "no such criterion"),
        }
    }

    pub fn run_all(&self) -> Vec<CriterionOutcome> {
        (1..=CRITERIA).map(|id| self.run(id)).collect()
    }

    fn oracle_equality(&self) -> CriterionOutcome {
        const NAME: &str = "generating function equals brute force, n <= 8";
        let s = attempt!(1, NAME, self.series());
        for n in 0..=8 {
            let gf = attempt!(1, NAME, dist_table(s, n));
            let bf = attempt!(1, NAME, brute_force_distribution(n));
            if gf.cdf() != bf.cdf() {
                return outcome(1, NAME, false, format!("row n={n} differs"));
            }
        }
        outcome(1, NAME, true, "45 exact entries agree".into())
    }

    fn rho_elimination(&self) -> CriterionOutcome {
        const NAME: &str = "rho-component vanishes through x^64";
        let s = attempt!(2, NAME, self.series());
        match s.coeffs().iter().position(|c| !c.b.is_zero()) {
            None => outcome(2, NAME, true, format!("{} coefficients checked", s.coeffs().len())),
            Some(m) => outcome(2, NAME, false, format!("x^{m} has a nonzero rho-part")),
        }
    }

    fn subsequence_oracles(&self) -> CriterionOutcome {
        const NAME: &str = "subsequence oracles agree";
        let mut all: Vec<u32> = (1..=6).collect();
        let mut count_s6 = 0;
        let mut bad = None;
        permute_all(&mut all, 0, &mut |w| {
            count_s6 += 1;
            if bad.is_none() && Ok(longest_alternating_dp(w)) != longest_alternating_exhaustive(w).map_err(|_| ()) {
                bad = Some(w.to_vec());
            }
        });
        if let Some(w) = bad {
            return outcome(3, NAME, false, format!("dp vs exhaustive differ on {w:?}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        for _ in 0..200 {
            let n = rng.random_range(1..=10u32);
            let mut w: Vec<u32> = (1..=n).collect();
            w.shuffle(&mut rng);
            let ex = attempt!(3, NAME, longest_alternating_exhaustive(&w));
            if longest_alternating_dp(&w) != ex {
                return outcome(3, NAME, false, format!("dp vs exhaustive differ on {w:?}"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(1);
        for _ in 0..100_000 {
            let n = rng.random_range(2..=50u32);
            let mut w: Vec<u32> = (1..=n).collect();
            w.shuffle(&mut rng);
            if longest_alternating_linear(&w) != longest_alternating_dp(&w) {
                return outcome(3, NAME, false, format!("linear vs dp differ on {w:?}"));
            }
        }
        outcome(3, NAME, true, format!("S_6 ({count_s6}), 200 exhaustive, 100000 linear-vs-dp"))
    }

    fn contour_anchor(&self) -> CriterionOutcome {
        const NAME: &str = "contour integral reproduces exact values";
        let s = attempt!(4, NAME, self.series());
        let points = [(1, 1), (5, 3), (8, 5), (20, 13), (40, 27), (64, 43)];
        let defaults = ContourParams::default();
        let mut worst_exact: f64 = 0.0;
        let mut worst_spread: f64 = 0.0;
        for (n, k) in points {
            let want = rat_to_f64(&attempt!(4, NAME, pnk_exact(s, n, k as i64)));
            let got = attempt!(4, NAME, pnk_contour(n, k, &defaults)).value;
            worst_exact = worst_exact.max((got - want).abs());
            let mut vals = vec![got];
            for a in [0.5, 1.0, 2.0] {
                vals.push(attempt!(4, NAME, pnk_contour(n, k, &ContourParams::vertical(a))).value);
            }
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            worst_spread = worst_spread.max(hi - lo);
        }
        let passed = worst_exact <= 1e-9 && worst_spread <= 2e-9;
        outcome(4, NAME, passed, format!("max |diff| {worst_exact:.2e} (<= 1e-9), max spread over a {worst_spread:.2e} (<= 2e-9)"))
    }

    fn taylor_coefficients(&self) -> CriterionOutcome {
        const NAME: &str = "exact Taylor coefficients of the phase";
        for alpha in [rat(0, 1), rat(1, 3), rat(2, 3), rat(1, 1), rat(-5, 7), rat(13, 4)] {
            let cs = attempt!(5, NAME, taylor_sigma(&alpha, 4));
            let c2 = &alpha / rat_int(2) - rat(1, 3);
            let c4 = -&alpha / rat_int(12) + rat(7, 90);
            if cs[0] != c2 || cs[1] != c4 {
                return outcome(5, NAME, false, format!("alpha={alpha}: got c2={}, c4={}", cs[0], cs[1]));
            }
        }
        let cs = attempt!(5, NAME, taylor_sigma(&rat(2, 3), 4));
        let passed = cs[0] == Rational::from_integer(0.into()) && cs[1] == rat(1, 45);
        outcome(5, NAME, passed, format!("at alpha=2/3: c2={}, c4={}", cs[0], cs[1]))
    }

    fn saddle_count(&self) -> CriterionOutcome {
        const NAME: &str = "three saddles, two poles";
        let mut parts = Vec::new();
        let mut passed = true;
        for (label, alpha) in [("0.4", 0.4), ("0.5", 0.5), ("2/3", 2.0 / 3.0), ("0.8", 0.8)] {
            let r = attempt!(6, NAME, count_saddles(&PhaseParams::new(alpha)));
            passed &= r.zero_count == 3 && r.pole_count == 2;
            parts.push(format!("alpha={label}: zeros {} poles {}", r.zero_count, r.pole_count));
            if label == "2/3" {
                let ok = r.saddles.len() == 1 && r.saddles[0].location.norm() < 1e-6 && r.saddles[0].multiplicity == 3;
                passed &= ok;
                let desc: Vec<String> = r
                    .saddles
                    .iter()
                    .map(|s| format!("({:.1e},{:.1e}) x{}", s.location.re, s.location.im, s.multiplicity))
                    .collect();
                parts.push(format!("saddles at 2/3: {}", desc.join(" ")));
            }
        }
        outcome(6, NAME, passed, parts.join("; "))
    }

    fn descent_path(&self) -> CriterionOutcome {
        const NAME: &str = "steepest-descent curves from the degenerate saddle";
        let mut passed = true;
        let mut parts = Vec::new();
        for b in [Branch::Upper, Branch::Lower] {
            let p = attempt!(7, NAME, trace_descent(b, &DescentOptions::default()));
            let im = p.max_abs_im_sigma();
            let dec = p.re_sigma_strictly_decreasing();
            let dir = p.initial_direction().unwrap_or(f64::NAN);
            let end = p.endpoint();
            let ok = im <= 1e-6
                && dec
                && (dir - b.angle()).abs() <= 0.05
                && end.im.abs() >= std::f64::consts::PI - 1e-3
                && end.re >= 0.0;
            passed &= ok;
            parts.push(format!(
                "{}: {} pts, max|Im s| {im:.1e}, dir {dir:.4}, end ({:.2e}, {:.6})",
                if b == Branch::Upper { "+pi/4" } else { "-pi/4" },
                p.points.len(),
                end.re,
                end.im
            ));
        }
        outcome(7, NAME, passed, parts.join("; "))
    }

    fn pv_identity(&self) -> CriterionOutcome {
        const NAME: &str = "principal-value integral equals K(t)";
        let mut worst: f64 = 0.0;
        for t in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let q = attempt!(8, NAME, LimitQuery::new(t));
            let pv = attempt!(8, NAME, limit_pv_integral(q));
            worst = worst.max((pv - k_limit(q)).abs());
        }
        let k0 = k_limit(LimitQuery { t: 0.0 });
        outcome(8, NAME, worst <= 1e-8 && k0 == 0.5, format!("max |PV - K| {worst:.2e}, K(0) = {k0}"))
    }

    fn gaussian_convergence(&self) -> CriterionOutcome {
        const NAME: &str = "p_n(2n/3 + t sqrt n) approaches K(t)";
        let rows = attempt!(9, NAME, convergence_table(&CONVERGENCE_N, &CONVERGENCE_T, &ContourParams::default(), None));
        let e = max_errors(&rows, &CONVERGENCE_N);
        let passed = e[2] <= 0.05 && e[0] >= e[1] && e[1] >= e[2];
        outcome(9, NAME, passed, format!("E(256) {:.5}, E(1024) {:.5}, E(4096) {:.5}", e[0], e[1], e[2]))
    }

    fn moments(&self) -> CriterionOutcome {
        const NAME: &str = "variance ~ 8n/45 and mean ~ 2n/3";
        let s = attempt!(10, NAME, self.series());
        let table = attempt!(10, NAME, dist_table(s, 60));
        let (_, var) = table.moments();
        let var_n = (var / rat_int(60)).to_f64().unwrap_or(f64::NAN);
        let target = 8.0 / 45.0;
        let exact_ok = ((var_n - target) / target).abs() <= 0.10;
        let mc = attempt!(10, NAME, sample_summary(1000, self.cfg.mc_trials, self.cfg.seed));
        let (mean_n, mc_var_n) = (mc.mean / 1000.0, mc.variance / 1000.0);
        let mc_ok = (0.664..=0.670).contains(&mean_n) && (0.151..=0.204).contains(&mc_var_n);
        outcome(
            10,
            NAME,
            exact_ok && mc_ok,
            format!(
                "exact var/60 {var_n:.6}; Monte Carlo n=1000 m={} mean/n {mean_n:.5} var/n {mc_var_n:.5}",
                self.cfg.mc_trials
            ),
        )
    }
}

fn permute_all(a: &mut Vec<u32>, i: usize, visit: &mut impl FnMut(&[u32])) {
    if i == a.len() {
        visit(a);
        return;
    }
    for j in i..a.len() {
        a.swap(i, j);
        permute_all(a, i + 1, visit);
        a.swap(i, j);
    }
}

/// Render the per-criterion lines plus a summary line.
pub fn render_report(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&o.to_string());
        out.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        let v = Verifier::new(VerifyConfig::default());
        for id in [5, 8] {
            let o = v.run(id);
            assert!(o.passed, "{o}");
        }
        assert!(!v.run(42).passed);
    }

    #[test]
    fn permute_all_visits_720() {
        let mut a: Vec<u32> = (1..=6).collect();
        let mut seen = std::collections::HashSet::new();
        permute_all(&mut a, 0, &mut |w| {
            seen.insert(w.to_vec());
        });
        assert_eq!(seen.len(), 720);
    }

    #[test]
    fn report_lines() {
        let o = vec![outcome(1, "x", true, "ok".into()), outcome(2, "y", false, "bad".into())];
        let r = render_report(&o);
        assert_eq!(r, "criterion  1 [PASS] x: ok\ncriterion  2 [FAIL] y: bad\n1/2 criteria passed\n");
    }

    #[test]
    fn convergence_table_uses_exact_rows_when_available() {
        let s = build_b_series(12, 12).unwrap();
        let rows = convergence_table(&[9, 12], &[0.0], &ContourParams::default(), Some(&s)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.source == "exact"));
        assert_eq!(rows[0].k, 6);
        let bf = brute_force_distribution(9).unwrap();
        assert_eq!(rows[0].p, rat_to_f64(&bf.cdf()[6]));
    }
}
