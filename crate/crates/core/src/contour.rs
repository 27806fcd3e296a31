//! `p_n(k)` from the residue-summed contour integral
//!
//! ```text
//! p_n(k) = 1/(pi i) * integral_C cosh^k(u) tanh^n(u) sum_j (u + 2 j pi i)^(-n-1) du
//! ```
//!
//! where `C` runs from `a - pi i` to `a + pi i` to the right of the poles at
//! `0` and `+-pi i/2`. The integrand is `2 pi i`-periodic, so parametrizing
//! `C` by its imaginary part and applying the trapezoid rule over one period
//! converges geometrically.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numcore::{ensure_finite, ComplexVal, PeriodicTrapezoid};
use crate::{invalid, Error, Result};

/// Node cap for the trapezoid rule.
pub const MAX_NODES: usize = 1 << 16;
/// Cap on the explicit j-sum radius.
pub const MAX_TRUNCATION: usize = 64;

/// Even Bernoulli numbers `B_2, B_4, ..., B_16`.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourShape {
    /// Straight segment `Re u = a`.
    Vertical,
    /// `Re u = sqrt(a^2 + 2 (1 - cos(Im u)))`: crosses the real axis at `a`
    /// and leaves it at roughly +-45 degrees, like the steepest-descent
    /// curve through the saddle at 0.
    Hyperbolic,
    /// Per query, pick `a` and the slope `s` of
    /// `Re u = sqrt(a^2 + 2 s^2 (1 - cos(Im u)))` from a fixed candidate grid,
    /// minimizing the sampled peak of `|integrand|` (and with it the
    /// cancellation in the quadrature). `ContourParams::a` is unused.
    Adaptive,
}

/// Candidate real-axis crossings and slopes for [`ContourShape::Adaptive`],
/// larger crossings first so ties favour faster trapezoid convergence.
const ADAPTIVE_A: [f64; 9] = [1.0, 0.6, 0.4, 0.3, 0.2, 0.12, 0.07, 0.04, 0.02];
const ADAPTIVE_SLOPE: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25];
const ADAPTIVE_SAMPLES: usize = 256;

/// Concrete contour `Re u = sqrt(a^2 + 2 slope^2 (1 - cos(Im u)))`, one period
/// in `Im u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPath {
    pub a: f64,
    pub slope: f64,
}

impl ContourPath {
    /// Contour point and derivative `du/dtheta` at `Im u = theta`.
    pub fn point(&self, theta: f64) -> (ComplexVal, ComplexVal) {
        if self.slope == 0.0 {
            return (Complex64::new(self.a, theta), Complex64::new(0.0, 1.0));
        }
        let s2 = self.slope * self.slope;
        let c = (self.a * self.a + 2.0 * s2 * (1.0 - theta.cos())).sqrt();
        (Complex64::new(c, theta), Complex64::new(s2 * theta.sin() / c, 1.0))
    }

    /// Largest `Re log |cosh^k tanh^n (u + 2 j pi i)^(-n-1)|` over a uniform
    /// sample of the path (nearest `j` only).
    fn peak_log_magnitude(&self, n: usize, k: usize) -> f64 {
        let two_pi = 2.0 * PI;
        (0..ADAPTIVE_SAMPLES)
            .map(|i| {
                let theta = -PI + two_pi * i as f64 / ADAPTIVE_SAMPLES as f64;
                let (u, _) = self.point(theta);
                let nearest = u.norm().min((u - Complex64::new(0.0, two_pi.copysign(theta))).norm());
                (k as f64 * u.cosh().ln() + n as f64 * u.tanh().ln()).re - (n + 1) as f64 * nearest.ln()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest trapezoid grid that resolves the singularities next to the
    /// path. `tanh^n cosh^k` has poles of order `n - k` at `+-pi i/2`, at
    /// distance `d` from the path; their Fourier content peaks near
    /// frequency `(n - k)/d`, and coarser grids can alias it consistently
    /// enough to fake convergence.
    pub fn min_nodes(&self, n: usize, k: usize) -> usize {
        let (u, _) = self.point(PI / 2.0);
        let d = u.re;
        let order = n.saturating_sub(k) as f64;
        let need = (4.0 * order / d).max(4.0 / self.a).ceil() as usize;
        need.next_power_of_two()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourParams {
    /// Real-axis crossing of the contour.
    pub a: f64,
    pub shape: ContourShape,
    /// Initial trapezoid node count (doubled adaptively).
    pub nodes: usize,
    /// Initial j-sum radius (doubled adaptively).
    pub truncation: usize,
    /// Target absolute error.
    pub tol: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        Self { a: 1.0, shape: ContourShape::Adaptive, nodes: 64, truncation: 4, tol: 1e-11 }
    }
}

impl ContourParams {
    pub fn vertical(a: f64) -> Self {
        Self { a, shape: ContourShape::Vertical, ..Self::default() }
    }

    pub fn hyperbolic(a: f64) -> Self {
        Self { a, shape: ContourShape::Hyperbolic, ..Self::default() }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(invalid(format!("contour abscissa must be > 0, got {}", self.a)));
        }
        if self.nodes < 8 || self.nodes > MAX_NODES {
            return Err(invalid(format!("node count must be in 8..={MAX_NODES}, got {}", self.nodes)));
        }
        if self.truncation < 1 || self.truncation > MAX_TRUNCATION {
            return Err(invalid(format!(
                "j-sum truncation must be in 1..={MAX_TRUNCATION}, got {}",
                self.truncation
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid(format!("tolerance must be > 0, got {}", self.tol)));
        }
        Ok(())
    }

    /// The contour used for `p_n(k)`.
    pub fn path_for(&self, n: usize, k: usize) -> ContourPath {
        match self.shape {
            ContourShape::Vertical => ContourPath { a: self.a, slope: 0.0 },
            ContourShape::Hyperbolic => ContourPath { a: self.a, slope: 1.0 },
            ContourShape::Adaptive => {
                let scored: Vec<(f64, usize, ContourPath)> = ADAPTIVE_A
                    .iter()
                    .flat_map(|&a| ADAPTIVE_SLOPE.iter().map(move |&slope| ContourPath { a, slope }))
                    .map(|p| (p.peak_log_magnitude(n, k), p.min_nodes(n, k), p))
                    .collect();
                let best_peak = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
                // Within a factor 10 of the smallest peak, take the cheapest grid.
                scored
                    .into_iter()
                    .filter(|s| s.0 <= best_peak + std::f64::consts::LN_10)
                    .min_by(|x, y| x.1.cmp(&y.1).then(x.0.total_cmp(&y.0)))
                    .map(|s| s.2)
                    .unwrap_or(ContourPath { a: self.a, slope: 0.0 })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub value: f64,
    /// Imaginary part of the raw estimate, discarded from `value`.
    pub imag_residual: f64,
    pub nodes_used: usize,
    pub truncation_used: usize,
    pub path: ContourPath,
    /// Bound on the error left by the truncated j-sum after tail correction.
    pub tail_bound: f64,
}

/// Partial sum `sum_{|j| <= J} (u + 2 j pi i)^(-n-1)`, each term computed as
/// `exp(-(n+1) Log(u + 2 j pi i))` (exact for the integer exponent).
pub fn j_sum(u: ComplexVal, n: usize, truncation: usize) -> Result<ComplexVal> {
    if n == 0 {
        return Err(invalid("j_sum needs n >= 1"));
    }
    let m = (n + 1) as f64;
    let jj = truncation as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -jj..=jj {
        let z = u + Complex64::new(0.0, 2.0 * PI * j as f64);
        if z.norm() < 1e-300 {
            return Err(Error::Pole { location: format!("u = {u} (j = {j})") });
        }
        acc += (-m * z.ln()).exp();
    }
    ensure_finite(acc, || format!("j_sum at u = {u}, n = {n}"))
}

/// j-sum in scaled form: the true value is `scaled * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
struct ScaledJSum {
    scaled: ComplexVal,
    log_scale: f64,
    /// Remainder bound for the tail correction, same scaling.
    tail_bound: f64,
}

/// Euler-Maclaurin estimate of `sum_{j >= start} (u + s 2 pi i j)^(-m)`
/// scaled by `exp(-log_scale)`, with `s = +-1`.
/// Returns `(value, remainder_bound)`.
fn tail_sum(u: ComplexVal, m: f64, start: usize, sign: f64, log_scale: f64) -> (ComplexVal, f64) {
    let step = Complex64::new(0.0, sign * 2.0 * PI);
    // u + s 2 pi i j = s 2 pi i (j + q0) with q0 = u / (s 2 pi i)
    let q = start as f64 + u / step;
    let log_pref = -m * (u + step * start as f64).ln() - log_scale;
    if log_pref.re < -740.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let pref = log_pref.exp();

    // sum_{j>=0} (j + q)^(-m) ~ q^(-m) [ q/(m-1) + 1/2 + sum_k B_2k/(2k)! (m)_{2k-1} q^(1-2k) ]
    let mut bracket = q / (m - 1.0) + 0.5;
    let mut poch = m;
    let mut q_pow = q.inv();
    let q2 = q * q;
    let mut fact = 2.0;
    let mut last = f64::INFINITY;
    let mut remainder = 0.0;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = i as f64 + 1.0;
        let term = q_pow * (b / fact * poch);
        let mag = term.norm();
        if mag >= last {
            remainder = mag;
            break;
        }
        bracket += term;
        last = mag;
        remainder = mag;
        poch *= (m + 2.0 * k - 1.0) * (m + 2.0 * k);
        q_pow /= q2;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    (pref * bracket, pref.norm() * remainder)
}

fn scaled_j_sum(u: ComplexVal, n: usize, truncation: usize) -> Result<ScaledJSum> {
    let m = (n + 1) as f64;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let nearest = [u, u + two_pi_i, u - two_pi_i]
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if nearest < 1e-300 {
        return Err(Error::Pole { location: format!("u = {u}") });
    }
    let log_scale = -m * nearest.ln();
    let jj = truncation as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -jj..=jj {
        let z = u + two_pi_i * j as f64;
        acc += (-m * z.ln() - log_scale).exp();
    }
    let (up, up_err) = tail_sum(u, m, truncation + 1, 1.0, log_scale);
    let (down, down_err) = tail_sum(u, m, truncation + 1, -1.0, log_scale);
    Ok(ScaledJSum { scaled: acc + up + down, log_scale, tail_bound: up_err + down_err })
}

struct Integrand {
    n: usize,
    k: usize,
    path: ContourPath,
    truncation: usize,
}

impl Integrand {
    /// `(value, |cosh^k tanh^n du/dtheta| * tail bound)` at `Im u = theta`.
    fn eval(&self, theta: f64) -> Result<(ComplexVal, f64)> {
        let (u, du) = self.path.point(theta);
        let js = scaled_j_sum(u, self.n, self.truncation)?;
        let log_g = self.k as f64 * u.cosh().ln() + self.n as f64 * u.tanh().ln() + js.log_scale;
        let g = log_g.exp() * du;
        let value = ensure_finite(g * js.scaled, || format!("contour integrand at u = {u}"))?;
        Ok((value, g.norm() * js.tail_bound))
    }
}

/// Numerical `p_n(k)` with adaptive node count and j-sum radius.
pub fn pnk_contour(n: usize, k: usize, params: &ContourParams) -> Result<ContourResult> {
    params.validate()?;
    if n == 0 {
        return Err(invalid("the contour formula is used for n >= 1 only"));
    }
    let scale = Complex64::new(0.0, PI).inv();
    let path = params.path_for(n, k);
    let mut truncation = params.truncation;
    loop {
        let integrand = Integrand { n, k, path, truncation };
        let start = params.nodes.max(path.min_nodes(n, k));
        if start > MAX_NODES {
            return Err(Error::NoConvergence {
                what: format!("p_{n}({k}) needs more than {MAX_NODES} nodes on {path:?}"),
                estimate: f64::NAN,
                residual: f64::NAN,
            });
        }
        let mut rule = PeriodicTrapezoid::new(-PI, PI, start)?;
        let worst_tail = Cell::new(0.0f64);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let f = |theta: f64| match integrand.eval(theta) {
            Ok((v, tail)) => {
                worst_tail.set(worst_tail.get().max(tail));
                v
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(f64::NAN, f64::NAN)
            }
        };
        // Surface the integrand's own error rather than the generic non-finite one.
        let lift = |e: Error| failure.borrow_mut().take().unwrap_or(e);
        let mut prev = rule.refine(f).map_err(lift)? * scale;
        // Accept only after two consecutive doublings agree.
        let mut agreed = false;
        let estimate = loop {
            if rule.nodes() * 2 > MAX_NODES {
                return Err(Error::NoConvergence {
                    what: format!("trapezoid for p_{n}({k}) exceeded {MAX_NODES} nodes"),
                    estimate: prev.re,
                    residual: prev.im.abs(),
                });
            }
            let cur = rule.refine(f).map_err(lift)? * scale;
            let close = (cur - prev).norm() < params.tol / 4.0;
            if close && agreed {
                break cur;
            }
            agreed = close;
            prev = cur;
        };
        // p = (1/(pi i)) * integral over a 2 pi range in theta.
        let tail_bound = 2.0 * worst_tail.get();
        if tail_bound < params.tol / 10.0 {
            if estimate.im.abs() > params.tol {
                return Err(Error::NoConvergence {
                    what: format!("imaginary residual for p_{n}({k})"),
                    estimate: estimate.re,
                    residual: estimate.im.abs(),
                });
            }
            return Ok(ContourResult {
                value: estimate.re,
                imag_residual: estimate.im.abs(),
                nodes_used: rule.nodes(),
                truncation_used: truncation,
                path,
                tail_bound,
            });
        }
        if truncation * 2 > MAX_TRUNCATION {
            return Err(Error::NoConvergence {
                what: format!("j-sum truncation for p_{n}({k}) exceeded {MAX_TRUNCATION}"),
                estimate: estimate.re,
                residual: tail_bound,
            });
        }
        truncation *= 2;
    }
}

/// `k = floor(2n/3 + t sqrt(n))` clamped to `[0, n]`.
pub fn scaled_k(n: usize, t: f64) -> usize {
    let raw = (2.0 * n as f64 / 3.0 + t * (n as f64).sqrt()).floor();
    if raw <= 0.0 {
        0
    } else {
        (raw as usize).min(n)
    }
}

/// `(k, p_n(k))` at the fluctuation scale `k = 2n/3 + t sqrt(n)`.
pub fn convergence_row(n: usize, t: f64, params: &ContourParams) -> Result<(usize, f64)> {
    if n == 0 {
        return Err(invalid("convergence_row needs n >= 1"));
    }
    if !t.is_finite() {
        return Err(invalid(format!("t must be finite, got {t}")));
    }
    let k = scaled_k(n, t);
    Ok((k, pnk_contour(n, k, params)?.value))
}

/// One batch request: either an explicit `k` or a fluctuation `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BatchQuery {
    K { n: usize, k: usize },
    T { n: usize, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchRow {
    pub n: usize,
    pub k: usize,
    pub result: ContourResult,
}

/// Parse CSV with header containing `n` and one or both of `k`, `t`; each
/// row must fill exactly one of the two.
pub fn parse_batch_csv(text: &str) -> Result<Vec<BatchQuery>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let n_col = col("n").ok_or_else(|| invalid("batch CSV needs an `n` column"))?;
    let (k_col, t_col) = (col("k"), col("t"));
    if k_col.is_none() && t_col.is_none() {
        return Err(invalid("batch CSV needs a `k` or `t` column"));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let get = |c: Option<usize>| c.and_then(|i| rec.get(i)).filter(|s| !s.is_empty());
        let bad = |what: &str| invalid(format!("batch row {}: {what}", line + 1));
        let n: usize = get(Some(n_col)).ok_or_else(|| bad("missing n"))?.parse().map_err(|_| bad("bad n"))?;
        let q = match (get(k_col), get(t_col)) {
            (Some(k), None) => BatchQuery::K { n, k: k.parse().map_err(|_| bad("bad k"))? },
            (None, Some(t)) => BatchQuery::T { n, t: t.parse().map_err(|_| bad("bad t"))? },
            _ => return Err(bad("exactly one of k, t must be set")),
        };
        out.push(q);
    }
    Ok(out)
}

/// Evaluate a batch in parallel; rows come back in input order.
pub fn run_batch(queries: &[BatchQuery], params: &ContourParams) -> Result<Vec<BatchRow>> {
    queries
        .par_iter()
        .map(|q| {
            let (n, k) = match *q {
                BatchQuery::K { n, k } => (n, k),
                BatchQuery::T { n, t } => {
                    if !t.is_finite() {
                        return Err(invalid(format!("t must be finite, got {t}")));
                    }
                    (n, scaled_k(n, t))
                }
            };
            Ok(BatchRow { n, k, result: pnk_contour(n, k, params)? })
        })
        .collect()
}

/// CSV `n,k,p,imag_residual,M_used,J_used`.
pub fn batch_to_csv(rows: &[BatchRow]) -> String {
    let mut out = String::from("n,k,p,imag_residual,M_used,J_used\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.17e},{:.3e},{},{}\n",
            r.n, r.k, r.result.value, r.result.imag_residual, r.result.nodes_used, r.result.truncation_used
        ));
    }
    out
}
