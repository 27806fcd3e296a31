use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use super::phase::{principal_logs, sigma, sigma_prime, SERIES_RADIUS};
use crate::numcore::ComplexVal;
use crate::{invalid, Error, Result};

/// Exponent ratio at which the saddle at 0 degenerates (sigma ~ u^4/45).
pub const DEGENERATE_ALPHA: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Leaves 0 at `arg u = +pi/4`.
    #[serde(rename = "+pi/4")]
    Upper,
    /// Leaves 0 at `arg u = -pi/4`.
    #[serde(rename = "-pi/4")]
    Lower,
}

impl Branch {
    pub fn angle(self) -> f64 {
        match self {
            Branch::Upper => FRAC_PI_4,
            Branch::Lower => -FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Starting radius on the ray `arg u = +-pi/4`.
    pub r0: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Target `|Im sigma|` after each projection; a step is retried if it
    /// ends above this.
    pub im_tol: f64,
    /// Stop once `|Im u| >= pi - stop_gap`.
    pub stop_gap: f64,
    pub max_steps: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { r0: 1e-2, h_init: 1e-3, h_max: 0.02, im_tol: 1e-9, stop_gap: 1e-6, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentPath {
    pub branch: Branch,
    /// Cumulative polyline length from the first point.
    pub arclength: Vec<f64>,
    #[serde(with = "super::complex_pairs")]
    pub points: Vec<ComplexVal>,
    #[serde(with = "super::complex_pairs")]
    pub sigma: Vec<ComplexVal>,
}

impl DescentPath {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "re_u", "im_u", "re_sigma", "im_sigma"])?;
        for ((s, u), g) in self.arclength.iter().zip(&self.points).zip(&self.sigma) {
            w.write_record([s, &u.re, &u.im, &g.re, &g.im].map(|x| format!("{x:e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn max_abs_im_sigma(&self) -> f64 {
        self.sigma.iter().map(|s| s.im.abs()).fold(0.0, f64::max)
    }

    pub fn re_sigma_strictly_decreasing(&self) -> bool {
        self.sigma.windows(2).all(|w| w[1].re < w[0].re)
    }

    /// Direction of the first polyline segment.
    pub fn initial_direction(&self) -> Option<f64> {
        (self.points.len() >= 2).then(|| (self.points[1] - self.points[0]).arg())
    }

    pub fn endpoint(&self) -> ComplexVal {
        *self.points.last().expect("path is never empty")
    }
}

/// sigma continued analytically along a path: each log is kept on the
/// branch nearest its previous value instead of the principal one.
struct BranchTracker {
    alpha: f64,
    logs: (ComplexVal, ComplexVal),
}

fn nearest_branch(principal: ComplexVal, prev: ComplexVal) -> ComplexVal {
    let k = ((prev.im - principal.im) / TAU).round();
    principal + ComplexVal::new(0.0, k * TAU)
}

impl BranchTracker {
    fn new(alpha: f64) -> Self {
        Self { alpha, logs: (ComplexVal::new(0.0, 0.0), ComplexVal::new(0.0, 0.0)) }
    }

    /// Value at `u` without committing the branch choice.
    fn peek(&self, u: ComplexVal) -> Result<(ComplexVal, (ComplexVal, ComplexVal))> {
        if u.norm() < SERIES_RADIUS {
            // Inside the disc both logs stay near 0, so principal is continuous.
            return Ok((sigma(u, self.alpha)?, principal_logs_or_zero(u)?));
        }
        let (lc, lt) = principal_logs(u)?;
        let logs = (nearest_branch(lc, self.logs.0), nearest_branch(lt, self.logs.1));
        Ok((self.alpha * logs.0 + logs.1, logs))
    }

    fn commit(&mut self, logs: (ComplexVal, ComplexVal)) {
        self.logs = logs;
    }
}

fn principal_logs_or_zero(u: ComplexVal) -> Result<(ComplexVal, ComplexVal)> {
    if u.norm() == 0.0 {
        Ok((ComplexVal::new(0.0, 0.0), ComplexVal::new(0.0, 0.0)))
    } else {
        principal_logs(u)
    }
}

fn flow(u: ComplexVal, alpha: f64) -> Result<ComplexVal> {
    let g = sigma_prime(u, alpha)?;
    let mag = g.norm();
    if mag < 1e-14 {
        return Err(Error::Invariant(format!("unexpected stationary point of sigma near {u}")));
    }
    Ok(-g.conj() / mag)
}

/// One Newton correction transverse to the flow onto `Im sigma = 0`.
fn project(u: ComplexVal, s: ComplexVal, alpha: f64) -> Result<ComplexVal> {
    let g = sigma_prime(u, alpha)?;
    Ok(u - ComplexVal::new(0.0, s.im) * g.conj() / g.norm_sqr())
}

/// Steepest-descent curve of `Re sigma` (alpha = 2/3) from the degenerate
/// saddle at 0 along `branch`, until `|Im u|` reaches `pi`.
pub fn trace_descent(branch: Branch, opts: &DescentOptions) -> Result<DescentPath> {
    if !(opts.r0 > 0.0 && opts.r0 < SERIES_RADIUS) {
        return Err(invalid(format!("r0 must lie in (0, {SERIES_RADIUS}), got {}", opts.r0)));
    }
    if !(opts.h_init > 0.0 && opts.h_max >= opts.h_init && opts.im_tol > 0.0 && opts.stop_gap > 0.0) {
        return Err(invalid("descent step controls must be positive with h_max >= h_init"));
    }
    let alpha = DEGENERATE_ALPHA;
    let target = PI - opts.stop_gap;
    let sign = branch.angle().signum();
    let mut tracker = BranchTracker::new(alpha);

    let mut u = ComplexVal::from_polar(opts.r0, branch.angle());
    let (mut s, logs) = tracker.peek(u)?;
    tracker.commit(logs);
    let mut points = vec![u];
    let mut sigmas = vec![s];
    let mut arclength = vec![0.0];
    let mut h = opts.h_init;

    for _ in 0..opts.max_steps {
        if u.im * sign >= target {
            return Ok(DescentPath { branch, arclength, points, sigma: sigmas });
        }
        // Near the endpoint pi*i the flow turns sharply; keep steps short.
        let to_pole = (u - ComplexVal::new(0.0, sign * PI)).norm();
        let h_cap = opts.h_max.min(0.3 * to_pole).min(0.5 * (PI - u.im * sign));
        let mut step = h.min(h_cap);
        let accepted = loop {
            let d1 = flow(u, alpha)?;
            let d2 = flow(u + step * d1, alpha)?;
            let mut v = u + step * 0.5 * (d1 + d2);
            let (mut sv, mut logs) = tracker.peek(v)?;
            for _ in 0..2 {
                if sv.im.abs() <= opts.im_tol * 1e-3 {
                    break;
                }
                v = project(v, sv, alpha)?;
                (sv, logs) = tracker.peek(v)?;
            }
            if sv.im.abs() <= opts.im_tol && sv.re < s.re {
                break Some((v, sv, logs));
            }
            step *= 0.5;
            if step < 1e-14 {
                break None;
            }
        };
        let Some((v, sv, logs)) = accepted else {
            return Err(Error::NoConvergence {
                what: format!("descent step from u={u}"),
                estimate: s.re,
                residual: s.im.abs(),
            });
        };
        tracker.commit(logs);
        let last = *arclength.last().expect("nonempty");
        arclength.push(last + (v - u).norm());
        points.push(v);
        sigmas.push(sv);
        u = v;
        s = sv;
        h = (step * 1.5).min(opts.h_max);
    }
    Err(Error::NoConvergence {
        what: format!("descent reached the step cap {} before |Im u| = pi", opts.max_steps),
        estimate: u.im,
        residual: PI - u.im.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_branches_satisfy_invariants() {
        for b in [Branch::Upper, Branch::Lower] {
            let p = trace_descent(b, &DescentOptions::default()).unwrap();
            assert!(p.max_abs_im_sigma() <= 1e-6, "{b:?}");
            assert!(p.re_sigma_strictly_decreasing(), "{b:?}");
            assert!((p.initial_direction().unwrap() - b.angle()).abs() < 0.05);
            let end = p.endpoint();
            assert!(end.im.abs() >= PI - 1e-6 && end.re >= 0.0, "{b:?} ends at {end}");
        }
    }

    #[test]
    fn branches_are_reflections() {
        let up = trace_descent(Branch::Upper, &DescentOptions::default()).unwrap();
        let lo = trace_descent(Branch::Lower, &DescentOptions::default()).unwrap();
        assert_eq!(up.points.len(), lo.points.len());
        for (a, b) in up.points.iter().zip(&lo.points) {
            assert!((a.conj() - b).norm() < 1e-6);
        }
    }

    #[test]
    fn sigma_along_path_is_the_continued_branch() {
        // Off the series disc the tracked value must still differentiate
        // like sigma: compare consecutive points against the flow length.
        let p = trace_descent(Branch::Upper, &DescentOptions::default()).unwrap();
        for w in p.sigma.windows(2) {
            assert!((w[1] - w[0]).norm() < 1.0, "branch jump {w:?}");
        }
    }

    #[test]
    fn csv_shape() {
        let p = trace_descent(Branch::Lower, &DescentOptions::default()).unwrap();
        let csv = p.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,re_u,im_u,re_sigma,im_sigma"));
        assert_eq!(lines.count(), p.points.len());
    }

    #[test]
    fn rejects_bad_options() {
        let bad = DescentOptions { r0: 0.0, ..Default::default() };
        assert!(trace_descent(Branch::Upper, &bad).is_err());
    }
}
