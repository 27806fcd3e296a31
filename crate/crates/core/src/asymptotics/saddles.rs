use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::{sigma_prime, sigma_second};
use crate::numcore::ComplexVal;
use crate::{invalid, Error, Result};

/// Phase exponent ratio and the counting rectangle
/// `|Re u| <= R`, `|Im u| <= pi - delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub alpha: f64,
    pub half_width: f64,
    pub delta: f64,
}

impl Default for PhaseParams {
    fn default() -> Self {
        Self { alpha: 2.0 / 3.0, half_width: 5.0, delta: 0.2 }
    }
}

impl PhaseParams {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(invalid(format!("region half-width must be positive, got {}", self.half_width)));
        }
        // The region must keep +-i pi/2 inside and +-i pi outside.
        if !(self.delta > 0.0 && self.delta < FRAC_PI_2) {
            return Err(invalid(format!("delta must lie in (0, pi/2), got {}", self.delta)));
        }
        Ok(())
    }

    fn top(&self) -> f64 {
        PI - self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Saddle {
    #[serde(with = "super::complex_pair")]
    pub location: ComplexVal,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    pub alpha: f64,
    pub half_width: f64,
    pub delta: f64,
    pub winding: i64,
    pub pole_count: i64,
    pub zero_count: i64,
    pub saddles: Vec<Saddle>,
}

impl SaddleReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

const SAMPLES_PER_UNIT: f64 = 400.0;
const MAX_ARG_STEP: f64 = PI / 4.0;
const CAUCHY_NODES: usize = 64;
const CAUCHY_RADIUS: f64 = 0.05;
const MULTIPLICITY_THRESHOLD: f64 = 1e-6;

/// Closed boundary polyline of the rectangle, counterclockwise.
fn boundary(p: &PhaseParams) -> Vec<ComplexVal> {
    let (r, top) = (p.half_width, p.top());
    let corners = [
        ComplexVal::new(r, -top),
        ComplexVal::new(r, top),
        ComplexVal::new(-r, top),
        ComplexVal::new(-r, -top),
    ];
    let mut pts = Vec::new();
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let m = ((b - a).norm() * SAMPLES_PER_UNIT).ceil() as usize;
        pts.extend((0..m).map(|j| a + (b - a) * (j as f64 / m as f64)));
    }
    pts
}

/// Change of `arg sigma'` along the segment `a -> b`, bisecting until
/// every step turns by less than `MAX_ARG_STEP`.
fn arg_change(a: ComplexVal, b: ComplexVal, alpha: f64, depth: usize) -> Result<f64> {
    let (fa, fb) = (sigma_prime(a, alpha)?, sigma_prime(b, alpha)?);
    let d = (fb / fa).arg();
    if d.abs() < MAX_ARG_STEP {
        return Ok(d);
    }
    if depth == 0 {
        return Err(Error::Invariant(format!("argument of sigma' jumps by {d:.3} between {a} and {b}")));
    }
    let mid = (a + b) * 0.5;
    Ok(arg_change(a, mid, alpha, depth - 1)? + arg_change(mid, b, alpha, depth - 1)?)
}

fn winding(p: &PhaseParams) -> Result<(i64, f64)> {
    let pts = boundary(p);
    let n = pts.len();
    let min_abs = pts
        .par_iter()
        .map(|&u| sigma_prime(u, p.alpha).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let steps = (0..n)
        .into_par_iter()
        .map(|i| arg_change(pts[i], pts[(i + 1) % n], p.alpha, 30))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = steps.iter().sum();
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::Invariant(format!("non-integer winding {w}")));
    }
    Ok((rounded as i64, min_abs))
}

/// `f^{(d)}(z0) / d!` for `d = 0..count` from a Cauchy integral on a circle.
fn cauchy_taylor(
    f: impl Fn(ComplexVal) -> Result<ComplexVal>,
    z0: ComplexVal,
    radius: f64,
    count: usize,
) -> Result<Vec<ComplexVal>> {
    let m = CAUCHY_NODES;
    let vals = (0..m)
        .map(|j| f(z0 + ComplexVal::from_polar(radius, 2.0 * PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..count)
        .map(|d| {
            let s: ComplexVal = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * ComplexVal::from_polar(1.0, -2.0 * PI * (j * d) as f64 / m as f64))
                .sum();
            s / (m as f64 * radius.powi(d as i32))
        })
        .collect())
}

/// Smallest `d` with `|sigma'^{(d)}(z0)| > 1e-6`.
fn multiplicity(z0: ComplexVal, alpha: f64) -> Result<usize> {
    let coeffs = cauchy_taylor(|u| sigma_prime(u, alpha), z0, CAUCHY_RADIUS, 8)?;
    let mut fact = 1.0;
    for (d, c) in coeffs.iter().enumerate() {
        if d > 0 {
            fact *= d as f64;
        }
        if c.norm() * fact > MULTIPLICITY_THRESHOLD {
            return Ok(d);
        }
    }
    Err(Error::Invariant(format!("sigma' vanishes to order >= 8 at {z0}")))
}

/// Number of zeros of sigma' inside the small circle around `z0`
/// (argument principle on the Cauchy nodes).
fn zeros_near(z0: ComplexVal, alpha: f64) -> Result<usize> {
    let m = CAUCHY_NODES;
    let vals = (0..m)
        .map(|j| sigma_prime(z0 + ComplexVal::from_polar(CAUCHY_RADIUS, 2.0 * PI * j as f64 / m as f64), alpha))
        .collect::<Result<Vec<_>>>()?;
    let turn: f64 = (0..m).map(|j| (vals[(j + 1) % m] / vals[j]).arg()).sum();
    Ok((turn / (2.0 * PI)).round().max(0.0) as usize)
}

/// Move `z0` to the centroid of the `m` zeros clustered around it: for a
/// local expansion `a_m w^m + a_{m-1} w^{m-1} + ...` the zeros sum to
/// `-a_{m-1}/a_m`. Newton's method stalls far from a multiple zero; this
/// does not.
fn recenter(mut z0: ComplexVal, alpha: f64) -> Result<(ComplexVal, usize)> {
    let m = zeros_near(z0, alpha)?;
    if m == 0 {
        return Ok((z0, 0));
    }
    for _ in 0..4 {
        let a = cauchy_taylor(|u| sigma_prime(u, alpha), z0, CAUCHY_RADIUS, m + 1)?;
        let shift = -a[m - 1] / (a[m] * m as f64);
        z0 += shift;
        if shift.norm() < 1e-15 {
            break;
        }
    }
    Ok((z0, m))
}

/// Poles of sigma' inside the region: candidates are the zeros of
/// `sinh u cosh u` other than 0, kept when the residue is nonzero.
fn pole_count(p: &PhaseParams) -> Result<i64> {
    let mut count = 0;
    let mut m = 1;
    while m as f64 * FRAC_PI_2 < p.top() {
        for sign in [1.0, -1.0] {
            let z = ComplexVal::new(0.0, sign * m as f64 * FRAC_PI_2);
            let res = cauchy_taylor(|u| sigma_prime(u, p.alpha).map(|v| v * (u - z)), z, CAUCHY_RADIUS, 1)?[0];
            if res.norm() > 1e-8 {
                count += 1;
            }
        }
        m += 1;
    }
    Ok(count)
}

fn inside(u: ComplexVal, p: &PhaseParams) -> bool {
    u.re.abs() <= p.half_width && u.im.abs() <= p.top()
}

fn newton(mut u: ComplexVal, alpha: f64) -> Option<ComplexVal> {
    for _ in 0..200 {
        let f = sigma_prime(u, alpha).ok()?;
        if f.norm() < 1e-15 {
            return Some(u);
        }
        let step = f / sigma_second(u, alpha).ok()?;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        u -= step;
        if u.norm() > 50.0 {
            return None;
        }
        if step.norm() < 1e-15 * u.norm().max(1.0) {
            return Some(u);
        }
    }
    sigma_prime(u, alpha).ok().filter(|f| f.norm() < 1e-12).map(|_| u)
}

fn locate_saddles(p: &PhaseParams) -> Result<Vec<Saddle>> {
    const GRID: usize = 21;
    let (r, top) = (p.half_width, p.top());
    let seeds: Vec<ComplexVal> = (0..GRID)
        .flat_map(|i| {
            (0..GRID).map(move |j| {
                let x = -r + 2.0 * r * (i as f64 + 0.5) / GRID as f64;
                let y = -top + 2.0 * top * (j as f64 + 0.5) / GRID as f64;
                ComplexVal::new(x, y)
            })
        })
        .collect();
    let found: Vec<ComplexVal> = seeds
        .par_iter()
        .filter_map(|&s| newton(s, p.alpha))
        .filter(|&u| inside(u, p))
        .collect();
    // Deduplicate in seed order so the report is reproducible.
    let mut clusters: Vec<ComplexVal> = Vec::new();
    for u in found {
        if !clusters.iter().any(|c| (c - u).norm() < 1e-3) {
            clusters.push(u);
        }
    }
    let mut saddles = Vec::with_capacity(clusters.len());
    for u in clusters {
        let (loc, _) = recenter(u, p.alpha)?;
        let loc = ComplexVal::new(clean(loc.re), clean(loc.im));
        if saddles.iter().any(|s: &Saddle| (s.location - loc).norm() < 1e-6) {
            continue;
        }
        let m = multiplicity(loc, p.alpha)?;
        saddles.push(Saddle { location: loc, multiplicity: m });
    }
    saddles.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(saddles)
}

/// Snap roundoff-level coordinates to zero (saddles sit on the axes).
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        0.0
    } else {
        x
    }
}

/// Zeros of sigma' in the region by the argument principle, plus their
/// locations and multiplicities.
pub fn count_saddles(params: &PhaseParams) -> Result<SaddleReport> {
    params.validate()?;
    let mut p = *params;
    let mut attempt = 0;
    let (w, _) = loop {
        let (w, min_abs) = winding(&p)?;
        if min_abs >= 1e-8 {
            break (w, min_abs);
        }
        attempt += 1;
        if attempt > 5 {
            return Err(Error::Invariant("region boundary keeps passing through a zero of sigma'".into()));
        }
        p.half_width += 0.1;
        p.delta *= 0.9;
    };
    let poles = pole_count(&p)?;
    Ok(SaddleReport {
        alpha: p.alpha,
        half_width: p.half_width,
        delta: p.delta,
        winding: w,
        pole_count: poles,
        zero_count: w + poles,
        saddles: locate_saddles(&p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_case_has_one_triple_saddle() {
        let r = count_saddles(&PhaseParams::new(2.0 / 3.0)).unwrap();
        assert_eq!((r.winding, r.pole_count, r.zero_count), (1, 2, 3));
        assert_eq!(r.saddles.len(), 1, "{:?}", r.saddles);
        assert_eq!(r.saddles[0].multiplicity, 3);
        assert!(r.saddles[0].location.norm() < 1e-6);
    }

    #[test]
    fn three_simple_saddles_off_the_degenerate_point() {
        for alpha in [0.4, 0.5, 0.8] {
            let r = count_saddles(&PhaseParams::new(alpha)).unwrap();
            assert_eq!((r.pole_count, r.zero_count), (2, 3), "alpha={alpha}");
            assert_eq!(r.saddles.len(), 3, "alpha={alpha}: {:?}", r.saddles);
            assert!(r.saddles.iter().all(|s| s.multiplicity == 1));
            let total: usize = r.saddles.iter().map(|s| s.multiplicity).sum();
            assert_eq!(total as i64, r.zero_count);
        }
    }

    #[test]
    fn saddles_are_symmetric() {
        let r = count_saddles(&PhaseParams::new(0.5)).unwrap();
        let locs: Vec<_> = r.saddles.iter().map(|s| s.location).collect();
        assert!(locs.iter().any(|u| u.norm() < 1e-10));
        for u in &locs {
            assert!(locs.iter().any(|v| (u + v).norm() < 1e-9), "{u} has no mirror");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(count_saddles(&PhaseParams::new(1.5)).is_err());
        assert!(count_saddles(&PhaseParams { delta: 2.0, ..Default::default() }).is_err());
    }

    #[test]
    fn report_json_has_pairs() {
        let r = count_saddles(&PhaseParams::new(0.5)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["zero_count"], 3);
        assert!(v["saddles"][0]["location"].as_array().unwrap().len() == 2);
    }
}
