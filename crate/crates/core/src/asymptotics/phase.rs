use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::numcore::{rat_int, rat_to_f64, ComplexVal, RatPoly, Rational};
use crate::{invalid, Error, Result};

/// Below this radius sigma and its derivatives come from the Taylor series.
/// The nearest singularities are at distance pi/2, so the degree-26 tail is
/// ~ (0.25 / 1.57)^26 ~ 1e-21 relative.
pub(crate) const SERIES_RADIUS: f64 = 0.25;
const SERIES_DEGREE: usize = 26;
/// Largest order accepted by [`taylor_sigma`].
pub const MAX_TAYLOR_ORDER: usize = 12;
/// `|sinh u|` or `|cosh u|` below this counts as hitting a singular point.
const SINGULAR_EPS: f64 = 1e-12;

/// `log(1 + s)` for a series `s` with no constant term.
fn log1p_series(s: &RatPoly) -> RatPoly {
    let bound = s.bound();
    let mut out = RatPoly::zero(bound);
    let mut power = s.clone();
    for m in 1..=bound {
        if power.is_zero() {
            break;
        }
        let c = Rational::new(if m % 2 == 1 { 1.into() } else { (-1).into() }, m.into());
        out = &out + &power.scale(&c);
        power = &power * s;
    }
    out
}

/// Exact series of `log cosh u` and `log(tanh u / u)` through `u^degree`.
fn log_parts(degree: usize) -> (RatPoly, RatPoly) {
    let mut cosh = Vec::with_capacity(degree + 1);
    let mut sinh_over_u = Vec::with_capacity(degree + 1);
    let mut fact = Rational::one();
    for m in 0..=degree + 1 {
        if m > 0 {
            fact *= rat_int(m as i64);
        }
        let inv = fact.recip();
        if m <= degree {
            cosh.push(if m % 2 == 0 { inv.clone() } else { Rational::zero() });
        }
        // sinh u / u = sum u^{2j} / (2j+1)!
        if m >= 1 && m - 1 <= degree {
            sinh_over_u.push(if m % 2 == 1 { inv } else { Rational::zero() });
        }
    }
    let one = RatPoly::one(degree);
    let log_cosh = log1p_series(&(&RatPoly::from_coeffs(cosh, degree) - &one));
    let log_sinhc = log1p_series(&(&RatPoly::from_coeffs(sinh_over_u, degree) - &one));
    let log_tanhc = &log_sinhc - &log_cosh;
    (log_cosh, log_tanhc)
}

/// Exact Taylor coefficients `c_2, c_4, ..., c_order` of
/// `sigma(u) = alpha log cosh u + log(tanh u / u)` (odd ones vanish).
pub fn taylor_sigma(alpha: &Rational, order: usize) -> Result<Vec<Rational>> {
    if order < 4 || !order.is_multiple_of(2) || order > MAX_TAYLOR_ORDER {
        return Err(invalid(format!(
            "taylor order must be even and in 4..={MAX_TAYLOR_ORDER}, got {order}"
        )));
    }
    Ok(even_coefficients(alpha, order))
}

fn even_coefficients(alpha: &Rational, order: usize) -> Vec<Rational> {
    let (lc, lt) = log_parts(order);
    (1..=order / 2)
        .map(|j| alpha * lc.coeff(2 * j) + lt.coeff(2 * j))
        .collect()
}

/// Even coefficients of the two log series as doubles, shared by all alphas.
fn float_parts() -> &'static (Vec<f64>, Vec<f64>) {
    static PARTS: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    PARTS.get_or_init(|| {
        let (lc, lt) = log_parts(SERIES_DEGREE);
        let pick = |p: &RatPoly| (1..=SERIES_DEGREE / 2).map(|j| rat_to_f64(&p.coeff(2 * j))).collect();
        (pick(&lc), pick(&lt))
    })
}

/// `sigma^{(d)}(u)` for `d` in 0..=2 from the Taylor series.
fn series_derivative(u: ComplexVal, alpha: f64, d: usize) -> ComplexVal {
    let (lc, lt) = float_parts();
    let u2 = u * u;
    // Horner in u^2 over c_{2j} * (2j)_d u^{2j-d}
    let mut acc = ComplexVal::zero();
    for j in (1..=lc.len()).rev() {
        let p = 2 * j;
        let falling: f64 = (0..d).map(|i| (p - i) as f64).product();
        acc = acc * u2 + (alpha * lc[j - 1] + lt[j - 1]) * falling;
    }
    // acc = sum c_{2j} (2j)_d u^{2j-2}
    match d {
        0 => acc * u2,
        1 => acc * u,
        _ => acc,
    }
}

fn check_input(u: ComplexVal, alpha: f64) -> Result<()> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(invalid(format!("u must be finite, got {u}")));
    }
    if !alpha.is_finite() {
        return Err(invalid(format!("alpha must be finite, got {alpha}")));
    }
    Ok(())
}

/// Beyond this `|Re u|` the hyperbolic functions are rewritten in terms of
/// `e^{-2|u|}` so nothing overflows.
const FAR_FIELD: f64 = 20.0;

/// `(tanh u, 2/sinh 2u, cosh 2u / (sinh u cosh u)^2)` for `|Re u| > FAR_FIELD`.
fn far_field(u: ComplexVal) -> (ComplexVal, ComplexVal, ComplexVal) {
    // Work with w = +-u so that Re w > 0 and e = e^{-2w} is tiny.
    let sign = u.re.signum();
    let w = u * sign;
    let e = (-2.0 * w).exp();
    let tanh = (1.0 - e) / (1.0 + e) * sign;
    // 2/sinh 2w = 4e/(1 - e^2); odd in u.
    let csch2 = 4.0 * e / (1.0 - e * e) * sign;
    // 4 cosh 2w / sinh^2 2w = 8e(1 + e^2)/(1 - e^2)^2; even in u.
    let ratio = 8.0 * e * (1.0 + e * e) / ((1.0 - e * e) * (1.0 - e * e));
    (tanh, csch2, ratio)
}

fn pole(u: ComplexVal) -> Error {
    Error::Pole { location: format!("u={u}") }
}

/// Principal-branch `(log cosh u, log(tanh u / u))`.
pub(crate) fn principal_logs(u: ComplexVal) -> Result<(ComplexVal, ComplexVal)> {
    if u.re.abs() > FAR_FIELD {
        // log cosh u = w - ln 2 + log(1 + e^{-2w}) with w = +-u, Re w > 0.
        let w = u * u.re.signum();
        let lc = w - std::f64::consts::LN_2 + (1.0 + (-2.0 * w).exp()).ln();
        let (tanh, _, _) = far_field(u);
        return Ok((lc, (tanh / u).ln()));
    }
    let (s, c) = (u.sinh(), u.cosh());
    // Zeros of cosh (log cosh and tanh blow up) or of sinh away from 0.
    if c.norm() < SINGULAR_EPS || (s.norm() < SINGULAR_EPS && u.norm() > SERIES_RADIUS) {
        return Err(pole(u));
    }
    Ok((c.ln(), (s / (c * u)).ln()))
}

/// `sigma(u) = alpha log cosh u + log(tanh u / u)`, principal branch, with
/// the removable point at 0 handled by the series.
pub fn sigma(u: ComplexVal, alpha: f64) -> Result<ComplexVal> {
    check_input(u, alpha)?;
    if u.norm() < SERIES_RADIUS {
        return Ok(series_derivative(u, alpha, 0));
    }
    let (lc, lt) = principal_logs(u)?;
    Ok(alpha * lc + lt)
}

/// `sigma'(u) = alpha tanh u + 1/(sinh u cosh u) - 1/u`.
pub fn sigma_prime(u: ComplexVal, alpha: f64) -> Result<ComplexVal> {
    check_input(u, alpha)?;
    if u.norm() < SERIES_RADIUS {
        return Ok(series_derivative(u, alpha, 1));
    }
    if u.re.abs() > FAR_FIELD {
        let (tanh, csch2, _) = far_field(u);
        return Ok(alpha * tanh + csch2 - u.inv());
    }
    let sc = u.sinh() * u.cosh();
    if sc.norm() < SINGULAR_EPS {
        return Err(pole(u));
    }
    let v = alpha * u.tanh() + sc.inv() - u.inv();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(pole(u));
    }
    Ok(v)
}

/// `sigma''(u) = alpha sech^2 u - cosh 2u / (sinh u cosh u)^2 + 1/u^2`.
pub fn sigma_second(u: ComplexVal, alpha: f64) -> Result<ComplexVal> {
    check_input(u, alpha)?;
    if u.norm() < SERIES_RADIUS {
        return Ok(series_derivative(u, alpha, 2));
    }
    if u.re.abs() > FAR_FIELD {
        let (tanh, _, ratio) = far_field(u);
        return Ok(alpha * (1.0 - tanh * tanh) - ratio + (u * u).inv());
    }
    let c = u.cosh();
    let sc = u.sinh() * c;
    if sc.norm() < SINGULAR_EPS {
        return Err(pole(u));
    }
    let v = alpha / (c * c) - (2.0 * u).cosh() / (sc * sc) + (u * u).inv();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(pole(u));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::rat;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexVal {
        ComplexVal::new(re, im)
    }

    #[test]
    fn low_coefficients() {
        let two_thirds = rat(2, 3);
        let cs = taylor_sigma(&two_thirds, 4).unwrap();
        assert_eq!(cs, vec![rat(0, 1), rat(1, 45)]);
        assert_eq!(taylor_sigma(&rat(1, 1), 4).unwrap()[0], rat(1, 6));
        for a in [rat(0, 1), rat(1, 2), rat(7, 5), rat(-3, 11)] {
            let cs = taylor_sigma(&a, 12).unwrap();
            assert_eq!(cs.len(), 6);
            assert_eq!(cs[0], &a / rat_int(2) - rat(1, 3));
            assert_eq!(cs[1], -&a / rat_int(12) + rat(7, 90));
        }
    }

    #[test]
    fn sixth_order_coefficient() {
        // log cosh: u^6/45; log(tanh u/u): -62/2835 u^6
        let cs = taylor_sigma(&rat(1, 1), 6).unwrap();
        assert_eq!(cs[2], rat(1, 45) - rat(62, 2835));
    }

    #[test]
    fn taylor_order_checked() {
        for bad in [2, 5, 14] {
            assert!(taylor_sigma(&rat(1, 2), bad).is_err());
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(c(0.0, 0.0), 0.3).unwrap(), c(0.0, 0.0));
        let u = 0.01;
        let s = sigma(c(u, 0.0), 2.0 / 3.0).unwrap();
        let want = u.powi(4) / 45.0;
        assert!(((s.re - want) / want).abs() < 1e-3);
        let z = c(0.3, 0.2);
        let (a, b) = (sigma(z, 0.7).unwrap(), sigma(z.conj(), 0.7).unwrap());
        assert!((a.conj() - b).norm() < 1e-15);
    }

    #[test]
    fn sigma_prime_values() {
        let z = c(0.4, 0.1);
        let (a, b) = (sigma_prime(z, 0.6).unwrap(), sigma_prime(-z, 0.6).unwrap());
        assert!((a + b).norm() < 1e-15);
        assert!(sigma_prime(c(1e-3, 0.0), 2.0 / 3.0).unwrap().norm() <= 1e-8);
        // alpha tanh u + 2/sinh 2u - 1/u: only the 1/u term survives at 20.
        assert!((sigma_prime(c(20.0, 0.0), 0.55).unwrap() - (0.55 - 0.05)).norm() < 1e-15);
        assert!((sigma_prime(c(1e8, 0.0), 0.55).unwrap() - 0.55).norm() < 1e-7);
        assert_eq!(sigma_prime(c(0.0, 0.0), 0.5).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn singular_points_rejected() {
        let half = std::f64::consts::FRAC_PI_2;
        let pi = std::f64::consts::PI;
        assert!(matches!(sigma_prime(c(0.0, half), 0.5), Err(Error::Pole { .. })));
        assert!(matches!(sigma_prime(c(0.0, -pi), 0.5), Err(Error::Pole { .. })));
        assert!(sigma(c(0.0, half), 0.5).is_err());
        assert!(sigma(c(0.0, pi), 0.5).is_err());
        assert!(sigma(c(f64::NAN, 0.0), 0.5).is_err());
    }

    #[test]
    fn far_field_matches_direct() {
        let alpha = 0.7;
        // Points just outside the switch against points just inside it.
        for v in [c(FAR_FIELD + 1e-9, 0.3), c(-FAR_FIELD - 1e-9, -2.0), c(FAR_FIELD + 1e-9, 1.0)] {
            let near = v - v.re.signum() * 2e-9;
            assert!((sigma_prime(v, alpha).unwrap() - sigma_prime(near, alpha).unwrap()).norm() < 1e-8);
            assert!((sigma_second(v, alpha).unwrap() - sigma_second(near, alpha).unwrap()).norm() < 1e-8);
            assert!((sigma(v, alpha).unwrap() - sigma(near, alpha).unwrap()).norm() < 1e-8);
        }
        assert!(sigma(c(1e6, 0.0), 0.5).unwrap().re.is_finite());
    }

    #[test]
    fn series_and_direct_agree_at_the_seam() {
        for k in 0..16 {
            let th = k as f64 * 0.39;
            let u = ComplexVal::from_polar(SERIES_RADIUS, th);
            let alpha = 0.6;
            let (lc, lt) = principal_logs(u).unwrap();
            assert!((series_derivative(u, alpha, 0) - (alpha * lc + lt)).norm() < 1e-15);
            let sc = u.sinh() * u.cosh();
            let direct = alpha * u.tanh() + sc.inv() - u.inv();
            assert!((series_derivative(u, alpha, 1) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn finite_differences_match_taylor() {
        let alpha = 0.45;
        let r = 1e-2;
        let cs = taylor_sigma(&rat(9, 20), 4).unwrap();
        let (c2, c4) = (rat_to_f64(&cs[0]), rat_to_f64(&cs[1]));
        // Even function: average over the four points r i^m kills u^2, u^6 pieces
        // selectively; use real and imaginary samples.
        let s_re = sigma(c(r, 0.0), alpha).unwrap().re;
        let s_im = sigma(c(0.0, r), alpha).unwrap().re;
        // s_re = c2 r^2 + c4 r^4 + .., s_im = -c2 r^2 + c4 r^4 - ..
        let c2_fd = (s_re - s_im) / (2.0 * r * r);
        let c4_fd = (s_re + s_im) / (2.0 * r.powi(4));
        assert!(((c2_fd - c2) / c2).abs() < 1e-4);
        assert!(((c4_fd - c4) / c4).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn even_and_odd(re in -3.0f64..3.0, im in -1.4f64..1.4, alpha in 0.1f64..1.5) {
            let z = c(re, im);
            let s = sigma(z, alpha).unwrap();
            let sm = sigma(-z, alpha).unwrap();
            prop_assert!((s - sm).norm() <= 1e-12 * s.norm().max(1e-300) + 1e-300);
            let d = sigma_prime(z, alpha).unwrap();
            let dm = sigma_prime(-z, alpha).unwrap();
            prop_assert!((d + dm).norm() <= 1e-12 * d.norm().max(1e-300) + 1e-300);
        }

        #[test]
        fn derivative_matches_difference(re in -2.5f64..2.5, im in -1.3f64..1.3, alpha in 0.2f64..1.0) {
            let z = c(re, im);
            let h = 1e-5;
            let fd = (sigma(z + h, alpha).unwrap() - sigma(z - h, alpha).unwrap()) / (2.0 * h);
            prop_assert!((fd - sigma_prime(z, alpha).unwrap()).norm() < 1e-7);
            let fd2 = (sigma_prime(z + h, alpha).unwrap() - sigma_prime(z - h, alpha).unwrap()) / (2.0 * h);
            prop_assert!((fd2 - sigma_second(z, alpha).unwrap()).norm() < 1e-6);
        }
    }
}
