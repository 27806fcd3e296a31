use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numcore::{gauss_cdf_core, ComplexVal, PeriodicTrapezoid};
use crate::{invalid, Error, Result};

/// Cutoff for the PV integral: `exp(-W^2/45) < 1e-16`.
pub const PV_CUTOFF: f64 = 42.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitQuery {
    pub t: f64,
}

impl LimitQuery {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(invalid(format!("t must be finite, got {t}")));
        }
        Ok(Self { t })
    }
}

/// `K(t) = (1/sqrt(pi)) int_{-inf}^{t sqrt(45)/4} e^{-s^2} ds`.
pub fn k_limit(q: LimitQuery) -> f64 {
    gauss_cdf_core(q.t * 45f64.sqrt() / 4.0)
}

/// `1/2 + (1/2pi) PV int e^{-w^2/45} sin(tw/2)/w dw` over the real line,
/// i.e. the half residue at 0 plus the principal value of the rest.
pub fn limit_pv_integral(q: LimitQuery) -> Result<f64> {
    let t = q.t;
    if !t.is_finite() {
        return Err(invalid(format!("t must be finite, got {t}")));
    }
    let g = |w: f64| {
        let kernel = if w == 0.0 { t / 2.0 } else { (t * w / 2.0).sin() / w };
        ComplexVal::new((-w * w / 45.0).exp() * kernel, 0.0)
    };
    // g is even and negligible at +-W, so the trapezoid over one "period"
    // [-W, W) converges geometrically.
    let mut rule = PeriodicTrapezoid::new(-PV_CUTOFF, PV_CUTOFF, 64)?;
    let mut prev = rule.refine(g)?.re;
    loop {
        let cur = rule.refine(g)?.re;
        if (cur - prev).abs() < 1e-14 {
            return Ok(0.5 + cur / (2.0 * PI));
        }
        if rule.nodes() >= 1 << 16 {
            return Err(Error::NoConvergence {
                what: format!("PV integral at t={t}"),
                estimate: 0.5 + cur / (2.0 * PI),
                residual: (cur - prev).abs(),
            });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

    fn q(t: f64) -> LimitQuery {
        LimitQuery::new(t).unwrap()
    }

    #[test]
    fn k_values() {
        assert_eq!(k_limit(q(0.0)), 0.5);
        assert!((k_limit(q(0.8)) + k_limit(q(-0.8)) - 1.0).abs() < 1e-15);
        assert!(LimitQuery::new(f64::NAN).is_err());
    }

    #[test]
    fn pv_matches_k() {
        assert_eq!(limit_pv_integral(q(0.0)).unwrap(), 0.5);
        for t in GRID {
            let pv = limit_pv_integral(q(t)).unwrap();
            assert!((pv - k_limit(q(t))).abs() < 1e-8, "t={t}: {pv}");
        }
        let a = limit_pv_integral(q(-2.0)).unwrap();
        let b = limit_pv_integral(q(2.0)).unwrap();
        assert!((a - (1.0 - b)).abs() < 1e-8);
    }

    #[test]
    fn k_is_normal_with_variance_8_45() {
        // Standard normal CDF via erfc, independent of the sqrt(45)/4 scaling.
        let sd = (8.0f64 / 45.0).sqrt();
        for t in GRID {
            let phi = 0.5 * libm::erfc(-t / sd / 2f64.sqrt());
            assert!((k_limit(q(t)) - phi).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn variance_from_numerical_density() {
        let h = 1e-3;
        let lim = 4.0;
        let n = (2.0 * lim / h) as i64;
        let mut var = 0.0;
        for i in 0..=n {
            let t = -lim + i as f64 * h;
            let dens = (k_limit(q(t + h)) - k_limit(q(t - h))) / (2.0 * h);
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            var += w * t * t * dens * h;
        }
        assert!((var - 8.0 / 45.0).abs() < 1e-6, "{var}");
    }
}
