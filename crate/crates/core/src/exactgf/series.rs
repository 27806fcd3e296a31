use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::QuadExtPoly;
use crate::numcore::{rat_int, RatPoly, Rational};
use crate::{invalid, Error, Result};

/// Default x- and y-truncation for exact mode.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Power series in `x` truncated at degree `n_max`, coefficients in the
/// quadratic extension truncated at `y`-degree `d_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XSeries {
    coeffs: Vec<QuadExtPoly>,
    d_max: usize,
}

impl XSeries {
    pub fn zero(n_max: usize, d_max: usize) -> Self {
        Self { coeffs: vec![QuadExtPoly::zero(d_max); n_max + 1], d_max }
    }

    /// Constant series `c` (no `x` dependence).
    pub fn constant(c: QuadExtPoly, n_max: usize) -> Self {
        let d_max = c.bound();
        let mut s = Self::zero(n_max, d_max);
        s.coeffs[0] = c;
        s
    }

    pub fn from_coeffs(coeffs: Vec<QuadExtPoly>, d_max: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("x-series needs at least one coefficient"));
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| QuadExtPoly::new(c.a.with_bound(d_max), c.b.with_bound(d_max)))
            .collect();
        Ok(Self { coeffs, d_max })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Coefficient of `x^m`.
    pub fn coeff(&self, m: usize) -> Option<&QuadExtPoly> {
        self.coeffs.get(m)
    }

    pub fn coeffs(&self) -> &[QuadExtPoly] {
        &self.coeffs
    }

    /// Multiply every coefficient by a constant ring element.
    pub fn scale_by(&self, c: &QuadExtPoly) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect(), d_max: self.d_max }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.n_max().min(rhs.n_max());
        Self {
            coeffs: (0..=n).map(|m| &self.coeffs[m] + &rhs.coeffs[m]).collect(),
            d_max: self.d_max.min(rhs.d_max),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n_max().min(rhs.n_max());
        let d = self.d_max.min(rhs.d_max);
        let coeffs = (0..=n)
            .map(|m| {
                (0..=m).fold(QuadExtPoly::zero(d), |acc, i| {
                    let (p, q) = (&self.coeffs[i], &rhs.coeffs[m - i]);
                    if p.is_zero() || q.is_zero() {
                        acc
                    } else {
                        &acc + &(p * q)
                    }
                })
            })
            .collect();
        Self { coeffs, d_max: d }
    }

    /// `self / den` by the leading-coefficient recursion
    /// `q_m = (num_m - sum_{i=1..m} den_i q_{m-i}) / den_0`.
    pub fn div(&self, den: &Self) -> Result<Self> {
        let n = self.n_max().min(den.n_max());
        let d = self.d_max.min(den.d_max);
        let inv0 = den.coeffs[0].inverse()?;
        let mut q: Vec<QuadExtPoly> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..=m {
                let (di, qj) = (&den.coeffs[i], &q[m - i]);
                if !di.is_zero() && !qj.is_zero() {
                    acc = &acc - &(di * qj);
                }
            }
            q.push(&acc * &inv0);
        }
        Ok(Self { coeffs: q, d_max: d })
    }
}

/// `e^{c r x}` with `r^{2q} = (1 - y^2)^q` and `r^{2q+1} = (1 - y^2)^q r`.
pub fn exp_rho_series(c: i64, n_max: usize, d_max: usize) -> Result<XSeries> {
    if !(1..=2).contains(&c) {
        return Err(invalid(format!("exp_rho_series scale must be 1 or 2, got {c}")));
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut term = QuadExtPoly::one(d_max);
    coeffs.push(term.clone());
    for m in 1..=n_max {
        term = term.mul_rho().scale(&Rational::new(BigInt::from(c), BigInt::from(m)));
        coeffs.push(term.clone());
    }
    XSeries::from_coeffs(coeffs, d_max)
}

/// The series of `B(x, y)` through `x^n_max`, `y^d_max`.
pub fn build_b_series(n_max: usize, d_max: usize) -> Result<XSeries> {
    if d_max < n_max {
        return Err(invalid(format!("need D >= N to keep every k <= n (N={n_max}, D={d_max})")));
    }
    let d = d_max;
    let one = QuadExtPoly::one(d);
    let rho = QuadExtPoly::rho(d);
    let y = QuadExtPoly::from_y(RatPoly::monomial(Rational::one(), 1, d));
    let y2 = QuadExtPoly::from_y(RatPoly::monomial(Rational::one(), 2, d));
    let two_y = y.scale(&rat_int(2));

    let e1 = exp_rho_series(1, n_max, d)?;
    let e2 = exp_rho_series(2, n_max, d)?;

    let one_plus_rho = &one + &rho;
    let one_minus_rho = &one - &rho;
    let num = XSeries::constant(one_plus_rho.clone(), n_max)
        .add(&e1.scale_by(&two_y))
        .add(&e2.scale_by(&one_minus_rho));
    let den = XSeries::constant(&one_plus_rho - &y2, n_max).add(&e2.scale_by(&(&one_minus_rho - &y2)));
    num.div(&den)
}

/// `p_n(k)`: the coefficient of `y^k x^n`.
pub fn pnk_exact(series: &XSeries, n: usize, k: i64) -> Result<Rational> {
    if k < 0 {
        return Ok(Rational::zero());
    }
    // as_n <= n always.
    if k as usize >= n {
        return Ok(Rational::one());
    }
    let ku = k as usize;
    if n > series.n_max() || ku > series.d_max() {
        return Err(Error::OutOfTruncation { n, k, need_n: n, need_d: ku });
    }
    Ok(series.coeffs[n].a.coeff(ku))
}
