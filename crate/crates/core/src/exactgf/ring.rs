use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::numcore::{rat_int, RatPoly, Rational};
use crate::{Error, Result};

/// `a(y) + b(y) r` with `r^2 = 1 - y^2`, both parts truncated at the same
/// `y`-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExtPoly {
    pub a: RatPoly,
    pub b: RatPoly,
}

impl QuadExtPoly {
    pub fn new(a: RatPoly, b: RatPoly) -> Self {
        let bound = a.bound().min(b.bound());
        Self { a: a.with_bound(bound), b: b.with_bound(bound) }
    }

    pub fn zero(bound: usize) -> Self {
        Self { a: RatPoly::zero(bound), b: RatPoly::zero(bound) }
    }

    pub fn one(bound: usize) -> Self {
        Self { a: RatPoly::one(bound), b: RatPoly::zero(bound) }
    }

    /// The element `r` itself.
    pub fn rho(bound: usize) -> Self {
        Self { a: RatPoly::zero(bound), b: RatPoly::one(bound) }
    }

    /// A pure polynomial in `y` (no `r` part).
    pub fn from_y(a: RatPoly) -> Self {
        let bound = a.bound();
        Self { a, b: RatPoly::zero(bound) }
    }

    pub fn bound(&self) -> usize {
        self.a.bound()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `1 - y^2`, the value of `r^2`.
    pub fn rho_squared(bound: usize) -> RatPoly {
        RatPoly::from_coeffs(vec![rat_int(1), rat_int(0), rat_int(-1)], bound)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { a: self.a.scale(c), b: self.b.scale(c) }
    }

    /// Multiply by `r`: `(a + b r) r = b (1 - y^2) + a r`.
    pub fn mul_rho(&self) -> Self {
        let bound = self.bound();
        Self { a: &self.b * &Self::rho_squared(bound), b: self.a.clone() }
    }

    /// `a - b r`.
    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b }
    }

    /// `(a + b r)(a - b r) = a^2 - b^2 (1 - y^2)`, a pure `y` series.
    pub fn norm(&self) -> RatPoly {
        let bound = self.bound();
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Self::rho_squared(bound))
    }

    /// Reciprocal as a truncated series. Invertible iff the norm has a
    /// nonzero constant term, which for `b = 0` reduces to `a(0) != 0`.
    pub fn inverse(&self) -> Result<Self> {
        if self.b.is_zero() {
            return Ok(Self::from_y(self.a.inverse()?));
        }
        let norm = self.norm();
        if norm.coeff(0).is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv = norm.inverse()?;
        let c = self.conj();
        Ok(Self { a: &c.a * &inv, b: &c.b * &inv })
    }
}

impl Add for &QuadExtPoly {
    type Output = QuadExtPoly;
    fn add(self, rhs: &QuadExtPoly) -> QuadExtPoly {
        QuadExtPoly { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Sub for &QuadExtPoly {
    type Output = QuadExtPoly;
    fn sub(self, rhs: &QuadExtPoly) -> QuadExtPoly {
        QuadExtPoly { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Neg for &QuadExtPoly {
    type Output = QuadExtPoly;
    fn neg(self) -> QuadExtPoly {
        QuadExtPoly { a: -&self.a, b: -&self.b }
    }
}

impl Mul for &QuadExtPoly {
    type Output = QuadExtPoly;
    fn mul(self, rhs: &QuadExtPoly) -> QuadExtPoly {
        let bound = self.bound().min(rhs.bound());
        let mut a = &self.a * &rhs.a;
        if !self.b.is_zero() && !rhs.b.is_zero() {
            let bb = &self.b * &rhs.b;
            a = &a + &(&bb * &QuadExtPoly::rho_squared(bound));
        }
        let b = &(&self.a * &rhs.b) + &(&rhs.a * &self.b);
        QuadExtPoly { a, b }
    }
}
