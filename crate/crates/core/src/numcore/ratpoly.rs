use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::Rational;
use crate::{Error, Result};

/// Dense polynomial in `y` with rational coefficients, truncated at degree
/// `bound` (everything of higher degree is discarded on every operation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
    bound: usize,
}

impl RatPoly {
    pub fn zero(bound: usize) -> Self {
        Self { coeffs: Vec::new(), bound }
    }

    pub fn one(bound: usize) -> Self {
        Self::constant(Rational::one(), bound)
    }

    pub fn constant(c: Rational, bound: usize) -> Self {
        Self::from_coeffs(vec![c], bound)
    }

    /// `c * y^deg`; zero when `deg` exceeds the bound.
    pub fn monomial(c: Rational, deg: usize, bound: usize) -> Self {
        if deg > bound {
            return Self::zero(bound);
        }
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs, bound)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>, bound: usize) -> Self {
        coeffs.truncate(bound + 1);
        let mut p = Self { coeffs, bound };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Coefficient of `y^i` (zero past the stored length).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, i: usize) -> Option<&Rational> {
        self.coeffs.get(i)
    }

    /// Stored coefficients, lowest degree first; trailing zeros trimmed.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.bound);
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            bound: self.bound,
        }
    }

    /// Multiply by `y^shift`, dropping terms past the bound.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() || shift > self.bound {
            return Self::zero(self.bound);
        }
        let mut coeffs = vec![Rational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs, self.bound)
    }

    /// Same polynomial reinterpreted under another truncation bound.
    pub fn with_bound(&self, bound: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), bound)
    }

    /// Reciprocal as a power series truncated at the bound.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.bound + 1);
        out.push(inv0.clone());
        for m in 1..=self.bound {
            let mut acc = Rational::zero();
            for (i, a) in self.coeffs.iter().enumerate().take(m + 1).skip(1) {
                if !a.is_zero() && !out[m - i].is_zero() {
                    acc += a * &out[m - i];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self::from_coeffs(out, self.bound))
    }

    /// Evaluate at a double-precision point (lossy; for diagnostics).
    pub fn eval_f64(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * y + super::rat_to_f64(c))
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let bound = self.bound.min(rhs.bound);
        let len = self.coeffs.len().max(rhs.coeffs.len()).min(bound + 1);
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Rational::zero(),
            })
            .collect();
        RatPoly::from_coeffs(coeffs, bound)
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            bound: self.bound,
        }
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        let bound = self.bound.min(rhs.bound);
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero(bound);
        }
        let len = (self.coeffs.len() + rhs.coeffs.len() - 1).min(bound + 1);
        let mut out = vec![Rational::zero(); len];
        // Skip zero coefficients: the series in this crate are sparse
        // (even powers of y only in most factors).
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatPoly::from_coeffs(out, bound)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
