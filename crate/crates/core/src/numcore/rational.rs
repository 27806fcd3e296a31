use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rat_arith(a: &Rational, b: &Rational, op: RatOp) -> Result<Rational> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => {
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            a / b
        }
    })
}

/// `num/den` reduced. Panics on a zero denominator, like the literal it stands for.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Scale big operands down first so huge numerators and denominators
    // (e.g. around 64!) do not overflow to inf/inf.
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Decimal rendering rounded half-up to `sig` significant digits.
/// Positional for magnitudes in [1e-6, 1e30), scientific otherwise.
pub fn rat_to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let x = r.abs();
    let ten = BigInt::from(10);

    // Decimal exponent e with 10^e <= x < 10^(e+1).
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while x < pow10(e) {
        e -= 1;
    }
    while x >= pow10(e + 1) {
        e += 1;
    }

    let scaled = &x * pow10(sig as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = if rem * BigInt::from(2) >= *scaled.denom() { q + 1 } else { q };
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..).
    if digits.to_string().len() > sig {
        digits /= &ten;
        e += 1;
    }
    let ds = digits.to_string();

    let body = if (-6..30).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            if int_len >= ds.len() {
                format!("{}{}", ds, "0".repeat(int_len - ds.len()))
            } else {
                format!("{}.{}", &ds[..int_len], &ds[int_len..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
        }
    } else if ds.len() > 1 {
        format!("{}.{}e{}", &ds[..1], &ds[1..], e)
    } else {
        format!("{}e{}", ds, e)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_sum() {
        assert_eq!(rat_arith(&rat(1, 2), &rat(1, 3), RatOp::Add).unwrap(), rat(5, 6));
    }

    #[test]
    fn normalizes() {
        let r = rat(2, 4);
        assert_eq!(r.numer(), &BigInt::from(1));
        assert_eq!(r.denom(), &BigInt::from(2));
        let r = rat(3, -6);
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn quartic_coefficient_at_degenerate_ratio() {
        assert_eq!(rat_arith(&rat(-1, 18), &rat(7, 90), RatOp::Add).unwrap(), rat(1, 45));
    }

    #[test]
    fn divide_by_zero_is_an_error() {
        assert!(matches!(
            rat_arith(&rat(1, 2), &rat(0, 1), RatOp::Div),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&rat(2, 3), 5), "0.66667");
        assert_eq!(rat_to_decimal(&rat(1, 1), 4), "1.000");
        assert_eq!(rat_to_decimal(&rat(-1, 8), 3), "-0.125");
        assert_eq!(rat_to_decimal(&rat(999, 1000), 2), "1.0");
        assert_eq!(rat_to_decimal(&rat(1, 40320), 3), "0.0000248");
        assert_eq!(rat_to_decimal(&rat(1, 10_000_000), 2), "1.0e-7");
        assert_eq!(rat_to_decimal(&rat(0, 1), 30), "0");
        assert_eq!(rat_to_decimal(&rat(123, 1), 2), "120");
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(big.clone() * BigInt::from(3), big * BigInt::from(4));
        assert_eq!(rat_to_f64(&r), 0.75);
        let tiny = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 1000));
        assert!((rat_to_f64(&tiny) / 2f64.powi(-1000) - 1.0).abs() < 1e-15);
    }
}
