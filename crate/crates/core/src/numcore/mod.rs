//! Shared numeric foundations: exact rationals, truncated rational
//! polynomials, complex doubles and 1-D quadrature kernels.

mod normal;
mod quadrature;
mod rational;
mod ratpoly;

pub use normal::gauss_cdf_core;
pub use quadrature::{trapezoid_periodic, PeriodicTrapezoid};
pub use rational::{rat, rat_arith, rat_int, rat_to_decimal, rat_to_f64, RatOp, Rational};
pub use ratpoly::RatPoly;

/// Complex double used for every contour point.
pub type ComplexVal = num_complex::Complex64;

pub(crate) fn ensure_finite(z: ComplexVal, location: impl FnOnce() -> String) -> crate::Result<ComplexVal> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(crate::Error::NonFinite { location: location() })
    }
}
