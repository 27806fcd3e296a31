/// `(1/sqrt(pi)) * integral_{-inf}^{z} exp(-s^2) ds`, i.e. `erfc(-z)/2`.
///
/// Note the `1/sqrt(pi)` normalization: this is the standard normal CDF at
/// `z * sqrt(2)`, not at `z`.
pub fn gauss_cdf_core(z: f64) -> f64 {
    0.5 * libm::erfc(-z)
}
