//! Saddle-point picture of the limit law: the phase
//! `sigma(u) = alpha log cosh u + log(tanh u / u)`, its saddles, the
//! steepest-descent curves through the degenerate saddle at `alpha = 2/3`,
//! and the Gaussian limit `K(t)`.

mod descent;
mod limit;
mod phase;
mod saddles;

pub use descent::{trace_descent, Branch, DescentOptions, DescentPath, DEGENERATE_ALPHA};
pub use limit::{k_limit, limit_pv_integral, LimitQuery, PV_CUTOFF};
pub use phase::{sigma, sigma_prime, sigma_second, taylor_sigma, MAX_TAYLOR_ORDER};
pub use saddles::{count_saddles, PhaseParams, Saddle, SaddleReport};

/// Serde helper: a complex number as `[re, im]`.
mod complex_pair {
    use crate::numcore::ComplexVal;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &ComplexVal, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&[z.re, z.im], s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexVal, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(ComplexVal::new(re, im))
    }
}

/// Serde helper: a list of complex numbers as `[[re, im], ...]`.
mod complex_pairs {
    use crate::numcore::ComplexVal;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(zs: &[ComplexVal], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
        serde::Serialize::serialize(&pairs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexVal>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| ComplexVal::new(re, im)).collect())
    }
}
