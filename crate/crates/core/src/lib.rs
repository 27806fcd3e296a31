//! Verification laboratory for the longest alternating subsequence of a
//! uniform random permutation.
//!
//! * [`perms`]: direct computation of the statistic, full enumeration of
//!   small symmetric groups and seeded Monte Carlo.
//! * [`exactgf`]: exact `Pr(as_n <= k)` from the bivariate generating function.
//! * [`contour`]: the same probabilities from a residue-sum contour
//!   integral, usable for `n` in the thousands.
//! * [`asymptotics`]: phase function, saddle points, steepest-descent
//!   paths and the Gaussian limit law with variance 8/45.
//! * [`verify`]: the acceptance checks tying all of the above together.

pub mod error;
pub mod asymptotics;
pub mod contour;
pub mod exactgf;
pub mod numcore;
pub mod perms;
pub mod verify;

pub use error::{Error, Result};
pub(crate) use error::invalid;
