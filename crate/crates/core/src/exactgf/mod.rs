//! Exact `p_n(k)` from the bivariate generating function
//!
//! ```text
//! B(x, y) = (1 + r + 2y e^{rx} + (1 - r) e^{2rx}) / (1 + r - y^2 + (1 - r - y^2) e^{2rx}),
//! r = sqrt(1 - y^2),
//! ```
//!
//! expanded as a power series in `x` whose coefficients live in
//! `Q[y][r] / (r^2 - (1 - y^2))`, truncated in `y`. The coefficient of
//! `y^k x^n` is `Pr(as_n <= k)`.

mod cache;
mod ring;
mod series;
mod table;

pub use cache::{DistCache, CACHE_ENV_VAR};
pub use ring::QuadExtPoly;
pub use series::{build_b_series, exp_rho_series, pnk_exact, XSeries, DEFAULT_TRUNCATION};
pub use table::{dist_table, exact_moments, DistTable, Provenance};

/// Exact table for row `n`, building the smallest series that covers it.
pub fn exact_row(n: usize) -> crate::Result<DistTable> {
    let series = build_b_series(n, n)?;
    dist_table(&series, n)
}
