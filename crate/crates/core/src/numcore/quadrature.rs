use num_traits::Zero;

use super::{ensure_finite, ComplexVal};
use crate::{invalid, Result};

/// Uniform `m`-node trapezoid rule for `f` integrated over one full period
/// `[lo, hi)`. For analytic periodic integrands the error decays
/// geometrically in `m`.
pub fn trapezoid_periodic<F>(f: F, lo: f64, hi: f64, m: usize) -> Result<ComplexVal>
where
    F: FnMut(f64) -> ComplexVal,
{
    let mut rule = PeriodicTrapezoid::new(lo, hi, m)?;
    rule.refine(f)
}

/// Node-doubling periodic trapezoid rule. Each call to [`refine`](Self::refine)
/// after the first evaluates only the new midpoints.
#[derive(Debug, Clone)]
pub struct PeriodicTrapezoid {
    lo: f64,
    hi: f64,
    nodes: usize,
    sum: ComplexVal,
    started: bool,
}

impl PeriodicTrapezoid {
    pub fn new(lo: f64, hi: f64, initial_nodes: usize) -> Result<Self> {
        if initial_nodes < 4 {
            return Err(invalid(format!("trapezoid needs at least 4 nodes, got {initial_nodes}")));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(invalid(format!("bad period [{lo}, {hi})")));
        }
        Ok(Self { lo, hi, nodes: initial_nodes, sum: ComplexVal::zero(), started: false })
    }

    /// Node count behind the current estimate.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn estimate(&self) -> ComplexVal {
        self.sum * ((self.hi - self.lo) / self.nodes as f64)
    }

    /// First call: evaluate the initial grid. Later calls: double the grid.
    pub fn refine<F>(&mut self, mut f: F) -> Result<ComplexVal>
    where
        F: FnMut(f64) -> ComplexVal,
    {
        let width = self.hi - self.lo;
        if !self.started {
            let h = width / self.nodes as f64;
            for j in 0..self.nodes {
                let x = self.lo + j as f64 * h;
                self.sum += ensure_finite(f(x), || format!("trapezoid node x={x}"))?;
            }
            self.started = true;
        } else {
            let h = width / self.nodes as f64;
            for j in 0..self.nodes {
                let x = self.lo + (j as f64 + 0.5) * h;
                self.sum += ensure_finite(f(x), || format!("trapezoid node x={x}"))?;
            }
            self.nodes *= 2;
        }
        Ok(self.estimate())
    }
}
