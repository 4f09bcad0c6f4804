use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the recursive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Regions of size `h(S) <= d0` are reported instead of subdivided.
    pub d0: f64,
    /// Largest accepted residual of a Krylov node solve.
    pub eps: f64,
    /// Indicator threshold.
    pub delta0: f64,
    /// Krylov dimension.
    pub m: usize,
    /// Coarse quadrature node count; the fine rule uses `2 * n0`.
    pub n0: usize,
    pub seed: u64,
    pub max_depth: usize,
    /// Maximum number of cached Krylov bases.
    pub shift_budget: usize,
    /// Side of the uniform grid of shifts built before the search starts.
    pub initial_shift_grid: usize,
    /// Use the double-projection indicator instead of the nested-quadrature one.
    pub legacy_indicator: bool,
    /// Before pruning a region, check the ratio once more at `4 n0` nodes.
    pub confirm_rejections: bool,
    /// When false every quadrature node is solved by its own factorization.
    pub krylov_reuse: bool,
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            d0: 1e-9,
            eps: 1e-10,
            delta0: 0.2,
            m: 50,
            n0: 4,
            seed: 42,
            max_depth: 60,
            shift_budget: 256,
            initial_shift_grid: 1,
            legacy_indicator: false,
            confirm_rejections: true,
            krylov_reuse: true,
            threads: 1,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return bad("d0 must be positive");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.delta0 > 0.0 && self.delta0 < 1.0) {
            return bad("delta0 must lie in (0, 1)");
        }
        if self.m < 1 {
            return bad("Krylov dimension m must be at least 1");
        }
        if self.n0 < 2 {
            return bad("n0 must be at least 2");
        }
        if self.shift_budget < 1 {
            return bad("shift budget must be at least 1");
        }
        if self.initial_shift_grid < 1 {
            return bad("initial shift grid must be at least 1");
        }
        if self.threads < 1 {
            return bad("thread count must be at least 1");
        }
        Ok(())
    }
}
