//! Shared numerical primitives: generalized inverses of monotone functions,
//! inclusion-exclusion rectangle volumes, finite-difference monotonicity
//! tests, adaptive quadrature on unbounded domains, simplex sampling, and
//! reproducible RNG substreams.
//!
//! Extended reals are plain `f64` with `f64::INFINITY` as the infinity flag;
//! routines never substitute large finite sentinels for it.

mod diff;
mod inverse;
mod quad;
mod rectangle;
mod rng;
mod stats;

pub use diff::{
    d_monotone_check, derivative_central, derivative_central_k, derivative_forward,
    derivative_forward_k, SignMode,
};
pub use inverse::{generalized_inverse, Direction, MonotoneFunction};
pub use quad::quad_radial;
pub use rectangle::{rectangle_volume, Rectangle};
pub use rng::{simplex_sample, substream};
pub use stats::{ks_statistic_uniform, mean_and_se, pearson};

/// Tolerances and iteration caps shared by the numerical routines.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub quad_max_depth: u32,
    pub bisect_max_iter: u32,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            quad_max_depth: 100,
            bisect_max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    /// At least one tolerance must be positive for any stopping rule to fire.
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.abs_tol <= 0.0 && self.rel_tol <= 0.0 {
            return Err(crate::error::Error::argument(
                "abs_tol or rel_tol must be positive",
            ));
        }
        if self.abs_tol < 0.0 || self.rel_tol < 0.0 {
            return Err(crate::error::Error::argument("tolerances must be nonnegative"));
        }
        Ok(())
    }
}

/// A closed interval of extended reals, endpoints possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> crate::error::Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(crate::error::Error::argument(format!(
                "invalid interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}
