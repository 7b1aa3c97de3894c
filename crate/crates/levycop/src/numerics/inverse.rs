use std::sync::Arc;

use super::{Interval, ToleranceConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A monotone scalar function on an interval, with an optional closed-form
/// inverse used as a fast exact path by [`generalized_inverse`].
#[derive(Clone)]
pub struct MonotoneFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    exact_inverse: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub domain: Interval,
    pub direction: Direction,
}

impl std::fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonotoneFunction")
            .field("domain", &self.domain)
            .field("direction", &self.direction)
            .field("exact_inverse", &self.exact_inverse.is_some())
            .finish()
    }
}

impl MonotoneFunction {
    pub fn increasing(
        domain: Interval,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MonotoneFunction {
            eval: Arc::new(eval),
            exact_inverse: None,
            domain,
            direction: Direction::Increasing,
        }
    }

    pub fn decreasing(
        domain: Interval,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MonotoneFunction {
            eval: Arc::new(eval),
            exact_inverse: None,
            domain,
            direction: Direction::Decreasing,
        }
    }

    /// Attach a closed-form inverse; it must satisfy g(inverse(y)) = y on the
    /// range, up to rounding.
    pub fn with_exact_inverse(
        mut self,
        inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.exact_inverse = Some(Arc::new(inv));
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Finite proxies for possibly-infinite domain endpoints, used to probe
    /// the range.
    fn finite_endpoints(&self) -> (f64, f64) {
        let lo = if self.domain.lo.is_finite() {
            self.domain.lo
        } else {
            -1e300
        };
        let hi = if self.domain.hi.is_finite() {
            self.domain.hi
        } else {
            1e300
        };
        (lo, hi)
    }
}

/// inf{s in domain : g(s) >= y} for increasing g, computed by geometric
/// bracket expansion followed by bisection; the exact inverse is used when
/// attached. Decreasing functions are inverted as inf{s : g(s) <= y}, which
/// is the pseudo-inverse convention both generator families need.
pub fn generalized_inverse(g: &MonotoneFunction, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
    if y.is_nan() {
        return Err(Error::argument("generalized_inverse: y is NaN"));
    }
    let (flo, fhi) = g.finite_endpoints();
    // Range closure check; monotone, so endpoint values bound the range.
    let (range_lo, range_hi) = match g.direction {
        Direction::Increasing => (g.eval(flo), g.eval(fhi)),
        Direction::Decreasing => (g.eval(fhi), g.eval(flo)),
    };
    let slack = cfg.abs_tol.max(cfg.rel_tol * y.abs());
    if y < range_lo - slack || y > range_hi + slack {
        return Err(Error::Range {
            value: y,
            lo: range_lo,
            hi: range_hi,
        });
    }
    if let Some(inv) = &g.exact_inverse {
        let x = inv(y);
        return Ok(x.clamp(g.domain.lo, g.domain.hi));
    }

    // Predicate "g(x) reached y" oriented so it is monotone in x.
    let reached = |x: f64| match g.direction {
        Direction::Increasing => g.eval(x) >= y,
        Direction::Decreasing => g.eval(x) <= y,
    };

    // Bracket [a, b] with !reached(a) && reached(b).
    let mut a;
    let mut b;
    if reached(flo) {
        return Ok(g.domain.lo.max(flo));
    }
    a = flo;
    b = if fhi.is_finite() && fhi <= 1e299 {
        fhi
    } else {
        // Expand geometrically from the lower endpoint.
        let mut probe = if flo.abs() > 1.0 { flo.abs() * 2.0 } else { 1.0 };
        let mut iter = 0;
        loop {
            let candidate = flo + probe;
            if reached(candidate) {
                break candidate;
            }
            probe *= 2.0;
            iter += 1;
            if iter >= cfg.bisect_max_iter || !candidate.is_finite() {
                return Err(Error::numeric(
                    format!("bracket expansion failed inverting at y={y}"),
                    candidate,
                ));
            }
        }
    };
    if !reached(b) {
        return Err(Error::Range {
            value: y,
            lo: range_lo,
            hi: range_hi,
        });
    }

    let mut iter = 0;
    while b - a > cfg.abs_tol.max(cfg.rel_tol * b.abs()) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // interval at floating-point resolution
        }
        if reached(mid) {
            b = mid;
        } else {
            a = mid;
        }
        iter += 1;
        if iter >= cfg.bisect_max_iter {
            return Err(Error::numeric(
                format!("bisection exceeded {} iterations", cfg.bisect_max_iter),
                0.5 * (a + b),
            ));
        }
    }
    // b is the smallest point verified to satisfy the predicate.
    Ok(b)
}
