use crate::error::{Error, Result};

/// Sign pattern for finite-difference monotonicity tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// (-1)^k Δ_h^k f >= 0 for k = 0..=d (decreasing convex cascade).
    CompletelyMonotone,
    /// (-1)^k Δ_h^k f <= 0 for k = 1..=d. Order zero is excluded: the
    /// pattern constrains increments, not the sign of f itself.
    CompletelyAlternating,
}

/// Finite-difference test of d-monotonicity on a grid. The forward
/// difference Δ_h^k f(t) = Σ_i (-1)^{k-i} C(k,i) f(t+ih) must satisfy the
/// declared sign pattern within `slack` at every grid point.
pub fn d_monotone_check(
    f: impl Fn(f64) -> f64,
    d: usize,
    grid: &[f64],
    h: f64,
    mode: SignMode,
    slack: f64,
) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::argument("d_monotone_check: empty grid"));
    }
    if h <= 0.0 {
        return Err(Error::argument("d_monotone_check: step must be positive"));
    }
    let k_lo = match mode {
        SignMode::CompletelyMonotone => 0,
        SignMode::CompletelyAlternating => 1,
    };
    for &t in grid {
        // Reuse the evaluations f(t), f(t+h), ..., f(t+dh) for all orders.
        let vals: Vec<f64> = (0..=d).map(|i| f(t + i as f64 * h)).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eval(format!(
                "non-finite function value near t={t} in d_monotone_check"
            )));
        }
        for k in k_lo..=d {
            let mut delta = 0.0;
            let mut binom = 1.0f64; // C(k, i) built incrementally
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                delta += sign * binom * vals[i];
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
            let signed = if k % 2 == 0 { delta } else { -delta };
            let holds = match mode {
                SignMode::CompletelyMonotone => signed >= -slack,
                SignMode::CompletelyAlternating => signed <= slack,
            };
            if !holds {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Central difference first derivative with one Richardson extrapolation
/// level: (4 D(h/2) - D(h)) / 3 where D(h) = (f(x+h) - f(x-h)) / 2h.
pub fn derivative_central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// One-sided (right) first derivative via the second-order forward formula
/// (-3 f(x) + 4 f(x+h) - f(x+2h)) / 2h, with one Richardson level.
pub fn derivative_forward(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |step: f64| (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// One-sided (right) k-th derivative from forward differences on
/// x, x+h, ..., x+kh, with one Richardson level lifting the O(h) error
/// to O(h^2). Used where only the right limit exists (kinked generators).
pub fn derivative_forward_k(f: impl Fn(f64) -> f64 + Copy, x: f64, k: usize, h: f64) -> f64 {
    if k == 0 {
        return f(x);
    }
    let dk = |step: f64| {
        let mut acc = 0.0;
        let mut binom = 1.0f64;
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + i as f64 * step);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        acc / step.powi(k as i32)
    };
    2.0 * dk(0.5 * h) - dk(h)
}

/// k-th derivative from central differences of span k*h, one Richardson
/// level at order-2 error.
pub fn derivative_central_k(f: impl Fn(f64) -> f64 + Copy, x: f64, k: usize, h: f64) -> f64 {
    if k == 0 {
        return f(x);
    }
    let dk = |step: f64| {
        let mut acc = 0.0;
        let mut binom = 1.0f64;
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            // nodes symmetric about x: x + (i - k/2) * step
            let node = x + (i as f64 - k as f64 / 2.0) * step;
            acc += sign * binom * f(node);
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        acc / step.powi(k as i32)
    };
    (4.0 * dk(0.5 * h) - dk(h)) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (1..=20).map(|i| 0.25 * i as f64).collect()
    }

    #[test]
    fn exponential_is_completely_monotone() {
        let ok = d_monotone_check(|x| (-x).exp(), 4, &grid(), 1e-3, SignMode::CompletelyMonotone, 1e-9)
            .unwrap();
        assert!(ok);
    }

    #[test]
    fn linear_cap_is_two_monotone() {
        let ok = d_monotone_check(
            |x| (1.0 - x).max(0.0),
            2,
            &grid(),
            1e-3,
            SignMode::CompletelyMonotone,
            1e-9,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn square_fails_first_order() {
        let ok = d_monotone_check(|x| x * x, 2, &grid(), 1e-3, SignMode::CompletelyMonotone, 1e-9)
            .unwrap();
        assert!(!ok);
    }

    #[test]
    fn exponential_family_through_order_eight() {
        for theta in [0.25, 1.0, 3.0] {
            for d in 1..=8 {
                let ok = d_monotone_check(
                    move |x| (-theta * x).exp(),
                    d,
                    &grid(),
                    1e-3,
                    SignMode::CompletelyMonotone,
                    1e-9,
                )
                .unwrap();
                assert!(ok, "theta={theta} d={d}");
            }
        }
    }

    #[test]
    fn hazard_like_function_is_completely_alternating() {
        // x -> x is alternating (increments positive, higher differences 0).
        let ok = d_monotone_check(|x| x, 3, &grid(), 1e-3, SignMode::CompletelyAlternating, 1e-9)
            .unwrap();
        assert!(ok);
    }

    #[test]
    fn derivative_helpers_agree_with_calculus() {
        let d1 = derivative_central(|x: f64| x.powi(3), 2.0, 1e-4 * 2.0);
        assert!((d1 - 12.0).abs() < 1e-8, "central got {d1}");
        let d2 = derivative_forward(|x: f64| x.powi(3), 2.0, 1e-4 * 2.0);
        assert!((d2 - 12.0).abs() < 1e-6, "forward got {d2}");
        let dk = derivative_central_k(|x: f64| (-x).exp(), 1.0, 2, 1e-3);
        assert!((dk - (-1.0f64).exp()).abs() < 1e-7, "k=2 got {dk}");
        let df = derivative_forward_k(|x: f64| (-x).exp(), 1.0, 2, 1e-4);
        assert!((df - (-1.0f64).exp()).abs() < 1e-6, "forward k=2 got {df}");
        // Right derivative at a kink sees only the flat side.
        let dr = derivative_forward(|x: f64| (1.0 - x).max(0.0), 1.0, 1e-5);
        assert!(dr.abs() < 1e-12, "right derivative at kink got {dr}");
    }

    #[test]
    fn empty_grid_is_error() {
        assert!(d_monotone_check(|x| x, 2, &[], 1e-3, SignMode::CompletelyMonotone, 1e-9).is_err());
    }
}
