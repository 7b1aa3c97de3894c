use crate::error::{Error, Result};
use crate::numerics::{
    derivative_forward, derivative_forward_k, derivative_central_k, quad_radial, Interval,
    ToleranceConfig,
};

use super::radial::{RadialKind, RadialMeasure};
use super::ProperGenerator;

/// Step sizes (relative to x) per derivative order; chosen so rounding and
/// truncation errors balance for f values of order 1.
fn step_for_order(k: usize, x: f64) -> f64 {
    let rel = match k {
        1 => 1e-7,
        2 => 1e-4,
        3 => 1e-3,
        4 => 3e-3,
        _ => 1e-2,
    };
    rel * x
}

/// Integral of max(0, 1 - x/r)^{d-1} against the radial measure m.
/// Characterizes d-monotone generators: probability-cdf inputs give proper
/// generators, infinite-mass inputs give Levy generators (or the +inf flag
/// where the integral diverges, e.g. hazard transforms of unbounded cdfs).
pub fn williamson_transform(
    m: &RadialMeasure,
    d: usize,
    x: f64,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if d < 2 {
        return Err(Error::argument("williamson_transform: d must be >= 2"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::argument(
            "williamson_transform: x must be nonnegative",
        ));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x == 0.0 {
        // Kernel is identically 1.
        return m.total_mass(cfg);
    }
    let p = (d - 1) as i32;
    if let Some((r0, mass)) = m.dirac_parts() {
        return Ok(mass * (1.0 - x / r0).max(0.0).powi(p));
    }
    if let Some(cells) = m.table_cells() {
        let mut acc = 0.0;
        for (lo, hi, density) in cells {
            let a = lo.max(x);
            if a >= hi || density == 0.0 {
                continue;
            }
            acc += density * (kernel_antiderivative(hi, x, d) - kernel_antiderivative(a, x, d));
        }
        return Ok(acc.max(0.0));
    }
    let (pdf, support, _) = m.density_parts().expect("all radial forms covered");
    let lo = support.lo.max(x);
    if lo >= support.hi {
        return Ok(0.0);
    }
    quad_radial(
        move |r| pdf(r) * (1.0 - x / r).max(0.0).powi(p),
        Interval::new(lo, support.hi)?,
        cfg,
    )
}

/// Antiderivative in r of (1 - x/r)^{d-1} for r >= x > 0, by binomial
/// expansion: sum_j C(d-1,j) (-x)^j * [r | ln r | r^{1-j}/(1-j)].
fn kernel_antiderivative(r: f64, x: f64, d: usize) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    let mut xpow = 1.0f64; // (-x)^j
    for j in 0..d {
        let base = match j {
            0 => r,
            1 => r.ln(),
            _ => r.powi(1 - j as i32) / (1.0 - j as f64),
        };
        acc += binom * xpow * base;
        binom = binom * (d - 1 - j) as f64 / (j + 1) as f64;
        xpow *= -x;
    }
    acc
}

/// Survival function gamma_bar of the radial measure recovered from a
/// d-monotone generator:
///   gamma_bar(x) = sum_{k=0}^{d-2} (-1)^k x^k f^{(k)}(x)/k!
///                + (-1)^{d-1} x^{d-1} f_+^{(d-1)}(x)/(d-1)!
/// The last derivative is one-sided from the right so that generators with
/// kinks (linear cap) resolve to their atoms exactly.
pub fn inverse_survival(
    f: impl Fn(f64) -> f64 + Copy,
    d: usize,
    grid: &[f64],
) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::argument("inverse_survival: d must be >= 2"));
    }
    if grid.is_empty() {
        return Err(Error::argument("inverse_survival: empty grid"));
    }
    if grid.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::argument(
            "inverse_survival: grid must be finite positive",
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument(
            "inverse_survival: grid must be strictly increasing",
        ));
    }
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        let mut acc = f(x);
        let mut factorial = 1.0f64;
        let mut xpow = 1.0f64;
        for k in 1..=(d - 2) {
            factorial *= k as f64;
            xpow *= x;
            let deriv = derivative_central_k(f, x, k, step_for_order(k, x));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * xpow * deriv / factorial;
        }
        let k = d - 1;
        factorial *= k as f64;
        xpow *= x;
        let h = step_for_order(k, x);
        let deriv = if k == 1 {
            derivative_forward(f, x, h)
        } else {
            derivative_forward_k(f, x, k, h)
        };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * xpow * deriv / factorial;
        if !acc.is_finite() {
            return Err(Error::numeric(
                format!("inverse_survival: non-finite value at x={x}"),
                f64::NAN,
            ));
        }
        out.push(acc);
    }
    Ok(out)
}

const SURVIVAL_SLACK: f64 = 1e-5;

/// Radial measure whose Williamson d-transform reproduces psi, tabulated on
/// `grid`. Derivatives are numeric, so the result is validated structurally
/// (range and monotonicity of the survival values) and the caller is
/// expected to confirm the round trip through williamson_transform.
pub fn williamson_inverse(
    psi: &ProperGenerator,
    d: usize,
    grid: &[f64],
    cfg: &ToleranceConfig,
) -> Result<RadialMeasure> {
    let f = |t: f64| psi.eval_or_nan(t, cfg);
    let survival = inverse_survival(&f, d, grid)?;
    for (i, &s) in survival.iter().enumerate() {
        if !(-SURVIVAL_SLACK..=1.0 + SURVIVAL_SLACK).contains(&s) {
            return Err(Error::numeric(
                format!(
                    "williamson_inverse: survival {s} out of range at x={} (derivative instability)",
                    grid[i]
                ),
                s,
            ));
        }
        if i > 0 && s > survival[i - 1] + SURVIVAL_SLACK {
            return Err(Error::numeric(
                format!(
                    "williamson_inverse: survival increases at x={} (derivative instability)",
                    grid[i]
                ),
                s,
            ));
        }
    }
    let mut rs = Vec::with_capacity(grid.len() + 1);
    let mut cumulative = Vec::with_capacity(grid.len() + 1);
    rs.push(0.0);
    cumulative.push(0.0);
    let mut running = 0.0f64;
    for (&x, &s) in grid.iter().zip(&survival) {
        let c = (1.0 - s).clamp(0.0, 1.0);
        running = running.max(c);
        rs.push(x);
        cumulative.push(running);
    }
    let total = running;
    let kind = if (total - 1.0).abs() <= 1e-3 {
        RadialKind::ProbabilityCdf
    } else {
        RadialKind::GeneralPositive
    };
    RadialMeasure::table(rs, cumulative, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::radial::{clayton_radial, erlang2_radial};
    use crate::numerics::ToleranceConfig;
    use std::sync::Arc;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn dirac_collapses_to_power_kernel() {
        let m = RadialMeasure::dirac(1.0, 1.0, RadialKind::ProbabilityCdf).unwrap();
        let v = williamson_transform(&m, 2, 0.5, &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let m3 = RadialMeasure::dirac(2.0, 1.0, RadialKind::ProbabilityCdf).unwrap();
        let v3 = williamson_transform(&m3, 3, 0.5, &cfg()).unwrap();
        assert!((v3 - 0.5625).abs() < 1e-15, "got {v3}");
    }

    #[test]
    fn reciprocal_density_gives_one_over_x() {
        let m = RadialMeasure::density(
            Arc::new(|r: f64| 2.0 / (r * r)),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            RadialKind::GeneralPositive,
        )
        .unwrap();
        for x in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let v = williamson_transform(&m, 2, x, &cfg()).unwrap();
            assert!((v - 1.0 / x).abs() < 1e-8, "x={x}: got {v}");
        }
    }

    #[test]
    fn transform_at_zero_is_total_mass() {
        let v = williamson_transform(&clayton_radial(), 2, 0.0, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // Infinite-mass radial: +inf flag, not an error.
        let m = RadialMeasure::density(
            Arc::new(|r: f64| 2.0 / (r * r)),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            RadialKind::GeneralPositive,
        )
        .unwrap();
        let v = williamson_transform(&m, 2, 0.0, &cfg()).unwrap();
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn hazard_of_unbounded_cdf_diverges() {
        // Hazard transform of the unit exponential: constant density 1.
        let m = RadialMeasure::density(
            Arc::new(|_r: f64| 1.0),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            RadialKind::HazardTransform,
        )
        .unwrap();
        for x in [0.5, 1.0, 3.0] {
            let v = williamson_transform(&m, 2, x, &cfg()).unwrap();
            assert!(v.is_infinite() && v > 0.0, "x={x}");
        }
    }

    #[test]
    fn clayton_density_transform_matches_generator() {
        let m = clayton_radial();
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let v = williamson_transform(&m, 2, x, &cfg()).unwrap();
            assert!((v - 1.0 / (1.0 + x)).abs() < 1e-9, "x={x}: got {v}");
        }
    }

    #[test]
    fn erlang2_transform_matches_exponential_generator() {
        let m = erlang2_radial();
        for x in [0.1, 1.0, 3.0] {
            let v = williamson_transform(&m, 2, x, &cfg()).unwrap();
            assert!((v - (-x).exp()).abs() < 1e-9, "x={x}: got {v}");
        }
    }

    #[test]
    fn survival_of_linear_cap_is_step() {
        let f = |x: f64| (1.0 - x).max(0.0);
        let grid: Vec<f64> = vec![0.25, 0.5, 0.9, 1.0, 1.1, 2.0];
        let s = inverse_survival(&f, 2, &grid).unwrap();
        for (x, v) in grid.iter().zip(&s) {
            let want = if *x < 1.0 { 1.0 } else { 0.0 };
            // Forward-difference rounding floors the accuracy near 1e-8.
            assert!((v - want).abs() < 5e-8, "x={x}: got {v}");
        }
    }

    #[test]
    fn survival_of_exponential_matches_closed_form() {
        let f = |x: f64| (-x).exp();
        let grid: Vec<f64> = (1..=40).map(|i| 0.2 * i as f64).collect();
        let s = inverse_survival(&f, 2, &grid).unwrap();
        for (x, v) in grid.iter().zip(&s) {
            let want = (1.0 + x) * (-x).exp();
            assert!((v - want).abs() < 1e-7, "x={x}: got {v} want {want}");
        }
    }

    #[test]
    fn survival_dimension_three_dirac() {
        // d=3 transform of Dirac at 1 is (1-x)_+^2; its survival is a step.
        let f = |x: f64| (1.0 - x).max(0.0).powi(2);
        let grid = vec![0.3, 0.6, 0.95, 1.05, 1.5];
        let s = inverse_survival(&f, 3, &grid).unwrap();
        for (x, v) in grid.iter().zip(&s) {
            let want = if *x < 1.0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-5, "x={x}: got {v}");
        }
    }
}
