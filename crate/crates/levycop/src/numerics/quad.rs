use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::{Interval, ToleranceConfig};
use crate::error::{Error, Result};

/// Partial sums beyond this are reported as +inf rather than an error:
/// several radial integrals in this crate genuinely diverge and callers rely
/// on the infinity flag.
const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Hard cap on live segments; hitting it means the integrand is pathological.
const MAX_SEGMENTS: usize = 100_000;

/// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence (no hand-typed tables).
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P'_n(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(7), gauss_legendre(15)))
}

fn apply_rule(f: &impl Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.0.iter().zip(&rule.1) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Geometric shells approaching `endpoint` from inside [a, b]; if shell
/// integrals stop decaying the tail sum diverges.
fn diverges_at_endpoint(f: &impl Fn(f64) -> f64, a: f64, b: f64, endpoint_is_b: bool) -> bool {
    let width = b - a;
    if width <= 0.0 {
        return false;
    }
    let (_, ref r15) = *rules();
    let mut prev: Option<f64> = None;
    let mut non_decaying = 0;
    for k in 1..=12 {
        let w_hi = width * 0.5f64.powi(k);
        let w_lo = w_hi * 0.5;
        let (lo, hi) = if endpoint_is_b {
            (b - w_hi, b - w_lo)
        } else {
            (a + w_lo, a + w_hi)
        };
        let v = apply_rule(f, lo, hi, r15);
        if !v.is_finite() || v < 0.0 {
            return true; // blow-up inside the shell
        }
        if let Some(p) = prev {
            if p > 0.0 && v >= 0.95 * p {
                non_decaying += 1;
            } else {
                non_decaying = 0;
            }
        }
        prev = Some(v);
        if non_decaying >= 5 {
            return true;
        }
    }
    false
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

enum Evaluated {
    Finite(Segment),
    Infinite,
}

fn evaluate_segment(g: &impl Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Result<Evaluated> {
    let ((ref r7, ref w7), (ref r15, ref w15)) = *rules();
    let i7 = apply_rule(g, a, b, &(r7.clone(), w7.clone()));
    let i15 = apply_rule(g, a, b, &(r15.clone(), w15.clone()));
    if i7.is_nan() || i15.is_nan() {
        return Err(Error::Eval(format!("integrand produced NaN on [{a}, {b}]")));
    }
    if i7.is_infinite() || i15.is_infinite() {
        return Ok(Evaluated::Infinite);
    }
    Ok(Evaluated::Finite(Segment {
        a,
        b,
        value: i15,
        err: (i15 - i7).abs(),
        depth,
    }))
}

/// Adaptive quadrature of a nonnegative integrand over `support`, which may
/// extend to +inf (mapped to a finite interval by r = lo + u/(1-u)).
///
/// Error control is global: the worst segment is refined until the summed
/// rule discrepancy drops below the tolerance. Divergent integrals return
/// Ok(+inf); an unconverged but apparently finite integral is a numeric
/// error carrying the best estimate.
pub fn quad_radial(
    f: impl Fn(f64) -> f64,
    support: Interval,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    cfg.validate()?;
    if support.lo.is_infinite() {
        return Err(Error::argument("quad_radial: lower limit must be finite"));
    }
    if support.hi <= support.lo {
        return Ok(0.0);
    }

    // Reduce to a finite interval.
    let lo = support.lo;
    let g: Box<dyn Fn(f64) -> f64> = if support.hi.is_infinite() {
        Box::new(move |u: f64| {
            let om = 1.0 - u;
            if om <= 0.0 {
                return 0.0; // rule nodes are interior, this is unreachable
            }
            f(lo + u / om) / (om * om)
        })
    } else {
        Box::new(f)
    };
    let (a0, b0) = if support.hi.is_infinite() {
        (0.0, 1.0)
    } else {
        (lo, support.hi)
    };

    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    let mut total;
    let mut global_err;
    match evaluate_segment(&g, a0, b0, 0)? {
        Evaluated::Infinite => return Ok(f64::INFINITY),
        Evaluated::Finite(seg) => {
            total = seg.value;
            global_err = seg.err;
            heap.push(seg);
        }
    }

    loop {
        if total > DIVERGENCE_THRESHOLD {
            return Ok(f64::INFINITY);
        }
        if global_err <= cfg.abs_tol + cfg.rel_tol * total.abs() {
            return Ok(total);
        }
        if heap.len() > MAX_SEGMENTS {
            return Err(Error::numeric(
                format!("quadrature segment budget exhausted (err {global_err:.3e})"),
                total,
            ));
        }
        let worst = heap.pop().expect("heap holds all unaccepted error");
        let width = worst.b - worst.a;
        if worst.depth >= cfg.quad_max_depth || width < 1e-250 {
            if diverges_at_endpoint(&g, worst.a, worst.b, true)
                || diverges_at_endpoint(&g, worst.a, worst.b, false)
            {
                return Ok(f64::INFINITY);
            }
            return Err(Error::numeric(
                format!(
                    "quadrature not converged on [{}, {}] at depth {} (err {:.3e})",
                    worst.a, worst.b, worst.depth, global_err
                ),
                total,
            ));
        }
        total -= worst.value;
        global_err -= worst.err;
        let mid = 0.5 * (worst.a + worst.b);
        for (ca, cb) in [(worst.a, mid), (mid, worst.b)] {
            match evaluate_segment(&g, ca, cb, worst.depth + 1)? {
                Evaluated::Infinite => return Ok(f64::INFINITY),
                Evaluated::Finite(seg) => {
                    total += seg.value;
                    global_err += seg.err;
                    heap.push(seg);
                }
            }
        }
    }
}
