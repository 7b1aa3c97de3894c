//! Jump-record simulation and the verification targets it is checked
//! against.
//!
//! A truncated jump measure on the positive orthant drives a compound
//! Poisson replicate per horizon window. Each replicate records its jumps,
//! the running componentwise extrema, and which jumps are records in the
//! partial order: an upper record is preceded only by points weakly above
//! it (strictly in at least one coordinate), a lower record by no point
//! weakly above it. Ties are never records.
//!
//! The closed forms verified here: hitting an open filter has probability
//! 1 - exp(-t nu(filter)) when the filter is pinned by marginal
//! constraints, avoidance of a closed filter has probability
//! exp(-t nu(complement)), and the expected number of upper records of
//! the span-maxima sequence landing in an open filter equals
//! t nu(filter) in one dimension. Interior product filters in higher
//! dimension break the hitting identity; `factorization_check` and the
//! diagnostic tests pin the gap instead of hiding it.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::RadialMeasure;
use crate::levy::{MeasureForm, TailIntegralSpec};
use crate::numerics::{
    generalized_inverse, mean_and_se, quad_radial, simplex_sample, substream, Interval,
    MonotoneFunction, ToleranceConfig,
};

/// Replicates are drawn in blocks of this size, one RNG substream per
/// block, so parallel runs are byte-identical to serial ones.
const BLOCK: usize = 4096;

/// A point estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Which record process a closed-form law refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordSide {
    Upper,
    Lower,
}

/// A truncated jump measure together with the simulation horizon.
///
/// Jumps with radial part below `truncation_eps` are discarded, so the
/// driving measure has finite total mass and the jump count per window is
/// Poisson with mean `horizon_t * truncated_mass()`.
#[derive(Clone)]
pub struct JumpProcessSpec {
    pub d: usize,
    pub nu: TailIntegralSpec,
    pub truncation_eps: f64,
    pub horizon_t: f64,
    /// nu of the truncated region, fixed at construction.
    theta: f64,
    /// Per-axis truncated masses (axis form only).
    axis_weights: Vec<f64>,
}

impl JumpProcessSpec {
    pub fn new(
        nu: TailIntegralSpec,
        truncation_eps: f64,
        horizon_t: f64,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if nu.orthant_signs.iter().any(|s| *s != 1) {
            return Err(Error::argument(
                "jump process: measure must live on the positive orthant",
            ));
        }
        if !(truncation_eps > 0.0) || !truncation_eps.is_finite() {
            return Err(Error::argument(
                "jump process: truncation_eps must be finite positive",
            ));
        }
        if !(horizon_t > 0.0) || !horizon_t.is_finite() {
            return Err(Error::argument(
                "jump process: horizon_t must be finite positive",
            ));
        }
        let (theta, axis_weights) = match &nu.form {
            MeasureForm::RadialSimplex { lambda } => {
                (lambda.tail_mass(truncation_eps, cfg)?, Vec::new())
            }
            MeasureForm::Axis { margins } => {
                let mut w = Vec::with_capacity(margins.len());
                for m in margins {
                    w.push(m.tail_mass(truncation_eps, cfg)?);
                }
                (w.iter().sum(), w)
            }
        };
        if !theta.is_finite() || !(theta > 0.0) {
            return Err(Error::argument(format!(
                "jump process: truncated mass must be finite positive, got {theta}"
            )));
        }
        Ok(Self {
            d: nu.d,
            nu,
            truncation_eps,
            horizon_t,
            theta,
            axis_weights,
        })
    }

    /// nu of the region kept by the truncation.
    pub fn truncated_mass(&self) -> f64 {
        self.theta
    }
}

/// One simulated window: the jump list in arrival order, the running
/// componentwise extrema after each jump, and the indices of the record
/// jumps. `running_max_path` is componentwise nondecreasing and
/// `running_min_path` nonincreasing; both are empty iff `jumps` is.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecordSample {
    pub d: usize,
    pub jumps: Vec<Vec<f64>>,
    pub running_max_path: Vec<Vec<f64>>,
    pub running_min_path: Vec<Vec<f64>>,
    pub records_upper: Vec<usize>,
    pub records_lower: Vec<usize>,
    pub seed: u64,
}

impl JumpRecordSample {
    /// Componentwise maximum over the window; the origin when no jump
    /// arrived, which is the bottom element of the orthant order.
    pub fn span_max(&self) -> Vec<f64> {
        self.running_max_path
            .last()
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.d])
    }

    /// Componentwise minimum over the window, when any jump arrived.
    pub fn span_min(&self) -> Option<&Vec<f64>> {
        self.running_min_path.last()
    }
}

/// a >= b in the componentwise order.
fn weakly_above(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// a > b strictly in every coordinate, i.e. a lies in the open filter of b.
fn strictly_above(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x > y)
}

/// Upper-record flags: point n is a record when every earlier point is
/// weakly above it and none coincides with it. An exact tie disqualifies
/// the later point.
pub fn upper_record_flags(points: &[Vec<f64>]) -> Vec<bool> {
    points
        .iter()
        .enumerate()
        .map(|(n, p)| {
            points[..n]
                .iter()
                .all(|q| weakly_above(q, p) && q.as_slice() != p.as_slice())
        })
        .collect()
}

/// Lower-record flags: point n is a record when no earlier point is
/// weakly above it.
pub fn lower_record_flags(points: &[Vec<f64>]) -> Vec<bool> {
    points
        .iter()
        .enumerate()
        .map(|(n, p)| points[..n].iter().all(|q| !weakly_above(q, p)))
        .collect()
}

/// Inverse samplers for the truncated jump measure, built once per
/// replicate batch.
enum JumpDraw {
    Radial {
        tail: MonotoneFunction,
        theta: f64,
    },
    Axis {
        tails: Vec<MonotoneFunction>,
        weights: Vec<f64>,
        theta: f64,
    },
}

fn truncated_tail_fn(m: &Arc<RadialMeasure>, eps: f64, cfg: &ToleranceConfig) -> MonotoneFunction {
    let lam = Arc::clone(m);
    let c = *cfg;
    let lo = eps.max(lam.support().lo);
    MonotoneFunction::decreasing(
        Interval::new(lo, f64::INFINITY).expect("eps is finite positive"),
        move |r| lam.tail_mass(r, &c).unwrap_or(f64::NAN),
    )
}

impl JumpDraw {
    fn build(spec: &JumpProcessSpec, cfg: &ToleranceConfig) -> Self {
        match &spec.nu.form {
            MeasureForm::RadialSimplex { lambda } => JumpDraw::Radial {
                tail: truncated_tail_fn(lambda, spec.truncation_eps, cfg),
                theta: spec.theta,
            },
            MeasureForm::Axis { margins } => JumpDraw::Axis {
                tails: margins
                    .iter()
                    .map(|m| truncated_tail_fn(m, spec.truncation_eps, cfg))
                    .collect(),
                weights: spec.axis_weights.clone(),
                theta: spec.theta,
            },
        }
    }

    /// Magnitude with tail mass theta*(1-u) under the given tail function;
    /// u in [0,1) keeps the target inside (0, theta].
    fn invert_tail(
        tail: &MonotoneFunction,
        theta: f64,
        u: f64,
        cfg: &ToleranceConfig,
    ) -> Result<f64> {
        generalized_inverse(tail, theta * (1.0 - u), cfg)
    }

    fn draw(&self, d: usize, rng: &mut impl Rng, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
        match self {
            JumpDraw::Radial { tail, theta } => {
                let r = Self::invert_tail(tail, *theta, rng.gen::<f64>(), cfg)?;
                if d == 1 {
                    return Ok(vec![r]);
                }
                let s = simplex_sample(d, rng)?;
                Ok(s.into_iter().map(|si| r * si).collect())
            }
            JumpDraw::Axis {
                tails,
                weights,
                theta,
            } => {
                let pick = rng.gen::<f64>() * theta;
                let mut acc = 0.0;
                let mut axis = tails.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if pick < acc {
                        axis = i;
                        break;
                    }
                }
                let m = Self::invert_tail(&tails[axis], weights[axis], rng.gen::<f64>(), cfg)?;
                let mut jump = vec![0.0; d];
                jump[axis] = m;
                Ok(jump)
            }
        }
    }
}

fn build_sample(d: usize, jumps: Vec<Vec<f64>>, seed: u64) -> JumpRecordSample {
    let mut running_max_path = Vec::with_capacity(jumps.len());
    let mut running_min_path = Vec::with_capacity(jumps.len());
    let mut mx = vec![f64::NEG_INFINITY; d];
    let mut mn = vec![f64::INFINITY; d];
    for j in &jumps {
        for i in 0..d {
            mx[i] = mx[i].max(j[i]);
            mn[i] = mn[i].min(j[i]);
        }
        running_max_path.push(mx.clone());
        running_min_path.push(mn.clone());
    }
    let upper = upper_record_flags(&jumps);
    let lower = lower_record_flags(&jumps);
    let collect = |flags: Vec<bool>| {
        flags
            .into_iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    };
    JumpRecordSample {
        d,
        jumps,
        running_max_path,
        running_min_path,
        records_upper: collect(upper),
        records_lower: collect(lower),
        seed,
    }
}

/// Simulate one window of the truncated jump process on replicate stream
/// `index` of the generator keyed by `seed`.
pub fn simulate_jumps(
    spec: &JumpProcessSpec,
    seed: u64,
    index: u64,
    cfg: &ToleranceConfig,
) -> Result<JumpRecordSample> {
    let draw = JumpDraw::build(spec, cfg);
    simulate_with(spec, &draw, seed, index, cfg)
}

fn simulate_with(
    spec: &JumpProcessSpec,
    draw: &JumpDraw,
    seed: u64,
    index: u64,
    cfg: &ToleranceConfig,
) -> Result<JumpRecordSample> {
    let mut rng = substream(seed, index);
    let lambda = spec.horizon_t * spec.theta;
    let poisson = Poisson::new(lambda)
        .map_err(|e| Error::argument(format!("jump count: Poisson({lambda}): {e}")))?;
    let n = poisson.sample(&mut rng) as usize;
    let mut jumps = Vec::with_capacity(n);
    for _ in 0..n {
        jumps.push(draw.draw(spec.d, &mut rng, cfg)?);
    }
    Ok(build_sample(spec.d, jumps, seed))
}

/// Simulate `n_replicates` independent windows; replicate i uses RNG
/// substream (seed, i), so the output is independent of thread scheduling.
pub fn simulate_replicates(
    spec: &JumpProcessSpec,
    n_replicates: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Vec<JumpRecordSample>> {
    if n_replicates == 0 {
        return Err(Error::argument("simulate_replicates: need n >= 1"));
    }
    let draw = JumpDraw::build(spec, cfg);
    let blocks: Vec<(usize, usize)> = (0..n_replicates)
        .step_by(BLOCK)
        .map(|start| (start, (start + BLOCK).min(n_replicates)))
        .collect();
    let chunks: Result<Vec<Vec<JumpRecordSample>>> = blocks
        .into_par_iter()
        .map(|(start, end)| {
            (start..end)
                .map(|i| simulate_with(spec, &draw, seed, i as u64, cfg))
                .collect()
        })
        .collect();
    Ok(chunks?.concat())
}

fn check_query_point(samples: &[JumpRecordSample], x: &[f64]) -> Result<usize> {
    let d = samples
        .first()
        .ok_or_else(|| Error::argument("empty replicate list"))?
        .d;
    if x.len() != d {
        return Err(Error::argument(format!(
            "query point has {} coordinates, replicates have {d}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::argument(
            "query point must be finite and nonnegative",
        ));
    }
    Ok(d)
}

/// Fraction of replicates whose running maximum lies in the open filter of
/// x, i.e. ends strictly above x in every coordinate. A window without
/// jumps never hits.
pub fn empirical_hitting(samples: &[JumpRecordSample], x: &[f64]) -> Result<f64> {
    check_query_point(samples, x)?;
    let hits = samples
        .iter()
        .filter(|s| strictly_above(&s.span_max(), x))
        .count();
    Ok(hits as f64 / samples.len() as f64)
}

/// Fraction of replicates all of whose jumps stay weakly above x, so the
/// running minimum never leaves the closed filter of x. A window without
/// jumps avoids vacuously.
pub fn empirical_avoidance_lower(samples: &[JumpRecordSample], x: &[f64]) -> Result<f64> {
    check_query_point(samples, x)?;
    let ok = samples
        .iter()
        .filter(|s| match s.span_min() {
            Some(mn) => weakly_above(mn, x),
            None => true,
        })
        .count();
    Ok(ok as f64 / samples.len() as f64)
}

/// Standard error of a binomial fraction estimated from n trials.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n.max(1) as f64).sqrt()
}

/// Mean number of upper records of the span-maxima sequence that land in
/// the open filter of x, with its standard error across sequences.
///
/// Consecutive replicates are read as consecutive horizon windows; each
/// group of `spans_per_sequence` windows yields one span-maxima sequence
/// (a window without jumps contributes the origin, which blocks later
/// records exactly as the theory prescribes). Replicates beyond the last
/// complete group are ignored. In one dimension the mean converges to
/// t * nu(filter); in higher dimension no such identity holds and the
/// estimate is reported as data.
pub fn record_count_estimate(
    samples: &[JumpRecordSample],
    x: &[f64],
    spans_per_sequence: usize,
) -> Result<Estimate> {
    check_query_point(samples, x)?;
    if spans_per_sequence < 2 {
        return Err(Error::argument(
            "record_count_estimate: need at least 2 spans per sequence",
        ));
    }
    if samples.len() < spans_per_sequence {
        return Err(Error::argument(
            "record_count_estimate: fewer replicates than one sequence",
        ));
    }
    let counts: Vec<f64> = samples
        .chunks_exact(spans_per_sequence)
        .map(|chunk| {
            let maxima: Vec<Vec<f64>> = chunk.iter().map(|s| s.span_max()).collect();
            let flags = upper_record_flags(&maxima);
            maxima
                .iter()
                .zip(flags)
                .filter(|(m, is_record)| *is_record && strictly_above(m, x))
                .count() as f64
        })
        .collect();
    let (value, se) = mean_and_se(&counts)?;
    Ok(Estimate { value, se })
}

/// Law of the radial record at horizon t under a one-dimensional jump
/// intensity `nu_zeta`: the upper value returns the survival probability
/// 1 - exp(-t nu((r, inf))), the lower value the probability
/// exp(-t nu([0, r))) that no jump has landed below r. Infinite intensity
/// on the queried side saturates the probability instead of erroring.
pub fn radial_record_cdf(
    nu_zeta: &RadialMeasure,
    t: f64,
    r: f64,
    side: RecordSide,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::argument(
            "radial_record_cdf: t must be finite nonnegative",
        ));
    }
    if !(r >= 0.0) {
        return Err(Error::argument("radial_record_cdf: r must be nonnegative"));
    }
    match side {
        RecordSide::Upper => {
            let tail = nu_zeta.tail_mass(r, cfg)?;
            Ok(-(-t * tail).exp_m1())
        }
        RecordSide::Lower => {
            // Mass strictly below r: an atom exactly at r does not count.
            let below = match nu_zeta.dirac_parts() {
                Some((r0, mass)) => {
                    if r0 < r {
                        mass
                    } else {
                        0.0
                    }
                }
                None => match nu_zeta.cumulative_mass(r, cfg) {
                    Ok(v) => v,
                    Err(Error::Degenerate(_)) => f64::INFINITY,
                    Err(e) => return Err(e),
                },
            };
            Ok((-t * below).exp())
        }
    }
}

/// Comparison of the joint survival of the running maximum with the
/// product of its marginal survivals, one row per grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub grid: Vec<Vec<f64>>,
    pub joint: Vec<f64>,
    pub product: Vec<f64>,
    pub gap: Vec<f64>,
    pub se: Vec<f64>,
    pub max_abs_gap: f64,
    /// True when every gap is within 3 standard errors of zero.
    pub factorizes: bool,
}

/// Estimate P(M > x componentwise) - prod_i P(M_i > x_i) at each grid
/// point, with a delta-method standard error. Measures concentrated on the
/// axes factorize; a shared radial part couples the margins and shows up
/// as gaps beyond noise.
pub fn factorization_check(
    samples: &[JumpRecordSample],
    grid: &[Vec<f64>],
) -> Result<FactorizationReport> {
    if grid.is_empty() {
        return Err(Error::argument("factorization_check: empty grid"));
    }
    let d = check_query_point(samples, &grid[0])?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::argument("factorization_check: need n >= 2"));
    }
    let maxima: Vec<Vec<f64>> = samples.iter().map(|s| s.span_max()).collect();
    let mut joint = Vec::with_capacity(grid.len());
    let mut product = Vec::with_capacity(grid.len());
    let mut gap = Vec::with_capacity(grid.len());
    let mut se = Vec::with_capacity(grid.len());
    for x in grid {
        check_query_point(samples, x)?;
        let marg: Vec<f64> = (0..d)
            .map(|i| maxima.iter().filter(|m| m[i] > x[i]).count() as f64 / n as f64)
            .collect();
        let p_joint = maxima.iter().filter(|m| strictly_above(m, x)).count() as f64 / n as f64;
        let prod: f64 = marg.iter().product();
        // Delta method: the gap's influence per replicate is the joint
        // indicator minus the sum of marginal indicators weighted by the
        // product of the other margins.
        let coeff: Vec<f64> = (0..d)
            .map(|i| {
                marg.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, q)| q)
                    .product()
            })
            .collect();
        let influences: Vec<f64> = maxima
            .iter()
            .map(|m| {
                let a = strictly_above(m, x) as u8 as f64;
                let b: f64 = (0..d)
                    .map(|i| coeff[i] * ((m[i] > x[i]) as u8 as f64))
                    .sum();
                a - b
            })
            .collect();
        let (_, gap_se) = mean_and_se(&influences)?;
        joint.push(p_joint);
        product.push(prod);
        gap.push(p_joint - prod);
        se.push(gap_se);
    }
    let max_abs_gap = gap.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
    let factorizes = gap
        .iter()
        .zip(&se)
        .all(|(g, s)| g.abs() <= 3.0 * s + 1e-12);
    Ok(FactorizationReport {
        grid: grid.to_vec(),
        joint,
        product,
        gap,
        se,
        max_abs_gap,
        factorizes,
    })
}

/// Observations R_n * S with iid radii from a continuous probability law
/// and a uniform simplex direction; records are decided by the radius
/// alone.
#[derive(Clone)]
pub struct IidRadialSpec {
    pub d: usize,
    pub f_r: Arc<RadialMeasure>,
    pub n_obs: usize,
}

impl IidRadialSpec {
    pub fn new(d: usize, f_r: Arc<RadialMeasure>, n_obs: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::argument("iid radial: d must be >= 1"));
        }
        if n_obs == 0 {
            return Err(Error::argument("iid radial: n_obs must be >= 1"));
        }
        if f_r.kind != crate::generators::RadialKind::ProbabilityCdf {
            return Err(Error::argument(
                "iid radial: radial law must be a probability cdf",
            ));
        }
        if f_r.dirac_parts().is_some() {
            return Err(Error::argument(
                "iid radial: radial law must be continuous, a point mass ties with itself",
            ));
        }
        Ok(Self { d, f_r, n_obs })
    }
}

/// integral of (1 - sum(x)/r)_+^{d-1} * weight(F(r)) dF(r) over the radial
/// support, the common kernel of the iid record formulas.
fn iid_radial_integral(
    spec: &IidRadialSpec,
    x: &[f64],
    weight: impl Fn(f64) -> f64 + Copy,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let s: f64 = x.iter().sum();
    let total = spec.f_r.total_mass(cfg)?;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::argument("iid radial: law has no finite mass"));
    }
    let dm1 = (spec.d - 1) as i32;
    let c = *cfg;
    let law = Arc::clone(&spec.f_r);
    let cdf = move |r: f64| {
        law.cumulative_mass(r, &c)
            .map(|v| (v / total).clamp(0.0, 1.0))
            .unwrap_or(f64::NAN)
    };
    let kernel = move |r: f64| {
        if r <= s {
            return 0.0;
        }
        let k = (1.0 - s / r).powi(dm1);
        k * weight(cdf(r))
    };
    if let Some(cells) = spec.f_r.table_cells() {
        let mut acc = 0.0;
        for (lo, hi, density) in cells {
            if density == 0.0 || hi <= s {
                continue;
            }
            let a = lo.max(s);
            acc += density / total * quad_radial(&kernel, Interval::new(a, hi)?, cfg)?;
        }
        return Ok(acc);
    }
    let (pdf, support, _) = spec
        .f_r
        .density_parts()
        .ok_or_else(|| Error::argument("iid radial: unsupported radial form"))?;
    let lo = support.lo.max(s);
    if lo >= support.hi {
        return Ok(0.0);
    }
    let integrand = move |r: f64| kernel(r) * pdf(r) / total;
    quad_radial(integrand, Interval::new(lo, support.hi)?, cfg)
}

/// Probability that the n-th observation is a strict radial record and
/// lands in the closed filter of x. Returns the Monte Carlo estimate over
/// `n_mc` replays next to the quadrature value of
/// integral (1 - sum(x)/r)_+^{d-1} F(r)^{n-1} dF(r).
pub fn iid_record_prob(
    spec: &IidRadialSpec,
    n: usize,
    x: &[f64],
    seed: u64,
    n_mc: usize,
    cfg: &ToleranceConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::argument("iid_record_prob: n must be >= 1"));
    }
    if n_mc == 0 {
        return Err(Error::argument("iid_record_prob: n_mc must be >= 1"));
    }
    if x.len() != spec.d {
        return Err(Error::argument("iid_record_prob: x has wrong dimension"));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::argument(
            "iid_record_prob: x must be finite and nonnegative",
        ));
    }
    let formula = iid_radial_integral(spec, x, |f| f.powi(n as i32 - 1), cfg)?;

    let blocks: Vec<(usize, usize)> = (0..n_mc)
        .step_by(BLOCK)
        .map(|start| (start, (start + BLOCK).min(n_mc)))
        .collect();
    let counts: Result<Vec<usize>> = blocks
        .into_par_iter()
        .enumerate()
        .map(|(b, (start, end))| {
            let mut rng = substream(seed, b as u64);
            let mut radii = vec![0.0_f64; n];
            let mut hits = 0usize;
            for _ in start..end {
                for r in radii.iter_mut() {
                    *r = spec.f_r.sample_radius(&mut rng, cfg)?;
                }
                let direction = if spec.d == 1 {
                    vec![1.0]
                } else {
                    simplex_sample(spec.d, &mut rng)?
                };
                let rn = radii[n - 1];
                let record = radii[..n - 1].iter().all(|rk| rn > *rk);
                if record && direction.iter().zip(x).all(|(si, xi)| rn * si >= *xi) {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    let hits: usize = counts?.iter().sum();
    Ok((hits as f64 / n_mc as f64, formula))
}

/// Expected number of record observations landing in the closed filter of
/// x among the first `n_max`, by quadrature: the weights F^{n-1} sum to
/// (1 - F^{n_max}) / (1 - F). Nondecreasing in `n_max` and vanishing when
/// sum(x) reaches the radial support's upper end.
pub fn truncated_expected_records(
    spec: &IidRadialSpec,
    n_max: usize,
    x: &[f64],
    cfg: &ToleranceConfig,
) -> Result<f64> {
    cfg.validate()?;
    if n_max == 0 {
        return Err(Error::argument(
            "truncated_expected_records: n_max must be >= 1",
        ));
    }
    if x.len() != spec.d {
        return Err(Error::argument(
            "truncated_expected_records: x has wrong dimension",
        ));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::argument(
            "truncated_expected_records: x must be finite and nonnegative",
        ));
    }
    let n = n_max as i32;
    iid_radial_integral(
        spec,
        x,
        move |f| {
            if f > 1.0 - 1e-12 {
                n as f64
            } else {
                (1.0 - f.powi(n)) / (1.0 - f)
            }
        },
        cfg,
    )
}

/// One verification row: an identity checked by Monte Carlo against its
/// closed-form target on a grid of query points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub grid: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub estimate: Vec<f64>,
    pub se: Vec<f64>,
    pub pass: bool,
}

impl VerificationReport {
    /// Pass iff every estimate is within `k` standard errors of its
    /// target; rows with zero standard error must match exactly.
    pub fn from_rows(
        identity: impl Into<String>,
        grid: Vec<Vec<f64>>,
        target: Vec<f64>,
        estimate: Vec<f64>,
        se: Vec<f64>,
        k: f64,
    ) -> Result<Self> {
        let n = grid.len();
        if target.len() != n || estimate.len() != n || se.len() != n {
            return Err(Error::argument("verification report: ragged columns"));
        }
        let pass = target
            .iter()
            .zip(&estimate)
            .zip(&se)
            .all(|((t, e), s)| (t - e).abs() <= k * s + 1e-12);
        Ok(Self {
            identity: identity.into(),
            grid,
            target,
            estimate,
            se,
            pass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{truncated_reciprocal, RadialKind};
    use crate::levy::MeasureForm;
    use crate::numerics::rectangle_volume;
    use crate::numerics::Rectangle;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn radial_spec_d1(eps: f64, t: f64) -> JumpProcessSpec {
        let lambda = Arc::new(truncated_reciprocal(1, eps).unwrap());
        let nu = TailIntegralSpec::positive_orthant(1, MeasureForm::RadialSimplex { lambda })
            .unwrap();
        JumpProcessSpec::new(nu, eps, t, &cfg()).unwrap()
    }

    fn radial_spec_d2(eps: f64, t: f64) -> JumpProcessSpec {
        let lambda = Arc::new(truncated_reciprocal(2, eps).unwrap());
        let nu = TailIntegralSpec::positive_orthant(2, MeasureForm::RadialSimplex { lambda })
            .unwrap();
        JumpProcessSpec::new(nu, eps, t, &cfg()).unwrap()
    }

    fn uniform_radial() -> Arc<RadialMeasure> {
        Arc::new(
            RadialMeasure::table(vec![0.0, 1.0], vec![0.0, 1.0], RadialKind::ProbabilityCdf)
                .unwrap(),
        )
    }

    #[test]
    fn jump_counts_truncation_and_paths() {
        let spec = radial_spec_d1(0.1, 1.0);
        assert!((spec.truncated_mass() - 10.0).abs() < 1e-9);
        let samples = simulate_replicates(&spec, 4000, 7, &cfg()).unwrap();
        let mean_n =
            samples.iter().map(|s| s.jumps.len() as f64).sum::<f64>() / samples.len() as f64;
        // Poisson(10) mean over 4000 replicates: 3 sigma is about 0.15.
        assert!((mean_n - 10.0).abs() < 0.25, "mean jump count {mean_n}");
        for s in samples.iter().take(200) {
            for j in &s.jumps {
                assert!(j[0] >= 0.1 - 1e-12);
            }
            for w in s.running_max_path.windows(2) {
                assert!(w[1][0] >= w[0][0]);
            }
            for w in s.running_min_path.windows(2) {
                assert!(w[1][0] <= w[0][0]);
            }
            // Re-derive the record flags by brute force.
            for (i, j) in s.jumps.iter().enumerate() {
                let upper = s.jumps[..i]
                    .iter()
                    .all(|q| q[0] >= j[0] && q.as_slice() != j.as_slice());
                let lower = s.jumps[..i].iter().all(|q| q[0] < j[0]);
                assert_eq!(s.records_upper.contains(&i), upper);
                assert_eq!(s.records_lower.contains(&i), lower);
            }
        }
    }

    #[test]
    fn replicates_are_reproducible_and_streams_distinct() {
        let spec = radial_spec_d2(0.5, 1.0);
        let a = simulate_replicates(&spec, 300, 42, &cfg()).unwrap();
        let b = simulate_replicates(&spec, 300, 42, &cfg()).unwrap();
        assert_eq!(a, b);
        let c = simulate_jumps(&spec, 42, 0, &cfg()).unwrap();
        assert_eq!(a[0], c);
        let d = simulate_jumps(&spec, 42, 1, &cfg()).unwrap();
        assert_ne!(a[0].jumps, d.jumps);
    }

    #[test]
    fn empty_window_conventions() {
        // Mean count 1e-4: the first replicate is empty with near certainty.
        let lambda = Arc::new(truncated_reciprocal(1, 100.0).unwrap());
        let nu = TailIntegralSpec::positive_orthant(1, MeasureForm::RadialSimplex { lambda })
            .unwrap();
        let spec = JumpProcessSpec::new(nu, 100.0, 0.01, &cfg()).unwrap();
        let s = simulate_jumps(&spec, 1, 0, &cfg()).unwrap();
        assert!(s.jumps.is_empty());
        assert!(s.running_max_path.is_empty());
        assert_eq!(s.span_max(), vec![0.0]);
        assert!(s.span_min().is_none());
        let samples = vec![s];
        assert_eq!(empirical_hitting(&samples, &[0.0]).unwrap(), 0.0);
        assert_eq!(empirical_avoidance_lower(&samples, &[5.0]).unwrap(), 1.0);
    }

    #[test]
    fn hitting_and_avoidance_match_thinning_probabilities() {
        // tail 1/x beyond eps = 0.5; horizon 1.
        let spec = radial_spec_d1(0.5, 1.0);
        let n = 20_000;
        let samples = simulate_replicates(&spec, n, 11, &cfg()).unwrap();
        for (x, target) in [(1.0, 1.0_f64), (2.0, 0.5)] {
            let hit = empirical_hitting(&samples, &[x]).unwrap();
            let p = -(-target).exp_m1();
            let tol = 3.0 * binomial_se(p, n) + 1e-3;
            assert!((hit - p).abs() < tol, "hit({x}) = {hit}, want {p}");
        }
        // Avoidance of [x, inf]: no jump in [eps, x).
        let avoid = empirical_avoidance_lower(&samples, &[0.75]).unwrap();
        let p = (-(2.0 - 1.0 / 0.75_f64)).exp();
        assert!((avoid - p).abs() < 3.0 * binomial_se(p, n) + 1e-3);
        assert_eq!(empirical_avoidance_lower(&samples, &[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn record_counts_match_intensity_in_one_dimension() {
        let spec = radial_spec_d1(0.1, 1.0);
        let samples = simulate_replicates(&spec, 20_000, 3, &cfg()).unwrap();
        for (x, target) in [(1.0, 1.0), (0.5, 2.0)] {
            let est = record_count_estimate(&samples, &[x], 100).unwrap();
            assert!(
                (est.value - target).abs() < 3.0 * est.se + 0.02,
                "records above {x}: {} +- {}, want {target}",
                est.value,
                est.se
            );
        }
    }

    #[test]
    fn radial_record_laws() {
        let c = cfg();
        // Untruncated reciprocal tail 1/r: upper record law at r = 2.
        let nu = truncated_reciprocal(1, 1e-12).unwrap();
        let p = radial_record_cdf(&nu, 1.0, 2.0, RecordSide::Upper, &c).unwrap();
        assert!((p - 0.3934693402873666).abs() < 1e-12);
        assert_eq!(
            radial_record_cdf(&nu, 0.0, 2.0, RecordSide::Upper, &c).unwrap(),
            0.0
        );
        // Truncated at 0.5: mass below 2 is 2 - 0.5.
        let nu = truncated_reciprocal(1, 0.5).unwrap();
        let p = radial_record_cdf(&nu, 1.0, 2.0, RecordSide::Lower, &c).unwrap();
        assert!((p - (-1.5_f64).exp()).abs() < 1e-10);
        // Bare divergent density: infinite mass below r saturates at 0.
        let raw = RadialMeasure::density(
            Arc::new(|r: f64| 1.0 / (r * r)),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            RadialKind::GeneralPositive,
        )
        .unwrap();
        let p = radial_record_cdf(&raw, 1.0, 2.0, RecordSide::Lower, &c).unwrap();
        assert_eq!(p, 0.0);
        // Atom exactly at r does not count as mass below r.
        let atom = RadialMeasure::dirac(2.0, 3.0, RadialKind::GeneralPositive).unwrap();
        let p = radial_record_cdf(&atom, 1.0, 2.0, RecordSide::Lower, &c).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn iid_records_uniform_radius() {
        let c = cfg();
        let spec = IidRadialSpec::new(2, uniform_radial(), 3).unwrap();
        // Record probability 1/n at the origin, any dimension.
        for n in 1..=3usize {
            let (mc, formula) = iid_record_prob(&spec, n, &[0.0, 0.0], 5, 20_000, &c).unwrap();
            assert!((formula - 1.0 / n as f64).abs() < 1e-8, "formula n={n}");
            let tol = 3.0 * binomial_se(formula, 20_000) + 1e-3;
            assert!((mc - formula).abs() < tol, "mc n={n}: {mc} vs {formula}");
        }
        // Interior query point, frozen quadrature value.
        let (mc, formula) = iid_record_prob(&spec, 2, &[0.1, 0.2], 5, 20_000, &c).unwrap();
        assert!((formula - 0.245).abs() < 1e-8);
        assert!((mc - formula).abs() < 3.0 * binomial_se(formula, 20_000) + 1e-3);
        // Truncated expectations: harmonic numbers at the origin.
        let e3 = truncated_expected_records(&spec, 3, &[0.0, 0.0], &c).unwrap();
        assert!((e3 - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-8);
        let e1 = truncated_expected_records(&spec, 1, &[0.0, 0.0], &c).unwrap();
        assert!((e1 - 1.0).abs() < 1e-8);
        assert!(e3 > e1);
        // Query beyond the radial support.
        let far = truncated_expected_records(&spec, 3, &[0.6, 0.5], &c).unwrap();
        assert_eq!(far, 0.0);
        // A point mass is not a continuous radial law.
        let dirac = Arc::new(RadialMeasure::dirac(1.0, 1.0, RadialKind::ProbabilityCdf).unwrap());
        assert!(IidRadialSpec::new(2, dirac, 1).is_err());
    }

    #[test]
    fn axis_measures_factorize_and_radial_ones_do_not() {
        let c = cfg();
        let eps = 0.8;
        let margin = || Arc::new(truncated_reciprocal(1, eps).unwrap());
        let nu = TailIntegralSpec::positive_orthant(
            2,
            MeasureForm::Axis {
                margins: vec![margin(), margin()],
            },
        )
        .unwrap();
        let spec = JumpProcessSpec::new(nu, eps, 1.0, &c).unwrap();
        assert!((spec.truncated_mass() - 2.5).abs() < 1e-9);
        let samples = simulate_replicates(&spec, 15_000, 9, &c).unwrap();
        let grid = vec![vec![1.0, 1.0], vec![1.5, 0.9]];
        let report = factorization_check(&samples, &grid).unwrap();
        assert!(report.factorizes, "axis gaps {:?}", report.gap);
        // Margins of the axis process follow the radial record law.
        let m = margin();
        let q = samples
            .iter()
            .filter(|s| s.span_max()[0] > 1.0)
            .count() as f64
            / samples.len() as f64;
        let target = radial_record_cdf(&m, 1.0, 1.0, RecordSide::Upper, &c).unwrap();
        assert!((q - target).abs() < 3.0 * binomial_se(target, samples.len()) + 1e-3);

        // A shared radial part couples the margins.
        let spec = radial_spec_d2(eps, 1.0);
        let samples = simulate_replicates(&spec, 15_000, 10, &c).unwrap();
        let report = factorization_check(&samples, &grid).unwrap();
        assert!(!report.factorizes, "radial gaps {:?}", report.gap);
    }

    #[test]
    fn interior_filters_break_the_hitting_identity_in_d2() {
        // Marginal filters obey 1 - exp(-t nu), interior product filters
        // exceed it: the running maximum accumulates coordinates across
        // jumps that no single jump covers.
        let c = cfg();
        let spec = radial_spec_d2(0.1, 1.0);
        let n = 10_000;
        let samples = simulate_replicates(&spec, n, 13, &c).unwrap();
        let marginal = empirical_hitting(&samples, &[1.0, 0.0]).unwrap();
        let target = -(-1.0_f64).exp_m1();
        assert!(
            (marginal - target).abs() < 3.0 * binomial_se(target, n) + 2e-3,
            "marginal filter {marginal} vs {target}"
        );
        let interior = empirical_hitting(&samples, &[1.0, 1.0]).unwrap();
        let naive = -(-0.5_f64).exp_m1();
        assert!(
            interior - naive > 10.0 * binomial_se(naive, n),
            "interior filter {interior} should exceed the single-jump value {naive}"
        );
    }

    #[test]
    fn candidate_record_law_is_not_a_cdf_in_d2() {
        // 1 - exp(-t nu(filter)) with a shared radial part fails
        // 2-monotonicity: this rectangle has negative mass, so no random
        // vector has it as a distribution function.
        let c = cfg();
        let lambda = truncated_reciprocal(2, 0.1).unwrap();
        let h = move |x: &[f64]| {
            let v = x[0] + x[1];
            let w = crate::generators::williamson_transform(&lambda, 2, v, &c).unwrap();
            -(-w).exp_m1()
        };
        let rect = Rectangle::new(vec![0.05, 0.05], vec![0.10, 0.10]).unwrap();
        let vol = rectangle_volume(h, &rect).unwrap();
        let closed = 2.0 * (-1.0 / 0.15_f64).exp() - (-5.0_f64).exp() - (-10.0_f64).exp();
        assert!((vol - closed).abs() < 1e-6, "volume {vol} vs {closed}");
        assert!(vol < -4e-3);
    }

    #[test]
    fn query_validation() {
        let spec = radial_spec_d1(0.5, 1.0);
        let samples = simulate_replicates(&spec, 10, 1, &cfg()).unwrap();
        assert!(empirical_hitting(&samples, &[1.0, 2.0]).is_err());
        assert!(empirical_hitting(&samples, &[-1.0]).is_err());
        assert!(empirical_hitting(&[], &[1.0]).is_err());
        assert!(record_count_estimate(&samples, &[1.0], 1).is_err());
        assert!(record_count_estimate(&samples, &[1.0], 11).is_err());
        let nu = TailIntegralSpec::new(
            1,
            MeasureForm::RadialSimplex {
                lambda: Arc::new(truncated_reciprocal(1, 0.5).unwrap()),
            },
            vec![-1],
        )
        .unwrap();
        assert!(JumpProcessSpec::new(nu, 0.5, 1.0, &cfg()).is_err());
    }
}
