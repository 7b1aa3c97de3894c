//! Proper copulas on [0,1]^d.
//!
//! Closed-form families (independence, comonotone, the d=2 countermonotone
//! bound, Clayton with unit parameter) plus the Archimedean construction
//! `psi(psi^{-1}(u_1) + ... + psi^{-1}(u_d))` from a validated generator.
//! Sampling goes through the radial-simplex decomposition: X = R * S with R
//! drawn from the generator's radial pre-image and S uniform on the simplex,
//! then U_i = psi(X_i).

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{ProperGenerator, RadialKind, RadialMeasure};
use crate::numerics::{simplex_sample, substream, ToleranceConfig};

/// Points per sampling block; each block owns one RNG substream so results
/// are reproducible regardless of thread count.
const BLOCK: usize = 4096;

#[derive(Clone)]
pub enum CopulaFamily {
    Independence,
    Comonotone,
    /// max(0, u1 + u2 - 1); a copula only in dimension two.
    FrechetLower,
    /// (1 + sum(1/u_i - 1))^{-1}, the unit-parameter form.
    Clayton,
    Archimedean(Arc<ProperGenerator>),
}

impl CopulaFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CopulaFamily::Independence => "independence",
            CopulaFamily::Comonotone => "comonotone",
            CopulaFamily::FrechetLower => "frechet-lower",
            CopulaFamily::Clayton => "clayton",
            CopulaFamily::Archimedean(_) => "archimedean",
        }
    }
}

#[derive(Clone)]
pub struct CopulaSpec {
    pub d: usize,
    pub family: CopulaFamily,
}

impl CopulaSpec {
    pub fn new(d: usize, family: CopulaFamily) -> Result<Self> {
        if d < 2 {
            return Err(Error::argument("copula: dimension must be >= 2"));
        }
        if matches!(family, CopulaFamily::FrechetLower) && d != 2 {
            return Err(Error::argument(
                "frechet-lower is a copula only in dimension 2",
            ));
        }
        if let CopulaFamily::Archimedean(psi) = &family {
            if psi.d != d {
                return Err(Error::argument(
                    "archimedean copula: generator dimension mismatch",
                ));
            }
        }
        Ok(Self { d, family })
    }
}

fn check_unit_cube(u: &[f64], d: usize) -> Result<()> {
    if u.len() != d {
        return Err(Error::argument("copula_eval: argument length != d"));
    }
    if u.iter().any(|v| !(*v >= 0.0 && *v <= 1.0)) {
        return Err(Error::argument("copula_eval: arguments must lie in [0,1]"));
    }
    Ok(())
}

pub fn copula_eval(c: &CopulaSpec, u: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    check_unit_cube(u, c.d)?;
    if u.iter().any(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let value = match &c.family {
        CopulaFamily::Independence => u.iter().product(),
        CopulaFamily::Comonotone => u.iter().cloned().fold(f64::INFINITY, f64::min),
        CopulaFamily::FrechetLower => (u[0] + u[1] - 1.0).max(0.0),
        CopulaFamily::Clayton => {
            let s: f64 = u.iter().map(|v| 1.0 / v - 1.0).sum();
            1.0 / (1.0 + s)
        }
        CopulaFamily::Archimedean(psi) => {
            let mut s = 0.0;
            for &v in u {
                s += psi.inverse(v, cfg)?;
            }
            psi.eval(s, cfg)?
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Worst deviations from the two-sided pointwise bounds
/// max(0, sum u_i - d + 1) <= C(u) <= min(u_i); nonpositive means satisfied.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FrechetReport {
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
}

impl FrechetReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.max_lower_violation <= tol && self.max_upper_violation <= tol
    }
}

pub fn frechet_check(
    c: &CopulaSpec,
    grid: &[Vec<f64>],
    cfg: &ToleranceConfig,
) -> Result<FrechetReport> {
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for u in grid {
        let v = copula_eval(c, u, cfg)?;
        let lo = (u.iter().sum::<f64>() - (c.d as f64 - 1.0)).max(0.0);
        let hi = u.iter().cloned().fold(f64::INFINITY, f64::min);
        lower = lower.max(lo - v);
        upper = upper.max(v - hi);
    }
    Ok(FrechetReport {
        max_lower_violation: lower.max(0.0),
        max_upper_violation: upper.max(0.0),
    })
}

/// Sample drawn from a copula; `points` is row-major n x d.
#[derive(Debug, Clone)]
pub struct CopulaSample {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub points: Vec<f64>,
}

impl CopulaSample {
    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.d..(j + 1) * self.d]
    }

    /// CSV with a metadata comment line, header u1..ud, one row per point.
    pub fn to_csv(&self, family: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# seed={} n={} family={}\n",
            self.seed, self.n, family
        ));
        let header: Vec<String> = (1..=self.d).map(|i| format!("u{i}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for j in 0..self.n {
            let row: Vec<String> = self.point(j).iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Draws n points whose survival copula is the Archimedean copula of `psi`:
/// R from the radial law, S uniform on the simplex, U_i = psi(R * S_i).
/// Blocks of fixed size own independent substreams and are concatenated in
/// block order, so output depends only on (seed, n).
pub fn sample_archimedean(
    psi: &ProperGenerator,
    radial: &RadialMeasure,
    d: usize,
    n: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<CopulaSample> {
    if d < 2 {
        return Err(Error::argument("sample_archimedean: dimension must be >= 2"));
    }
    if n == 0 {
        return Err(Error::argument("sample_archimedean: n must be >= 1"));
    }
    if radial.kind != RadialKind::ProbabilityCdf {
        return Err(Error::argument(
            "sample_archimedean: radial measure must be a probability law",
        ));
    }
    let n_blocks = n.div_ceil(BLOCK);
    let blocks: Vec<Vec<f64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let count = BLOCK.min(n - b * BLOCK);
            let mut out = Vec::with_capacity(count * d);
            for _ in 0..count {
                let r = radial.sample_radius(&mut rng, cfg)?;
                let s = simplex_sample(d, &mut rng)?;
                for si in s {
                    out.push(psi.eval(r * si, cfg)?.clamp(0.0, 1.0));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let points: Vec<f64> = blocks.concat();
    Ok(CopulaSample {
        d,
        n,
        seed,
        points,
    })
}

/// Empirical copula of the rank-transformed sample at u: the fraction of
/// pseudo-observations componentwise <= u. Ranks use the inclusive count
/// #\{k: x_k <= x\}/n, so tied values share the largest rank.
pub fn empirical_copula(s: &CopulaSample, u: &[f64]) -> Result<f64> {
    if s.n == 0 {
        return Err(Error::argument("empirical_copula: empty sample"));
    }
    check_unit_cube(u, s.d)?;
    let n = s.n;
    let mut sorted: Vec<Vec<f64>> = Vec::with_capacity(s.d);
    for i in 0..s.d {
        let mut col: Vec<f64> = (0..n).map(|j| s.points[j * s.d + i]).collect();
        col.sort_by(f64::total_cmp);
        sorted.push(col);
    }
    let mut hits = 0usize;
    for j in 0..n {
        let inside = (0..s.d).all(|i| {
            let x = s.points[j * s.d + i];
            let rank = sorted[i].partition_point(|v| *v <= x);
            rank as f64 / n as f64 <= u[i]
        });
        if inside {
            hits += 1;
        }
    }
    Ok(hits as f64 / n as f64)
}

/// Draw an i.i.d. uniform-product sample; verification baseline for the
/// empirical copula.
pub fn sample_independence(d: usize, n: usize, seed: u64) -> Result<CopulaSample> {
    if d < 2 || n == 0 {
        return Err(Error::argument("sample_independence: need d >= 2, n >= 1"));
    }
    let n_blocks = n.div_ceil(BLOCK);
    let blocks: Vec<Vec<f64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b as u64);
            let count = BLOCK.min(n - b * BLOCK);
            (0..count * d).map(|_| rng.gen::<f64>()).collect()
        })
        .collect();
    Ok(CopulaSample {
        d,
        n,
        seed,
        points: blocks.concat(),
    })
}
