use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{quad_radial, Interval, ToleranceConfig};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// What the increasing function represents; sampling is only meaningful for
/// probability cdfs, and hazard transforms carry infinite total mass by
/// construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RadialKind {
    ProbabilityCdf,
    HazardTransform,
    GeneralPositive,
}

enum RadialForm {
    Dirac {
        r0: f64,
        mass: f64,
    },
    /// Piecewise-linear cumulative through (rs[i], cumulative[i]);
    /// cumulative[0] must be 0 and no mass lives beyond the last node.
    Table {
        rs: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Density {
        pdf: RealFn,
        support: Interval,
        /// Closed-form mass of (a, inf) when available; avoids quadrature.
        survival: Option<RealFn>,
        /// Closed-form inverse cdf for probability kind.
        quantile: Option<RealFn>,
    },
}

/// A positive measure on (0, inf) described by its cumulative mass function.
/// Total mass may be infinite (general-positive and hazard kinds).
pub struct RadialMeasure {
    pub kind: RadialKind,
    form: RadialForm,
    sample_nodes: OnceLock<(Vec<f64>, Vec<f64>)>, // (cdf values, radii)
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match &self.form {
            RadialForm::Dirac { r0, mass } => format!("Dirac{{r0: {r0}, mass: {mass}}}"),
            RadialForm::Table { rs, .. } => format!("Table{{{} nodes}}", rs.len()),
            RadialForm::Density { support, .. } => format!("Density{{support: {support:?}}}"),
        };
        write!(f, "RadialMeasure{{kind: {:?}, form: {form}}}", self.kind)
    }
}

impl RadialMeasure {
    pub fn dirac(r0: f64, mass: f64, kind: RadialKind) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::argument("dirac radial: r0 must be finite positive"));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::argument("dirac radial: mass must be finite positive"));
        }
        Ok(Self {
            kind,
            form: RadialForm::Dirac { r0, mass },
            sample_nodes: OnceLock::new(),
        })
    }

    pub fn table(rs: Vec<f64>, cumulative: Vec<f64>, kind: RadialKind) -> Result<Self> {
        if rs.len() != cumulative.len() || rs.len() < 2 {
            return Err(Error::argument(
                "table radial: need >= 2 nodes with matching lengths",
            ));
        }
        if rs[0] < 0.0 || rs.iter().any(|r| !r.is_finite()) {
            return Err(Error::argument("table radial: nodes must be finite, >= 0"));
        }
        if rs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument(
                "table radial: nodes must be strictly increasing",
            ));
        }
        if cumulative[0] != 0.0 {
            return Err(Error::argument(
                "table radial: cumulative must start at 0 (prepend a zero-mass node)",
            ));
        }
        if cumulative.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::argument(
                "table radial: cumulative must be finite, >= 0",
            ));
        }
        if cumulative.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::argument("table radial: cumulative must not decrease"));
        }
        if kind == RadialKind::ProbabilityCdf {
            let total = *cumulative.last().expect("len >= 2");
            if (total - 1.0).abs() > 1e-3 {
                return Err(Error::argument(format!(
                    "table radial: probability kind must have total mass ~ 1, got {total}"
                )));
            }
        }
        Ok(Self {
            kind,
            form: RadialForm::Table { rs, cumulative },
            sample_nodes: OnceLock::new(),
        })
    }

    pub fn density(pdf: RealFn, support: Interval, kind: RadialKind) -> Result<Self> {
        Self::density_with(pdf, support, None, None, kind)
    }

    /// `survival` is the closed-form mass of (a, inf); `quantile` the inverse
    /// of the normalized cdf. Both are trusted as stated and only
    /// spot-checked by the round-trip tests.
    pub fn density_with(
        pdf: RealFn,
        support: Interval,
        survival: Option<RealFn>,
        quantile: Option<RealFn>,
        kind: RadialKind,
    ) -> Result<Self> {
        if support.lo < 0.0 {
            return Err(Error::argument(
                "density radial: support must lie in [0, inf)",
            ));
        }
        Ok(Self {
            kind,
            form: RadialForm::Density {
                pdf,
                support,
                survival,
                quantile,
            },
            sample_nodes: OnceLock::new(),
        })
    }

    pub fn support(&self) -> Interval {
        match &self.form {
            RadialForm::Dirac { r0, .. } => Interval::new(*r0, *r0).expect("validated"),
            RadialForm::Table { rs, .. } => {
                Interval::new(rs[0], *rs.last().expect("len >= 2")).expect("validated")
            }
            RadialForm::Density { support, .. } => *support,
        }
    }

    /// Mass of (0, r].
    pub fn cumulative_mass(&self, r: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if r.is_nan() {
            return Err(Error::argument("cumulative_mass: NaN argument"));
        }
        if r <= 0.0 {
            return Ok(0.0);
        }
        match &self.form {
            RadialForm::Dirac { r0, mass } => Ok(if r >= *r0 { *mass } else { 0.0 }),
            RadialForm::Table { rs, cumulative } => Ok(interp_table(rs, cumulative, r)),
            RadialForm::Density { survival, .. } => {
                if let Some(s) = survival {
                    let total = self.total_mass(cfg)?;
                    if total.is_infinite() {
                        return Err(Error::Degenerate(
                            "cumulative_mass undefined for infinite total mass".into(),
                        ));
                    }
                    return Ok((total - s(r)).max(0.0));
                }
                let sup = self.support();
                if r <= sup.lo {
                    return Ok(0.0);
                }
                let pdf = self.pdf_fn().expect("density form");
                quad_radial(
                    move |t| pdf(t),
                    Interval::new(sup.lo, r.min(sup.hi))?,
                    cfg,
                )
            }
        }
    }

    /// Mass of (a, inf).
    pub fn tail_mass(&self, a: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if a.is_nan() {
            return Err(Error::argument("tail_mass: NaN argument"));
        }
        if a == f64::INFINITY {
            return Ok(0.0);
        }
        match &self.form {
            RadialForm::Dirac { r0, mass } => Ok(if a < *r0 { *mass } else { 0.0 }),
            RadialForm::Table { rs, cumulative } => {
                let total = *cumulative.last().expect("len >= 2");
                Ok((total - interp_table(rs, cumulative, a)).max(0.0))
            }
            RadialForm::Density {
                pdf,
                support,
                survival,
                ..
            } => {
                if let Some(s) = survival {
                    return Ok(s(a.max(0.0)));
                }
                let lo = a.max(support.lo);
                if lo >= support.hi {
                    return Ok(0.0);
                }
                let pdf = pdf.clone();
                quad_radial(move |t| pdf(t), Interval::new(lo, support.hi)?, cfg)
            }
        }
    }

    pub fn total_mass(&self, cfg: &ToleranceConfig) -> Result<f64> {
        self.tail_mass(0.0, cfg)
    }

    fn pdf_fn(&self) -> Option<RealFn> {
        match &self.form {
            RadialForm::Density { pdf, .. } => Some(pdf.clone()),
            _ => None,
        }
    }

    /// Per-cell decomposition of a table: (r_lo, r_hi, density).
    pub(crate) fn table_cells(&self) -> Option<Vec<(f64, f64, f64)>> {
        match &self.form {
            RadialForm::Table { rs, cumulative } => Some(
                rs.windows(2)
                    .zip(cumulative.windows(2))
                    .map(|(r, c)| (r[0], r[1], (c[1] - c[0]) / (r[1] - r[0])))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub(crate) fn dirac_parts(&self) -> Option<(f64, f64)> {
        match &self.form {
            RadialForm::Dirac { r0, mass } => Some((*r0, *mass)),
            _ => None,
        }
    }

    pub(crate) fn density_parts(&self) -> Option<(RealFn, Interval, Option<RealFn>)> {
        match &self.form {
            RadialForm::Density {
                pdf,
                support,
                survival,
                ..
            } => Some((pdf.clone(), *support, survival.clone())),
            _ => None,
        }
    }

    /// One draw from the normalized measure. Only probability cdfs can be
    /// sampled; tables are inverted by linear interpolation, densities by a
    /// closed-form quantile when present and a tabulated inverse otherwise.
    pub fn sample_radius(&self, rng: &mut impl Rng, cfg: &ToleranceConfig) -> Result<f64> {
        if self.kind != RadialKind::ProbabilityCdf {
            return Err(Error::argument(
                "sample_radius: radial measure is not a probability cdf",
            ));
        }
        let u: f64 = rng.gen::<f64>();
        match &self.form {
            RadialForm::Dirac { r0, .. } => Ok(*r0),
            RadialForm::Table { rs, cumulative } => {
                let total = *cumulative.last().expect("len >= 2");
                Ok(invert_interp(rs, cumulative, u * total))
            }
            RadialForm::Density { quantile, .. } => {
                if let Some(q) = quantile {
                    return Ok(q(u));
                }
                let (cdf, radii) = self.sample_nodes(cfg)?;
                Ok(invert_interp(radii, cdf, u))
            }
        }
    }

    /// Build (once) a monotone cdf table for the fallback inverse.
    fn sample_nodes(&self, cfg: &ToleranceConfig) -> Result<(&[f64], &[f64])> {
        if let Some((cdf, radii)) = self.sample_nodes.get() {
            return Ok((cdf, radii));
        }
        let sup = self.support();
        let n = 4097usize;
        let mut radii = Vec::with_capacity(n);
        for i in 0..n {
            let u = i as f64 / (n - 1) as f64;
            let r = if sup.hi.is_finite() {
                sup.lo + u * (sup.hi - sup.lo)
            } else {
                // u -> lo + u/(1-u) covers [lo, inf); drop the last point in.
                let u = u.min(1.0 - 1.0 / n as f64);
                sup.lo + u / (1.0 - u)
            };
            radii.push(r);
        }
        let mut cdf = Vec::with_capacity(n);
        for &r in &radii {
            cdf.push(self.cumulative_mass(r, cfg)?);
        }
        // Monotone regularization guards quadrature noise.
        for i in 1..n {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        // Strictness for inversion: collapse exact ties by nudging radii.
        let _ = self.sample_nodes.set((cdf, radii));
        let (cdf, radii) = self.sample_nodes.get().expect("just set");
        Ok((cdf, radii))
    }
}

/// Piecewise-linear interpolation of the cumulative table at r.
fn interp_table(rs: &[f64], cumulative: &[f64], r: f64) -> f64 {
    if r <= rs[0] {
        return cumulative[0];
    }
    let last = rs.len() - 1;
    if r >= rs[last] {
        return cumulative[last];
    }
    let i = rs.partition_point(|&node| node <= r) - 1;
    let w = (r - rs[i]) / (rs[i + 1] - rs[i]);
    cumulative[i] + w * (cumulative[i + 1] - cumulative[i])
}

/// Inverse of the piecewise-linear cumulative at target mass m (clamped).
fn invert_interp(rs: &[f64], cumulative: &[f64], m: f64) -> f64 {
    let last = cumulative.len() - 1;
    if m <= cumulative[0] {
        return rs[0];
    }
    if m >= cumulative[last] {
        return rs[last];
    }
    let i = cumulative.partition_point(|&c| c <= m) - 1;
    let dc = cumulative[i + 1] - cumulative[i];
    if dc <= 0.0 {
        return rs[i + 1];
    }
    rs[i] + (m - cumulative[i]) / dc * (rs[i + 1] - rs[i])
}

/// Radial probability measure whose Williamson 2-transform is 1/(1+x):
/// cdf r^2/(1+r)^2, density 2r/(1+r)^3, quantile sqrt(u)/(1-sqrt(u)).
pub fn clayton_radial() -> RadialMeasure {
    RadialMeasure::density_with(
        Arc::new(|r: f64| 2.0 * r / (1.0 + r).powi(3)),
        Interval::new(0.0, f64::INFINITY).expect("static"),
        Some(Arc::new(|a: f64| (1.0 + 2.0 * a) / (1.0 + a).powi(2))),
        Some(Arc::new(|u: f64| {
            let s = u.sqrt();
            s / (1.0 - s)
        })),
        RadialKind::ProbabilityCdf,
    )
    .expect("static construction")
}

/// Tabulated variant of `clayton_radial` on a log grid; exercises the
/// piecewise-linear code paths.
pub fn clayton_radial_table(nodes: usize, r_max: f64) -> Result<RadialMeasure> {
    if nodes < 8 || !(r_max > 1.0) {
        return Err(Error::argument(
            "clayton_radial_table: need >= 8 nodes and r_max > 1",
        ));
    }
    let r_min: f64 = 1e-4;
    let mut rs = vec![0.0];
    let mut cumulative = vec![0.0];
    for i in 0..nodes {
        let t = i as f64 / (nodes - 1) as f64;
        let r = r_min * (r_max / r_min).powf(t);
        rs.push(r);
        cumulative.push((r / (1.0 + r)).powi(2));
    }
    RadialMeasure::table(rs, cumulative, RadialKind::ProbabilityCdf)
}

/// Radial probability measure whose Williamson 2-transform is exp(-x):
/// survival (1+a)exp(-a), density r exp(-r).
pub fn erlang2_radial() -> RadialMeasure {
    RadialMeasure::density_with(
        Arc::new(|r: f64| r * (-r).exp()),
        Interval::new(0.0, f64::INFINITY).expect("static"),
        Some(Arc::new(|a: f64| (1.0 + a) * (-a).exp())),
        None,
        RadialKind::ProbabilityCdf,
    )
    .expect("static construction")
}

/// Infinite-activity radial measure d * r^{-2} dr truncated to [eps, inf);
/// its Williamson d-transform is 1/v for v >= eps, and the margins of the
/// induced jump measure have tail 1/x beyond eps.
pub fn truncated_reciprocal(d: usize, eps: f64) -> Result<RadialMeasure> {
    if d == 0 {
        return Err(Error::argument("truncated_reciprocal: d must be >= 1"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::argument(
            "truncated_reciprocal: eps must be finite positive",
        ));
    }
    let dd = d as f64;
    RadialMeasure::density_with(
        Arc::new(move |r: f64| dd / (r * r)),
        Interval::new(eps, f64::INFINITY)?,
        Some(Arc::new(move |a: f64| dd / a.max(eps))),
        None,
        RadialKind::GeneralPositive,
    )
}

/// Normalized radial law of `truncated_reciprocal`: cdf 1 - eps/r on
/// [eps, inf), quantile eps/(1-u). Used to draw jump radii.
pub fn truncated_reciprocal_law(eps: f64) -> Result<RadialMeasure> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::argument(
            "truncated_reciprocal_law: eps must be finite positive",
        ));
    }
    RadialMeasure::density_with(
        Arc::new(move |r: f64| eps / (r * r)),
        Interval::new(eps, f64::INFINITY)?,
        Some(Arc::new(move |a: f64| eps / a.max(eps))),
        Some(Arc::new(move |u: f64| eps / (1.0 - u).max(f64::MIN_POSITIVE))),
        RadialKind::ProbabilityCdf,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::substream;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn dirac_masses() {
        let m = RadialMeasure::dirac(2.0, 1.0, RadialKind::ProbabilityCdf).unwrap();
        assert_eq!(m.tail_mass(1.9, &cfg()).unwrap(), 1.0);
        assert_eq!(m.tail_mass(2.0, &cfg()).unwrap(), 0.0);
        assert_eq!(m.cumulative_mass(2.0, &cfg()).unwrap(), 1.0);
        assert_eq!(m.total_mass(&cfg()).unwrap(), 1.0);
    }

    #[test]
    fn table_interpolation() {
        // Uniform measure on (0, 2]: cumulative r/2.
        let m = RadialMeasure::table(
            vec![0.0, 2.0],
            vec![0.0, 1.0],
            RadialKind::ProbabilityCdf,
        )
        .unwrap();
        assert!((m.cumulative_mass(0.5, &cfg()).unwrap() - 0.25).abs() < 1e-15);
        assert!((m.tail_mass(1.0, &cfg()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(m.cumulative_mass(3.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn table_requires_zero_start() {
        let err = RadialMeasure::table(
            vec![1.0, 2.0],
            vec![0.5, 1.0],
            RadialKind::ProbabilityCdf,
        );
        assert!(err.is_err());
    }

    #[test]
    fn clayton_radial_is_normalized() {
        let m = clayton_radial();
        assert!((m.total_mass(&cfg()).unwrap() - 1.0).abs() < 1e-12);
        // Survival at 1 is 3/4, so the quantile at 1/4 is 1.
        assert!((m.tail_mass(1.0, &cfg()).unwrap() - 0.75).abs() < 1e-15);
        let mut rng = substream(3, 0);
        for _ in 0..100 {
            let r = m.sample_radius(&mut rng, &cfg()).unwrap();
            assert!(r >= 0.0 && r.is_finite());
        }
    }

    #[test]
    fn clayton_quantile_matches_cdf() {
        let m = clayton_radial();
        for u in [0.1f64, 0.25, 0.5, 0.9] {
            let s = u.sqrt();
            let r = s / (1.0 - s);
            let cdf = 1.0 - m.tail_mass(r, &cfg()).unwrap();
            assert!((cdf - u).abs() < 1e-12, "u={u} r={r} cdf={cdf}");
        }
    }

    #[test]
    fn erlang2_sampling_via_tabulated_inverse() {
        let m = erlang2_radial();
        let mut rng = substream(5, 0);
        let n = 20_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += m.sample_radius(&mut rng, &cfg()).unwrap();
        }
        let mean = sum / n as f64;
        // Mean 2, variance 2: 4 sigma window.
        let bound = 4.0 * (2.0f64 / n as f64).sqrt();
        assert!((mean - 2.0).abs() < bound, "mean {mean}");
    }

    #[test]
    fn truncated_reciprocal_masses() {
        let m = truncated_reciprocal(2, 0.8).unwrap();
        assert!((m.total_mass(&cfg()).unwrap() - 2.5).abs() < 1e-12);
        assert!((m.tail_mass(2.0, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        let law = truncated_reciprocal_law(0.8).unwrap();
        let mut rng = substream(9, 0);
        for _ in 0..200 {
            let r = law.sample_radius(&mut rng, &cfg()).unwrap();
            assert!(r >= 0.8);
        }
    }

    #[test]
    fn general_positive_cannot_sample() {
        let m = truncated_reciprocal(1, 0.5).unwrap();
        let mut rng = substream(1, 0);
        assert!(m.sample_radius(&mut rng, &cfg()).is_err());
    }
}
