//! Archimedean generator algebra.
//!
//! A proper generator psi maps [0, inf] onto [0, 1] and builds a copula by
//! psi(sum of psi-inverses); a Levy generator phi maps (0, inf) onto itself
//! and plays the same role for jump measures. The two classes are linked by
//! phi = -log(1 - psi), and both are parametrized by radial measures through
//! the Williamson transform.

mod radial;
mod williamson;

use std::fmt;
use std::sync::Arc;

pub use radial::{
    clayton_radial, clayton_radial_table, erlang2_radial, truncated_reciprocal,
    truncated_reciprocal_law, RadialKind, RadialMeasure, RealFn,
};
pub use williamson::{inverse_survival, williamson_inverse, williamson_transform};

use crate::error::{Error, Result};
use crate::numerics::{
    d_monotone_check, generalized_inverse, Interval, MonotoneFunction, SignMode, ToleranceConfig,
};

enum PsiForm {
    /// 1/(1+x), the parameter-free Clayton generator.
    Clayton,
    /// exp(-x).
    Exponential,
    /// max(0, 1-x): Williamson 2-transform of the unit Dirac.
    LinearCap,
    WilliamsonOf(Arc<RadialMeasure>),
    FromPhi(Arc<LevyGenerator>),
    /// Monotone table on [0, x_last]; first node must be (0, 1).
    Table { xs: Vec<f64>, values: Vec<f64> },
}

/// Archimedean generator of a proper copula: decreasing, psi(0)=1,
/// psi(inf)=0, d-monotone at the declared dimension.
pub struct ProperGenerator {
    pub d: usize,
    form: PsiForm,
}

impl fmt::Debug for ProperGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.form {
            PsiForm::Clayton => "clayton".into(),
            PsiForm::Exponential => "exponential".into(),
            PsiForm::LinearCap => "linear-cap".into(),
            PsiForm::WilliamsonOf(m) => format!("williamson-of({m:?})"),
            PsiForm::FromPhi(_) => "from-phi".into(),
            PsiForm::Table { xs, .. } => format!("table({} nodes)", xs.len()),
        };
        write!(f, "ProperGenerator{{d: {}, form: {name}}}", self.d)
    }
}

enum PhiForm {
    /// 1/x.
    Reciprocal,
    FromPsi(Arc<ProperGenerator>),
    WilliamsonOf(Arc<RadialMeasure>),
    /// Monotone table on [x_first, x_last], x_first > 0.
    Table { xs: Vec<f64>, values: Vec<f64> },
}

/// Archimedean generator of a Levy copula: decreasing, phi(0+)=inf,
/// phi(inf)=0, d-monotone at the declared dimension.
pub struct LevyGenerator {
    pub d: usize,
    form: PhiForm,
}

impl fmt::Debug for LevyGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.form {
            PhiForm::Reciprocal => "reciprocal".into(),
            PhiForm::FromPsi(_) => "from-psi".into(),
            PhiForm::WilliamsonOf(m) => format!("williamson-of({m:?})"),
            PhiForm::Table { xs, .. } => format!("table({} nodes)", xs.len()),
        };
        write!(f, "LevyGenerator{{d: {}, form: {name}}}", self.d)
    }
}

fn validate_table(xs: &[f64], values: &[f64], x0_at_zero: bool) -> Result<()> {
    if xs.len() != values.len() || xs.len() < 2 {
        return Err(Error::argument(
            "generator table: need >= 2 nodes with matching lengths",
        ));
    }
    if xs.iter().chain(values.iter()).any(|v| !v.is_finite()) {
        return Err(Error::argument("generator table: non-finite entry"));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument(
            "generator table: nodes must be strictly increasing",
        ));
    }
    if x0_at_zero {
        if xs[0] != 0.0 || (values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::argument(
                "generator table: proper generator tables must start at (0, 1)",
            ));
        }
    } else if xs[0] <= 0.0 {
        return Err(Error::argument(
            "generator table: Levy generator tables must start at x > 0",
        ));
    }
    if values.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::argument("generator table: values must not increase"));
    }
    if values.iter().any(|v| *v < 0.0) {
        return Err(Error::argument("generator table: values must be >= 0"));
    }
    Ok(())
}

fn interp(xs: &[f64], values: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x <= xs[0] {
        return values[0];
    }
    if x >= xs[last] {
        return values[last];
    }
    let i = xs.partition_point(|&node| node <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    values[i] + w * (values[i + 1] - values[i])
}

impl ProperGenerator {
    pub fn clayton(d: usize) -> Self {
        Self {
            d,
            form: PsiForm::Clayton,
        }
    }

    pub fn exponential(d: usize) -> Self {
        Self {
            d,
            form: PsiForm::Exponential,
        }
    }

    /// Valid at d=2 only (higher orders fail 3-monotonicity at the kink).
    pub fn linear_cap() -> Self {
        Self {
            d: 2,
            form: PsiForm::LinearCap,
        }
    }

    pub fn from_radial(radial: Arc<RadialMeasure>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::argument("from_radial: d must be >= 2"));
        }
        Ok(Self {
            d,
            form: PsiForm::WilliamsonOf(radial),
        })
    }

    pub fn from_phi(phi: Arc<LevyGenerator>) -> Self {
        Self {
            d: phi.d,
            form: PsiForm::FromPhi(phi),
        }
    }

    pub fn from_table(xs: Vec<f64>, values: Vec<f64>, d: usize) -> Result<Self> {
        validate_table(&xs, &values, true)?;
        if values.iter().any(|v| *v > 1.0 + 1e-12) {
            return Err(Error::argument("generator table: psi values must be <= 1"));
        }
        Ok(Self {
            d,
            form: PsiForm::Table { xs, values },
        })
    }

    pub fn eval(&self, x: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::argument("psi: argument must be in [0, inf]"));
        }
        match &self.form {
            PsiForm::Clayton => Ok(if x == f64::INFINITY { 0.0 } else { 1.0 / (1.0 + x) }),
            PsiForm::Exponential => Ok((-x).exp()),
            PsiForm::LinearCap => Ok(if x == f64::INFINITY {
                0.0
            } else {
                (1.0 - x).max(0.0)
            }),
            PsiForm::WilliamsonOf(m) => williamson_transform(m, self.d, x, cfg),
            PsiForm::FromPhi(phi) => {
                let v = phi.eval(x, cfg)?;
                // 1 - exp(-phi); exact 1 at the phi = inf boundary.
                Ok(-(-v).exp_m1())
            }
            PsiForm::Table { xs, values } => {
                if x == f64::INFINITY {
                    return Ok(0.0);
                }
                let last = *xs.last().expect("validated");
                if x > last {
                    return Err(Error::Eval(format!(
                        "psi table: {x} outside tabulated domain [0, {last}]"
                    )));
                }
                Ok(interp(xs, values, x))
            }
        }
    }

    /// Infallible variant for finite-difference internals; errors surface
    /// as NaN and are caught by the caller's finiteness checks.
    pub(crate) fn eval_or_nan(&self, x: f64, cfg: &ToleranceConfig) -> f64 {
        self.eval(x, cfg).unwrap_or(f64::NAN)
    }

    /// Pseudo-inverse inf{x >= 0 : psi(x) <= y}.
    pub fn inverse(&self, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if y.is_nan() || !(0.0..=1.0).contains(&y) {
            return Err(Error::argument("psi inverse: y must be in [0, 1]"));
        }
        match &self.form {
            PsiForm::Clayton => Ok(if y == 0.0 { f64::INFINITY } else { 1.0 / y - 1.0 }),
            PsiForm::Exponential => Ok(if y == 0.0 { f64::INFINITY } else { -y.ln() }),
            PsiForm::LinearCap => Ok(if y >= 1.0 {
                0.0
            } else if y <= 0.0 {
                1.0
            } else {
                1.0 - y
            }),
            PsiForm::FromPhi(phi) => phi.inverse(-(-y).ln_1p(), cfg),
            PsiForm::WilliamsonOf(_) => self.inverse_numeric(y, f64::INFINITY, cfg),
            PsiForm::Table { xs, .. } => {
                self.inverse_numeric(y, *xs.last().expect("validated"), cfg)
            }
        }
    }

    fn inverse_numeric(&self, y: f64, hi: f64, cfg: &ToleranceConfig) -> Result<f64> {
        let cfg_owned = *cfg;
        let form = match &self.form {
            PsiForm::WilliamsonOf(m) => PsiForm::WilliamsonOf(m.clone()),
            PsiForm::Table { xs, values } => PsiForm::Table {
                xs: xs.clone(),
                values: values.clone(),
            },
            _ => unreachable!("numeric inverse only for williamson/table forms"),
        };
        let g = ProperGenerator { d: self.d, form };
        let mf =
            MonotoneFunction::decreasing(Interval::new(0.0, hi)?, move |x| {
                g.eval_or_nan(x, &cfg_owned)
            });
        generalized_inverse(&mf, y, cfg)
    }

    /// Structural check of the generator invariants at dimension d.
    pub fn validate(&self, cfg: &ToleranceConfig) -> Result<()> {
        let at0 = self.eval(0.0, cfg)?;
        if (at0 - 1.0).abs() > 1e-6 {
            return Err(Error::Degenerate(format!("psi(0) = {at0}, expected 1")));
        }
        let far = self.eval(1e8f64.min(self.domain_hi()), cfg)?;
        if far > 1e-3 {
            return Err(Error::Degenerate(format!(
                "psi does not vanish at infinity (psi(far) = {far})"
            )));
        }
        let hi = self.domain_hi().min(5.0);
        // Stencils overlap (grid step = h, stencil width = d*h) so a sign
        // defect anywhere in [0, hi] lies inside some stencil; divided
        // differences of d-monotone functions keep their sign at any spacing.
        let d = self.d.max(1);
        let h = hi / 40.0 / d as f64;
        let grid: Vec<f64> = (0..=39 * d).map(|i| i as f64 * h).collect();
        let cfg_owned = *cfg;
        let ok = d_monotone_check(
            |x| self.eval_or_nan(x, &cfg_owned),
            self.d,
            &grid,
            h,
            SignMode::CompletelyMonotone,
            1e-9,
        )?;
        if !ok {
            return Err(Error::Degenerate(format!(
                "psi fails {}-monotonicity",
                self.d
            )));
        }
        Ok(())
    }

    fn domain_hi(&self) -> f64 {
        match &self.form {
            PsiForm::Table { xs, .. } => *xs.last().expect("validated"),
            _ => f64::INFINITY,
        }
    }
}

impl LevyGenerator {
    pub fn reciprocal(d: usize) -> Self {
        Self {
            d,
            form: PhiForm::Reciprocal,
        }
    }

    pub fn from_psi(psi: Arc<ProperGenerator>) -> Self {
        Self {
            d: psi.d,
            form: PhiForm::FromPsi(psi),
        }
    }

    pub fn from_radial(radial: Arc<RadialMeasure>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::argument("from_radial: d must be >= 2"));
        }
        Ok(Self {
            d,
            form: PhiForm::WilliamsonOf(radial),
        })
    }

    pub fn from_table(xs: Vec<f64>, values: Vec<f64>, d: usize) -> Result<Self> {
        validate_table(&xs, &values, false)?;
        Ok(Self {
            d,
            form: PhiForm::Table { xs, values },
        })
    }

    pub fn eval(&self, x: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::argument("phi: argument must be in [0, inf]"));
        }
        match &self.form {
            PhiForm::Reciprocal => Ok(if x == 0.0 {
                f64::INFINITY
            } else if x == f64::INFINITY {
                0.0
            } else {
                1.0 / x
            }),
            PhiForm::FromPsi(psi) => {
                let v = psi.eval(x, cfg)?;
                // -log(1 - psi); the log1p form stays exact as psi -> 1.
                Ok(-(-v).ln_1p())
            }
            PhiForm::WilliamsonOf(m) => williamson_transform(m, self.d, x, cfg),
            PhiForm::Table { xs, values } => {
                if x == 0.0 {
                    return Ok(f64::INFINITY);
                }
                if x == f64::INFINITY {
                    return Ok(0.0);
                }
                let first = xs[0];
                let last = *xs.last().expect("validated");
                if x < first || x > last {
                    return Err(Error::Eval(format!(
                        "phi table: {x} outside tabulated domain [{first}, {last}]"
                    )));
                }
                Ok(interp(xs, values, x))
            }
        }
    }

    pub(crate) fn eval_or_nan(&self, x: f64, cfg: &ToleranceConfig) -> f64 {
        self.eval(x, cfg).unwrap_or(f64::NAN)
    }

    /// Pseudo-inverse inf{x >= 0 : phi(x) <= y}.
    pub fn inverse(&self, y: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::argument("phi inverse: y must be in [0, inf]"));
        }
        match &self.form {
            PhiForm::Reciprocal => Ok(if y == 0.0 {
                f64::INFINITY
            } else if y == f64::INFINITY {
                0.0
            } else {
                1.0 / y
            }),
            PhiForm::FromPsi(psi) => psi.inverse(-(-y).exp_m1(), cfg),
            PhiForm::WilliamsonOf(_) | PhiForm::Table { .. } => {
                let (lo, hi) = match &self.form {
                    PhiForm::Table { xs, .. } => (xs[0], *xs.last().expect("validated")),
                    _ => (0.0, f64::INFINITY),
                };
                let cfg_owned = *cfg;
                let form = match &self.form {
                    PhiForm::WilliamsonOf(m) => PhiForm::WilliamsonOf(m.clone()),
                    PhiForm::Table { xs, values } => PhiForm::Table {
                        xs: xs.clone(),
                        values: values.clone(),
                    },
                    _ => unreachable!(),
                };
                let g = LevyGenerator { d: self.d, form };
                let mf = MonotoneFunction::decreasing(Interval::new(lo, hi)?, move |x| {
                    g.eval_or_nan(x, &cfg_owned)
                });
                generalized_inverse(&mf, y, cfg)
            }
        }
    }

    /// Structural check of the generator invariants at dimension d.
    pub fn validate(&self, cfg: &ToleranceConfig) -> Result<()> {
        let near0 = self.eval(self.domain_lo().max(1e-8), cfg)?;
        if near0 < 1e3 && self.domain_lo() < 1e-7 {
            return Err(Error::Degenerate(format!(
                "phi does not blow up at 0 (phi(1e-8) = {near0})"
            )));
        }
        let far = self.eval(1e8f64.min(self.domain_hi()), cfg)?;
        if far > 1e-3 && self.domain_hi() > 1e7 {
            return Err(Error::Degenerate(format!(
                "phi does not vanish at infinity (phi(far) = {far})"
            )));
        }
        let lo = self.domain_lo().max(0.05);
        let hi = self.domain_hi().min(5.0);
        // See ProperGenerator::validate for the overlapping-stencil layout.
        let d = self.d.max(1);
        let h = (hi - lo) / 40.0 / d as f64;
        let grid: Vec<f64> = (0..=39 * d).map(|i| lo + i as f64 * h).collect();
        let cfg_owned = *cfg;
        let ok = d_monotone_check(
            |x| self.eval_or_nan(x, &cfg_owned),
            self.d,
            &grid,
            h,
            SignMode::CompletelyMonotone,
            1e-9,
        )?;
        if !ok {
            return Err(Error::Degenerate(format!(
                "phi fails {}-monotonicity",
                self.d
            )));
        }
        Ok(())
    }

    fn domain_lo(&self) -> f64 {
        match &self.form {
            PhiForm::Table { xs, .. } => xs[0],
            _ => 0.0,
        }
    }

    fn domain_hi(&self) -> f64 {
        match &self.form {
            PhiForm::Table { xs, .. } => *xs.last().expect("validated"),
            _ => f64::INFINITY,
        }
    }
}

/// phi(x) = -log(1 - psi(x)); carries the dimension over.
pub fn psi_to_phi(psi: Arc<ProperGenerator>) -> LevyGenerator {
    LevyGenerator::from_psi(psi)
}

/// psi(x) = 1 - exp(-phi(x)); carries the dimension over.
pub fn phi_to_psi(phi: Arc<LevyGenerator>) -> ProperGenerator {
    ProperGenerator::from_phi(phi)
}
