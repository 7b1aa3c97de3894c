//! Lévy copulas and tail integrals on [0, ∞]^d.
//!
//! The bidirectional mapping with proper copulas,
//!   F(x) = -log(1 - C(1 - e^{-x_1}, ..., 1 - e^{-x_d})),
//!   C(u) = 1 - exp(-F(-log(1-u_1), ..., -log(1-u_d))),
//! is implemented through expm1/log1p so round trips hold to near machine
//! precision. Tail integrals evaluate a Lévy measure in radial-simplex or
//! axis form on the product sets J(x) (signed) and J⁺(x) (probabilistic,
//! reciprocal-transformed coordinates).

use std::sync::Arc;

use crate::copulas::{copula_eval, CopulaSpec, FrechetReport};
use crate::error::{Error, Result};
use crate::generators::{williamson_transform, LevyGenerator, RadialMeasure};
use crate::numerics::ToleranceConfig;

#[derive(Clone)]
pub enum LevyFamily {
    /// F(x) = min(x_1, ..., x_d); mass on the diagonal.
    CompleteDependence,
    /// F(x) = sum_i x_i prod_{k != i} 1{x_k = inf}; mass on the axes.
    Independence,
    ArchimedeanLevy(Arc<LevyGenerator>),
    FromProper(Arc<CopulaSpec>),
}

impl LevyFamily {
    pub fn name(&self) -> &'static str {
        match self {
            LevyFamily::CompleteDependence => "complete-dependence",
            LevyFamily::Independence => "independence",
            LevyFamily::ArchimedeanLevy(_) => "archimedean-levy",
            LevyFamily::FromProper(_) => "from-proper",
        }
    }
}

#[derive(Clone)]
pub struct LevyCopulaSpec {
    pub d: usize,
    pub family: LevyFamily,
}

impl LevyCopulaSpec {
    pub fn new(d: usize, family: LevyFamily) -> Result<Self> {
        if d < 2 {
            return Err(Error::argument("levy copula: dimension must be >= 2"));
        }
        match &family {
            LevyFamily::ArchimedeanLevy(phi) if phi.d != d => {
                return Err(Error::argument(
                    "archimedean-levy: generator dimension mismatch",
                ));
            }
            LevyFamily::FromProper(c) if c.d != d => {
                return Err(Error::argument("from-proper: copula dimension mismatch"));
            }
            _ => {}
        }
        Ok(Self { d, family })
    }
}

fn check_nonneg(x: &[f64], d: usize, what: &str) -> Result<()> {
    if x.len() != d {
        return Err(Error::argument(format!("{what}: argument length != d")));
    }
    if x.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::argument(format!(
            "{what}: arguments must lie in [0, inf]"
        )));
    }
    Ok(())
}

pub fn levy_eval(f: &LevyCopulaSpec, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    check_nonneg(x, f.d, "levy_eval")?;
    match &f.family {
        LevyFamily::CompleteDependence => {
            Ok(x.iter().cloned().fold(f64::INFINITY, f64::min))
        }
        LevyFamily::Independence => {
            let finite: Vec<f64> = x.iter().cloned().filter(|v| v.is_finite()).collect();
            Ok(match finite.len() {
                0 => f64::INFINITY,
                1 => finite[0],
                _ => 0.0,
            })
        }
        LevyFamily::ArchimedeanLevy(phi) => {
            if x.iter().any(|v| *v == 0.0) {
                return Ok(0.0);
            }
            // phi^{-1}(inf) = 0, so infinite coordinates drop out of the sum.
            let mut s = 0.0;
            for &v in x {
                if v.is_finite() {
                    s += phi.inverse(v, cfg)?;
                }
            }
            phi.eval(s, cfg)
        }
        LevyFamily::FromProper(c) => proper_to_levy(c, x, cfg),
    }
}

/// F(x) = -(prod sgn x_i) log(1 - C(1-e^{-|x_1|}, ..., 1-e^{-|x_d|})).
/// C = 1 at an interior point maps to the +-infinity flag, not an error.
pub fn proper_to_levy(c: &CopulaSpec, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    if x.len() != c.d {
        return Err(Error::argument("proper_to_levy: argument length != d"));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::argument("proper_to_levy: NaN argument"));
    }
    if x.iter().any(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let sign = x.iter().fold(1.0, |acc, v| acc * v.signum());
    let u: Vec<f64> = x.iter().map(|v| -(-v.abs()).exp_m1()).collect();
    let cv = copula_eval(c, &u, cfg)?;
    if cv >= 1.0 {
        return Ok(sign * f64::INFINITY);
    }
    Ok(-sign * (-cv).ln_1p())
}

/// C(u) = 1 - exp(-F(-log(1-u_1), ..., -log(1-u_d))). The independence
/// family has no proper-copula image (its measure sits on the axes).
pub fn levy_to_proper(f: &LevyCopulaSpec, u: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    if matches!(f.family, LevyFamily::Independence) {
        return Err(Error::Degenerate(
            "levy_to_proper: measure concentrated on the axes has no proper copula".into(),
        ));
    }
    if u.len() != f.d {
        return Err(Error::argument("levy_to_proper: argument length != d"));
    }
    if u.iter().any(|v| !(*v >= 0.0 && *v <= 1.0)) {
        return Err(Error::argument("levy_to_proper: arguments must lie in [0,1]"));
    }
    let x: Vec<f64> = u.iter().map(|v| -(-v).ln_1p()).collect();
    let fv = levy_eval(f, &x, cfg)?;
    Ok((-(-fv).exp_m1()).clamp(0.0, 1.0))
}

/// log(1 + 1/sum_i 1/(e^{x_i}-1)); closed form of the Clayton image.
pub fn example42_closed_form(x: &[f64]) -> Result<f64> {
    if x.is_empty() || x.iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::argument(
            "example42_closed_form: arguments must be positive",
        ));
    }
    let s: f64 = x.iter().map(|v| 1.0 / v.exp_m1()).sum();
    Ok((1.0 / s).ln_1p())
}

/// Lévy measure of one orthant, either rotation-invariant (radial part
/// Lambda with uniform simplex direction) or concentrated on the axes.
#[derive(Clone)]
pub enum MeasureForm {
    RadialSimplex { lambda: Arc<RadialMeasure> },
    Axis { margins: Vec<Arc<RadialMeasure>> },
}

#[derive(Clone)]
pub struct TailIntegralSpec {
    pub d: usize,
    pub form: MeasureForm,
    /// Sign of each coordinate on the orthant this measure charges.
    pub orthant_signs: Vec<i8>,
}

impl TailIntegralSpec {
    pub fn new(d: usize, form: MeasureForm, orthant_signs: Vec<i8>) -> Result<Self> {
        if d == 0 {
            return Err(Error::argument("tail integral: dimension must be >= 1"));
        }
        if orthant_signs.len() != d || orthant_signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::argument(
                "tail integral: orthant_signs must be a d-vector of +-1",
            ));
        }
        if let MeasureForm::Axis { margins } = &form {
            if margins.len() != d {
                return Err(Error::argument("axis form: need one margin per axis"));
            }
        }
        Ok(Self {
            d,
            form,
            orthant_signs,
        })
    }

    pub fn positive_orthant(d: usize, form: MeasureForm) -> Result<Self> {
        Self::new(d, form, vec![1; d.max(1)])
    }

    /// nu of the magnitude tail set prod [y_i, inf] given the coordinate sum.
    fn magnitude_tail(&self, sum: f64, cfg: &ToleranceConfig) -> Result<f64> {
        match &self.form {
            MeasureForm::RadialSimplex { lambda } => {
                if self.d == 1 {
                    lambda.tail_mass(sum, cfg)
                } else {
                    williamson_transform(lambda, self.d, sum, cfg)
                }
            }
            MeasureForm::Axis { .. } => unreachable!("axis handled per variant"),
        }
    }

    fn total_mass(&self, cfg: &ToleranceConfig) -> Result<f64> {
        match &self.form {
            MeasureForm::RadialSimplex { lambda } => lambda.total_mass(cfg),
            MeasureForm::Axis { margins } => {
                let mut t = 0.0;
                for m in margins {
                    t += m.total_mass(cfg)?;
                }
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVariant {
    /// (prod sgn x_i) nu(I(x_1) x ... x I(x_d)) on the declared orthant.
    SignedU,
    /// nu(J⁺(x)) with J⁺(x) = prod [1/x_i, inf]; increasing in x.
    UPlusUpper,
    /// -log(1 - exp(-nu(orthant \ J⁺(x)))).
    UPlusLower,
}

pub fn tail_integral(
    t: &TailIntegralSpec,
    x: &[f64],
    variant: TailVariant,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if x.len() != t.d {
        return Err(Error::argument("tail_integral: argument length != d"));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::argument("tail_integral: NaN argument"));
    }
    match variant {
        TailVariant::SignedU => signed_u(t, x, cfg),
        TailVariant::UPlusUpper | TailVariant::UPlusLower => {
            if x.iter().any(|v| *v < 0.0) {
                return Err(Error::argument(
                    "tail_integral: u-plus variants need x in [0, inf]^d",
                ));
            }
            if x.iter().all(|v| *v == 0.0) {
                // Definitional convention at the origin.
                return Ok(f64::INFINITY);
            }
            let upper = u_plus_upper(t, x, cfg)?;
            match variant {
                TailVariant::UPlusUpper => Ok(upper),
                TailVariant::UPlusLower => {
                    let total = t.total_mass(cfg)?;
                    // J⁺ exhausts the orthant only when every x_i = inf.
                    let complement = if upper.is_infinite() {
                        0.0
                    } else {
                        (total - upper).max(0.0)
                    };
                    Ok(-(-(-complement).exp()).ln_1p())
                }
                TailVariant::SignedU => unreachable!(),
            }
        }
    }
}

fn signed_u(t: &TailIntegralSpec, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    for (v, s) in x.iter().zip(&t.orthant_signs) {
        if *v != 0.0 && v.signum() as i8 != *s {
            return Err(Error::argument(
                "tail_integral: signed argument outside the declared orthant",
            ));
        }
    }
    if x.iter().any(|v| v.is_infinite()) {
        return Ok(0.0);
    }
    let sign: f64 = t.orthant_signs.iter().map(|s| *s as f64).product();
    let magnitude = match &t.form {
        MeasureForm::RadialSimplex { .. } => {
            let sum: f64 = x.iter().map(|v| v.abs()).sum();
            t.magnitude_tail(sum, cfg)?
        }
        MeasureForm::Axis { margins } => {
            // Only axis i meets the set when every other coordinate is
            // unconstrained, i.e. x_k = 0 for k != i.
            let mut acc = 0.0;
            for (i, m) in margins.iter().enumerate() {
                let rest_zero = x
                    .iter()
                    .enumerate()
                    .all(|(k, v)| k == i || *v == 0.0);
                if rest_zero {
                    acc += m.tail_mass(x[i].abs(), cfg)?;
                }
            }
            acc
        }
    };
    Ok(sign * magnitude)
}

fn u_plus_upper(t: &TailIntegralSpec, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    match &t.form {
        MeasureForm::RadialSimplex { .. } => {
            let sum: f64 = x.iter().map(|v| 1.0 / v).sum();
            t.magnitude_tail(sum, cfg)
        }
        MeasureForm::Axis { margins } => {
            // Axis i meets J⁺(x) only if 1/x_k = 0 for every k != i.
            let mut acc = 0.0;
            for (i, m) in margins.iter().enumerate() {
                let rest_infinite = x
                    .iter()
                    .enumerate()
                    .all(|(k, v)| k == i || v.is_infinite());
                if rest_infinite {
                    acc += m.tail_mass(1.0 / x[i], cfg)?;
                }
            }
            Ok(acc)
        }
    }
}

/// Worst deviations from max(0, -log sum e^{-x_i}) <= F(x) <= min x_i.
pub fn levy_frechet_check(
    f: &LevyCopulaSpec,
    grid: &[Vec<f64>],
    cfg: &ToleranceConfig,
) -> Result<FrechetReport> {
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for x in grid {
        if x.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::argument("levy_frechet_check: grid must be positive"));
        }
        let v = levy_eval(f, x, cfg)?;
        let lo = (-x.iter().map(|w| (-w).exp()).sum::<f64>().ln()).max(0.0);
        let hi = x.iter().cloned().fold(f64::INFINITY, f64::min);
        lower = lower.max(lo - v);
        upper = upper.max(v - hi);
    }
    Ok(FrechetReport {
        max_lower_violation: lower.max(0.0),
        max_upper_violation: upper.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::CopulaFamily;
    use crate::generators::truncated_reciprocal;
    use crate::numerics::Interval;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn reciprocal_levy(d: usize) -> LevyCopulaSpec {
        LevyCopulaSpec::new(d, LevyFamily::ArchimedeanLevy(Arc::new(LevyGenerator::reciprocal(d))))
            .unwrap()
    }

    fn clayton_copula(d: usize) -> CopulaSpec {
        CopulaSpec::new(d, CopulaFamily::Clayton).unwrap()
    }

    #[test]
    fn complete_dependence_and_independence_closed_forms() {
        let cd = LevyCopulaSpec::new(2, LevyFamily::CompleteDependence).unwrap();
        assert_eq!(levy_eval(&cd, &[1.0, 2.0], &cfg()).unwrap(), 1.0);
        assert_eq!(
            levy_eval(&cd, &[f64::INFINITY, f64::INFINITY], &cfg()).unwrap(),
            f64::INFINITY
        );
        let ind = LevyCopulaSpec::new(2, LevyFamily::Independence).unwrap();
        assert_eq!(levy_eval(&ind, &[1.7, f64::INFINITY], &cfg()).unwrap(), 1.7);
        assert_eq!(levy_eval(&ind, &[f64::INFINITY, 0.3], &cfg()).unwrap(), 0.3);
        assert_eq!(levy_eval(&ind, &[1.0, 2.0], &cfg()).unwrap(), 0.0);
        assert_eq!(
            levy_eval(&ind, &[f64::INFINITY, f64::INFINITY], &cfg()).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn archimedean_reciprocal_values_and_margins() {
        let f = reciprocal_levy(2);
        let v = levy_eval(&f, &[1.0, 1.0], &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(levy_eval(&f, &[0.0, 5.0], &cfg()).unwrap(), 0.0);
        for x in [0.1, 1.0, 7.5, 40.0] {
            let m = levy_eval(&f, &[x, f64::INFINITY], &cfg()).unwrap();
            assert!((m - x).abs() < 1e-12, "margin at {x}: {m}");
        }
        let f3 = reciprocal_levy(3);
        let m = levy_eval(&f3, &[2.0, f64::INFINITY, f64::INFINITY], &cfg()).unwrap();
        assert!((m - 2.0).abs() < 1e-12);
    }

    #[test]
    fn proper_to_levy_values() {
        let co = CopulaSpec::new(2, CopulaFamily::Comonotone).unwrap();
        let v = proper_to_levy(&co, &[1.0, 2.0], &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let cl = clayton_copula(2);
        let v = proper_to_levy(&cl, &[1.0, 1.0], &cfg()).unwrap();
        assert!((v - 0.6201145069582775).abs() < 1e-14, "got {v}");
        assert_eq!(proper_to_levy(&cl, &[0.0, 3.0], &cfg()).unwrap(), 0.0);
        // Sign bookkeeping per orthant.
        let neg = proper_to_levy(&cl, &[1.0, -1.0], &cfg()).unwrap();
        assert!((neg + 0.6201145069582775).abs() < 1e-14);
        let both = proper_to_levy(&cl, &[-1.0, -1.0], &cfg()).unwrap();
        assert!((both - 0.6201145069582775).abs() < 1e-14);
        // C = 1 on the diagonal limit flags infinity.
        let v = proper_to_levy(&co, &[f64::INFINITY, f64::INFINITY], &cfg()).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn levy_to_proper_values() {
        let cd = LevyCopulaSpec::new(2, LevyFamily::CompleteDependence).unwrap();
        for u in [[0.3, 0.7], [0.9, 0.2], [0.5, 0.5]] {
            let v = levy_to_proper(&cd, &u, &cfg()).unwrap();
            assert!((v - u.iter().cloned().fold(f64::INFINITY, f64::min)).abs() < 1e-15);
        }
        let f = reciprocal_levy(2);
        let u = 1.0 - (-1.0f64).exp();
        let v = levy_to_proper(&f, &[u, u], &cfg()).unwrap();
        assert!((v - 0.3934693402873666).abs() < 1e-15, "got {v}");
        let ind = LevyCopulaSpec::new(2, LevyFamily::Independence).unwrap();
        assert!(matches!(
            levy_to_proper(&ind, &[0.5, 0.5], &cfg()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn mapping_round_trips_tightly() {
        // Proper -> Levy -> proper through the from-proper family.
        let cl = clayton_copula(2);
        let f = LevyCopulaSpec::new(2, LevyFamily::FromProper(Arc::new(cl.clone()))).unwrap();
        for i in 1..10 {
            for j in 1..10 {
                let u = [i as f64 / 10.0, j as f64 / 10.0];
                let back = levy_to_proper(&f, &u, &cfg()).unwrap();
                let direct = copula_eval(&cl, &u, &cfg()).unwrap();
                assert!((back - direct).abs() < 1e-12, "u={u:?}");
            }
        }
        // Levy -> proper -> Levy, composing the definitions pointwise.
        let f = reciprocal_levy(3);
        for x in [[0.5, 1.0, 2.0], [3.0, 0.1, 0.7], [5.0, 5.0, 5.0]] {
            let u: Vec<f64> = x.iter().map(|v: &f64| -(-v).exp_m1()).collect();
            let c = levy_to_proper(&f, &u, &cfg()).unwrap();
            let back = -(-c).ln_1p();
            let direct = levy_eval(&f, &x, &cfg()).unwrap();
            assert!((back - direct).abs() < 1e-12, "x={x:?}: {back} vs {direct}");
        }
    }

    #[test]
    fn example42_matches_mapped_clayton() {
        let v = example42_closed_form(&[1.0, 1.0]).unwrap();
        assert!((v - 0.6201145069582775).abs() < 1e-15, "got {v}");
        let cl = clayton_copula(2);
        for i in 1..=12 {
            for j in 1..=12 {
                let x = [0.4 * i as f64, 0.4 * j as f64];
                let a = example42_closed_form(&x).unwrap();
                let b = proper_to_levy(&cl, &x, &cfg()).unwrap();
                assert!((a - b).abs() < 1e-12, "x={x:?}: {a} vs {b}");
            }
        }
        let cl3 = clayton_copula(3);
        let x = [0.8, 1.6, 2.4];
        let a = example42_closed_form(&x).unwrap();
        let b = proper_to_levy(&cl3, &x, &cfg()).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert_eq!(
            example42_closed_form(&[f64::INFINITY, f64::INFINITY]).unwrap(),
            f64::INFINITY
        );
        assert!(example42_closed_form(&[1.0, 0.0]).is_err());
    }

    fn reciprocal_radial(d: usize) -> RadialMeasure {
        let dd = d as f64;
        RadialMeasure::density_with(
            Arc::new(move |r: f64| dd / (r * r)),
            Interval::new(0.0, f64::INFINITY).unwrap(),
            Some(Arc::new(move |a: f64| {
                if a <= 0.0 {
                    f64::INFINITY
                } else {
                    dd / a
                }
            })),
            None,
            crate::generators::RadialKind::GeneralPositive,
        )
        .unwrap()
    }

    #[test]
    fn radial_simplex_tail_integral_values() {
        let t = TailIntegralSpec::positive_orthant(
            2,
            MeasureForm::RadialSimplex {
                lambda: Arc::new(reciprocal_radial(2)),
            },
        )
        .unwrap();
        let v = tail_integral(&t, &[2.0, 2.0], TailVariant::UPlusUpper, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "got {v}");
        // Margins of the normalized reciprocal family are the identity.
        for x in [0.5, 1.0, 4.0] {
            let m = tail_integral(&t, &[x, f64::INFINITY], TailVariant::UPlusUpper, &cfg())
                .unwrap();
            assert!((m - x).abs() < 1e-8, "margin at {x}: {m}");
        }
        // Conventions at infinity and the origin.
        let s = tail_integral(&t, &[1.0, f64::INFINITY], TailVariant::SignedU, &cfg()).unwrap();
        assert_eq!(s, 0.0);
        for variant in [TailVariant::UPlusUpper, TailVariant::UPlusLower] {
            assert_eq!(
                tail_integral(&t, &[0.0, 0.0], variant, &cfg()).unwrap(),
                f64::INFINITY
            );
        }
        assert_eq!(
            tail_integral(&t, &[0.0, 0.0], TailVariant::SignedU, &cfg()).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn truncated_measure_signed_and_lower_variants() {
        let lambda = Arc::new(truncated_reciprocal(2, 0.8).unwrap());
        let t = TailIntegralSpec::positive_orthant(
            2,
            MeasureForm::RadialSimplex { lambda: lambda.clone() },
        )
        .unwrap();
        // Total mass 2.5 shows up at the signed origin.
        let v = tail_integral(&t, &[0.0, 0.0], TailVariant::SignedU, &cfg()).unwrap();
        assert!((v - 2.5).abs() < 1e-9, "got {v}");
        let v = tail_integral(&t, &[2.0, 2.0], TailVariant::UPlusLower, &cfg()).unwrap();
        assert!((v - 0.25248245892545396).abs() < 1e-9, "got {v}");
        let v = tail_integral(&t, &[1.25, 1.25], TailVariant::UPlusLower, &cfg()).unwrap();
        assert!((v - 0.16647375935575462).abs() < 1e-9, "got {v}");
        let v = tail_integral(
            &t,
            &[f64::INFINITY, f64::INFINITY],
            TailVariant::UPlusLower,
            &cfg(),
        )
        .unwrap();
        assert_eq!(v, f64::INFINITY);
        // Mixed orthant: magnitude from W(|x_1|+|x_2|), sign from the orthant.
        let mixed = TailIntegralSpec::new(
            2,
            MeasureForm::RadialSimplex { lambda },
            vec![1, -1],
        )
        .unwrap();
        let v = tail_integral(&mixed, &[1.0, -2.0], TailVariant::SignedU, &cfg()).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-9, "got {v}");
        assert!(tail_integral(&mixed, &[1.0, 2.0], TailVariant::SignedU, &cfg()).is_err());
    }

    #[test]
    fn axis_form_tail_integral() {
        let margins = vec![
            Arc::new(truncated_reciprocal(1, 0.5).unwrap()),
            Arc::new(truncated_reciprocal(1, 0.25).unwrap()),
        ];
        let t = TailIntegralSpec::positive_orthant(2, MeasureForm::Axis { margins }).unwrap();
        // Upper variant: only the axis whose partners sit at infinity counts.
        let v = tail_integral(&t, &[1.0, f64::INFINITY], TailVariant::UPlusUpper, &cfg())
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12, "got {v}"); // tail at 1/1 of 1/max(a, 0.5)
        let v = tail_integral(&t, &[4.0, 4.0], TailVariant::UPlusUpper, &cfg()).unwrap();
        assert_eq!(v, 0.0);
        // Signed variant: the partner coordinates must be 0 instead.
        let v = tail_integral(&t, &[2.0, 0.0], TailVariant::SignedU, &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "got {v}");
        let v = tail_integral(&t, &[2.0, 2.0], TailVariant::SignedU, &cfg()).unwrap();
        assert_eq!(v, 0.0);
        // Origin: total mass 1/0.5 + 1/0.25.
        let v = tail_integral(&t, &[0.0, 0.0], TailVariant::SignedU, &cfg()).unwrap();
        assert!((v - 6.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn tail_integral_consistency_with_archimedean_levy() {
        let lambda = Arc::new(truncated_reciprocal(2, 0.8).unwrap());
        let t = TailIntegralSpec::positive_orthant(
            2,
            MeasureForm::RadialSimplex { lambda: lambda.clone() },
        )
        .unwrap();
        let phi = Arc::new(LevyGenerator::from_radial(lambda, 2).unwrap());
        let f = LevyCopulaSpec::new(2, LevyFamily::ArchimedeanLevy(phi)).unwrap();
        for x in [[2.0, 3.0], [1.5, 1.5], [5.0, 0.9]] {
            let direct = tail_integral(&t, &x, TailVariant::UPlusUpper, &cfg()).unwrap();
            let margins: Vec<f64> = x
                .iter()
                .map(|v| {
                    tail_integral(&t, &[*v, f64::INFINITY], TailVariant::UPlusUpper, &cfg())
                        .unwrap()
                })
                .collect();
            let through = levy_eval(&f, &margins, &cfg()).unwrap();
            assert!(
                (direct - through).abs() < 1e-8,
                "x={x:?}: {direct} vs {through}"
            );
        }
    }

    #[test]
    fn levy_frechet_bounds_hold_on_the_correspondence_range() {
        let grid: Vec<Vec<f64>> = (1..=20)
            .flat_map(|i| (1..=20).map(move |j| vec![0.25 * i as f64, 0.25 * j as f64]))
            .collect();
        let cd = LevyCopulaSpec::new(2, LevyFamily::CompleteDependence).unwrap();
        let rep = levy_frechet_check(&cd, &grid, &cfg()).unwrap();
        assert!(rep.pass(1e-12), "{rep:?}");
        assert_eq!(rep.max_upper_violation, 0.0);
        let fp = LevyCopulaSpec::new(
            2,
            LevyFamily::FromProper(Arc::new(clayton_copula(2))),
        )
        .unwrap();
        let rep = levy_frechet_check(&fp, &grid, &cfg()).unwrap();
        assert!(rep.pass(1e-12), "{rep:?}");
    }

    #[test]
    fn levy_lower_bound_fails_outside_the_correspondence_range() {
        // The lower bound is the image of the proper Fréchet bound, so it
        // binds exactly the Lévy copulas whose proper image is a copula.
        // The reciprocal Archimedean family maps to psi(x) = 1-e^{-1/x},
        // which is not convex near 0, and indeed xy/(x+y) dips below
        // -log(e^{-x}+e^{-y}) once min(x,y) > 2 log 2. The upper bound is
        // universal (monotone coordinates plus uniform margins).
        let grid: Vec<Vec<f64>> = (1..=20)
            .flat_map(|i| (1..=20).map(move |j| vec![0.25 * i as f64, 0.25 * j as f64]))
            .collect();
        let f = reciprocal_levy(2);
        let rep = levy_frechet_check(&f, &grid, &cfg()).unwrap();
        assert!(rep.max_upper_violation <= 1e-12, "{rep:?}");
        // At (5,5): bound 5 - log 2 = 4.3069, value 2.5.
        assert!(
            (rep.max_lower_violation - (2.5 - (2.0f64).ln())).abs() < 1e-12,
            "{rep:?}"
        );
        // The axis (independence) family is the extreme case: 0 on finite
        // interior points, even though it is a genuine Lévy copula.
        let ind = LevyCopulaSpec::new(2, LevyFamily::Independence).unwrap();
        let rep = levy_frechet_check(&ind, &grid, &cfg()).unwrap();
        assert!(rep.max_upper_violation <= 1e-12, "{rep:?}");
        assert!(
            (rep.max_lower_violation - (5.0 - (2.0f64).ln())).abs() < 1e-12,
            "{rep:?}"
        );
    }
}
