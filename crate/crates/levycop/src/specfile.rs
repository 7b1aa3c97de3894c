//! Declarative JSON grammar for copulas, Lévy copulas, generators, and
//! jump processes.
//!
//! One flat format serves every object the CLI touches, so a conversion
//! can write its result in the same grammar it read its input from. Each
//! document is tagged by `kind`, each family by `family`; nested objects
//! (an Archimedean generator, the base of a conversion) reuse the same
//! node types. Parsing is split from construction: [`SpecFile::parse`]
//! reports malformed documents as [`Error::Parse`], while
//! [`SpecFile::build`] validates semantics and returns the runtime
//! objects.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaFamily, CopulaSpec};
use crate::error::{Error, Result};
use crate::generators::{
    clayton_radial, erlang2_radial, truncated_reciprocal, truncated_reciprocal_law, LevyGenerator,
    ProperGenerator, RadialKind, RadialMeasure,
};
use crate::levy::{LevyCopulaSpec, LevyFamily, MeasureForm, TailIntegralSpec};
use crate::records::JumpProcessSpec;
use crate::numerics::ToleranceConfig;

/// A parsed spec document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecFile {
    Copula(CopulaNode),
    Levy(LevyNode),
    /// The proper copula induced by a Lévy copula; evaluation takes the
    /// exponential image of the base.
    ProperOfLevy { base: Box<LevyNode> },
    GeneratorPsi(PsiNode),
    GeneratorPhi(PhiNode),
    JumpProcess(JumpNode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaNode {
    pub d: usize,
    #[serde(flatten)]
    pub family: CopulaFamilyNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CopulaFamilyNode {
    Independence,
    Comonotone,
    FrechetLower,
    Clayton,
    Archimedean { generator: PsiNode },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyNode {
    pub d: usize,
    #[serde(flatten)]
    pub family: LevyFamilyNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LevyFamilyNode {
    CompleteDependence,
    Independence,
    ArchimedeanLevy { generator: PhiNode },
    FromProper { base: Box<CopulaNode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiNode {
    pub d: usize,
    #[serde(flatten)]
    pub family: PsiFamilyNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PsiFamilyNode {
    Clayton,
    Exponential,
    LinearCap,
    /// Williamson transform of a unit point mass at r0.
    DiracRadial { r0: f64 },
    CustomTable { xs: Vec<f64>, values: Vec<f64> },
    /// Exponential-image of a Lévy generator.
    Converted { base: Box<PhiNode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiNode {
    pub d: usize,
    #[serde(flatten)]
    pub family: PhiFamilyNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PhiFamilyNode {
    Reciprocal,
    CustomTable { xs: Vec<f64>, values: Vec<f64> },
    /// Logarithmic image of a proper generator.
    Converted { base: Box<PsiNode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpNode {
    pub d: usize,
    pub measure: MeasureNode,
    pub eps: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum MeasureNode {
    RadialSimplex { radial: RadialNode },
    Axis { margins: Vec<RadialNode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum RadialNode {
    TruncatedReciprocal { d: usize, eps: f64 },
    TruncatedReciprocalLaw { eps: f64 },
    ClaytonRadial,
    Erlang2,
    Dirac { r0: f64, mass: f64 },
    Table { rs: Vec<f64>, cumulative: Vec<f64> },
}

/// Runtime objects built from a spec document.
pub enum BuiltSpec {
    Copula(CopulaSpec),
    Levy(LevyCopulaSpec),
    ProperOfLevy(LevyCopulaSpec),
    GeneratorPsi(ProperGenerator),
    GeneratorPhi(LevyGenerator),
    JumpProcess(JumpProcessSpec),
}

impl RadialNode {
    /// The measure kind is decided by the use site: jump intensities are
    /// general positive measures, sampling laws are probability cdfs.
    pub fn build(&self, kind: RadialKind) -> Result<RadialMeasure> {
        match self {
            RadialNode::TruncatedReciprocal { d, eps } => {
                let m = truncated_reciprocal(*d, *eps)?;
                if kind == RadialKind::ProbabilityCdf {
                    return Err(Error::argument(
                        "truncated-reciprocal has infinite-mass-normalization; \
                         use truncated-reciprocal-law to sample",
                    ));
                }
                Ok(m)
            }
            RadialNode::TruncatedReciprocalLaw { eps } => truncated_reciprocal_law(*eps),
            RadialNode::ClaytonRadial => Ok(clayton_radial()),
            RadialNode::Erlang2 => Ok(erlang2_radial()),
            RadialNode::Dirac { r0, mass } => RadialMeasure::dirac(*r0, *mass, kind),
            RadialNode::Table { rs, cumulative } => {
                RadialMeasure::table(rs.clone(), cumulative.clone(), kind)
            }
        }
    }
}

impl PsiNode {
    pub fn build(&self) -> Result<ProperGenerator> {
        match &self.family {
            PsiFamilyNode::Clayton => Ok(ProperGenerator::clayton(self.d)),
            PsiFamilyNode::Exponential => Ok(ProperGenerator::exponential(self.d)),
            PsiFamilyNode::LinearCap => {
                if self.d != 2 {
                    return Err(Error::argument("linear-cap generator exists only at d=2"));
                }
                Ok(ProperGenerator::linear_cap())
            }
            PsiFamilyNode::DiracRadial { r0 } => {
                let m = RadialMeasure::dirac(*r0, 1.0, RadialKind::ProbabilityCdf)?;
                ProperGenerator::from_radial(Arc::new(m), self.d)
            }
            PsiFamilyNode::CustomTable { xs, values } => {
                ProperGenerator::from_table(xs.clone(), values.clone(), self.d)
            }
            PsiFamilyNode::Converted { base } => {
                if base.d != self.d {
                    return Err(Error::argument("converted generator: dimension mismatch"));
                }
                Ok(ProperGenerator::from_phi(Arc::new(base.build()?)))
            }
        }
    }
}

impl PhiNode {
    pub fn build(&self) -> Result<LevyGenerator> {
        match &self.family {
            PhiFamilyNode::Reciprocal => Ok(LevyGenerator::reciprocal(self.d)),
            PhiFamilyNode::CustomTable { xs, values } => {
                LevyGenerator::from_table(xs.clone(), values.clone(), self.d)
            }
            PhiFamilyNode::Converted { base } => {
                if base.d != self.d {
                    return Err(Error::argument("converted generator: dimension mismatch"));
                }
                Ok(LevyGenerator::from_psi(Arc::new(base.build()?)))
            }
        }
    }
}

impl CopulaNode {
    pub fn build(&self) -> Result<CopulaSpec> {
        let family = match &self.family {
            CopulaFamilyNode::Independence => CopulaFamily::Independence,
            CopulaFamilyNode::Comonotone => CopulaFamily::Comonotone,
            CopulaFamilyNode::FrechetLower => CopulaFamily::FrechetLower,
            CopulaFamilyNode::Clayton => CopulaFamily::Clayton,
            CopulaFamilyNode::Archimedean { generator } => {
                CopulaFamily::Archimedean(Arc::new(generator.build()?))
            }
        };
        CopulaSpec::new(self.d, family)
    }
}

impl LevyNode {
    pub fn build(&self) -> Result<LevyCopulaSpec> {
        let family = match &self.family {
            LevyFamilyNode::CompleteDependence => LevyFamily::CompleteDependence,
            LevyFamilyNode::Independence => LevyFamily::Independence,
            LevyFamilyNode::ArchimedeanLevy { generator } => {
                LevyFamily::ArchimedeanLevy(Arc::new(generator.build()?))
            }
            LevyFamilyNode::FromProper { base } => {
                LevyFamily::FromProper(Arc::new(base.build()?))
            }
        };
        LevyCopulaSpec::new(self.d, family)
    }
}

impl JumpNode {
    pub fn build(&self, cfg: &ToleranceConfig) -> Result<JumpProcessSpec> {
        let form = match &self.measure {
            MeasureNode::RadialSimplex { radial } => MeasureForm::RadialSimplex {
                lambda: Arc::new(radial.build(RadialKind::GeneralPositive)?),
            },
            MeasureNode::Axis { margins } => MeasureForm::Axis {
                margins: margins
                    .iter()
                    .map(|m| m.build(RadialKind::GeneralPositive).map(Arc::new))
                    .collect::<Result<Vec<_>>>()?,
            },
        };
        let nu = TailIntegralSpec::positive_orthant(self.d, form)?;
        JumpProcessSpec::new(nu, self.eps, self.horizon, cfg)
    }
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec nodes serialize infallibly")
    }

    /// Dimension of the object the document describes.
    pub fn dimension(&self) -> usize {
        match self {
            SpecFile::Copula(n) => n.d,
            SpecFile::Levy(n) => n.d,
            SpecFile::ProperOfLevy { base } => base.d,
            SpecFile::GeneratorPsi(n) => n.d,
            SpecFile::GeneratorPhi(n) => n.d,
            SpecFile::JumpProcess(n) => n.d,
        }
    }

    pub fn build(&self, cfg: &ToleranceConfig) -> Result<BuiltSpec> {
        match self {
            SpecFile::Copula(n) => Ok(BuiltSpec::Copula(n.build()?)),
            SpecFile::Levy(n) => Ok(BuiltSpec::Levy(n.build()?)),
            SpecFile::ProperOfLevy { base } => Ok(BuiltSpec::ProperOfLevy(base.build()?)),
            SpecFile::GeneratorPsi(n) => Ok(BuiltSpec::GeneratorPsi(n.build()?)),
            SpecFile::GeneratorPhi(n) => Ok(BuiltSpec::GeneratorPhi(n.build()?)),
            SpecFile::JumpProcess(n) => Ok(BuiltSpec::JumpProcess(n.build(cfg)?)),
        }
    }
}

/// The structural conversion each document admits: copulas map to their
/// Lévy image and back, generators swap between the two scales. The
/// numerical round-trip residual is the caller's job.
pub fn convert_spec(spec: &SpecFile) -> Result<SpecFile> {
    match spec {
        SpecFile::Copula(c) => Ok(SpecFile::Levy(LevyNode {
            d: c.d,
            family: LevyFamilyNode::FromProper {
                base: Box::new(c.clone()),
            },
        })),
        SpecFile::Levy(l) => Ok(SpecFile::ProperOfLevy {
            base: Box::new(l.clone()),
        }),
        SpecFile::ProperOfLevy { base } => Ok(SpecFile::Levy((**base).clone())),
        SpecFile::GeneratorPsi(p) => Ok(SpecFile::GeneratorPhi(PhiNode {
            d: p.d,
            family: PhiFamilyNode::Converted {
                base: Box::new(p.clone()),
            },
        })),
        SpecFile::GeneratorPhi(p) => Ok(SpecFile::GeneratorPsi(PsiNode {
            d: p.d,
            family: PsiFamilyNode::Converted {
                base: Box::new(p.clone()),
            },
        })),
        SpecFile::JumpProcess(_) => Err(Error::argument(
            "jump process specs describe a simulation, not a convertible object",
        )),
    }
}
