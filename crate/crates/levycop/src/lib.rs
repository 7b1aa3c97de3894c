//! Dependence modeling for jump processes.
//!
//! The crate connects two descriptions of joint dependence: proper copulas on
//! the unit cube, and the analogous objects for jump measures defined through
//! tail integrals. Archimedean members of both classes are driven by a radial
//! measure through a common integral transform, which makes the translation
//! between the two worlds explicit and testable. A Monte Carlo engine
//! simulates truncated jump processes and checks the distributional
//! identities (hitting probabilities, avoidance probabilities, record
//! counts) that the analytic layer predicts.

pub mod copulas;
pub mod error;
pub mod generators;
pub mod levy;
pub mod numerics;
pub mod records;
pub mod specfile;

pub use error::{Error, Result};
