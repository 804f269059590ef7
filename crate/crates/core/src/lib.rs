//! Outage analysis and dimensioning for sensors that report to the nearest of
//! a set of randomly deployed data collectors over pure random access.
//!
//! Sensors and collectors form independent homogeneous Poisson point
//! processes. The crate provides
//!
//! - [`analytic`]: closed-form and numerically integrated SIR/SINR CCDFs,
//! - [`design`]: minimum collector intensity and transmit-power selection,
//! - [`montecarlo`]: a reproducible simulator of the typical link used to
//!   cross-validate the analytic results,
//! - [`specialfn`] and [`quad`]: the numerical kernels underneath.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod design;
pub mod error;
pub mod montecarlo;
pub mod params;
pub mod quad;
pub mod specialfn;
pub mod units;

pub use analytic::{CcdfCurve, CcdfMethod, Provenance};
pub use design::{DeploymentRequirement, DesignTarget, RequirementKind};
pub use error::{Error, Result};
pub use montecarlo::{Geometry, OutageEstimate, SimConfig, WindowRadius};
pub use params::{ChannelModel, SystemParams};
pub use quad::QuadratureSpec;
