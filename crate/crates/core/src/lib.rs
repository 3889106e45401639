//! Mean-field simulation of a driven atom-cavity system whose atom vibrates in
//! a harmonic trap: drive-only steady states and their multistability, first
//! sideband probe response, dressed-level predictions of the transparency
//! window, a time-domain cross-check and a mass-sensing pipeline.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`). Solvers take a
//! [`params::Model`], a copy of the physical rates divided by the atom-cavity
//! coupling `g`; frequencies passed to them are in those units. The sensing
//! layer and the command line work in rad/s and MHz.

// NaN-rejecting guards are written as `!(x > 0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dressed;
pub mod error;
pub mod flow;
pub mod num;
pub mod oracle;
pub mod output;
pub mod params;
pub mod sensing;
pub mod sideband;
pub mod steady_state;

pub use error::{Error, Result};
pub use num::Real;

pub type SystemParams64 = params::SystemParams<f64>;
pub type SystemParams32 = params::SystemParams<f32>;
pub type Model64 = params::Model<f64>;
pub type Model32 = params::Model<f32>;
pub type SteadyBranch64 = steady_state::SteadyBranch<f64>;
pub type SteadyBranch32 = steady_state::SteadyBranch<f32>;
pub type SidebandResponse64 = sideband::SidebandResponse<f64>;
pub type SidebandResponse32 = sideband::SidebandResponse<f32>;
pub type DressedLevels64 = dressed::DressedLevels<f64>;
pub type DressedLevels32 = dressed::DressedLevels<f32>;
pub type Trajectory64 = oracle::Trajectory<f64>;
pub type SpectrumScan64 = sensing::SpectrumScan<f64>;
pub type SpectrumScan32 = sensing::SpectrumScan<f32>;
pub type CalibrationCurve64 = sensing::CalibrationCurve<f64>;
