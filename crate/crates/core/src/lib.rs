//! Two-qubit nonlocality toolkit: for any state `tau`, the mixture
//! `rho = mu tau + (1 - mu) tau_A (x) I/2` at `mu = 1/sqrt(3)` has the
//! property that steerability of `rho` (violation of a linear steering
//! inequality) certifies Bell nonlocality of `tau`. The crate provides the
//! state numerics, the map and its inverse criterion, steering and CHSH
//! machinery, an executable form of the hidden-state construction behind the
//! implication, and a Monte Carlo harness that stress-tests it on random
//! states.
//!
//! Core math is generic over the scalar type via [`scalar::Real`]; the
//! aliases below fix `f64`, which is what the CLI and the Monte Carlo
//! harness use.

pub mod criteria;
pub mod error;
pub mod experiment;
pub mod io;
pub mod matrix;
pub mod model;
pub mod scalar;
pub mod states;

pub use error::Error;

/// `1/sqrt(3)`, the default map parameter.
pub const INV_SQRT_3: f64 = 0.577_350_269_189_625_8;

pub type ComplexMatrix64 = matrix::ComplexMatrix<f64>;
pub type RealMatrix3x64 = matrix::RealMatrix3<f64>;
pub type TwoQubitState64 = states::TwoQubitState<f64>;
pub type QubitState64 = states::QubitState<f64>;
pub type BlochVector64 = states::BlochVector<f64>;
pub type MeasurementDirection64 = states::MeasurementDirection<f64>;
pub type MapSpec64 = criteria::MapSpec<f64>;
pub type SteeringSettings64 = criteria::SteeringSettings<f64>;
pub type SteeringResult64 = criteria::SteeringResult<f64>;
pub type ChshResult64 = criteria::ChshResult<f64>;
pub type NonlocalityReport64 = criteria::NonlocalityReport<f64>;
