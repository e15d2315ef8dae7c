//! Rare-event reach probability estimation for stochastic hybrid systems.
//!
//! The crate simulates hybrid models that mix mode-dependent SDE dynamics
//! with forced and rate-triggered discrete jumps, and estimates the
//! probability of reaching a rare target set by interacting-particle
//! multilevel splitting with fixed-assignment resampling. On top of the
//! generic machinery it ships a two-vehicle lane-change scenario in which
//! an automated vehicle's situation awareness, reaction delay and
//! time-to-collision logic decide whether a conflict ends in a collision.
//!
//! The numeric core is generic over the scalar type through
//! [`scalar::Real`]; the `*64` aliases at the crate root fix the `f64`
//! instantiations used by the shipped experiments.

pub mod experiment;
pub mod scalar;
pub mod scenario;
pub mod shs;
pub mod splitting;
pub mod stats;
pub mod stream;
pub mod toy;
pub mod ttc;
pub mod vehicle;

pub use scalar::Real;
pub use stream::{NoiseDriver, StreamKey};

/// `f64` instantiation of the lane-change scenario model.
pub type LaneChangeModel64 = scenario::LaneChangeModel<f64>;
/// `f64` scenario parameter set.
pub type ScenarioParams64 = scenario::ScenarioParams<f64>;
/// `f64` noise driver.
pub type NoiseDriver64 = stream::NoiseDriver<f64>;
/// `f64` splitting estimate.
pub type EstimationResult64 = splitting::EstimationResult<f64>;
