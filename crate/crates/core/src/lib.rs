//! Information-theoretic location verification over received signal strength.
//!
//! A network of base stations measures the RSS of a user who claims a
//! position. Under the null hypothesis the user is where it claims to be;
//! under the alternative it is an attacker elsewhere that boosts its transmit
//! power to look as close as possible to the claimed position. This crate
//! provides the channel and attacker models, the likelihood-ratio statistics
//! for each threat model, the mutual-information machinery used to pick the
//! decision threshold, and a seeded Monte Carlo engine to estimate false
//! positive and detection rates.
//!
//! The crate is `no_std` and only needs `alloc`. All randomness is passed in
//! explicitly, so every result is reproducible from a seed.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod error;
pub mod infotheory;
pub mod likelihood;
pub mod math;
pub mod model;
pub mod simulator;

pub use adversary::{ThreatModel, TruePosition};
pub use error::{Error, Result};
pub use infotheory::{ObjectiveKind, RatePair, ThresholdResult};
pub use likelihood::{Decision, DecisionRule, IntegrationSpec, LogLikelihood, StatisticKind};
pub use model::{ChannelParams, MeasurementMatrix, NetworkGeometry, Point2D, PriorParams};
pub use simulator::{ExperimentConfig, GeometrySpec, SweepResult};
