//! Link-level evaluation of adaptive NOMA-based coordinated direct and relay
//! transmission (CDRT).
//!
//! The crate covers three cross-checking routes to the same outage
//! probabilities:
//!
//! * [`analytic`]: closed-form expressions and a numerical-integration oracle,
//! * [`montecarlo`]: trial-by-trial simulation of the decoding rules in
//!   [`schemes`] over fading draws from [`channel`],
//! * [`experiments`]: parameter sweeps and threshold optimisation on top of
//!   both.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod schemes;
pub mod special;

pub use error::{Error, Result};
pub use params::{BeamTarget, DerivedThresholds, SystemParams};
pub use schemes::{OutageFlags, SchemeKind, Signal, TrialBranch};
