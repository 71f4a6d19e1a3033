//! Temporal outage statistics of a link in a Poisson field of slotted-ALOHA
//! interferers under Rayleigh fading.
//!
//! The crate covers the closed-form side (joint success probabilities via the
//! diversity polynomial, success/outage duration laws, SIR moments, random
//! linear network coding performance) and a Monte Carlo simulator that
//! estimates every analytic quantity with standard errors.

pub mod coding;
pub mod durations;
mod error;
pub mod figures;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod sirstats;
pub mod special;

pub use coding::{CodeParams, GfMatrix, Objective};
pub use durations::{Durations, PmfTable, StabilityLimits};
pub use error::{Error, Result};
pub use figures::FigureTable;
pub use model::{Derived, LinkParams};
pub use montecarlo::{InterferenceMode, LinkTrace, McEstimate, Scenario, SimConfig};
pub use sirstats::SirCcdfForm;
