//! Near-field (Fraunhofer) distance between an access-point array and a
//! rotated user-equipment array, for linear (ULA–ULA) and planar (UPA–UPA)
//! geometries.
//!
//! Two independent routes are provided: closed-form expressions in
//! [`formulas`], and a pair-search simulator in [`simulator`] that solves for
//! the smallest separation at which the phase mismatch across all element
//! pairs, including steering compensation, drops to π/8.

pub mod error;
pub mod formulas;
pub mod geometry;
pub mod simulator;
pub mod steering;

pub use error::{Error, Result};
pub use geometry::{ArrayKind, ArraySpec, FrequencyConfig, RotationAngles};
pub use simulator::{
    max_phase_spread, solve_near_field_distance, Method, NearFieldResult, Scenario, ScenarioConfig, SearchMode,
    SpreadEvaluator, SpreadResult,
};
