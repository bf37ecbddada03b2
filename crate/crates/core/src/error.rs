use thiserror::Error;

/// Errors produced by the geometry, steering, simulator and formula routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The separation is too small for the rotated UE to stay on its side of
    /// the AP plane.
    #[error("separation {separation_m} m must exceed the rotated UE y-extent {min_separation_m} m")]
    Domain { separation_m: f64, min_separation_m: f64 },

    #[error("no bracket for the near-field distance after {expansions} expansions (last d = {last_d_m} m)")]
    NoConvergence { expansions: usize, last_d_m: f64 },

    /// Sampled `(d, spread)` points inside the bracket were not non-increasing.
    #[error("phase spread is not monotone inside the bracket: {samples:?}")]
    NonMonotone { samples: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
