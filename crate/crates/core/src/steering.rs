//! Beam-steering phase compensation, expressed as an extra path length per
//! UE element.
//!
//! Steering the UE towards the AP boresight `n_y = (0, 1, 0)` delays element
//! `k` by `r_k · n_y`. Shifting every delay by the same offset `Δd` so the
//! smallest one is zero changes nothing in the spread of effective
//! distances, since max and min move together.

use crate::error::{invalid, Result};
use crate::geometry::{ArrayKind, ArraySpec, ElementGrid, Frame, Point3};

#[derive(Debug, Clone, PartialEq)]
pub struct CompensationVector {
    /// Added distance per UE element, in grid order. The minimum is zero.
    pub per_element_m: Vec<f64>,
    /// Global shift `Δd = |min_k r_k · n_y|`.
    pub reference_offset_m: f64,
}

impl CompensationVector {
    pub fn max_m(&self) -> f64 {
        self.per_element_m.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_m(&self) -> f64 {
        self.per_element_m.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Closed-form compensation for a ULA rotated in-plane by `theta`.
///
/// Adjacent elements differ by `spacing·|sin θ|`. The element farthest from
/// the AP gets zero: index 0 for `θ > 0`, the last index for `θ < 0`.
pub fn ula_compensation(spec_ue: &ArraySpec, theta_rad: f64) -> Result<CompensationVector> {
    if spec_ue.kind() != ArrayKind::Ula {
        return invalid("ula_compensation needs a linear array");
    }
    if !theta_rad.is_finite() {
        return invalid(format!("theta must be finite, got {theta_rad}"));
    }
    let n = spec_ue.elements_per_axis();
    let step = spec_ue.spacing_m() * theta_rad.sin().abs();
    let per_element_m = (0..n)
        .map(|k| {
            let steps = if theta_rad >= 0.0 { k } else { n - 1 - k };
            steps as f64 * step
        })
        .collect();
    Ok(CompensationVector {
        per_element_m,
        reference_offset_m: spec_ue.aperture_m() / 2.0 * theta_rad.sin().abs(),
    })
}

/// Projection-based compensation for an arbitrarily rotated UE grid.
pub fn upa_compensation(rotated_ue: &ElementGrid) -> Result<CompensationVector> {
    if rotated_ue.is_empty() {
        return invalid("cannot compensate an empty grid");
    }
    if rotated_ue.frame() != Frame::Global || rotated_ue.center() != [0.0; 3] {
        return invalid("compensation needs the rotated UE grid centred at the origin");
    }
    let min_y = rotated_ue
        .positions()
        .iter()
        .map(|p| p[1])
        .fold(f64::INFINITY, f64::min);
    let offset = min_y.abs();
    Ok(CompensationVector {
        per_element_m: rotated_ue.positions().iter().map(|p| p[1] + offset).collect(),
        reference_offset_m: offset,
    })
}

/// Geometric distance plus the UE element's compensation distance.
#[inline]
pub fn effective_distance(ap_pos: Point3, ue_pos: Point3, compensation_m: f64) -> f64 {
    let dx = ap_pos[0] - ue_pos[0];
    let dy = ap_pos[1] - ue_pos[1];
    let dz = ap_pos[2] - ue_pos[2];
    (dx * dx + dy * dy + dz * dz).sqrt() + compensation_m
}
