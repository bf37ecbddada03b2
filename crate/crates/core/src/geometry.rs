//! Array element grids and the UE rotation model.
//!
//! Coordinates: the UE array is centred at the origin and lies in the x–z
//! plane before rotation; the AP array is centred at `(0, d, 0)` in the plane
//! `y = d`, so the y-axis is the AP boresight. Linear arrays run along x.
//! Planar arrays are stored row-major with `(m, n) = (x-index, z-index)`,
//! flat index `m * N + n`, coordinates ascending with the index.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use crate::error::{invalid, Result};

pub type Point3 = [f64; 3];

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Slack allowed past ±π/2 when validating angles, so that rounded inputs
/// such as `1.5708` are accepted. Such inputs are clamped onto the range.
pub const ANGLE_SLACK_RAD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyConfig {
    frequency_hz: f64,
    wavelength_m: f64,
}

impl FrequencyConfig {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return invalid(format!("frequency must be positive and finite, got {frequency_hz}"));
        }
        Ok(Self {
            frequency_hz,
            wavelength_m: SPEED_OF_LIGHT / frequency_hz,
        })
    }

    pub fn from_wavelength(wavelength_m: f64) -> Result<Self> {
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return invalid(format!("wavelength must be positive and finite, got {wavelength_m}"));
        }
        Ok(Self {
            frequency_hz: SPEED_OF_LIGHT / wavelength_m,
            wavelength_m,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrayKind {
    Ula,
    Upa,
}

/// Size and element count of one array.
///
/// `aperture_m` is the extreme-element span, so the spacing is
/// `aperture_m / (elements_per_axis - 1)`. A single-element array is a point
/// antenna with zero aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArraySpec {
    kind: ArrayKind,
    aperture_m: f64,
    elements_per_axis: usize,
    requested_aperture_m: f64,
}

impl ArraySpec {
    pub fn new(kind: ArrayKind, aperture_m: f64, elements_per_axis: usize) -> Result<Self> {
        if elements_per_axis == 0 {
            return invalid("an array needs at least one element");
        }
        if !aperture_m.is_finite() || aperture_m < 0.0 {
            return invalid(format!("aperture must be finite and non-negative, got {aperture_m}"));
        }
        if (elements_per_axis == 1) != (aperture_m == 0.0) {
            return invalid(format!(
                "aperture {aperture_m} m is inconsistent with {elements_per_axis} element(s) per axis"
            ));
        }
        Ok(Self {
            kind,
            aperture_m,
            elements_per_axis,
            requested_aperture_m: aperture_m,
        })
    }

    /// Half-wavelength array closest to the requested physical size:
    /// `N = round(2D/λ) + 1` elements spanning `(N - 1)·λ/2`.
    pub fn from_aperture(kind: ArrayKind, requested_aperture_m: f64, wavelength_m: f64) -> Result<Self> {
        if !(requested_aperture_m.is_finite() && requested_aperture_m > 0.0) {
            return invalid(format!("aperture must be positive, got {requested_aperture_m}"));
        }
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return invalid(format!("wavelength must be positive, got {wavelength_m}"));
        }
        let steps = (2.0 * requested_aperture_m / wavelength_m).round();
        if steps > 1e7 {
            return invalid(format!("aperture {requested_aperture_m} m is {steps} half-wavelengths"));
        }
        let elements_per_axis = steps as usize + 1;
        Ok(Self {
            kind,
            aperture_m: steps * wavelength_m / 2.0,
            elements_per_axis,
            requested_aperture_m,
        })
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    /// Effective aperture (extreme-element span) in metres.
    pub fn aperture_m(&self) -> f64 {
        self.aperture_m
    }

    /// The size asked for before snapping to the half-wavelength grid.
    pub fn requested_aperture_m(&self) -> f64 {
        self.requested_aperture_m
    }

    pub fn elements_per_axis(&self) -> usize {
        self.elements_per_axis
    }

    pub fn element_count(&self) -> usize {
        match self.kind {
            ArrayKind::Ula => self.elements_per_axis,
            ArrayKind::Upa => self.elements_per_axis * self.elements_per_axis,
        }
    }

    pub fn spacing_m(&self) -> f64 {
        if self.elements_per_axis < 2 {
            0.0
        } else {
            self.aperture_m / (self.elements_per_axis - 1) as f64
        }
    }

    /// Coordinate of element `i` along one axis, relative to the array centre.
    pub(crate) fn axis_offset(&self, i: usize) -> f64 {
        (i as f64 - (self.elements_per_axis - 1) as f64 / 2.0) * self.spacing_m()
    }
}

/// UE misalignment: rotation by `theta` about x, then by `phi` about z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles {
    theta_rad: f64,
    phi_rad: f64,
}

impl RotationAngles {
    pub const ALIGNED: RotationAngles = RotationAngles {
        theta_rad: 0.0,
        phi_rad: 0.0,
    };

    pub fn new(theta_rad: f64, phi_rad: f64) -> Result<Self> {
        Ok(Self {
            theta_rad: checked_angle("theta", theta_rad)?,
            phi_rad: checked_angle("phi", phi_rad)?,
        })
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_rad
    }

    pub fn phi_rad(&self) -> f64 {
        self.phi_rad
    }
}

pub(crate) fn checked_angle(name: &str, angle: f64) -> Result<f64> {
    if !angle.is_finite() || angle.abs() > FRAC_PI_2 + ANGLE_SLACK_RAD {
        return invalid(format!("{name} = {angle} rad is outside [-pi/2, pi/2]"));
    }
    Ok(angle.clamp(-FRAC_PI_2, FRAC_PI_2))
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn transpose(&self) -> Matrix3 {
        let m = &self.0;
        Matrix3(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])))
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let m = &self.0;
        std::array::from_fn(|i| m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2])
    }

    pub fn column(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix3) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;

    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let (a, b) = (&self.0, &rhs.0);
        Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
        }))
    }
}

fn finite_angle(name: &str, angle: f64) -> Result<f64> {
    if angle.is_finite() {
        Ok(angle)
    } else {
        invalid(format!("{name} must be finite, got {angle}"))
    }
}

pub fn rotation_x(theta_rad: f64) -> Result<Matrix3> {
    let (s, c) = finite_angle("theta", theta_rad)?.sin_cos();
    Ok(Matrix3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]))
}

pub fn rotation_z(phi_rad: f64) -> Result<Matrix3> {
    let (s, c) = finite_angle("phi", phi_rad)?.sin_cos();
    Ok(Matrix3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))
}

/// `R_z(phi) · R_x(theta)`: the x-rotation is applied first.
pub fn compose_rotation(angles: RotationAngles) -> Matrix3 {
    let (st, ct) = angles.theta_rad.sin_cos();
    let (sp, cp) = angles.phi_rad.sin_cos();
    // Expanded product. With one angle zero this reproduces the single-axis
    // matrix entry for entry.
    Matrix3([[cp, -sp * ct, sp * st], [sp, cp * ct, -cp * st], [0.0, st, ct]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    UeLocal,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPlane {
    /// UE array before rotation, centred at the origin in the x–z plane.
    XzPlaneUe,
    /// AP array in the plane `y = d`, centred at `(0, d, 0)`.
    XzPlaneAp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementGrid {
    positions: Vec<Point3>,
    frame: Frame,
    center: Point3,
    spec: ArraySpec,
}

impl ElementGrid {
    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn spec(&self) -> &ArraySpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn centroid(&self) -> Point3 {
        let n = self.positions.len() as f64;
        let mut sum = [0.0; 3];
        for p in &self.positions {
            for k in 0..3 {
                sum[k] += p[k];
            }
        }
        sum.map(|s| s / n)
    }
}

pub fn build_grid(spec: &ArraySpec, center: Point3, plane: GridPlane) -> Result<ElementGrid> {
    let frame = match plane {
        GridPlane::XzPlaneUe => {
            if center != [0.0; 3] {
                return invalid(format!("UE grid must be centred at the origin, got {center:?}"));
            }
            Frame::UeLocal
        }
        GridPlane::XzPlaneAp => {
            if center[0] != 0.0 || center[2] != 0.0 || !(center[1].is_finite() && center[1] > 0.0) {
                return invalid(format!(
                    "AP grid must be centred at (0, d, 0) with d > 0, got {center:?}"
                ));
            }
            Frame::Global
        }
    };
    let n = spec.elements_per_axis();
    let positions = match spec.kind() {
        ArrayKind::Ula => (0..n)
            .map(|i| [center[0] + spec.axis_offset(i), center[1], center[2]])
            .collect(),
        ArrayKind::Upa => {
            let mut positions = Vec::with_capacity(n * n);
            for m in 0..n {
                let x = center[0] + spec.axis_offset(m);
                for k in 0..n {
                    positions.push([x, center[1], center[2] + spec.axis_offset(k)]);
                }
            }
            positions
        }
    };
    Ok(ElementGrid {
        positions,
        frame,
        center,
        spec: *spec,
    })
}

/// Rotates a UE grid about its centre (the origin) into the global frame.
pub fn rotate_grid(grid: &ElementGrid, rotation: &Matrix3) -> Result<ElementGrid> {
    if grid.frame != Frame::UeLocal || grid.center != [0.0; 3] {
        return invalid("only an origin-centred UE grid in its local frame can be rotated");
    }
    Ok(ElementGrid {
        positions: grid.positions.iter().map(|&p| rotation.apply(p)).collect(),
        frame: Frame::Global,
        center: grid.center,
        spec: grid.spec,
    })
}
