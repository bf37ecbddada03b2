//! Closed-form near-field distances for misaligned arrays.
//!
//! All lengths in metres, angles in radians. `d1_m` is the AP aperture and
//! `d2_m` the UE aperture; callers working from a simulated geometry should
//! pass the effective (extreme-element) apertures so both routes share the
//! same arrays.

use crate::error::{invalid, Result};
use crate::geometry::{checked_angle, compose_rotation, RotationAngles};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaInput {
    pub d1_m: f64,
    pub d2_m: f64,
    pub wavelength_m: f64,
    pub theta_rad: f64,
    pub phi_rad: f64,
}

impl FormulaInput {
    pub fn new(d1_m: f64, d2_m: f64, wavelength_m: f64, theta_rad: f64, phi_rad: f64) -> Result<Self> {
        for (name, v) in [("D1", d1_m), ("D2", d2_m)] {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if d1_m + d2_m <= 0.0 {
            return invalid("at least one aperture must be positive");
        }
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return invalid(format!("wavelength must be positive, got {wavelength_m}"));
        }
        Ok(Self {
            d1_m,
            d2_m,
            wavelength_m,
            theta_rad: checked_angle("theta", theta_rad)?,
            phi_rad: checked_angle("phi", phi_rad)?,
        })
    }

    pub fn with_angles(&self, theta_rad: f64, phi_rad: f64) -> Result<Self> {
        Self::new(self.d1_m, self.d2_m, self.wavelength_m, theta_rad, phi_rad)
    }

    fn require_single_angle(&self, what: &str) -> Result<()> {
        if self.phi_rad != 0.0 {
            return invalid(format!("{what} is defined for phi = 0 only, got {}", self.phi_rad));
        }
        Ok(())
    }

    /// `2(D1 + D2 cos θ)^2 / λ`, the horizontal term shared by every formula.
    fn rotated_term(&self) -> f64 {
        let a = self.d1_m + self.d2_m * self.theta_rad.cos();
        2.0 * a * a / self.wavelength_m
    }

    fn aligned_term(&self) -> f64 {
        let a = self.d1_m + self.d2_m;
        2.0 * a * a / self.wavelength_m
    }

    /// Extra distance from steering: `(D2/2)|sin θ|`.
    fn steering_term(&self) -> f64 {
        self.d2_m / 2.0 * self.theta_rad.sin().abs()
    }
}

pub fn ula_exact(input: &FormulaInput) -> Result<f64> {
    input.require_single_angle("the ULA formula")?;
    Ok(input.rotated_term() + input.steering_term())
}

pub fn ula_approx(input: &FormulaInput) -> Result<f64> {
    input.require_single_angle("the ULA formula")?;
    Ok(input.rotated_term())
}

pub fn upa1_exact(input: &FormulaInput) -> Result<f64> {
    input.require_single_angle("the one-angle UPA formula")?;
    Ok(input.aligned_term() + input.rotated_term() + input.steering_term())
}

pub fn upa1_approx(input: &FormulaInput) -> Result<f64> {
    input.require_single_angle("the one-angle UPA formula")?;
    Ok(input.aligned_term() + input.rotated_term())
}

/// Two-angle UPA approximation. Only an approximate form exists here.
pub fn upa2_approx(input: &FormulaInput) -> f64 {
    let (st, ct) = input.theta_rad.sin_cos();
    let (sp, cp) = input.phi_rad.sin_cos();
    let horizontal = input.d1_m + input.d2_m * (cp + (sp * st).abs());
    let vertical = input.d1_m + input.d2_m * ct;
    2.0 * horizontal * horizontal / input.wavelength_m + 2.0 * vertical * vertical / input.wavelength_m
}

/// Largest lateral distance between the effective-plane UE projected onto
/// the AP and an AP corner; `upa2_approx = 8 d_e^2 / λ`.
pub fn intermediate_d_e(input: &FormulaInput) -> f64 {
    let (st, ct) = input.theta_rad.sin_cos();
    let (sp, cp) = input.phi_rad.sin_cos();
    let x_ue = input.d2_m / 2.0 * (cp + (sp * st).abs());
    let z_ue = input.d2_m / 2.0 * ct;
    let half = input.d1_m / 2.0;
    ((half + x_ue).powi(2) + (half + z_ue).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixError {
    /// `d(E, P) + d(E, E') - d(E', P)` evaluated from the geometry.
    pub f_value_m: f64,
    /// `D2 (D1 + D2)^2 / (4 d^2)`.
    pub bound_m: f64,
}

impl AppendixError {
    pub fn within_bound(&self) -> bool {
        self.f_value_m <= self.bound_m + 1e-15
    }
}

/// `D2 (D1 + D2)^2 / (4 d^2)`.
pub fn appendix_bound(input: &FormulaInput, d_m: f64) -> f64 {
    let s = input.d1_m + input.d2_m;
    input.d2_m * s * s / (4.0 * d_m * d_m)
}

/// Error made by replacing the rotated UE element `E` with its point `E'` on
/// the effective plane `y = -Δd`, for one UE point `(x, z)` (local frame)
/// and AP point `(x_AP, z_AP)` at separation `d_m`.
pub fn appendix_error(
    input: &FormulaInput,
    d_m: f64,
    ue_point: (f64, f64),
    ap_point: (f64, f64),
) -> Result<AppendixError> {
    if !(d_m.is_finite() && d_m > 0.0) {
        return invalid(format!("separation must be positive, got {d_m}"));
    }
    let within = |v: f64, aperture: f64| v.is_finite() && v.abs() <= aperture / 2.0 * (1.0 + 1e-12);
    if !within(ue_point.0, input.d2_m) || !within(ue_point.1, input.d2_m) {
        return invalid(format!(
            "UE point {ue_point:?} lies outside the {} m aperture",
            input.d2_m
        ));
    }
    if !within(ap_point.0, input.d1_m) || !within(ap_point.1, input.d1_m) {
        return invalid(format!(
            "AP point {ap_point:?} lies outside the {} m aperture",
            input.d1_m
        ));
    }

    let angles = RotationAngles::new(input.theta_rad, input.phi_rad)?;
    let e = compose_rotation(angles).apply([ue_point.0, 0.0, ue_point.1]);
    let (st, _) = input.theta_rad.sin_cos();
    let (sp, cp) = input.phi_rad.sin_cos();
    let offset = input.d2_m / 2.0 * ((cp * st).abs() + sp.abs());
    let e_prime = [e[0], -offset, e[2]];
    let p = [ap_point.0, d_m, ap_point.1];

    let dist =
        |a: [f64; 3], b: [f64; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    Ok(AppendixError {
        f_value_m: dist(e, p) + dist(e, e_prime) - dist(e_prime, p),
        bound_m: appendix_bound(input, d_m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn reference(theta: f64, phi: f64) -> FormulaInput {
        FormulaInput::new(0.1, 0.05, 1e-3, theta, phi).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ula_values() {
        assert!(close(ula_exact(&reference(0.0, 0.0)).unwrap(), 45.0, 1e-12));
        assert!(close(ula_exact(&reference(FRAC_PI_2, 0.0)).unwrap(), 20.025, 1e-12));
        // 2(0.1 + 0.05 cos 30°)^2 / 0.001 + 0.0125
        let a = 0.1 + 0.05 * 3f64.sqrt() / 2.0;
        let expected = 2.0 * a * a / 1e-3 + 0.0125;
        assert!(close(ula_exact(&reference(FRAC_PI_6, 0.0)).unwrap(), expected, 1e-12));
        assert!(close(expected, 41.08, 0.005));
        assert!(close(ula_approx(&reference(0.0, 0.0)).unwrap(), 45.0, 1e-12));
        assert!(close(ula_approx(&reference(FRAC_PI_2, 0.0)).unwrap(), 20.0, 1e-12));
        assert!(ula_exact(&reference(0.1, 0.2)).is_err());
        assert!(ula_approx(&reference(0.1, 0.2)).is_err());
    }

    #[test]
    fn upa_one_angle_values() {
        assert!(close(upa1_exact(&reference(0.0, 0.0)).unwrap(), 90.0, 1e-12));
        assert!(close(upa1_exact(&reference(FRAC_PI_2, 0.0)).unwrap(), 65.025, 1e-12));
        assert!(close(upa1_approx(&reference(0.0, 0.0)).unwrap(), 90.0, 1e-12));
        assert!(close(upa1_approx(&reference(FRAC_PI_2, 0.0)).unwrap(), 65.0, 1e-12));
        assert!(upa1_exact(&reference(0.0, 0.3)).is_err());

        let cellular_tablet = FormulaInput::new(0.2, 0.05, 1e-3, 0.0, 0.0).unwrap();
        let aligned = upa1_approx(&cellular_tablet).unwrap();
        let turned = upa1_approx(&cellular_tablet.with_angles(FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert!(close(aligned, 250.0, 1e-10));
        assert!(close(turned, 205.0, 1e-10));
        assert!(close((aligned - turned) / aligned, 0.18, 1e-12));
    }

    #[test]
    fn exact_minus_approx_is_steering_term() {
        for theta in [-FRAC_PI_2, -1.0, -0.2, 0.0, 0.7, FRAC_PI_3, FRAC_PI_2] {
            let i = reference(theta, 0.0);
            let term = 0.025 * theta.sin().abs();
            assert!(close(ula_exact(&i).unwrap() - ula_approx(&i).unwrap(), term, 1e-12));
            assert!(close(upa1_exact(&i).unwrap() - upa1_approx(&i).unwrap(), term, 1e-12));
        }
    }

    #[test]
    fn two_angle_values() {
        assert!(close(upa2_approx(&reference(0.0, 0.0)), 90.0, 1e-12));
        assert!(close(upa2_approx(&reference(FRAC_PI_2, 0.0)), 65.0, 1e-12));
        assert!(close(upa2_approx(&reference(FRAC_PI_2, FRAC_PI_2)), 65.0, 1e-12));
        assert!(close(upa2_approx(&reference(0.0, FRAC_PI_2)), 65.0, 1e-12));
    }

    #[test]
    fn d_e_chain() {
        let i = reference(0.0, 0.0);
        assert!(close(intermediate_d_e(&i), 2f64.sqrt() * 0.15 / 2.0, 1e-15));
        assert!(close(intermediate_d_e(&i), 0.10607, 1e-5));
        assert!(close(8.0 * intermediate_d_e(&i).powi(2) / 1e-3, 90.0, 1e-10));
        let i = reference(FRAC_PI_2, 0.0);
        assert!(close(
            intermediate_d_e(&i),
            (0.075f64.powi(2) + 0.05f64.powi(2)).sqrt(),
            1e-15
        ));
        assert!(close(intermediate_d_e(&i), 0.09014, 1e-5));
        assert!(close(8.0 * intermediate_d_e(&i).powi(2) / 1e-3, 65.0, 1e-10));
    }

    #[test]
    fn appendix_cases() {
        let aligned = appendix_error(&reference(0.0, 0.0), 10.0, (0.02, -0.01), (-0.05, 0.03)).unwrap();
        assert_eq!(aligned.f_value_m, 0.0);
        assert!(close(aligned.bound_m, 2.8125e-6, 1e-18));
        let i = reference(0.4, -0.3);
        assert_eq!(appendix_bound(&i, 20.0), appendix_bound(&i, 10.0) / 4.0);
        assert!(appendix_error(&i, 0.0, (0.0, 0.0), (0.0, 0.0)).is_err());
        assert!(appendix_error(&i, 1.0, (0.03, 0.0), (0.0, 0.0)).is_err());
        assert!(appendix_error(&i, 1.0, (0.0, 0.0), (0.0, -0.06)).is_err());
    }

    #[test]
    fn appendix_bound_is_not_universal() {
        // A small UE turned to (90°, 45°) under a large AP: the diagonal UE
        // corner sits D2/√2 off the plane, which the closed bound ignores.
        let i = FormulaInput::new(0.28, 0.005, 1e-3, FRAC_PI_2, std::f64::consts::FRAC_PI_4).unwrap();
        let e = appendix_error(&i, 7.0, (0.0025, -0.0025), (-0.14, 0.14)).unwrap();
        assert!(e.f_value_m > e.bound_m * 1.2, "{e:?}");
        assert!(!e.within_bound());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;
        use std::f64::consts::FRAC_PI_2;

        fn input() -> impl Strategy<Value = FormulaInput> {
            (
                0.001f64..0.5,
                0.001f64..0.2,
                1e-4f64..1e-2,
                -FRAC_PI_2..=FRAC_PI_2,
                -FRAC_PI_2..=FRAC_PI_2,
            )
                .prop_map(|(d1, d2, l, t, p)| FormulaInput::new(d1, d2, l, t, p).unwrap())
        }

        proptest! {
            #[test]
            fn reduction_chain(i in input()) {
                let one = i.with_angles(i.theta_rad, 0.0).unwrap();
                prop_assert_eq!(upa2_approx(&one), upa1_approx(&one).unwrap());
                let zero = i.with_angles(0.0, 0.0).unwrap();
                let s = i.d1_m + i.d2_m;
                let four = 4.0 * s * s / i.wavelength_m;
                prop_assert!((upa1_approx(&zero).unwrap() - four).abs() <= 1e-12 * four);
                prop_assert!((ula_approx(&zero).unwrap() - four / 2.0).abs() <= 1e-12 * four);
                let de = intermediate_d_e(&i);
                let via_de = 8.0 * de * de / i.wavelength_m;
                prop_assert!((upa2_approx(&i) - via_de).abs() <= 1e-12 * via_de);
            }

            #[test]
            fn even_in_both_angles(i in input()) {
                let flipped = i.with_angles(-i.theta_rad, -i.phi_rad).unwrap();
                let theta_only = i.with_angles(-i.theta_rad, i.phi_rad).unwrap();
                prop_assert_eq!(upa2_approx(&i), upa2_approx(&flipped));
                prop_assert_eq!(upa2_approx(&i), upa2_approx(&theta_only));
                let one = i.with_angles(i.theta_rad, 0.0).unwrap();
                let neg = i.with_angles(-i.theta_rad, 0.0).unwrap();
                prop_assert_eq!(ula_exact(&one).unwrap(), ula_exact(&neg).unwrap());
                prop_assert_eq!(upa1_exact(&one).unwrap(), upa1_exact(&neg).unwrap());
            }

            #[test]
            fn shrinks_with_rotation(i in input(), a in 0.0f64..FRAC_PI_2, b in 0.0f64..FRAC_PI_2) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let at = |t: f64| i.with_angles(t, 0.0).unwrap();
                prop_assert!(ula_approx(&at(hi)).unwrap() <= ula_approx(&at(lo)).unwrap());
                prop_assert!(upa1_approx(&at(hi)).unwrap() <= upa1_approx(&at(lo)).unwrap());
            }

            #[test]
            fn error_is_non_negative_and_quartic_in_distance(
                i in input(),
                u in (-0.5f64..0.5, -0.5f64..0.5),
                p in (-0.5f64..0.5, -0.5f64..0.5),
                k in 5.0f64..100.0,
            ) {
                let d = k * (i.d1_m + i.d2_m);
                let e = appendix_error(&i, d, (u.0 * i.d2_m, u.1 * i.d2_m), (p.0 * i.d1_m, p.1 * i.d1_m)).unwrap();
                prop_assert!(e.f_value_m >= -1e-15);
                prop_assert_eq!(appendix_bound(&i, 2.0 * d), appendix_bound(&i, d) / 4.0);
            }
        }
    }
}
