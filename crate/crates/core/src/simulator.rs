//! Brute-force evaluation of the effective-distance spread between two
//! arrays and the near-field distance solver built on it.
//!
//! The near-field distance is the smallest separation `d` at which
//! `max r̃ - min r̃ <= λ/16` over all AP–UE element pairs, i.e. a phase
//! mismatch of π/8, where `r̃` is the pair distance plus the UE element's
//! steering compensation.
//!
//! Two search modes are provided. `Full` enumerates every pair. `Extremal`
//! relies on the structure of the problem: for a fixed UE element the
//! effective distance is convex in the AP element position, so the largest
//! value sits on an AP corner, and the smallest sits on the AP node nearest
//! to the UE element's projection (the lateral offset separates per axis).
//! `validate_extremal_mode` checks the two against each other.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::formulas::{self, FormulaInput};
use crate::geometry::{
    build_grid, compose_rotation, rotate_grid, rotation_z, ArrayKind, ArraySpec, FrequencyConfig, GridPlane, Matrix3,
    Point3, RotationAngles,
};
use crate::steering::{effective_distance, upa_compensation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    UlaUla,
    UpaUpa,
}

impl Scenario {
    pub fn array_kind(self) -> ArrayKind {
        match self {
            Scenario::UlaUla => ArrayKind::Ula,
            Scenario::UpaUpa => ArrayKind::Upa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    Full,
    Extremal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Simulated,
    ClosedFormExact,
    ClosedFormApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub frequency: FrequencyConfig,
    pub ap: ArraySpec,
    pub ue: ArraySpec,
    pub angles: RotationAngles,
    pub scenario: Scenario,
}

impl ScenarioConfig {
    pub fn new(
        scenario: Scenario,
        frequency: FrequencyConfig,
        ap: ArraySpec,
        ue: ArraySpec,
        angles: RotationAngles,
    ) -> Result<Self> {
        let kind = scenario.array_kind();
        if ap.kind() != kind || ue.kind() != kind {
            return invalid(format!(
                "{scenario:?} needs {kind:?} arrays, got AP {:?} and UE {:?}",
                ap.kind(),
                ue.kind()
            ));
        }
        if scenario == Scenario::UlaUla && angles.phi_rad() != 0.0 {
            return invalid(format!(
                "the ULA scenario has a single angle; phi must be 0, got {}",
                angles.phi_rad()
            ));
        }
        Ok(Self {
            frequency,
            ap,
            ue,
            angles,
            scenario,
        })
    }

    /// Half-wavelength arrays snapped to the requested physical sizes.
    pub fn from_apertures(
        scenario: Scenario,
        frequency: FrequencyConfig,
        ap_aperture_m: f64,
        ue_aperture_m: f64,
        angles: RotationAngles,
    ) -> Result<Self> {
        let kind = scenario.array_kind();
        let lambda = frequency.wavelength_m();
        Self::new(
            scenario,
            frequency,
            ArraySpec::from_aperture(kind, ap_aperture_m, lambda)?,
            ArraySpec::from_aperture(kind, ue_aperture_m, lambda)?,
            angles,
        )
    }

    pub fn wavelength_m(&self) -> f64 {
        self.frequency.wavelength_m()
    }

    /// Spread of effective distance that marks the boundary: `λ/16`.
    pub fn threshold_m(&self) -> f64 {
        self.wavelength_m() / 16.0
    }

    pub fn pair_count(&self) -> usize {
        self.ap.element_count() * self.ue.element_count()
    }

    pub fn with_angles(&self, angles: RotationAngles) -> Result<Self> {
        Self::new(self.scenario, self.frequency, self.ap, self.ue, angles)
    }

    /// UE rotation. The linear scenario turns the UE within the plane that
    /// holds both arrays, i.e. about z by `theta`.
    pub fn ue_rotation(&self) -> Matrix3 {
        match self.scenario {
            Scenario::UlaUla => rotation_z(self.angles.theta_rad()).expect("validated angle"),
            Scenario::UpaUpa => compose_rotation(self.angles),
        }
    }

    /// Closed-form inputs built from the effective apertures.
    pub fn formula_input(&self) -> Result<FormulaInput> {
        FormulaInput::new(
            self.ap.aperture_m(),
            self.ue.aperture_m(),
            self.wavelength_m(),
            self.angles.theta_rad(),
            self.angles.phi_rad(),
        )
    }

    pub fn closed_form(&self, method: Method) -> Result<f64> {
        let input = self.formula_input()?;
        match (method, self.scenario) {
            (Method::ClosedFormExact, Scenario::UlaUla) => formulas::ula_exact(&input),
            (Method::ClosedFormApprox, Scenario::UlaUla) => formulas::ula_approx(&input),
            (Method::ClosedFormExact, Scenario::UpaUpa) => formulas::upa1_exact(&input),
            (Method::ClosedFormApprox, Scenario::UpaUpa) => Ok(formulas::upa2_approx(&input)),
            (Method::Simulated, _) => invalid("the simulated distance comes from the solver"),
        }
    }
}

/// Largest and smallest effective distance over the searched pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadResult {
    pub separation_m: f64,
    pub max_effective_m: f64,
    pub min_effective_m: f64,
    pub spread_m: f64,
    pub phase_spread_rad: f64,
    /// `(ap_index, ue_index)` in grid order.
    pub argmax_pair: (usize, usize),
    pub argmin_pair: (usize, usize),
    pub search_mode: SearchMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldResult {
    pub d_f_m: f64,
    pub method: Method,
    pub iterations: usize,
    /// `spread(d_f) - λ/16`; zero for closed forms.
    pub residual_m: f64,
    pub search_mode: Option<SearchMode>,
}

/// Running max/min with argument pairs. Ties go to the lowest
/// `(ap_index, ue_index)`, which makes the merge order-independent.
#[derive(Debug, Clone, Copy)]
struct Extremes {
    max: f64,
    argmax: (usize, usize),
    min: f64,
    argmin: (usize, usize),
}

impl Extremes {
    const EMPTY: Extremes = Extremes {
        max: f64::NEG_INFINITY,
        argmax: (usize::MAX, usize::MAX),
        min: f64::INFINITY,
        argmin: (usize::MAX, usize::MAX),
    };

    #[inline]
    fn offer_max(&mut self, value: f64, pair: (usize, usize)) {
        if value > self.max || (value == self.max && pair < self.argmax) {
            self.max = value;
            self.argmax = pair;
        }
    }

    #[inline]
    fn offer_min(&mut self, value: f64, pair: (usize, usize)) {
        if value < self.min || (value == self.min && pair < self.argmin) {
            self.min = value;
            self.argmin = pair;
        }
    }

    fn merge(mut self, other: Extremes) -> Extremes {
        self.offer_max(other.max, other.argmax);
        self.offer_min(other.min, other.argmin);
        self
    }
}

/// AP elements per parallel work unit in `Full` mode.
const FULL_MODE_CHUNK: usize = 64;

/// Scenario geometry that does not depend on the separation: the rotated UE
/// grid with its compensation, and the AP element offsets.
#[derive(Debug, Clone)]
pub struct SpreadEvaluator {
    config: ScenarioConfig,
    ue_positions: Vec<Point3>,
    compensation_m: Vec<f64>,
    ap_axis: Vec<f64>,
    ap_planar: bool,
    ap_corners: Vec<usize>,
    min_separation_m: f64,
}

impl SpreadEvaluator {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let ue_local = build_grid(&config.ue, [0.0; 3], GridPlane::XzPlaneUe)?;
        let ue = rotate_grid(&ue_local, &config.ue_rotation())?;
        let compensation = upa_compensation(&ue)?;
        let max_y = ue.positions().iter().map(|p| p[1]).fold(0.0, f64::max);

        let n = config.ap.elements_per_axis();
        let ap_axis: Vec<f64> = (0..n).map(|i| config.ap.axis_offset(i)).collect();
        let ap_planar = config.ap.kind() == ArrayKind::Upa;
        let mut ap_corners = if ap_planar {
            vec![0, n - 1, (n - 1) * n, n * n - 1]
        } else {
            vec![0, n - 1]
        };
        ap_corners.dedup();

        Ok(Self {
            config: *config,
            ue_positions: ue.positions().to_vec(),
            compensation_m: compensation.per_element_m,
            ap_axis,
            ap_planar,
            ap_corners,
            min_separation_m: max_y,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Separations must exceed this: the largest y reached by a rotated UE
    /// element.
    pub fn min_separation_m(&self) -> f64 {
        self.min_separation_m
    }

    pub fn ue_positions(&self) -> &[Point3] {
        &self.ue_positions
    }

    pub fn compensation_m(&self) -> &[f64] {
        &self.compensation_m
    }

    pub fn ap_len(&self) -> usize {
        if self.ap_planar {
            self.ap_axis.len() * self.ap_axis.len()
        } else {
            self.ap_axis.len()
        }
    }

    #[inline]
    pub fn ap_position(&self, index: usize, separation_m: f64) -> Point3 {
        if self.ap_planar {
            let n = self.ap_axis.len();
            [self.ap_axis[index / n], separation_m, self.ap_axis[index % n]]
        } else {
            [self.ap_axis[index], separation_m, 0.0]
        }
    }

    /// The one or two AP nodes bracketing `coord` along an axis.
    fn bracketing_nodes(&self, coord: f64) -> (usize, usize) {
        let n = self.ap_axis.len();
        if n == 1 {
            return (0, 0);
        }
        let spacing = self.ap_axis[1] - self.ap_axis[0];
        let t = ((coord - self.ap_axis[0]) / spacing).floor();
        let lo = if t <= 0.0 { 0 } else { (t as usize).min(n - 1) };
        (lo, (lo + 1).min(n - 1))
    }

    pub fn spread(&self, separation_m: f64, mode: SearchMode) -> Result<SpreadResult> {
        if !(separation_m.is_finite() && separation_m > self.min_separation_m) {
            return Err(Error::Domain {
                separation_m,
                min_separation_m: self.min_separation_m,
            });
        }
        let ext = match mode {
            SearchMode::Full => self.full_search(separation_m),
            SearchMode::Extremal => self.extremal_search(separation_m),
        };
        let spread_m = ext.max - ext.min;
        Ok(SpreadResult {
            separation_m,
            max_effective_m: ext.max,
            min_effective_m: ext.min,
            spread_m,
            phase_spread_rad: 2.0 * PI * spread_m / self.config.wavelength_m(),
            argmax_pair: ext.argmax,
            argmin_pair: ext.argmin,
            search_mode: mode,
        })
    }

    fn full_search(&self, separation_m: f64) -> Extremes {
        let ue = &self.ue_positions;
        let comp = &self.compensation_m;
        (0..self.ap_len())
            .into_par_iter()
            .with_min_len(FULL_MODE_CHUNK)
            .fold(
                || Extremes::EMPTY,
                |mut acc, a| {
                    let p = self.ap_position(a, separation_m);
                    for (u, (&e, &c)) in ue.iter().zip(comp).enumerate() {
                        let r = effective_distance(p, e, c);
                        acc.offer_max(r, (a, u));
                        acc.offer_min(r, (a, u));
                    }
                    acc
                },
            )
            .reduce(|| Extremes::EMPTY, Extremes::merge)
    }

    fn extremal_search(&self, separation_m: f64) -> Extremes {
        let corners: Vec<(usize, Point3)> = self
            .ap_corners
            .iter()
            .map(|&a| (a, self.ap_position(a, separation_m)))
            .collect();
        let n = self.ap_axis.len();
        let mut acc = Extremes::EMPTY;
        for (u, (&e, &c)) in self.ue_positions.iter().zip(&self.compensation_m).enumerate() {
            for &(a, p) in &corners {
                acc.offer_max(effective_distance(p, e, c), (a, u));
            }
            let (x0, x1) = self.bracketing_nodes(e[0]);
            if self.ap_planar {
                let (z0, z1) = self.bracketing_nodes(e[2]);
                for m in [x0, x1] {
                    for k in [z0, z1] {
                        let a = m * n + k;
                        acc.offer_min(effective_distance(self.ap_position(a, separation_m), e, c), (a, u));
                    }
                }
            } else {
                for a in [x0, x1] {
                    acc.offer_min(effective_distance(self.ap_position(a, separation_m), e, c), (a, u));
                }
            }
        }
        acc
    }
}

pub fn max_phase_spread(config: &ScenarioConfig, separation_m: f64, mode: SearchMode) -> Result<SpreadResult> {
    SpreadEvaluator::new(config)?.spread(separation_m, mode)
}

pub const DEFAULT_REL_TOL: f64 = 1e-4;
const MAX_EXPANSIONS: usize = 60;
const MONOTONE_SAMPLES: usize = 16;
const MAX_BISECTIONS: usize = 200;

/// Smallest separation whose spread is at most `λ/16`.
///
/// The closed-form approximation seeds a bracket that is grown or shrunk by
/// a factor of two, the spread is checked to be non-increasing at sampled
/// points inside the bracket, and bisection narrows it to
/// `rel_tol * midpoint`.
pub fn solve_near_field_distance(config: &ScenarioConfig, rel_tol: f64, mode: SearchMode) -> Result<NearFieldResult> {
    SpreadEvaluator::new(config)?.solve(rel_tol, mode)
}

impl SpreadEvaluator {
    pub fn solve(&self, rel_tol: f64, mode: SearchMode) -> Result<NearFieldResult> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return invalid(format!("rel_tol must lie in (0, 1e-2], got {rel_tol}"));
        }
        let target = self.config.threshold_m();
        let floor = self.min_separation_m;
        let spread = |d: f64| self.spread(d, mode).map(|s| s.spread_m);

        let guess = self
            .config
            .closed_form(Method::ClosedFormApprox)
            .ok()
            .filter(|g| g.is_finite() && *g > floor)
            .unwrap_or(2.0 * floor.max(self.config.wavelength_m()));

        let mut iterations = 0;
        let (mut lo, mut hi);
        if spread(guess)? > target {
            lo = guess;
            hi = 2.0 * guess;
            while spread(hi)? > target {
                iterations += 1;
                if iterations > MAX_EXPANSIONS {
                    return Err(Error::NoConvergence {
                        expansions: iterations - 1,
                        last_d_m: hi,
                    });
                }
                lo = hi;
                hi *= 2.0;
            }
        } else {
            hi = guess;
            lo = shrink_towards(hi, floor);
            while spread(lo)? <= target {
                iterations += 1;
                if iterations > MAX_EXPANSIONS {
                    return Err(Error::NoConvergence {
                        expansions: iterations - 1,
                        last_d_m: lo,
                    });
                }
                hi = lo;
                lo = shrink_towards(lo, floor);
            }
        }

        let ratio = (hi / lo).powf(1.0 / (MONOTONE_SAMPLES - 1) as f64);
        let samples = (0..MONOTONE_SAMPLES)
            .map(|i| {
                let d = if i + 1 == MONOTONE_SAMPLES {
                    hi
                } else {
                    lo * ratio.powi(i as i32)
                };
                spread(d).map(|s| (d, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let monotone = samples.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12 * w[0].1.abs());
        if !monotone {
            return Err(Error::NonMonotone { samples });
        }

        while hi - lo > rel_tol * 0.5 * (lo + hi) && iterations < MAX_EXPANSIONS + MAX_BISECTIONS {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if spread(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let d_f_m = 0.5 * (lo + hi);
        Ok(NearFieldResult {
            d_f_m,
            method: Method::Simulated,
            iterations,
            residual_m: spread(d_f_m)? - target,
            search_mode: Some(mode),
        })
    }
}

/// Halves `d`, but never down to or past `floor`.
fn shrink_towards(d: f64, floor: f64) -> f64 {
    let half = 0.5 * d;
    if half > floor {
        half
    } else {
        0.5 * (d + floor)
    }
}

/// Closed-form distance wrapped as a result row.
pub fn closed_form_result(config: &ScenarioConfig, method: Method) -> Result<NearFieldResult> {
    Ok(NearFieldResult {
        d_f_m: config.closed_form(method)?,
        method,
        iterations: 0,
        residual_m: 0.0,
        search_mode: None,
    })
}

/// Largest pair count accepted by `validate_extremal_mode`.
pub const MAX_VALIDATION_PAIRS: usize = 1_000_000;
pub const EXTREMAL_TOLERANCE_M: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalReport {
    /// `(separation, full spread, extremal spread)` per separation.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_discrepancy_m: f64,
    pub passed: bool,
}

/// Compares `Extremal` against `Full` at each separation.
pub fn validate_extremal_mode(config: &ScenarioConfig, separations: &[f64]) -> Result<ExtremalReport> {
    if config.pair_count() > MAX_VALIDATION_PAIRS {
        return invalid(format!(
            "{} pairs is too many for a full enumeration (limit {MAX_VALIDATION_PAIRS})",
            config.pair_count()
        ));
    }
    let eval = SpreadEvaluator::new(config)?;
    let mut rows = Vec::with_capacity(separations.len());
    let mut max_discrepancy_m: f64 = 0.0;
    for &d in separations {
        let full = eval.spread(d, SearchMode::Full)?.spread_m;
        let extremal = eval.spread(d, SearchMode::Extremal)?.spread_m;
        max_discrepancy_m = max_discrepancy_m.max((full - extremal).abs());
        rows.push((d, full, extremal));
    }
    Ok(ExtremalReport {
        rows,
        max_discrepancy_m,
        passed: max_discrepancy_m <= EXTREMAL_TOLERANCE_M,
    })
}
