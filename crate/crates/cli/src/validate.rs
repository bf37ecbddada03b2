//! The `validate` report: every acceptance criterion re-run from the binary
//! and printed as a pass/fail table.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nearfield::formulas::{self, appendix_bound, appendix_error, FormulaInput};
use nearfield::simulator::validate_extremal_mode;
use nearfield::{
    solve_near_field_distance, FrequencyConfig, Method, RotationAngles, Scenario, ScenarioConfig, SearchMode,
    SpreadEvaluator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

const SIM_REL_TOL: f64 = 0.02;
const SOLVER_REL_TOL: f64 = 1e-4;
const APPENDIX_SEED: u64 = 0x00C0_FFEE;
const EXTREMAL_SEED: u64 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Closed forms as seen by the report. `perturb` scales the two-angle
/// approximation by `1 + perturb`, which lets tests prove the report can fail.
#[derive(Debug, Clone, Copy)]
struct ClosedForms {
    perturb: f64,
}

impl ClosedForms {
    fn upa2(&self, input: &FormulaInput) -> f64 {
        formulas::upa2_approx(input) * (1.0 + self.perturb)
    }

    fn of(&self, c: &ScenarioConfig, method: Method) -> nearfield::Result<f64> {
        match (c.scenario, method) {
            (Scenario::UpaUpa, Method::ClosedFormApprox) => Ok(self.upa2(&c.formula_input()?)),
            _ => c.closed_form(method),
        }
    }

    /// Exact where available, else the two-angle approximation.
    fn reference(&self, c: &ScenarioConfig) -> nearfield::Result<f64> {
        self.of(c, Method::ClosedFormExact)
            .or_else(|_| self.of(c, Method::ClosedFormApprox))
    }
}

fn lambda_1mm() -> FrequencyConfig {
    FrequencyConfig::from_wavelength(1e-3).expect("positive wavelength")
}

fn config(
    scenario: Scenario,
    f: FrequencyConfig,
    d1: f64,
    d2: f64,
    theta: f64,
    phi: f64,
) -> nearfield::Result<ScenarioConfig> {
    ScenarioConfig::from_apertures(scenario, f, d1, d2, RotationAngles::new(theta, phi)?)
}

fn simulate(c: &ScenarioConfig, mode: SearchMode) -> nearfield::Result<f64> {
    Ok(solve_near_field_distance(c, SOLVER_REL_TOL, mode)?.d_f_m)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

type Outcome = nearfield::Result<(bool, String)>;
type CheckFn = Box<dyn Fn() -> Outcome>;

fn aligned_baselines(cf: ClosedForms) -> Outcome {
    let f = lambda_1mm();
    let ula = config(Scenario::UlaUla, f, 0.1, 0.05, 0.0, 0.0)?;
    let upa = config(Scenario::UpaUpa, f, 0.1, 0.05, 0.0, 0.0)?;
    let machine = |v: f64, want: f64| rel(v, want) <= 8.0 * f64::EPSILON;
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [Method::ClosedFormExact, Method::ClosedFormApprox] {
        let (a, b) = (cf.of(&ula, m)?, cf.of(&upa, m)?);
        ok &= machine(a, 45.0) && machine(b, 90.0);
        notes.push(format!("{a} / {b}"));
    }
    let start = Instant::now();
    let ula_sim = simulate(&ula, SearchMode::Full)?;
    let ula_time = start.elapsed();
    let upa_sim = simulate(&upa, SearchMode::Extremal)?;
    ok &= rel(ula_sim, 45.0) <= SIM_REL_TOL && rel(upa_sim, 90.0) <= SIM_REL_TOL;
    ok &= ula_time < Duration::from_secs(1);
    Ok((
        ok,
        format!("closed {}; sim {ula_sim:.4} / {upa_sim:.4} m", notes.join(", ")),
    ))
}

fn reductions(cf: ClosedForms) -> Outcome {
    let f = lambda_1mm();
    let mut closed = Vec::new();
    let mut ok = true;
    for scenario in [Scenario::UlaUla, Scenario::UpaUpa] {
        for theta in [0.0, FRAC_PI_2] {
            let c = config(scenario, f, 0.1, 0.05, theta, 0.0)?;
            let approx = cf.of(&c, Method::ClosedFormApprox)?;
            ok &= rel(simulate(&c, SearchMode::Extremal)?, approx) <= SIM_REL_TOL;
            closed.push(approx);
        }
    }
    let ula = 1.0 - closed[1] / closed[0];
    let upa = 1.0 - closed[3] / closed[2];
    ok &= (ula - 0.5556).abs() <= 0.001 && (upa - 0.2778).abs() <= 0.001;
    Ok((ok, format!("ULA {:.2}%, UPA {:.2}%", 100.0 * ula, 100.0 * upa)))
}

fn preset_variations(cf: ClosedForms) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, d1, d2, want) in [
        ("cellular+tablet", 0.20, 0.05, 0.180),
        ("cellular+smartphone", 0.20, 0.015, 0.067),
        ("wifi+tablet", 0.10, 0.05, 0.278),
    ] {
        let mut values = Vec::with_capacity(181);
        for i in 0..=180 {
            let theta = -FRAC_PI_2 + PI * i as f64 / 180.0;
            values.push(cf.upa2(&FormulaInput::new(d1, d2, 1e-3, theta, 0.0)?));
        }
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        let v = (max - min) / max;
        ok &= (v - want).abs() <= 0.002;
        notes.push(format!("{name} {:.2}%", 100.0 * v));
    }
    Ok((ok, notes.join(", ")))
}

fn identities(cf: ClosedForms) -> Outcome {
    let base = FormulaInput::new(0.1, 0.05, 1e-3, 0.0, 0.0)?;
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let input = base.with_angles(-FRAC_PI_2 + PI * i as f64 / 100.0, 0.0)?;
        worst = worst.max(rel(cf.upa2(&input), formulas::upa1_approx(&input)?));
    }
    let aligned = rel(cf.upa2(&base), 4.0 * 0.15f64.powi(2) / 1e-3);
    let ok = worst <= 4.0 * f64::EPSILON && aligned <= 4.0 * f64::EPSILON;
    Ok((
        ok,
        format!("max rel diff {worst:.2e} over 101 θ, aligned {aligned:.2e}"),
    ))
}

fn desk_scale(cf: ClosedForms) -> Outcome {
    let f = lambda_1mm();
    let mut configs = Vec::new();
    for scenario in [Scenario::UlaUla, Scenario::UpaUpa] {
        for theta in [0.0, FRAC_PI_6, FRAC_PI_3, FRAC_PI_2] {
            configs.push(config(scenario, f, 0.02, 0.01, theta, 0.0)?);
        }
    }
    for (theta, phi) in [
        (FRAC_PI_6, FRAC_PI_6),
        (FRAC_PI_3, PI / 5.0),
        (0.0, FRAC_PI_2),
        (FRAC_PI_2, FRAC_PI_4),
    ] {
        configs.push(config(Scenario::UpaUpa, f, 0.02, 0.01, theta, phi)?);
    }
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c in &configs {
        worst = worst.max(rel(simulate(c, SearchMode::Full)?, cf.reference(c)?));
    }
    let elapsed = start.elapsed();
    let ok = worst <= SIM_REL_TOL && elapsed < Duration::from_secs(60);
    Ok((
        ok,
        format!("{} configs, worst rel diff {worst:.2e}, {elapsed:.2?}", configs.len()),
    ))
}

fn extremal_vs_full() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(EXTREMAL_SEED);
    let lambda = 1e-3;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..50 {
        let planar = rng.gen_bool(0.5);
        let scenario = if planar { Scenario::UpaUpa } else { Scenario::UlaUla };
        let n_ap: usize = rng.gen_range(2..=10);
        let n_ue: usize = rng.gen_range(2..=10);
        let theta = rng.gen_range(-FRAC_PI_2..=FRAC_PI_2);
        let phi = if planar {
            rng.gen_range(-FRAC_PI_2..=FRAC_PI_2)
        } else {
            0.0
        };
        let d1 = (n_ap - 1) as f64 * lambda / 2.0;
        let d2 = (n_ue - 1) as f64 * lambda / 2.0;
        let c = config(scenario, lambda_1mm(), d1, d2, theta, phi)?;
        let base = 0.01 + SpreadEvaluator::new(&c)?.min_separation_m();
        let seps: Vec<f64> = (0..8).map(|i| base * 3f64.powi(i)).collect();
        let r = validate_extremal_mode(&c, &seps)?;
        worst = worst.max(r.max_discrepancy_m);
        ok &= r.passed;
    }
    Ok((
        ok,
        format!("50 random configs x 8 separations, max discrepancy {worst:.2e} m"),
    ))
}

fn appendix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(APPENDIX_SEED);
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let d1 = rng.gen_range(0.01..0.3);
        let d2 = rng.gen_range(0.005..0.1);
        let theta = rng.gen_range(-FRAC_PI_2..=FRAC_PI_2);
        let phi = rng.gen_range(-FRAC_PI_2..=FRAC_PI_2);
        let input = FormulaInput::new(d1, d2, 1e-3, theta, phi)?;
        let d = 5.0 * (d1 + d2) * rng.gen_range(0.0f64..100f64.ln()).exp();
        let ue = (rng.gen_range(-d2 / 2.0..=d2 / 2.0), rng.gen_range(-d2 / 2.0..=d2 / 2.0));
        let ap = (rng.gen_range(-d1 / 2.0..=d1 / 2.0), rng.gen_range(-d1 / 2.0..=d1 / 2.0));
        let e = appendix_error(&input, d, ue, ap)?;
        worst = worst.max(e.f_value_m / e.bound_m);
        violations += usize::from(!e.within_bound());
    }
    let input = FormulaInput::new(0.1, 0.05, 1e-3, 0.3, 0.2)?;
    let scaling = (1..=20).all(|k| {
        let d = 0.75 * k as f64;
        appendix_bound(&input, 2.0 * d) / appendix_bound(&input, d) == 0.25
    });
    Ok((
        violations == 0 && scaling,
        format!("10000 draws, {violations} violations, max f/bound {worst:.4}, quarter scaling {scaling}"),
    ))
}

fn symmetry() -> Outcome {
    let f = lambda_1mm();
    let mut worst: f64 = 0.0;
    for k in 0..9 {
        let a = k as f64 * FRAC_PI_2 / 8.0;
        let pairs = [
            (
                config(Scenario::UlaUla, f, 0.1, 0.05, a, 0.0)?,
                config(Scenario::UlaUla, f, 0.1, 0.05, -a, 0.0)?,
            ),
            (
                config(Scenario::UpaUpa, f, 0.1, 0.05, a, 0.0)?,
                config(Scenario::UpaUpa, f, 0.1, 0.05, -a, 0.0)?,
            ),
            (
                config(Scenario::UpaUpa, f, 0.1, 0.05, FRAC_PI_6, a)?,
                config(Scenario::UpaUpa, f, 0.1, 0.05, FRAC_PI_6, -a)?,
            ),
        ];
        for (p, m) in pairs {
            worst = worst.max(rel(
                simulate(&p, SearchMode::Extremal)?,
                simulate(&m, SearchMode::Extremal)?,
            ));
        }
    }
    Ok((
        worst <= SOLVER_REL_TOL,
        format!("9 angles x 3 families, worst rel diff {worst:.2e}"),
    ))
}

fn performance() -> Outcome {
    let c = config(
        Scenario::UpaUpa,
        FrequencyConfig::from_frequency(300e9)?,
        0.1,
        0.05,
        0.0,
        0.0,
    )?;
    let start = Instant::now();
    let r = solve_near_field_distance(&c, SOLVER_REL_TOL, SearchMode::Extremal)?;
    let solve_time = start.elapsed();
    let eval = SpreadEvaluator::new(&c)?;
    let start = Instant::now();
    let full = eval.spread(r.d_f_m, SearchMode::Full)?;
    let full_time = start.elapsed();
    let ext = eval.spread(r.d_f_m, SearchMode::Extremal)?;
    let ok = c.ap.element_count() >= 40_000
        && c.ue.element_count() >= 10_000
        && solve_time < Duration::from_secs(5)
        && full_time < Duration::from_secs(120)
        && (full.spread_m - ext.spread_m).abs() <= 1e-12;
    Ok((
        ok,
        format!(
            "{} pairs; extremal solve {solve_time:.2?}, full spread {full_time:.2?}",
            c.pair_count()
        ),
    ))
}

/// Runs every check. A check that errors counts as failed.
pub fn run(perturb: f64) -> Vec<Check> {
    let cf = ClosedForms { perturb };
    let checks: [(u32, &'static str, CheckFn); 9] = [
        (1, "aligned baselines", Box::new(move || aligned_baselines(cf))),
        (2, "misalignment reductions", Box::new(move || reductions(cf))),
        (3, "device preset variations", Box::new(move || preset_variations(cf))),
        (4, "reduction identities", Box::new(move || identities(cf))),
        (5, "desk-scale simulator agreement", Box::new(move || desk_scale(cf))),
        (6, "extremal equals full search", Box::new(extremal_vs_full)),
        (7, "appendix error bound", Box::new(appendix)),
        (8, "rotation symmetry", Box::new(symmetry)),
        (9, "full-scale performance", Box::new(performance)),
    ];
    checks
        .into_iter()
        .map(|(id, name, check)| {
            let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
            Check {
                id,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

pub fn render(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict}  #{}  {:<32} {}", c.id, c.name, c.detail);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", checks.len());
    out
}

pub fn ensure_all_passed(checks: &[Check]) -> Result<(), CliError> {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("#{}", c.id))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("validation failed: {}", failed.join(", "))))
    }
}
