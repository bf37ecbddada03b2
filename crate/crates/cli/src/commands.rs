//! `solve`, `spread`, `sweep` and `heatmap`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use nearfield::{Method, NearFieldResult, RotationAngles, Scenario, ScenarioConfig, SearchMode, SpreadEvaluator};
use rayon::prelude::*;

use crate::error::CliError;
use crate::settings::{MethodArg, Resolved};

/// Writes `text` to `out`, or stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("writing stdout", e)),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Simulated => "sim",
        Method::ClosedFormExact => "exact",
        Method::ClosedFormApprox => "approx",
    }
}

/// Only the one-angle rotations have an exact closed form for planar arrays.
fn exact_available(config: &ScenarioConfig) -> bool {
    config.scenario == Scenario::UlaUla || config.angles.phi_rad() == 0.0
}

/// `None` when the method has no value for this configuration.
fn evaluate(config: &ScenarioConfig, method: Method, r: &Resolved) -> Result<Option<NearFieldResult>, CliError> {
    match method {
        Method::Simulated => Ok(Some(nearfield::solve_near_field_distance(
            config,
            r.rel_tol,
            r.mode.into(),
        )?)),
        Method::ClosedFormExact if !exact_available(config) => Ok(None),
        _ => Ok(Some(nearfield::simulator::closed_form_result(config, method)?)),
    }
}

fn require_exact(r: &Resolved) -> Result<(), CliError> {
    if r.method == MethodArg::Exact && !exact_available(&r.config) {
        return Err(CliError::Usage(
            "no exact closed form exists for a two-angle planar rotation; use --method approx or sim".into(),
        ));
    }
    Ok(())
}

pub fn solve(r: &Resolved) -> Result<String, CliError> {
    require_exact(r)?;
    let c = &r.config;
    let mut out = String::new();
    let kind = match c.scenario {
        Scenario::UlaUla => "ULA-ULA",
        Scenario::UpaUpa => "UPA-UPA",
    };
    let _ = writeln!(out, "scenario    {kind}");
    let _ = writeln!(out, "wavelength  {:.9e} m", c.wavelength_m());
    for (name, spec) in [("AP", &c.ap), ("UE", &c.ue)] {
        let _ = writeln!(
            out,
            "{name} array    {:.9e} m effective ({} m requested, {} per axis)",
            spec.aperture_m(),
            spec.requested_aperture_m(),
            spec.elements_per_axis()
        );
    }
    let _ = writeln!(
        out,
        "theta, phi  {} rad, {} rad",
        c.angles.theta_rad(),
        c.angles.phi_rad()
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<8} {:>17} {:>10} {:>16}  mode",
        "method", "d_F [m]", "iters", "residual [m]"
    );

    let mut rows = Vec::new();
    for m in r.methods() {
        match evaluate(c, m, r)? {
            Some(res) => {
                let mode = match res.search_mode {
                    Some(SearchMode::Full) => "full",
                    Some(SearchMode::Extremal) => "extremal",
                    None => "-",
                };
                let _ = writeln!(
                    out,
                    "{:<8} {:>17.9e} {:>10} {:>16.3e}  {mode}",
                    method_name(m),
                    res.d_f_m,
                    res.iterations,
                    res.residual_m
                );
                rows.push((m, res.d_f_m));
            }
            None => {
                let _ = writeln!(
                    out,
                    "{:<8} {:>17} (no exact form for two-angle rotations)",
                    method_name(m),
                    "n/a"
                );
            }
        }
    }
    if rows.len() > 1 {
        let _ = writeln!(out);
        let _ = writeln!(out, "relative differences");
        for (i, &(a, va)) in rows.iter().enumerate() {
            for &(b, vb) in &rows[i + 1..] {
                let _ = writeln!(
                    out,
                    "  {} vs {}  {:+.3e}",
                    method_name(a),
                    method_name(b),
                    (va - vb) / vb
                );
            }
        }
    }
    Ok(out)
}

pub fn spread(r: &Resolved, separation_m: f64) -> Result<String, CliError> {
    let s = nearfield::max_phase_spread(&r.config, separation_m, r.mode.into())?;
    let mut out = String::new();
    let _ = writeln!(out, "separation_m       {:.9e}", s.separation_m);
    let _ = writeln!(out, "max_effective_m    {:.9e}", s.max_effective_m);
    let _ = writeln!(out, "min_effective_m    {:.9e}", s.min_effective_m);
    let _ = writeln!(out, "spread_m           {:.9e}", s.spread_m);
    let _ = writeln!(out, "phase_spread_rad   {:.9e}", s.phase_spread_rad);
    let _ = writeln!(out, "phase / (pi/8)     {:.6}", s.phase_spread_rad / FRAC_PI_8);
    let _ = writeln!(out, "argmax (ap, ue)    {:?}", s.argmax_pair);
    let _ = writeln!(out, "argmin (ap, ue)    {:?}", s.argmin_pair);
    let _ = writeln!(out, "mode               {:?}", s.search_mode);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Phase spread against separation.
    SpreadVsD,
    /// Near-field distance against UE aperture.
    DfVsD2,
    /// Near-field distance against theta.
    DfVsTheta,
}

/// `count` evenly spaced points; the last one is exactly `stop`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

pub fn csv_number(v: f64) -> String {
    format!("{v:.8e}")
}

fn csv(header: &[String], rows: Vec<Vec<Option<f64>>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|v| v.map(csv_number).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn df_columns(r: &Resolved) -> Vec<String> {
    r.methods()
        .into_iter()
        .map(|m| format!("df_{}_m", method_name(m)))
        .collect()
}

fn df_cells(config: &ScenarioConfig, r: &Resolved) -> Result<Vec<Option<f64>>, CliError> {
    r.methods()
        .into_iter()
        .map(|m| Ok(evaluate(config, m, r)?.map(|res| res.d_f_m)))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRange {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

fn checked_range(start: f64, stop: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count < 2 {
        return Err(CliError::Usage(format!("--count must be at least 2, got {count}")));
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(CliError::Usage(format!("need start < stop, got {start} and {stop}")));
    }
    Ok(linspace(start, stop, count))
}

/// Closed-form phase spread at separation `d` implied by a closed-form
/// near-field distance. The exact variant accounts for the UE's steering
/// offset `s`, which shifts the effective plane towards the AP.
fn closed_phase_spread(config: &ScenarioConfig, method: Method, d: f64) -> Result<Option<f64>, CliError> {
    if method == Method::ClosedFormExact && !exact_available(config) {
        return Ok(None);
    }
    let d_f = config.closed_form(method)?;
    Ok(Some(match method {
        Method::ClosedFormExact => {
            let s = config.ue.aperture_m() / 2.0 * config.angles.theta_rad().sin().abs();
            FRAC_PI_8 * (d_f - s) / (d - s)
        }
        _ => FRAC_PI_8 * d_f / d,
    }))
}

pub fn sweep(r: &Resolved, kind: SweepKind, range: SweepRange, degrees: bool) -> Result<String, CliError> {
    require_exact(r)?;
    let c = &r.config;
    match kind {
        SweepKind::SpreadVsD => {
            let d_f = c.closed_form(Method::ClosedFormApprox)?;
            let d = checked_range(
                range.start.unwrap_or(d_f / 5.0),
                range.stop.unwrap_or(2.0 * d_f),
                range.count.unwrap_or(100),
            )?;
            let eval = SpreadEvaluator::new(c)?;
            let mode: SearchMode = r.mode.into();
            let mut header = vec!["separation_m".to_string()];
            header.extend(r.methods().into_iter().map(|m| format!("dphi_{}_rad", method_name(m))));
            let rows = d
                .par_iter()
                .map(|&d| {
                    let mut row = vec![Some(d)];
                    for m in r.methods() {
                        row.push(match m {
                            Method::Simulated => Some(eval.spread(d, mode)?.phase_spread_rad),
                            _ => closed_phase_spread(c, m, d)?,
                        });
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(csv(&header, rows))
        }
        SweepKind::DfVsD2 => {
            let d2 = checked_range(
                range.start.unwrap_or(0.005),
                range.stop.unwrap_or(0.05),
                range.count.unwrap_or(10),
            )?;
            let mut header = vec!["d2_m".to_string(), "d2_effective_m".to_string()];
            header.extend(df_columns(r));
            let rows = d2
                .par_iter()
                .map(|&d2| {
                    let config = ScenarioConfig::from_apertures(
                        c.scenario,
                        c.frequency,
                        c.ap.requested_aperture_m(),
                        d2,
                        c.angles,
                    )?;
                    let mut row = vec![Some(d2), Some(config.ue.aperture_m())];
                    row.extend(df_cells(&config, r)?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(csv(&header, rows))
        }
        SweepKind::DfVsTheta => {
            let to_rad = |v: f64| if degrees { v.to_radians() } else { v };
            let theta = checked_range(
                range.start.map(to_rad).unwrap_or(-FRAC_PI_2),
                range.stop.map(to_rad).unwrap_or(FRAC_PI_2),
                range.count.unwrap_or(181),
            )?;
            let mut header = vec!["theta_rad".to_string()];
            header.extend(df_columns(r));
            let rows = theta
                .par_iter()
                .map(|&t| {
                    let config = c.with_angles(RotationAngles::new(t, c.angles.phi_rad())?)?;
                    let mut row = vec![Some(config.angles.theta_rad())];
                    row.extend(df_cells(&config, r)?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(csv(&header, rows))
        }
    }
}

/// Near-field distance over a `count x count` grid of `(theta, phi)` in
/// `[-π/2, π/2]^2`, theta-major.
pub fn heatmap(r: &Resolved, count: usize) -> Result<String, CliError> {
    if r.config.scenario != Scenario::UpaUpa {
        return Err(CliError::Usage(
            "heatmap needs the planar scenario (--scenario upa)".into(),
        ));
    }
    if r.method == MethodArg::Exact {
        return Err(CliError::Usage(
            "the exact closed form only covers phi = 0; use sim, approx or all".into(),
        ));
    }
    let axis = checked_range(-FRAC_PI_2, FRAC_PI_2, count)?;
    let cells: Vec<(f64, f64)> = axis.iter().flat_map(|&t| axis.iter().map(move |&p| (t, p))).collect();
    let mut header = vec!["theta_rad".to_string(), "phi_rad".to_string()];
    header.extend(df_columns(r));
    let rows = cells
        .par_iter()
        .map(|&(t, p)| {
            let config = r.config.with_angles(RotationAngles::new(t, p)?)?;
            let mut row = vec![Some(t), Some(p)];
            row.extend(df_cells(&config, r)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(csv(&header, rows))
}
