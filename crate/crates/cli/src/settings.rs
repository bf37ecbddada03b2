//! Scenario flags, `key=value` config files, and their resolution into a
//! [`ScenarioConfig`].
//!
//! Config files use the long flag names as keys (`d1=0.1`, `rel-tol=1e-4`),
//! one per line; `#` starts a comment. Flags given on the command line win
//! over file values.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nearfield::{FrequencyConfig, RotationAngles, Scenario, ScenarioConfig, SearchMode};

use crate::error::CliError;

pub const DEFAULT_FREQUENCY_HZ: f64 = 300e9;
pub const DEFAULT_D1_M: f64 = 0.1;
pub const DEFAULT_D2_M: f64 = 0.05;
pub const DEFAULT_REL_TOL: f64 = nearfield::simulator::DEFAULT_REL_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Ula,
    Upa,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::Ula => Scenario::UlaUla,
            ScenarioArg::Upa => Scenario::UpaUpa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sim,
    Exact,
    Approx,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Extremal,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> SearchMode {
        match m {
            ModeArg::Full => SearchMode::Full,
            ModeArg::Extremal => SearchMode::Extremal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevicePreset {
    pub name: &'static str,
    pub aperture_m: f64,
}

pub const CELLULAR: DevicePreset = DevicePreset {
    name: "cellular",
    aperture_m: 0.20,
};
pub const WIFI: DevicePreset = DevicePreset {
    name: "wifi",
    aperture_m: 0.10,
};
pub const TABLET: DevicePreset = DevicePreset {
    name: "tablet",
    aperture_m: 0.05,
};
pub const SMARTPHONE: DevicePreset = DevicePreset {
    name: "smartphone",
    aperture_m: 0.015,
};
pub const VR_GLASSES: DevicePreset = DevicePreset {
    name: "vr",
    aperture_m: 0.008,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApPreset {
    Cellular,
    Wifi,
}

impl ApPreset {
    pub fn preset(self) -> DevicePreset {
        match self {
            ApPreset::Cellular => CELLULAR,
            ApPreset::Wifi => WIFI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UePreset {
    Tablet,
    Smartphone,
    Vr,
}

impl UePreset {
    pub fn preset(self) -> DevicePreset {
        match self {
            UePreset::Tablet => TABLET,
            UePreset::Smartphone => SMARTPHONE,
            UePreset::Vr => VR_GLASSES,
        }
    }
}

/// Scenario flags shared by every computing subcommand. Every field is
/// optional so that file values can fill the gaps.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Settings {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// AP aperture in metres.
    #[arg(long, conflicts_with = "preset_ap")]
    pub d1: Option<f64>,
    /// UE aperture in metres.
    #[arg(long, conflicts_with = "preset_ue")]
    pub d2: Option<f64>,
    /// Carrier frequency in Hz (default 300 GHz).
    #[arg(long, conflicts_with = "wavelength")]
    pub freq: Option<f64>,
    /// Wavelength in metres.
    #[arg(long)]
    pub wavelength: Option<f64>,
    /// UE rotation about x, in radians (degrees with --degrees).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// UE rotation about z, in radians (degrees with --degrees).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Read angle flags in degrees.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub degrees: Option<bool>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "preset-ap", value_enum)]
    pub preset_ap: Option<ApPreset>,
    #[arg(long = "preset-ue", value_enum)]
    pub preset_ue: Option<UePreset>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{value}`")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| CliError::Usage(format!("config key `{key}`: unknown value `{value}`")))
}

impl Settings {
    pub fn from_config_text(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key=value",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
            match key {
                "scenario" => s.scenario = Some(parse_enum(key, value)?),
                "d1" => s.d1 = Some(parse_value(key, value)?),
                "d2" => s.d2 = Some(parse_value(key, value)?),
                "freq" => s.freq = Some(parse_value(key, value)?),
                "wavelength" => s.wavelength = Some(parse_value(key, value)?),
                "theta" => s.theta = Some(parse_value(key, value)?),
                "phi" => s.phi = Some(parse_value(key, value)?),
                "degrees" => s.degrees = Some(parse_value(key, value)?),
                "method" => s.method = Some(parse_enum(key, value)?),
                "mode" => s.mode = Some(parse_enum(key, value)?),
                "rel-tol" => s.rel_tol = Some(parse_value(key, value)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "preset-ap" => s.preset_ap = Some(parse_enum(key, value)?),
                "preset-ue" => s.preset_ue = Some(parse_enum(key, value)?),
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    /// `self` (file values) overridden by `flags`. A flag also displaces the
    /// file's alternative spelling of the same quantity, e.g. `--d1` beats a
    /// file `preset-ap`.
    pub fn overridden_by(&self, flags: &Settings) -> Settings {
        let mut base = self.clone();
        if flags.d1.is_some() || flags.preset_ap.is_some() {
            base.d1 = None;
            base.preset_ap = None;
        }
        if flags.d2.is_some() || flags.preset_ue.is_some() {
            base.d2 = None;
            base.preset_ue = None;
        }
        if flags.freq.is_some() || flags.wavelength.is_some() {
            base.freq = None;
            base.wavelength = None;
        }
        Settings {
            scenario: flags.scenario.or(base.scenario),
            d1: flags.d1.or(base.d1),
            d2: flags.d2.or(base.d2),
            freq: flags.freq.or(base.freq),
            wavelength: flags.wavelength.or(base.wavelength),
            theta: flags.theta.or(base.theta),
            phi: flags.phi.or(base.phi),
            degrees: flags.degrees.or(base.degrees),
            method: flags.method.or(base.method),
            mode: flags.mode.or(base.mode),
            rel_tol: flags.rel_tol.or(base.rel_tol),
            out: flags.out.clone().or(base.out),
            preset_ap: flags.preset_ap.or(base.preset_ap),
            preset_ue: flags.preset_ue.or(base.preset_ue),
        }
    }

    pub fn degrees(&self) -> bool {
        self.degrees.unwrap_or(false)
    }

    /// Converts a user-facing angle to radians.
    pub fn angle_rad(&self, value: f64) -> f64 {
        if self.degrees() {
            value * PI / 180.0
        } else {
            value
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        if self.d1.is_some() && self.preset_ap.is_some() {
            return Err(CliError::Usage("give either d1 or preset-ap, not both".into()));
        }
        if self.d2.is_some() && self.preset_ue.is_some() {
            return Err(CliError::Usage("give either d2 or preset-ue, not both".into()));
        }
        let scenario: Scenario = self.scenario.unwrap_or(ScenarioArg::Upa).into();
        let d1 = self
            .preset_ap
            .map(|p| p.preset().aperture_m)
            .or(self.d1)
            .unwrap_or(DEFAULT_D1_M);
        let d2 = self
            .preset_ue
            .map(|p| p.preset().aperture_m)
            .or(self.d2)
            .unwrap_or(DEFAULT_D2_M);
        let frequency = match (self.freq, self.wavelength) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give either freq or wavelength, not both".into())),
            (_, Some(w)) => FrequencySource::Wavelength(w),
            (f, None) => FrequencySource::Frequency(f.unwrap_or(DEFAULT_FREQUENCY_HZ)),
        };
        let theta_rad = self.angle_rad(self.theta.unwrap_or(0.0));
        let phi_rad = self.angle_rad(self.phi.unwrap_or(0.0));
        // Anything the library rejects here came straight from the user.
        let usage = |e: nearfield::Error| CliError::Usage(e.to_string());
        let angles = RotationAngles::new(theta_rad, phi_rad).map_err(usage)?;
        let frequency_config = frequency.config().map_err(usage)?;
        let config = ScenarioConfig::from_apertures(scenario, frequency_config, d1, d2, angles).map_err(usage)?;
        let rel_tol = self.rel_tol.unwrap_or(DEFAULT_REL_TOL);
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(CliError::Usage(format!("rel-tol must lie in (0, 1), got {rel_tol}")));
        }
        Ok(Resolved {
            config,
            d1_m: d1,
            d2_m: d2,
            frequency,
            method: self.method.unwrap_or(MethodArg::All),
            mode: self.mode.unwrap_or(ModeArg::Extremal),
            rel_tol,
            out: self.out.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencySource {
    Frequency(f64),
    Wavelength(f64),
}

impl FrequencySource {
    pub fn config(self) -> nearfield::Result<FrequencyConfig> {
        match self {
            FrequencySource::Frequency(f) => FrequencyConfig::from_frequency(f),
            FrequencySource::Wavelength(w) => FrequencyConfig::from_wavelength(w),
        }
    }
}

/// Settings with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: ScenarioConfig,
    /// Requested apertures, before snapping to the element grid.
    pub d1_m: f64,
    pub d2_m: f64,
    pub frequency: FrequencySource,
    pub method: MethodArg,
    pub mode: ModeArg,
    pub rel_tol: f64,
    pub out: Option<PathBuf>,
}

impl Resolved {
    /// Config-file text that reproduces this scenario. Angles are written
    /// in radians with round-trip precision.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let scenario = match self.config.scenario {
            Scenario::UlaUla => "ula",
            Scenario::UpaUpa => "upa",
        };
        let _ = writeln!(out, "scenario={scenario}");
        let _ = writeln!(out, "d1={}", self.d1_m);
        let _ = writeln!(out, "d2={}", self.d2_m);
        match self.frequency {
            FrequencySource::Frequency(f) => {
                let _ = writeln!(out, "freq={f}");
            }
            FrequencySource::Wavelength(w) => {
                let _ = writeln!(out, "wavelength={w}");
            }
        }
        let _ = writeln!(out, "theta={}", self.config.angles.theta_rad());
        let _ = writeln!(out, "phi={}", self.config.angles.phi_rad());
        let _ = writeln!(out, "method={}", self.method.to_possible_value().unwrap().get_name());
        let _ = writeln!(out, "mode={}", self.mode.to_possible_value().unwrap().get_name());
        let _ = writeln!(out, "rel-tol={}", self.rel_tol);
        out
    }

    pub fn methods(&self) -> Vec<nearfield::Method> {
        use nearfield::Method::*;
        match self.method {
            MethodArg::Sim => vec![Simulated],
            MethodArg::Exact => vec![ClosedFormExact],
            MethodArg::Approx => vec![ClosedFormApprox],
            MethodArg::All => vec![Simulated, ClosedFormExact, ClosedFormApprox],
        }
    }
}
