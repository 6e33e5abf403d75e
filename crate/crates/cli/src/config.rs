//! Run configuration files.
//!
//! Every run is one TOML document whose sections mirror the core types.
//! Unknown keys are rejected so that a typo never silently falls back to a
//! default.

use std::path::Path;

use rnd_core::features::SweepAxis;
use rnd_core::gpe::{SolitonSpec, SyntheticKernel, TrapSpec};
use rnd_core::model::DressingConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand this file is written for; checked when present.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Single parameter set, labelled `main`.
    #[serde(default)]
    pub dressing: Option<DressingConfig>,
    /// Several labelled parameter sets.
    #[serde(default)]
    pub series: Vec<SeriesConfig>,
    #[serde(default)]
    pub grid: RadialGridConfig,
    #[serde(default)]
    pub calibration: Option<CalibrationConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub kernel: Option<KernelConfig>,
    #[serde(default)]
    pub gpe: Option<GpeConfig>,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub imaginary: Option<ImaginaryConfig>,
    #[serde(default)]
    pub bogoliubov: Option<BogoliubovConfig>,
    #[serde(default)]
    pub stability: Option<StabilityConfig>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub label: String,
    pub dressing: DressingConfig,
}

/// Radial sample grid for steady-state profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGridConfig {
    #[serde(default = "default_radial_points")]
    pub points: usize,
    /// Explicit bounds (μm); derived from the analytic radii when absent.
    #[serde(default)]
    pub r_min: Option<f64>,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for RadialGridConfig {
    fn default() -> Self {
        Self { points: default_radial_points(), r_min: None, r_max: None, spacing: Spacing::Log }
    }
}

fn default_radial_points() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Ω₁ calibration to a maximum loss rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    pub gamma_hz: f64,
    #[serde(default = "default_omega1_range")]
    pub omega1_range_mhz: [f64; 2],
    #[serde(default = "default_calibration_tolerance")]
    pub tolerance: f64,
}

fn default_omega1_range() -> [f64; 2] {
    [0.1, 2.0]
}

fn default_calibration_tolerance() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Explicit values; otherwise `points` values from `start` to `stop`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub log: bool,
}

impl SweepConfig {
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        if let Some(v) = &self.values {
            if v.is_empty() {
                return Err(CliError::config("sweep.values", "empty list"));
            }
            return Ok(v.clone());
        }
        let (Some(a), Some(b), Some(n)) = (self.start, self.stop, self.points) else {
            return Err(CliError::config("sweep", "give `values` or `start`, `stop` and `points`"));
        };
        if n < 2 {
            return Err(CliError::config("sweep.points", "need at least 2"));
        }
        if self.log && !(a > 0.0 && b > 0.0) {
            return Err(CliError::config("sweep.log", "log spacing needs positive bounds"));
        }
        Ok((0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    a * (b / a).powf(t)
                } else {
                    a + (b - a) * t
                }
            })
            .collect())
    }
}

/// Interaction kernel for the field solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    /// Steady-state profile of the `dressing` section.
    Profile,
    Synthetic { shape: SyntheticKernel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpeConfig {
    pub points: Vec<usize>,
    /// Box lengths (μm).
    pub extent: Vec<f64>,
    /// ħ/m (μm²/μs); ⁸⁸Sr when absent.
    #[serde(default)]
    pub hbar_over_m: Option<f64>,
    /// Contact coupling; derived from the scattering length and
    /// `transverse_length` when absent, zero when both are absent.
    #[serde(default)]
    pub g: Option<f64>,
    /// Harmonic length of the frozen transverse directions (μm).
    #[serde(default)]
    pub transverse_length: Option<f64>,
    /// Atom number, or mean density via `density`.
    #[serde(default)]
    pub n_atoms: Option<f64>,
    #[serde(default)]
    pub density: Option<f64>,
    /// Time step, or a fraction of the accuracy bound of the initial state.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub dt_fraction: Option<f64>,
    #[serde(default)]
    pub steps: usize,
    #[serde(default = "default_every")]
    pub observe_every: usize,
    /// Density and mean-field snapshots; zero disables them.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Steps between checkpoints; zero disables them.
    #[serde(default)]
    pub checkpoint_every: usize,
    #[serde(default = "default_trap")]
    pub trap: TrapSpec,
}

fn default_every() -> usize {
    100
}

fn default_trap() -> TrapSpec {
    TrapSpec::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Uniform state with multiplicative noise of relative size `noise`.
    Uniform {
        #[serde(default)]
        noise: f64,
    },
    Gaussian {
        centre: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        momentum: Option<Vec<f64>>,
    },
    TwoSoliton {
        x0: f64,
        right: SolitonSpec,
        left: SolitonSpec,
    },
    /// Uniform state times (1 + amplitude·cos(k·x)) at integer box mode `mode`.
    Modulated {
        amplitude: f64,
        mode: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImaginaryConfig {
    pub max_steps: usize,
    #[serde(default = "default_renormalize")]
    pub renormalize_every: usize,
    #[serde(default = "default_imaginary_tolerance")]
    pub tolerance: f64,
    /// Fraction of the structure-factor maximum a ring must exceed.
    #[serde(default = "default_ring_fraction")]
    pub ring_fraction: f64,
}

fn default_renormalize() -> usize {
    20
}

fn default_imaginary_tolerance() -> f64 {
    1e-9
}

fn default_ring_fraction() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BogoliubovConfig {
    /// Background density (μm^-dims).
    pub rho: f64,
    pub k_max: f64,
    #[serde(default = "default_k_points")]
    pub points: usize,
    /// Dimension of the radial transform; the grid's when absent.
    #[serde(default)]
    pub dims: Option<usize>,
}

fn default_k_points() -> usize {
    800
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default = "default_n_single")]
    pub n_single: usize,
    #[serde(default = "default_n_molecule")]
    pub n_molecule: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_sigma_fraction")]
    pub sigma_fraction: f64,
    /// HWHM scan [start, stop, points] in units of the inner core radius.
    #[serde(default = "default_sigma_scan")]
    pub sigma_scan: (f64, f64, usize),
    /// Separation scan [start, stop, points] in units of the outermost feature radius.
    #[serde(default = "default_distance_scan")]
    pub distance_scan: (f64, f64, usize),
    #[serde(default = "default_true")]
    pub include_contact: bool,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    /// Loss budgets for the window; each recalibrates Ω₁.
    #[serde(default)]
    pub gammas_hz: Vec<f64>,
    /// Loss budget for the row of the configured Ω₁; the profile's own
    /// maximum loss when absent.
    #[serde(default)]
    pub gamma_hz: Option<f64>,
}

fn default_n_single() -> usize {
    20
}
fn default_n_molecule() -> usize {
    40
}
fn default_trials() -> usize {
    100
}
fn default_sigma_fraction() -> f64 {
    0.2
}
fn default_sigma_scan() -> (f64, f64, usize) {
    (0.02, 3.0, 40)
}
fn default_distance_scan() -> (f64, f64, usize) {
    (0.0, 2.0, 81)
}
fn default_true() -> bool {
    true
}
fn default_n_cap() -> usize {
    1_000_000
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Labelled parameter sets, from `series` or the single `dressing`.
    pub fn series(&self) -> Result<Vec<SeriesConfig>, CliError> {
        match (&self.dressing, self.series.is_empty()) {
            (Some(_), false) => Err(CliError::config("series", "give either `dressing` or `series`, not both")),
            (Some(d), true) => Ok(vec![SeriesConfig { label: "main".into(), dressing: d.clone() }]),
            (None, false) => {
                let mut labels: Vec<&str> = self.series.iter().map(|s| s.label.as_str()).collect();
                labels.sort_unstable();
                if labels.windows(2).any(|w| w[0] == w[1]) {
                    return Err(CliError::config("series.label", "labels must be unique"));
                }
                if let Some(bad) = self.series.iter().find(|s| !s.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')) {
                    return Err(CliError::config("series.label", format!("`{}` is not a plain file-name token", bad.label)));
                }
                Ok(self.series.clone())
            }
            (None, true) => Err(CliError::config("dressing", "missing section")),
        }
    }

    pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section.as_ref().ok_or_else(|| CliError::config(name, "missing section"))
    }
}
