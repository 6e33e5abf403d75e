//! Subcommand implementations.

mod field;
mod profile;
mod stability;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rnd_core::features::{calibrate_omega1, feature_grid, CalibrationOptions};
use rnd_core::model::DressingParams;
use rnd_core::steady::{interaction_profile, linear_grid, log_grid, InteractionProfile};
use rnd_core::units;

use crate::config::{CalibrationConfig, RadialGridConfig, RunConfig, SeriesConfig, Spacing};
use crate::error::CliError;
use crate::output::{OutputDir, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Profile,
    Sweep,
    GpeEvolve,
    GpeGround,
    Bogoliubov,
    Stability,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Profile,
        Command::Sweep,
        Command::GpeEvolve,
        Command::GpeGround,
        Command::Bogoliubov,
        Command::Stability,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Sweep => "sweep",
            Command::GpeEvolve => "gpe-evolve",
            Command::GpeGround => "gpe-ground",
            Command::Bogoliubov => "bogoliubov",
            Command::Stability => "stability",
        }
    }
}

/// Options that do not belong in the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
    /// Continue from the checkpoint in the output directory.
    pub resume: bool,
    /// Stop after the first checkpoint at or beyond this step.
    pub halt_after: Option<usize>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: RunManifest,
    /// The run stopped at a checkpoint before completion.
    pub halted: bool,
    /// One-line human summary.
    pub summary: String,
}

pub(crate) struct Context<'a> {
    pub config: &'a RunConfig,
    pub options: &'a RunOptions,
    pub out: OutputDir,
    pub seeds: Vec<u64>,
    pub halted: bool,
    pub summary: String,
}

/// Runs `command` on `config`, writing into `out_dir`.
pub fn run(command: Command, config: &RunConfig, out_dir: &Path, options: &RunOptions) -> Result<Outcome, CliError> {
    if let Some(name) = &config.command {
        if name != command.name() {
            return Err(CliError::config("command", format!("file is for `{name}`, not `{}`", command.name())));
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    let threads = pool.current_num_threads();
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut ctx = Context {
        config,
        options,
        out: OutputDir::create(out_dir)?,
        seeds: vec![config.seed],
        halted: false,
        summary: String::new(),
    };
    pool.install(|| match command {
        Command::Profile => profile::profile(&mut ctx),
        Command::Sweep => profile::sweep(&mut ctx),
        Command::GpeEvolve => field::evolve(&mut ctx),
        Command::GpeGround => field::ground(&mut ctx),
        Command::Bogoliubov => field::bogoliubov(&mut ctx),
        Command::Stability => stability::stability(&mut ctx),
    })?;
    let manifest = RunManifest {
        command: command.name().into(),
        config: serde_json::to_value(config)?,
        seeds: ctx.seeds.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        threads,
        started_unix: started,
        wall_seconds: clock.elapsed().as_secs_f64(),
        files: Vec::new(),
    };
    let manifest = ctx.out.finish(manifest)?;
    Ok(Outcome { manifest, halted: ctx.halted, summary: ctx.summary })
}

/// Radial sample points for `params`.
pub(crate) fn radial_grid(cfg: &RadialGridConfig, params: &DressingParams<f64>) -> Result<Vec<f64>, CliError> {
    if cfg.points < 2 {
        return Err(CliError::config("grid.points", "the radial grid needs at least 2 points"));
    }
    match (cfg.r_min, cfg.r_max) {
        (Some(a), Some(b)) => {
            if !(a > 0.0 && b > a) {
                return Err(CliError::config("grid", format!("empty radial range [{a}, {b}]")));
            }
            Ok(match cfg.spacing {
                Spacing::Log => log_grid(a, b, cfg.points),
                Spacing::Linear => linear_grid(a, b, cfg.points),
            })
        }
        (None, None) => Ok(feature_grid(params, cfg.points)),
        _ => Err(CliError::config("grid", "give both `r_min` and `r_max` or neither")),
    }
}

pub(crate) fn calibration_options(cal: &CalibrationConfig, grid: Option<Vec<f64>>, points: usize) -> CalibrationOptions<f64> {
    let mut opts = CalibrationOptions::default()
        .with_points(points)
        .with_range_mhz(cal.omega1_range_mhz[0], cal.omega1_range_mhz[1]);
    opts.tolerance = cal.tolerance;
    opts.grid = grid;
    opts
}

/// Steady-state profile of one series. With `calibrate`, a `calibration`
/// section replaces the configured Ω₁.
pub(crate) fn series_profile(
    config: &RunConfig,
    series: &SeriesConfig,
    calibrate: bool,
) -> Result<InteractionProfile<f64>, CliError> {
    let params: DressingParams<f64> = series.dressing.to_params()?;
    let explicit = config.grid.r_min.is_some() || config.grid.r_max.is_some();
    let profile = match config.calibration.as_ref().filter(|_| calibrate) {
        Some(cal) => {
            let grid = if explicit { Some(radial_grid(&config.grid, &params)?) } else { None };
            calibrate_omega1(&params, units::per_second(cal.gamma_hz), &calibration_options(cal, grid, config.grid.points))?.profile
        }
        None => interaction_profile(&params, &radial_grid(&config.grid, &params)?)?,
    };
    if let Some(f) = profile.failures.first() {
        return Err(CliError::Solver(f.error.clone()));
    }
    Ok(profile)
}
