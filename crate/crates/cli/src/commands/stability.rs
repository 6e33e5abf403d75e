use rnd_core::features::{calibrate_omega1, CalibrationOptions, FeatureSet};
use rnd_core::stability::{budget_row, landscapes, Landscapes, StabilityRow, StabilitySettings};
use rnd_core::units;
use serde::Serialize;

use super::{calibration_options, radial_grid, series_profile, Context};
use crate::config::{RunConfig, StabilityConfig};
use crate::error::CliError;
use crate::output::{num, opt, Table};
use crate::plot;

fn settings(cfg: &StabilityConfig, seed: u64) -> Result<StabilitySettings, CliError> {
    if cfg.trials < 2 {
        return Err(CliError::config("stability.trials", "need at least 2 trials for an error estimate"));
    }
    if cfg.n_single < 2 || cfg.n_molecule < 4 {
        return Err(CliError::config("stability.n_single", "clouds need at least 2 atoms each"));
    }
    Ok(StabilitySettings {
        sigma_fraction: cfg.sigma_fraction,
        n_single: cfg.n_single,
        n_molecule: cfg.n_molecule,
        trials: cfg.trials,
        seed,
        sigma_scan: cfg.sigma_scan,
        distance_scan: cfg.distance_scan,
        n_cap: cfg.n_cap,
        include_contact: cfg.include_contact,
        ..StabilitySettings::default()
    })
}

#[derive(Serialize)]
struct WindowRow {
    gamma_hz: f64,
    omega1_mhz: f64,
    u_c_khz: f64,
    u_well_khz: Option<f64>,
    r_ic: f64,
    d_min: Option<f64>,
    #[serde(flatten)]
    row: StabilityRow,
}

#[derive(Serialize)]
struct Report<'a> {
    label: &'a str,
    settings: &'a StabilitySettings,
    /// Features of the kernel at the configured Ω₁.
    features: &'a FeatureSet<f64>,
    rows: &'a [WindowRow],
}

fn window_row(land: &Landscapes<f64>, gamma: f64, hm: f64, s: &StabilitySettings) -> WindowRow {
    WindowRow {
        gamma_hz: units::to_per_second(gamma),
        omega1_mhz: units::to_mhz(land.omega1),
        u_c_khz: units::to_khz(land.features.u_c),
        u_well_khz: land.features.u_well.map(units::to_khz),
        r_ic: land.r_ic,
        d_min: land.well.map(|w| w.d_min),
        row: budget_row(land, gamma, hm, s),
    }
}

fn write_landscapes(ctx: &mut Context, label: &str, land: &Landscapes<f64>) -> Result<(), CliError> {
    let headers = ["x", "kinetic", "contact", "dress", "dress_stderr", "total"];
    let mut single = Table::new(&headers);
    for r in &land.single {
        single.push_nums(&[r.x, r.kinetic, r.contact, r.dress, r.dress_stderr, r.total]);
    }
    ctx.out.write_csv(&format!("single_{label}.csv"), &single)?;
    let mut mol = Table::new(&[&headers[..], &["binding"]].concat());
    for r in &land.molecule.rows {
        mol.push_nums(&[r.x, r.kinetic, r.contact, r.dress, r.dress_stderr, r.total, r.total - land.molecule.asymptote]);
    }
    ctx.out.write_csv(&format!("molecule_{label}.csv"), &mol)
}

pub(super) fn stability(ctx: &mut Context) -> Result<(), CliError> {
    let config = ctx.config;
    let cfg = RunConfig::require(&config.stability, "stability")?;
    let s = settings(cfg, config.seed)?;
    let hm = units::SR88_HBAR_OVER_M;
    let series = config.series()?;
    let mut labels = Vec::new();
    let mut notes = Vec::new();
    for sc in &series {
        let profile = series_profile(config, sc, false)?;
        let land = landscapes(&profile, hm, &s)?;
        write_landscapes(ctx, &sc.label, &land)?;
        let gamma = cfg.gamma_hz.map(units::per_second).unwrap_or_else(|| profile.max_loss());
        let mut rows = vec![window_row(&land, gamma, hm, &s)];

        if !cfg.gammas_hz.is_empty() {
            let params = sc.dressing.to_params::<f64>()?;
            let mut opts = match &config.calibration {
                Some(cal) => calibration_options(cal, None, config.grid.points),
                None => CalibrationOptions::default().with_points(config.grid.points),
            };
            if config.grid.r_min.is_some() {
                opts.grid = Some(radial_grid(&config.grid, &params)?);
            }
            for &hz in &cfg.gammas_hz {
                let g = units::per_second(hz);
                let cal = calibrate_omega1(&params, g, &opts)?;
                let land = landscapes(&cal.profile, hm, &s)?;
                rows.push(window_row(&land, g, hm, &s));
            }
        }

        let mut table = Table::new(&[
            "gamma_hz", "omega1_mhz", "u_c_khz", "u_well_khz", "r_ic", "sigma", "d_min", "u_mol", "sigma_osc",
            "omega_mol", "t2", "n_min", "n_max", "n_max_atoms", "budget", "viable", "note",
        ]);
        for w in &rows {
            let r = &w.row;
            let finite = |v: f64| if v.is_finite() { num(v) } else { String::new() };
            table.push(vec![
                num(w.gamma_hz),
                num(w.omega1_mhz),
                num(w.u_c_khz),
                opt(w.u_well_khz),
                num(w.r_ic),
                num(r.sigma),
                opt(w.d_min),
                finite(r.u_mol),
                finite(r.sigma_osc),
                finite(r.omega_mol),
                finite(r.t2),
                r.n_min.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.n_max),
                r.n_max_atoms.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.budget()),
                r.viable.to_string(),
                r.note.clone(),
            ]);
        }
        ctx.out.write_csv(&format!("window_{}.csv", sc.label), &table)?;
        ctx.out.write_json(&format!("report_{}.json", sc.label), &Report { label: &sc.label, settings: &s, features: &land.features, rows: &rows })?;
        if let Some(w) = rows.first() {
            notes.push(format!(
                "{}: N_max {}",
                sc.label,
                w.row.n_max.map_or_else(|| "unbounded".to_string(), |n| format!("{n:.3}"))
            ));
        }
        labels.push(sc.label.clone());
    }
    ctx.out.write_text("plot_stability.gp", &plot::stability(&labels))?;
    ctx.summary = notes.join(", ");
    Ok(())
}
