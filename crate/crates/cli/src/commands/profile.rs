use rnd_core::features::{analytic_radii, extract_features, sweep as run_sweep, FeatureSet, SweepOptions};
use rnd_core::units;
use serde::Serialize;

use super::{calibration_options, radial_grid, series_profile, Context};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, opt, Table};
use crate::plot;

#[derive(Serialize)]
struct FeatureReport<'a> {
    label: &'a str,
    omega1_mhz: f64,
    gamma_max_hz: f64,
    u_c_over_gamma: f64,
    features: FeatureSet<f64>,
    analytic: rnd_core::features::AnalyticRadii<f64>,
}

pub(super) fn profile(ctx: &mut Context) -> Result<(), CliError> {
    let series = ctx.config.series()?;
    let mut labels = Vec::new();
    for s in &series {
        let prof = series_profile(ctx.config, s, true)?;
        let features = extract_features(&prof)?;
        let mut table = Table::new(&["r_um", "u_rad_per_us", "u_khz", "loss_per_us", "loss_hz"]);
        for ((&r, &u), &l) in prof.r.iter().zip(&prof.u).zip(&prof.loss) {
            table.push_nums(&[r, u, units::to_khz(u), l, units::to_per_second(l)]);
        }
        ctx.out.write_csv(&format!("profile_{}.csv", s.label), &table)?;
        let gamma_max = prof.max_loss();
        ctx.out.write_json(
            &format!("features_{}.json", s.label),
            &FeatureReport {
                label: &s.label,
                omega1_mhz: units::to_mhz(prof.params.omega1),
                gamma_max_hz: units::to_per_second(gamma_max),
                u_c_over_gamma: features.u_c / gamma_max,
                analytic: analytic_radii(&prof.params),
                features,
            },
        )?;
        labels.push(s.label.clone());
    }
    ctx.out.write_text("plot_profile.gp", &plot::profile(&labels))?;
    ctx.summary = format!("{} profile(s)", labels.len());
    Ok(())
}

fn sweep_options(config: &RunConfig) -> SweepOptions<f64> {
    let mut opts = SweepOptions::default();
    if let Some(cal) = &config.calibration {
        opts.gamma_target = Some(units::per_second(cal.gamma_hz));
        opts.calibration = calibration_options(cal, None, config.grid.points);
    }
    opts.calibration.grid_points = config.grid.points;
    opts
}

pub(super) fn sweep(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = RunConfig::require(&ctx.config.sweep, "sweep")?;
    let values = sweep.resolve()?;
    let series = ctx.config.series()?;
    let mut labels = Vec::new();
    let mut failed = 0;
    for s in &series {
        let template = s.dressing.to_params::<f64>()?;
        let mut opts = sweep_options(ctx.config);
        if ctx.config.grid.r_min.is_some() {
            opts.calibration.grid = Some(radial_grid(&ctx.config.grid, &template)?);
        }
        let mut table = Table::new(&[
            sweep.axis.name(),
            "omega1_mhz",
            "gamma_max_hz",
            "u_c_khz",
            "r_c",
            "u_ip_khz",
            "r_ip",
            "u_op_khz",
            "r_op",
            "u_well_khz",
            "r_well",
            "r_ic",
            "r_oc",
            "u_c_over_gamma",
            "error",
        ]);
        for row in run_sweep(&template, sweep.axis, &values, &opts) {
            let khz = |v: Option<f64>| opt(v.map(units::to_khz));
            match row.outcome {
                Ok(p) => {
                    let f = &p.features;
                    table.push(vec![
                        num(row.value),
                        num(units::to_mhz(p.params.omega1)),
                        num(units::to_per_second(p.gamma_max)),
                        num(units::to_khz(f.u_c)),
                        opt(f.r_c),
                        khz(f.u_ip),
                        opt(f.r_ip),
                        khz(f.u_op),
                        opt(f.r_op),
                        khz(f.u_well),
                        opt(f.r_well),
                        opt(f.r_ic),
                        opt(f.r_oc),
                        num(f.u_c / p.gamma_max),
                        String::new(),
                    ]);
                }
                Err(e) => {
                    failed += 1;
                    let mut cells = vec![num(row.value)];
                    cells.extend(std::iter::repeat_n(String::new(), 13));
                    cells.push(e.to_string());
                    table.push(cells);
                }
            }
        }
        ctx.out.write_csv(&format!("sweep_{}.csv", s.label), &table)?;
        labels.push(s.label.clone());
    }
    ctx.out.write_text("plot_sweep.gp", &plot::sweep(&labels, sweep.axis.name(), sweep.log))?;
    ctx.summary = format!("{} series x {} points, {failed} failed", labels.len(), values.len());
    Ok(())
}
