//! Condensate commands: real-time evolution, imaginary-time ground states and
//! Bogoliubov spectra.

use num_complex::Complex;
use rnd_core::bogoliubov::{k_grid, kernel_spectrum, sound_speed, RotonBand};
use rnd_core::gpe::{
    contact_coupling_2d, contact_coupling_3d, initial_two_soliton, kernel_from_profile, mean_field, structure_factor,
    ExternalPotential, Field, Gpe, GpeParams, Grid, ImaginaryOptions, Kernel, TrapSpec,
};
use rnd_core::units;
use serde::{Deserialize, Serialize};

use super::{series_profile, Context};
use crate::config::{GpeConfig, InitialConfig, KernelConfig, RunConfig};
use crate::error::CliError;
use crate::output::{num, sha256_hex, ArraySidecar, Table};
use crate::plot;

const CHECKPOINT: &str = "checkpoint.json";

/// Everything a condensate run needs, resolved from the config.
struct Setup {
    grid: Grid<f64>,
    params: GpeParams<f64>,
    n_atoms: f64,
    kernel: Option<Kernel<f64>>,
    external: Option<ExternalPotential<f64>>,
}

fn build_grid(cfg: &GpeConfig) -> Result<Grid<f64>, CliError> {
    if cfg.points.is_empty() || cfg.points.len() > 2 || cfg.points.len() != cfg.extent.len() {
        return Err(CliError::config("gpe.points", "give one or two axes, with one extent per axis"));
    }
    Ok(Grid::new(&cfg.points, &cfg.extent)?)
}

fn contact(cfg: &GpeConfig, dims: usize, hm: f64) -> f64 {
    if let Some(g) = cfg.g {
        return g;
    }
    let Some(l) = cfg.transverse_length else { return 0.0 };
    let g3 = contact_coupling_3d(hm, units::SR88_SCATTERING_LENGTH_UM);
    match dims {
        1 => g3 / (2.0 * std::f64::consts::PI * l * l),
        _ => contact_coupling_2d(g3, l),
    }
}

fn kernel(config: &RunConfig, grid: &Grid<f64>) -> Result<Option<Kernel<f64>>, CliError> {
    match &config.kernel {
        None => Ok(None),
        Some(KernelConfig::Synthetic { shape }) => Ok(Some(shape.kernel(grid)?)),
        Some(KernelConfig::Profile) => {
            let series = config.series()?;
            if series.len() != 1 {
                return Err(CliError::config("series", "a condensate run takes exactly one parameter set"));
            }
            let profile = series_profile(config, &series[0], true)?;
            Ok(Some(kernel_from_profile(&profile, grid)?))
        }
    }
}

fn setup(config: &RunConfig) -> Result<Setup, CliError> {
    let cfg = RunConfig::require(&config.gpe, "gpe")?;
    let grid = build_grid(cfg)?;
    let hm = cfg.hbar_over_m.unwrap_or(units::SR88_HBAR_OVER_M);
    let n_atoms = match (cfg.n_atoms, cfg.density) {
        (Some(n), None) => n,
        (None, Some(rho)) => rho * grid.volume(),
        _ => return Err(CliError::config("gpe.n_atoms", "give exactly one of `n_atoms` and `density`")),
    };
    if !(n_atoms > 0.0) {
        return Err(CliError::config("gpe.n_atoms", "the atom number must be positive"));
    }
    let params = GpeParams { hbar_over_m: hm, g: contact(cfg, grid.dims(), hm) };
    let external = match &cfg.trap {
        TrapSpec::None => None,
        spec => Some(ExternalPotential::new(spec.clone(), &grid, hm)?),
    };
    Ok(Setup { kernel: kernel(config, &grid)?, grid, params, n_atoms, external })
}

fn initial_field(config: &RunConfig, s: &Setup) -> Result<Field<f64>, CliError> {
    let grid = s.grid.clone();
    let field = match RunConfig::require(&config.initial, "initial")? {
        InitialConfig::Uniform { noise } => {
            let f = Field::uniform(grid, s.n_atoms);
            if *noise > 0.0 {
                f.with_noise(*noise, config.seed)
            } else {
                f
            }
        }
        InitialConfig::Gaussian { centre, sigma, momentum } => {
            if centre.len() != grid.dims() {
                return Err(CliError::config("initial.centre", "needs one coordinate per axis"));
            }
            let p = momentum.clone().unwrap_or_else(|| vec![0.0; grid.dims()]);
            Field::gaussian(grid, centre, *sigma, &p, s.n_atoms)?
        }
        InitialConfig::TwoSoliton { x0, right, left } => {
            initial_two_soliton(&grid, *right, *left, *x0, s.params.hbar_over_m, s.n_atoms)?
        }
        InitialConfig::Modulated { amplitude, mode } => {
            if mode.len() != grid.dims() {
                return Err(CliError::config("initial.mode", "needs one mode number per axis"));
            }
            if !(amplitude.abs() < 1.0) {
                return Err(CliError::config("initial.amplitude", "must lie in (-1, 1)"));
            }
            let phase: Vec<Vec<f64>> = (0..grid.dims())
                .map(|a| {
                    let k = 2.0 * std::f64::consts::PI * mode[a] as f64 / grid.extent()[a];
                    grid.coords(a).into_iter().map(|x| k * x).collect()
                })
                .collect();
            let n0 = grid.points()[0];
            let psi = (0..grid.len())
                .map(|i| {
                    let arg = phase[0][i % n0] + phase.get(1).map_or(0.0, |p| p[i / n0]);
                    Complex::new((1.0 + amplitude * arg.cos()).sqrt(), 0.0)
                })
                .collect();
            Field::new(grid, psi, s.n_atoms)?
        }
    };
    Ok(field)
}

fn time_step(cfg: &GpeConfig, gpe: &mut Gpe<f64>, field: &Field<f64>) -> Result<f64, CliError> {
    match (cfg.dt, cfg.dt_fraction) {
        (Some(dt), None) => Ok(dt),
        (None, Some(f)) if f > 0.0 && f < 1.0 => Ok(f * gpe.max_dt(field)),
        (None, Some(_)) => Err(CliError::config("gpe.dt_fraction", "must lie in (0, 1)")),
        _ => Err(CliError::config("gpe.dt", "give exactly one of `dt` and `dt_fraction`")),
    }
}

fn config_digest(config: &RunConfig) -> Result<String, CliError> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}

/// Density maxima above a tenth of the global maximum, periodic neighbours.
fn count_peaks(grid: &Grid<f64>, rho: &[f64]) -> usize {
    let max = rho.iter().copied().fold(0.0, f64::max);
    let n0 = grid.points()[0];
    let n1 = grid.points().get(1).copied().unwrap_or(1);
    let at = |i: isize, j: isize| rho[(j.rem_euclid(n1 as isize) as usize) * n0 + i.rem_euclid(n0 as isize) as usize];
    let mut peaks = 0;
    for j in 0..n1 as isize {
        for i in 0..n0 as isize {
            let v = at(i, j);
            if v <= 0.1 * max {
                continue;
            }
            let mut neighbours = vec![at(i - 1, j), at(i + 1, j)];
            if n1 > 1 {
                neighbours.extend([at(i, j - 1), at(i, j + 1)]);
            }
            // Ties count once: strictly above earlier neighbours, at least later ones.
            if v > neighbours[0] && v >= neighbours[1] && (n1 == 1 || (v > neighbours[2] && v >= neighbours[3])) {
                peaks += 1;
            }
        }
    }
    peaks
}

fn sidecar(name: &str, grid: &Grid<f64>, labels: Vec<f64>, label_axis: &str) -> ArraySidecar {
    let mut shape = vec![labels.len()];
    let mut axes = vec![label_axis.to_string()];
    if grid.dims() == 2 {
        shape.push(grid.points()[1]);
        axes.push("y".into());
    }
    shape.push(grid.points()[0]);
    axes.push("x".into());
    ArraySidecar {
        data: name.into(),
        dtype: "f64le".into(),
        shape,
        axes,
        labels,
        extent: grid.extent().to_vec(),
    }
}

/// Persistent state of an interrupted evolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct EvolveCheckpoint {
    config_sha256: String,
    step: usize,
    dt: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    rows: Vec<Vec<f64>>,
    snapshot_steps: Vec<usize>,
    density: Vec<f64>,
    mean_field: Vec<f64>,
}

impl EvolveCheckpoint {
    fn field(&self, grid: &Grid<f64>, n_atoms: f64) -> Result<Field<f64>, CliError> {
        let psi: Vec<Complex<f64>> = self.re.iter().zip(&self.im).map(|(&a, &b)| Complex::new(a, b)).collect();
        if psi.len() != grid.len() {
            return Err(CliError::Config("checkpoint does not match the grid".into()));
        }
        // Bypass renormalisation so a resumed run continues bit for bit.
        let mut field = Field::uniform(grid.clone(), n_atoms);
        field.psi = psi;
        Ok(field)
    }
}

fn load_checkpoint<C: for<'de> Deserialize<'de>>(ctx: &Context) -> Result<C, CliError> {
    let path = ctx.out.join(CHECKPOINT);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("--resume: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("--resume: bad checkpoint: {e}")))
}

fn observable_headers(dims: usize) -> Vec<&'static str> {
    let mut h = vec!["step", "t", "norm", "kinetic", "contact", "nonlocal", "external", "total", "com_x"];
    if dims == 2 {
        h.push("com_y");
    }
    h.extend(["left", "right", "peaks", "x_left", "x_right"]);
    h
}

fn observable_row(step: usize, dt: f64, field: &Field<f64>, gpe: &mut Gpe<f64>) -> Vec<f64> {
    let o = gpe.observables(field);
    let mut row = vec![step as f64, step as f64 * dt, o.norm, o.kinetic, o.contact, o.nonlocal, o.external, o.total];
    for a in 0..field.grid.dims() {
        row.push(field.center_of_mass(a));
    }
    let (l, r) = field.partition(0.0);
    row.extend([l, r, count_peaks(&field.grid, &field.density()) as f64]);
    row.extend(half_centres(field));
    row
}

/// Mean axis-0 position of the density on either side of x = 0.
fn half_centres(field: &Field<f64>) -> [f64; 2] {
    let x = field.grid.coords(0);
    let n0 = x.len();
    let mut acc = [[0.0; 2]; 2];
    for (i, z) in field.psi.iter().enumerate() {
        let xi = x[i % n0];
        let side = usize::from(xi > 0.0);
        acc[side][0] += xi * z.norm_sqr();
        acc[side][1] += z.norm_sqr();
    }
    acc.map(|[m, w]| if w > 0.0 { m / w } else { 0.0 })
}

#[derive(Serialize)]
struct EvolveSummary {
    steps: usize,
    dt: f64,
    t_final: f64,
    n_atoms: f64,
    hbar_over_m: f64,
    g: f64,
    kernel: Option<String>,
    max_norm_drift: f64,
    max_energy_drift: f64,
    final_left: f64,
    final_right: f64,
}

pub(super) fn evolve(ctx: &mut Context) -> Result<(), CliError> {
    let config = ctx.config;
    let cfg = RunConfig::require(&config.gpe, "gpe")?;
    let every = cfg.observe_every.max(1);
    for (key, v) in [("gpe.snapshot_every", cfg.snapshot_every), ("gpe.checkpoint_every", cfg.checkpoint_every)] {
        if v % every != 0 {
            return Err(CliError::config(key, format!("must be a multiple of observe_every = {every}")));
        }
    }
    let s = setup(config)?;
    let provenance = s.kernel.as_ref().map(|k| k.provenance().to_string());
    let mut gpe = Gpe::new(s.grid.clone(), s.params, s.kernel.clone(), s.external.clone())?;
    let digest = config_digest(config)?;

    let mut state = if ctx.options.resume {
        let c: EvolveCheckpoint = load_checkpoint(ctx)?;
        if c.config_sha256 != digest {
            return Err(CliError::Config("--resume: the checkpoint was written for a different config".into()));
        }
        c
    } else {
        let field = initial_field(config, &s)?;
        let dt = time_step(cfg, &mut gpe, &field)?;
        EvolveCheckpoint {
            config_sha256: digest,
            step: 0,
            dt,
            re: field.psi.iter().map(|z| z.re).collect(),
            im: field.psi.iter().map(|z| z.im).collect(),
            rows: Vec::new(),
            snapshot_steps: Vec::new(),
            density: Vec::new(),
            mean_field: Vec::new(),
        }
    };
    let mut field = state.field(&s.grid, s.n_atoms)?;
    let dt = state.dt;
    let chunk = if cfg.checkpoint_every > 0 { cfg.checkpoint_every } else { cfg.steps.max(1) };

    let snapshot = |step: usize, f: &Field<f64>, st: &mut EvolveCheckpoint| -> Result<(), CliError> {
        if cfg.snapshot_every > 0 && step.is_multiple_of(cfg.snapshot_every) && st.snapshot_steps.last() != Some(&step) {
            st.snapshot_steps.push(step);
            st.density.extend(f.density());
            match &s.kernel {
                Some(k) => st.mean_field.extend(mean_field(k, f)?),
                None => st.mean_field.extend(std::iter::repeat_n(0.0, f.grid.len())),
            }
        }
        Ok(())
    };

    if state.step == 0 && state.rows.is_empty() {
        state.rows.push(observable_row(0, dt, &field, &mut gpe));
        snapshot(0, &field, &mut state)?;
    }
    while state.step < cfg.steps {
        let start = state.step;
        let n = chunk.min(cfg.steps - start);
        let mut rows = Vec::new();
        let mut snaps = Vec::new();
        gpe.evolve_real(&mut field, dt, n, every, |k, f, g| {
            if k > 0 {
                rows.push(observable_row(start + k, dt, f, g));
                if cfg.snapshot_every > 0 && (start + k) % cfg.snapshot_every == 0 {
                    snaps.push((start + k, f.clone()));
                }
            }
        })?;
        state.rows.extend(rows);
        for (step, f) in &snaps {
            snapshot(*step, f, &mut state)?;
        }
        state.step = start + n;
        state.re = field.psi.iter().map(|z| z.re).collect();
        state.im = field.psi.iter().map(|z| z.im).collect();
        if cfg.checkpoint_every > 0 {
            ctx.out.write_json(CHECKPOINT, &state)?;
            if ctx.options.halt_after.is_some_and(|h| state.step >= h) && state.step < cfg.steps {
                ctx.halted = true;
                ctx.summary = format!("halted at step {} of {}", state.step, cfg.steps);
                return Ok(());
            }
        }
    }

    let dims = s.grid.dims();
    let headers = observable_headers(dims);
    let mut table = Table::new(&headers);
    for row in &state.rows {
        // Step and peak count are integers.
        let mut cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        let peaks = cells.len() - 3;
        cells[0] = format!("{}", row[0] as usize);
        cells[peaks] = format!("{}", row[peaks] as usize);
        table.push(cells);
    }
    ctx.out.write_csv("observables.csv", &table)?;
    if !state.snapshot_steps.is_empty() {
        let times: Vec<f64> = state.snapshot_steps.iter().map(|&k| k as f64 * dt).collect();
        ctx.out.write_array("density.bin", &state.density, sidecar("density.bin", &s.grid, times.clone(), "t"))?;
        ctx.out.write_array("mean_field.bin", &state.mean_field, sidecar("mean_field.bin", &s.grid, times, "t"))?;
    }
    let first = &state.rows[0];
    let (norm_col, total_col) = (2, 7);
    let drift = |col: usize| {
        state.rows.iter().map(|r| ((r[col] - first[col]) / first[col].abs().max(f64::MIN_POSITIVE)).abs()).fold(0.0, f64::max)
    };
    let last = state.rows.last().expect("step 0 is always observed");
    let lr = last.len() - 5;
    let summary = EvolveSummary {
        steps: state.step,
        dt,
        t_final: state.step as f64 * dt,
        n_atoms: s.n_atoms,
        hbar_over_m: s.params.hbar_over_m,
        g: s.params.g,
        kernel: provenance,
        max_norm_drift: drift(norm_col),
        max_energy_drift: drift(total_col),
        final_left: last[lr],
        final_right: last[lr + 1],
    };
    ctx.out.write_json("summary.json", &summary)?;
    ctx.out.write_text("plot_evolve.gp", &plot::evolve(s.grid.points(), state.snapshot_steps.len()))?;
    ctx.summary = format!(
        "{} steps of {:e}, energy drift {:.2e}, norm drift {:.2e}",
        state.step, dt, summary.max_energy_drift, summary.max_norm_drift
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GroundCheckpoint {
    config_sha256: String,
    steps: usize,
    dt: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    energies: Vec<f64>,
    worst_increase: f64,
    converged: bool,
}

#[derive(Serialize)]
struct RotonSummary {
    k_roton: f64,
    beta: f64,
    lattice_a: f64,
    k_lower: f64,
    k_upper: f64,
}

impl From<&RotonBand<f64>> for RotonSummary {
    fn from(b: &RotonBand<f64>) -> Self {
        Self { k_roton: b.k_roton, beta: b.beta, lattice_a: b.lattice_a, k_lower: b.k_lower, k_upper: b.k_upper }
    }
}

#[derive(Serialize)]
struct Ring {
    k: f64,
    s: f64,
    lattice_a: f64,
}

#[derive(Serialize)]
struct GroundReport {
    energy: f64,
    steps: usize,
    converged: bool,
    monotone: bool,
    worst_increase: f64,
    dt: f64,
    density: f64,
    rings: Vec<Ring>,
    rotons: Vec<RotonSummary>,
}

pub(super) fn ground(ctx: &mut Context) -> Result<(), CliError> {
    let config = ctx.config;
    let cfg = RunConfig::require(&config.gpe, "gpe")?;
    let im = RunConfig::require(&config.imaginary, "imaginary")?;
    let renorm = im.renormalize_every.max(1);
    if cfg.checkpoint_every % renorm != 0 {
        return Err(CliError::config("gpe.checkpoint_every", format!("must be a multiple of renormalize_every = {renorm}")));
    }
    let s = setup(config)?;
    let mut gpe = Gpe::new(s.grid.clone(), s.params, s.kernel.clone(), s.external.clone())?;
    let digest = config_digest(config)?;
    let mut state = if ctx.options.resume {
        let c: GroundCheckpoint = load_checkpoint(ctx)?;
        if c.config_sha256 != digest {
            return Err(CliError::Config("--resume: the checkpoint was written for a different config".into()));
        }
        c
    } else {
        let field = initial_field(config, &s)?;
        let dt = time_step(cfg, &mut gpe, &field)?;
        GroundCheckpoint {
            config_sha256: digest,
            steps: 0,
            dt,
            re: field.psi.iter().map(|z| z.re).collect(),
            im: field.psi.iter().map(|z| z.im).collect(),
            energies: vec![gpe.observables(&field).total],
            worst_increase: 0.0,
            converged: false,
        }
    };
    let restore = |st: &GroundCheckpoint| {
        let mut f = Field::uniform(s.grid.clone(), s.n_atoms);
        f.psi = st.re.iter().zip(&st.im).map(|(&a, &b)| Complex::new(a, b)).collect();
        f
    };
    let mut field = restore(&state);
    let chunk = if cfg.checkpoint_every > 0 { cfg.checkpoint_every } else { im.max_steps.max(1) };
    while state.steps < im.max_steps && !state.converged {
        let n = chunk.min(im.max_steps - state.steps);
        let opts = ImaginaryOptions { dt: state.dt, max_steps: n, renormalize_every: renorm, tolerance: im.tolerance };
        let g = gpe.evolve_imaginary(field, &opts)?;
        state.steps += g.steps;
        state.energies.extend(g.energies.iter().skip(1));
        state.worst_increase = state.worst_increase.max(g.worst_increase);
        state.converged = g.converged;
        field = g.field;
        state.re = field.psi.iter().map(|z| z.re).collect();
        state.im = field.psi.iter().map(|z| z.im).collect();
        if cfg.checkpoint_every > 0 {
            ctx.out.write_json(CHECKPOINT, &state)?;
            let done = state.steps >= im.max_steps || state.converged;
            if ctx.options.halt_after.is_some_and(|h| state.steps >= h) && !done {
                ctx.halted = true;
                ctx.summary = format!("halted at step {} of {}", state.steps, im.max_steps);
                return Ok(());
            }
        }
    }

    let mut energies = Table::new(&["renormalization", "energy"]);
    for (i, &e) in state.energies.iter().enumerate() {
        energies.push(vec![i.to_string(), num(e)]);
    }
    ctx.out.write_csv("energies.csv", &energies)?;
    ctx.out.write_array("density.bin", &field.density(), sidecar("density.bin", &s.grid, vec![state.steps as f64], "step"))?;

    let sf = structure_factor(&field);
    let mut table = Table::new(&["k", "s"]);
    for (&k, &v) in sf.k.iter().zip(&sf.s) {
        table.push_nums(&[k, v]);
    }
    ctx.out.write_csv("structure_factor.csv", &table)?;
    let rings = sf
        .rings(im.ring_fraction)
        .into_iter()
        .map(|(k, v)| Ring { k, s: v, lattice_a: 4.0 * std::f64::consts::PI / (3f64.sqrt() * k) })
        .collect();
    let rho = s.n_atoms / s.grid.volume();
    let rotons = match &s.kernel {
        Some(k) => {
            let k_max = sf.k.last().copied().unwrap_or(1.0);
            let spec = kernel_spectrum(k, s.grid.dims(), &k_grid(k_max, 800), rho, s.params)?;
            spec.rotons.iter().map(RotonSummary::from).collect()
        }
        None => Vec::new(),
    };
    let tol = 1e-9 * state.energies[0].abs().max(f64::MIN_POSITIVE);
    let monotone = state.energies.windows(2).all(|w| w[1] <= w[0] + tol);
    let report = GroundReport {
        energy: *state.energies.last().expect("initial energy"),
        steps: state.steps,
        converged: state.converged,
        monotone,
        worst_increase: state.worst_increase,
        dt: state.dt,
        density: rho,
        rings,
        rotons,
    };
    ctx.out.write_json("rings.json", &report)?;
    ctx.out.write_text("plot_ground.gp", &plot::ground(s.grid.points()))?;
    ctx.summary = format!(
        "{} steps, E = {:e}, {} ring(s), converged: {}",
        report.steps,
        report.energy,
        report.rings.len(),
        report.converged
    );
    Ok(())
}

#[derive(Serialize)]
struct SpectrumReport {
    rho: f64,
    dims: usize,
    u_tilde_zero: f64,
    sound_speed: Option<f64>,
    unstable_width: f64,
    rotons: Vec<RotonSummary>,
}

pub(super) fn bogoliubov(ctx: &mut Context) -> Result<(), CliError> {
    let config = ctx.config;
    let b = RunConfig::require(&config.bogoliubov, "bogoliubov")?;
    let cfg = RunConfig::require(&config.gpe, "gpe")?;
    let grid = build_grid(cfg)?;
    let hm = cfg.hbar_over_m.unwrap_or(units::SR88_HBAR_OVER_M);
    let params = GpeParams { hbar_over_m: hm, g: contact(cfg, grid.dims(), hm) };
    let kernel = kernel(config, &grid)?.ok_or_else(|| CliError::config("kernel", "missing section"))?;
    let dims = b.dims.unwrap_or(grid.dims());
    if !(b.k_max > 0.0) || b.points < 2 {
        return Err(CliError::config("bogoliubov.k_max", "needs k_max > 0 and at least 2 points"));
    }
    let spec = kernel_spectrum(&kernel, dims, &k_grid(b.k_max, b.points), b.rho, params)?;
    let mut table = Table::new(&["k", "u_tilde", "omega2", "re", "im"]);
    for i in 0..spec.k.len() {
        table.push_nums(&[spec.k[i], spec.u_tilde[i], spec.omega_squared[i], spec.omega[i].re, spec.omega[i].im]);
    }
    ctx.out.write_csv("spectrum.csv", &table)?;
    let u0 = kernel.fourier_zero();
    let report = SpectrumReport {
        rho: b.rho,
        dims,
        u_tilde_zero: u0,
        sound_speed: sound_speed(u0, b.rho, &params),
        unstable_width: spec.unstable_width(),
        rotons: spec.rotons.iter().map(RotonSummary::from).collect(),
    };
    ctx.out.write_json("rotons.json", &report)?;
    ctx.out.write_text("plot_spectrum.gp", plot::SPECTRUM)?;
    ctx.summary = format!("{} roton band(s)", report.rotons.len());
    Ok(())
}
