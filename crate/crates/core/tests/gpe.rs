use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rnd_core::bogoliubov::omega_squared;
use rnd_core::features::{extract_features, feature_grid};
use rnd_core::gpe::*;
use rnd_core::model::{DressingParams, LockMode};
use rnd_core::steady::interaction_profile;
use rnd_core::units::mhz;

fn soft_core_pair(
    dphi: f64,
    velocity: f64,
) -> (Gpe<f64>, Field<f64>) {
    let grid = Grid::<f64>::line(1024, 60.0).unwrap();
    let kernel = SyntheticKernel::SoftCore { u0: -20.0, rc: 1.0 }.kernel(&grid).unwrap();
    let right = SolitonSpec { amplitude: 1.0, hwhm: 0.5, velocity: -velocity, phase: 0.0 };
    let left = SolitonSpec { amplitude: 1.0, hwhm: 0.5, velocity, phase: dphi };
    let field = initial_two_soliton(&grid, right, left, 4.0, 1.0, 1.0).unwrap();
    let gpe = Gpe::new(grid, GpeParams { hbar_over_m: 1.0, g: 0.0 }, Some(kernel), None).unwrap();
    (gpe, field)
}

#[test]
fn free_gaussian_spreads_analytically() {
    let grid = Grid::<f64>::line(2048, 200.0).unwrap();
    let s0 = 2.0;
    let k0 = 0.5;
    let hbar_m = 0.7;
    let mut field = Field::gaussian(grid.clone(), &[-10.0], s0, &[k0], 1.0).unwrap();
    let mut gpe = Gpe::new(grid.clone(), GpeParams { hbar_over_m: hbar_m, g: 0.0 }, None, None).unwrap();
    let (dt, steps) = (4e-3, 7500);
    gpe.evolve_real(&mut field, dt, steps, steps, |_, _, _| {}).unwrap();
    let t = dt * steps as f64;
    // ψ ∝ (1 + iτ)^(-1/2) exp(−(x − x0 − v t)²/(4 s0²(1 + iτ)) + i k0 x − i ħk0² t / 2m), τ = ħ t / (2 m s0²).
    let tau = Complex64::new(1.0, hbar_m * t / (2.0 * s0 * s0));
    let v = hbar_m * k0;
    let exact: Vec<Complex64> = grid
        .coords(0)
        .iter()
        .map(|&x| {
            let y = x + 10.0;
            let env = (-(Complex64::new(y - v * t, 0.0)).powi(2) / (4.0 * s0 * s0 * tau)).exp() / tau.sqrt();
            env * Complex64::from_polar(1.0, k0 * x - 0.5 * hbar_m * k0 * k0 * t)
        })
        .collect();
    let reference = Field::new(grid, exact, 1.0).unwrap();
    let err = field.relative_distance(&reference);
    assert!(err < 1e-6, "relative L2 error {err:e}");
}

#[test]
fn harmonic_ground_state_width() {
    let grid = Grid::<f64>::line(256, 40.0).unwrap();
    let (omega, hbar_m) = (0.8, 1.3);
    let trap = ExternalPotential::new(TrapSpec::Harmonic { omega: vec![omega] }, &grid, hbar_m).unwrap();
    let mut gpe = Gpe::new(grid.clone(), GpeParams { hbar_over_m: hbar_m, g: 0.0 }, None, Some(trap)).unwrap();
    let start = Field::gaussian(grid.clone(), &[1.0], 3.0, &[0.0], 5.0).unwrap();
    let gs = gpe.evolve_imaginary(start, &ImaginaryOptions::new(9e-4, 200_000)).unwrap();
    assert!(gs.converged);
    assert!(gs.monotone());
    let x = grid.coords(0);
    let rho = gs.field.density();
    let n: f64 = rho.iter().sum();
    let var: f64 = x.iter().zip(&rho).map(|(x, r)| x * x * r).sum::<f64>() / n;
    // |ψ|² ∝ exp(−x²/l²) with l = √(ħ/mω), so ⟨x²⟩ = l²/2.
    let l = (hbar_m / omega).sqrt();
    let width = (2.0 * var).sqrt();
    assert!((width / l - 1.0).abs() < 0.01, "width {width} vs {l}");
    assert!((gs.energy / (5.0 * omega / 2.0) - 1.0).abs() < 0.01);
}

#[test]
fn time_reversal_recovers_initial_field() {
    let (mut gpe, mut field) = soft_core_pair(0.0, 0.5);
    let initial = field.clone();
    let dt = 8e-4;
    gpe.evolve_real(&mut field, dt, 3000, 3000, |_, _, _| {}).unwrap();
    assert!(field.relative_distance(&initial) > 0.1);
    gpe.evolve_real(&mut field, -dt, 3000, 3000, |_, _, _| {}).unwrap();
    let err = field.relative_distance(&initial);
    assert!(err < 1e-6, "recovery error {err:e}");
}

#[test]
fn norm_and_energy_conserved_over_long_runs() {
    let (mut gpe, mut field) = soft_core_pair(PI / 4.0, 0.5);
    let n0 = field.norm();
    let e0 = gpe.observables(&field).total;
    let mut worst_norm: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    gpe.evolve_real(&mut field, 8e-4, 10_000, 500, |_, f, g| {
        worst_norm = worst_norm.max((f.norm() - n0).abs());
        worst_energy = worst_energy.max(((g.observables(f).total - e0) / e0).abs());
    })
    .unwrap();
    assert!(worst_norm < 1e-8 * n0, "norm drift {worst_norm:e}");
    assert!(worst_energy < 1e-5, "energy drift {worst_energy:e}");
}

#[test]
fn divergence_is_reported_with_step() {
    let grid = Grid::<f64>::line(64, 10.0).unwrap();
    let mut field = Field::uniform(grid.clone(), 1.0);
    field.psi[3] = Complex64::new(f64::NAN, 0.0);
    let mut gpe = Gpe::new(grid, GpeParams { hbar_over_m: 1.0, g: 0.0 }, None, None).unwrap();
    let err = gpe.evolve_real(&mut field, 1e-3, 10, 1, |_, _, _| {});
    assert!(matches!(err, Err(rnd_core::Error::InvalidParameter { .. }) | Err(rnd_core::Error::Diverged { step: 1 })));
}

#[test]
fn oversized_time_step_is_rejected() {
    let (mut gpe, mut field) = soft_core_pair(0.0, 0.5);
    assert!(gpe.evolve_real(&mut field, 0.01, 1, 1, |_, _, _| {}).is_err());
}

#[test]
fn uniform_density_gives_flat_mean_field() {
    let grid = Grid::<f64>::square(64, 20.0).unwrap();
    let kernel = SyntheticKernel::SoftCore { u0: 2.0, rc: 1.5 }.kernel(&grid).unwrap();
    let field = Field::uniform(grid.clone(), 40.0);
    let rho = 40.0 / 400.0;
    let w = mean_field(&kernel, &field).unwrap();
    for v in w {
        assert!((v - rho * kernel.fourier_zero()).abs() < 1e-10);
    }
    let mut gpe = Gpe::new(grid, GpeParams { hbar_over_m: 1.0, g: 0.3 }, Some(kernel), None).unwrap();
    let obs = gpe.observables(&field);
    assert!(obs.kinetic.abs() < 1e-12);
    assert!((obs.norm - 40.0).abs() < 1e-10);
}

#[test]
fn point_mass_reproduces_the_kernel() {
    let grid = Grid::<f64>::line(512, 40.0).unwrap();
    let kernel = SyntheticKernel::SoftCore { u0: -3.0, rc: 2.0 }.kernel(&grid).unwrap();
    let dx = grid.spacing(0);
    let mut psi = vec![Complex64::new(0.0, 0.0); 512];
    psi[256] = Complex64::new(1.0, 0.0);
    let field = Field::new(grid.clone(), psi, 7.0).unwrap();
    let w = mean_field(&kernel, &field).unwrap();
    for (i, x) in grid.coords(0).iter().enumerate() {
        let expected = kernel.eval(x.abs()) * 7.0;
        assert!((w[i] - expected).abs() < 1e-10, "x = {x}");
    }
    assert!(dx > 0.0);
}

#[test]
fn narrow_kernel_acts_locally() {
    let grid = Grid::<f64>::line(1024, 100.0).unwrap();
    let kernel = SyntheticKernel::Gaussian { u0: 5.0, width: 0.2 }.kernel(&grid).unwrap();
    let field = Field::gaussian(grid.clone(), &[0.0], 6.0, &[0.0], 3.0).unwrap();
    let w = mean_field(&kernel, &field).unwrap();
    let u0 = kernel.integral();
    assert!((u0 - 5.0 * 0.2 * (TAU).sqrt()).abs() < 1e-3);
    let rho = field.density();
    for i in (0..1024).step_by(37) {
        assert!((w[i] - u0 * rho[i]).abs() < 2e-3 * u0 * rho[512], "i = {i}");
    }
}

#[test]
fn grid_transform_matches_quadrature_oracle() {
    let spec = SyntheticKernel::SoftCore { u0: 1.0, rc: 1.0 };
    let grid = Grid::<f64>::line(1024, 64.0).unwrap();
    let kernel = spec.kernel(&grid).unwrap();
    let (k, u) = kernel.fourier_axis();
    // Independent oracle: composite Simpson on [0, 32] with 2·10⁵ intervals of 2∫U cos(kr) dr.
    let oracle = |q: f64| {
        let n = 200_000;
        let h = 32.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * spec.eval(r) * (q * r).cos();
        }
        2.0 * s * h / 3.0
    };
    let scale = oracle(0.0);
    for i in (0..200).step_by(7) {
        let o = oracle(k[i]);
        assert!((u[i] - o).abs() < 0.01 * scale, "k = {}: grid {} oracle {}", k[i], u[i], o);
    }
    assert!((kernel.fourier_zero() / kernel.integral() - 1.0).abs() < 0.01);
}

#[test]
fn kernel_on_a_small_grid_is_rejected() {
    let grid = Grid::<f64>::line(256, 8.0).unwrap();
    let err = SyntheticKernel::SoftCore { u0: 1.0, rc: 3.0 }.kernel(&grid);
    assert!(matches!(err, Err(rnd_core::Error::KernelTailNotDecayed(_))));
    let (r, u) = SyntheticKernel::SoftCore { u0: 1.0, rc: 3.0 }.table::<f64>(4.0, 100);
    let wide = Grid::<f64>::line(256, 64.0).unwrap();
    assert!(matches!(tabulate_kernel(&r, &u, &wide, "short"), Err(rnd_core::Error::KernelTooShort { .. })));
}

#[test]
fn blue_profile_kernel_keeps_its_radii() {
    let params = DressingParams::<f64>::strontium(100)
        .with_delta(mhz(10.0))
        .with_omega2_ratio(0.3)
        .with_equal_noise(1000.0)
        .with_lock(LockMode::OutOfPhase)
        .with_omega1(mhz(0.33));
    let r = feature_grid(&params, 200);
    let profile = interaction_profile(&params, &r).unwrap();
    let direct = extract_features(&profile).unwrap();
    let half = 1.1 * r.last().unwrap();
    let n = 1024;
    let grid = Grid::<f64>::line(n, 2.0 * half).unwrap();
    let kernel = kernel_from_profile(&profile, &grid).unwrap();
    let resampled: Vec<f64> = r.iter().map(|&x| kernel.eval(x)).collect();
    let mut copy = profile.clone();
    copy.u = resampled;
    let embedded = extract_features(&copy).unwrap();
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a / b - 1.0).abs() < 0.05,
        (None, None) => true,
        _ => false,
    };
    assert!(close(embedded.r_ip, direct.r_ip));
    assert!(close(embedded.r_well, direct.r_well));
    assert!(close(embedded.r_c, direct.r_c));
    assert!(embedded.u_ip.unwrap() > 0.0 && embedded.u_well.unwrap() < 0.0);
}

#[test]
fn two_soliton_symmetries() {
    let grid = Grid::<f64>::line(512, 40.0).unwrap();
    let single = SolitonSpec { amplitude: 1.0, hwhm: 1.0, velocity: 0.0, phase: 0.0 };
    let empty = SolitonSpec { amplitude: 0.0, ..single };
    let one = initial_two_soliton(&grid, single, empty, 3.0, 1.0, 12.0).unwrap();
    assert!((one.norm() - 12.0).abs() < 1e-10);
    let x = grid.coords(0);
    let rho = one.density();
    let peak = (0..512).max_by(|&a, &b| rho[a].partial_cmp(&rho[b]).unwrap()).unwrap();
    assert!((x[peak] - 3.0).abs() <= grid.spacing(0) / 2.0);

    let odd = initial_two_soliton(&grid, single, SolitonSpec { phase: PI, ..single }, 3.0, 1.0, 12.0).unwrap();
    assert!(odd.psi[256].norm() < 1e-12);
    for i in 1..256 {
        assert!((odd.psi[256 + i] + odd.psi[256 - i]).norm() < 1e-12);
    }
}

#[test]
fn single_soliton_energy_has_an_interior_minimum() {
    let grid = Grid::<f64>::line(1024, 60.0).unwrap();
    let kernel = SyntheticKernel::SoftCore { u0: -20.0, rc: 1.0 }.kernel(&grid).unwrap();
    let mut gpe = Gpe::new(grid.clone(), GpeParams { hbar_over_m: 1.0, g: 0.0 }, Some(kernel), None).unwrap();
    let empty = SolitonSpec { amplitude: 0.0, hwhm: 1.0, velocity: 0.0, phase: 0.0 };
    let energies: Vec<f64> = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4]
        .iter()
        .map(|&h| {
            let s = SolitonSpec { amplitude: 1.0, hwhm: h, ..empty };
            let f = initial_two_soliton(&grid, s, empty, 0.0, 1.0, 1.0).unwrap();
            gpe.observables(&f).total
        })
        .collect();
    let (imin, _) = energies.iter().enumerate().fold((0, f64::MAX), |b, (i, &e)| if e < b.1 { (i, e) } else { b });
    assert!(imin > 0 && imin + 1 < energies.len(), "{energies:?}");
}

#[test]
fn imaginary_time_is_monotone_and_grid_converged() {
    let energy = |n: usize| {
        let grid = Grid::<f64>::line(n, 30.0).unwrap();
        let kernel = SyntheticKernel::SoftCore { u0: -20.0, rc: 1.0 }.kernel(&grid).unwrap();
        let mut gpe = Gpe::new(grid.clone(), GpeParams { hbar_over_m: 1.0, g: 0.5 }, Some(kernel), None).unwrap();
        let start = Field::gaussian(grid, &[0.3], 1.0, &[0.0], 1.0).unwrap();
        let dt = 0.5 * gpe.max_dt(&start).min(2e-3);
        let gs = gpe.evolve_imaginary(start, &ImaginaryOptions::new(dt, 200_000)).unwrap();
        assert!(gs.converged, "n = {n}");
        assert!(gs.monotone(), "n = {n}: worst increase {:e}", gs.worst_increase);
        gs.energy
    };
    let coarse = energy(256);
    let fine = energy(512);
    assert!(((coarse - fine) / fine).abs() < 0.005, "{coarse} vs {fine}");
}

/// Amplitude of the cos(kx) density mode along axis 0.
fn mode_amplitude(field: &Field<f64>, bin: usize) -> f64 {
    let x = field.grid.coords(0);
    let k = field.grid.wavenumbers(0)[bin];
    let n0 = field.grid.points()[0];
    let rho = field.density();
    rho.iter().enumerate().map(|(i, r)| r * (k * x[i % n0]).cos()).sum::<f64>() / rho.len() as f64
}

fn perturbed_uniform(grid: &Grid<f64>, rho: f64, bin: usize, eps: f64) -> Field<f64> {
    let k = grid.wavenumbers(0)[bin];
    let x = grid.coords(0);
    let n0 = grid.points()[0];
    let psi = (0..grid.len()).map(|i| Complex64::new(rho.sqrt() * (1.0 + eps * (k * x[i % n0]).cos()), 0.0)).collect();
    Field::new(grid.clone(), psi, rho * grid.volume()).unwrap()
}

#[test]
fn stable_mode_oscillates_at_the_bogoliubov_frequency() {
    let grid = Grid::<f64>::line(256, 16.0 * PI).unwrap();
    let kernel = SyntheticKernel::Gaussian { u0: 0.5, width: 1.0 }.kernel(&grid).unwrap();
    let params = GpeParams { hbar_over_m: 1.0, g: 1.0 };
    let (rho, bin) = (1.0, 6);
    let k = grid.wavenumbers(0)[bin];
    let w2 = omega_squared(k, kernel.fourier()[bin], rho, &params);
    assert!(w2 > 0.0);
    let omega = w2.sqrt();
    let mut field = perturbed_uniform(&grid, rho, bin, 1e-5);
    let mut gpe = Gpe::new(grid, params, Some(kernel), None).unwrap();
    let dt = 1e-3;
    let mut samples = Vec::new();
    gpe.evolve_real(&mut field, dt, (4.0 * PI / omega / dt) as usize, 1, |s, f, _| {
        samples.push((s as f64 * dt, mode_amplitude(f, bin)));
    })
    .unwrap();
    let crossings: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| w[0].0 - w[0].1 * (w[1].0 - w[0].0) / (w[1].1 - w[0].1))
        .collect();
    assert!(crossings.len() >= 3);
    let half_period = (crossings[2] - crossings[0]) / 2.0;
    let measured = PI / half_period;
    assert!((measured / omega - 1.0).abs() < 0.02, "measured {measured} predicted {omega}");
}
