mod support;

use approx::assert_relative_eq;
use nalgebra::ComplexField;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnd_core::model::{
    build_single_liouvillian, build_two_atom_liouvillian, build_two_atom_liouvillian_with_shift,
    pair, vdw_potential, CMatrix, DensityMatrix, DressingParams, LockMode, E, G, P,
};
use rnd_core::steady::{
    analytic_lightshift, analytic_lightshift_with_shift, analytic_rho_ge, analytic_rho_pe,
    asymptote, collective_shift_model, effective_interaction, evaluate_pair,
    interaction_profile, log_grid, loss_rate, pair_light_shift, steady_state,
};
use rnd_core::{units, Error};
use support::rk4::integrate_to_steady_state;

fn fig2(multiple: f64, lock: LockMode<f64>) -> DressingParams<f64> {
    DressingParams::strontium(100)
        .with_omega2_ratio(1.0)
        .with_equal_noise(multiple)
        .with_lock(lock)
}

fn random_params(rng: &mut ChaCha8Rng) -> DressingParams<f64> {
    let delta = units::mhz::<f64>(rng.gen_range(2.0..15.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let lock = match rng.gen_range(0..3) {
        0 => LockMode::OutOfPhase,
        1 => LockMode::Unlocked,
        _ => LockMode::Custom(f64::NAN),
    };
    let mut p = DressingParams::strontium(rng.gen_range(40..=100))
        .with_delta(delta)
        .with_omega2_ratio(rng.gen_range(0.3..2.5))
        .with_omega1(units::mhz(rng.gen_range(0.1..2.0)));
    p.gamma1 = p.gamma_p * 10f64.powf(rng.gen_range(-2.0..2.0));
    p.gamma2 = p.gamma_p * 10f64.powf(rng.gen_range(-2.0..2.0));
    p.lock = match lock {
        LockMode::Custom(_) => {
            let lo = (p.gamma1 - p.gamma2).abs();
            let hi = p.gamma1 + p.gamma2;
            LockMode::Custom(lo + rng.gen_range(0.0..1.0) * (hi - lo))
        }
        other => other,
    };
    p
}

fn max_entry_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).modulus()).fold(0.0, f64::max)
}

#[test]
fn undriven_atom_relaxes_to_ground_state() {
    let p = DressingParams::<f64>::strontium(100).with_omega1(0.0);
    let sol = steady_state(&build_single_liouvillian(&p).unwrap()).unwrap();
    let target = DensityMatrix::<f64>::basis_state(3, G);
    assert!(max_entry_diff(sol.rho.matrix(), target.matrix()) < 1e-12);
}

#[test]
fn decoupled_sectors_are_reported_as_degenerate() {
    // Without decay or drive every population is stationary.
    let mut p = DressingParams::<f64>::strontium(100).with_omega1(0.0);
    p.omega2 = 0.0;
    p.gamma_p = 0.0;
    p.gamma_r = 0.0;
    match steady_state(&build_single_liouvillian(&p).unwrap()) {
        Err(Error::DegenerateSteadyState { dimension, .. }) => assert!(dimension >= 2),
        other => panic!("expected degeneracy, got {other:?}"),
    }
}

#[test]
fn pair_without_interaction_is_a_product_state() {
    let p = fig2(1.0, LockMode::Unlocked).with_omega1(units::mhz(1.0));
    let single = steady_state(&build_single_liouvillian(&p).unwrap()).unwrap().rho;
    let pair_state = steady_state(&build_two_atom_liouvillian_with_shift(&p, 0.0).unwrap()).unwrap().rho;
    let product = DensityMatrix::tensor(&single, &single);
    assert!(max_entry_diff(pair_state.matrix(), product.matrix()) < 1e-10);
}

fn softcore_radius(p: &DressingParams<f64>) -> f64 {
    let width = ((p.omega1 * p.omega2 / (2.0 * p.delta)).powi(2) + p.gamma1.powi(2) + p.gamma2.powi(2)).sqrt();
    (p.c6 * p.rydberg_admixture() / width).powf(1.0 / 6.0)
}

#[test]
fn far_pair_approaches_product_state() {
    // The residual correlation decays as r⁻⁶ with a prefactor that grows with
    // the dressing strength; at weak dressing 10 R_c already suffices.
    for (om1, factor) in [(0.05, 10.0), (1.0, 20.0)] {
        let p = fig2(10.0, LockMode::Unlocked).with_omega1(units::mhz(om1));
        let single = steady_state(&build_single_liouvillian(&p).unwrap()).unwrap().rho;
        let r = factor * softcore_radius(&p);
        let far = steady_state(&build_two_atom_liouvillian(&p, r).unwrap()).unwrap().rho;
        let product = DensityMatrix::tensor(&single, &single);
        let d = max_entry_diff(far.matrix(), product.matrix());
        assert!(d < 1e-8, "Ω₁/2π={om1} MHz, r={r}: {d:e}");
    }
}

#[test]
fn generators_preserve_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = random_params(&mut rng);
    let ls = [build_single_liouvillian(&p).unwrap(), build_two_atom_liouvillian(&p, 5.0).unwrap()];
    for l in &ls {
        let dim = l.dim();
        for _ in 0..20 {
            let a = CMatrix::<f64>::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let m = &a * a.adjoint();
            let tr = m.trace();
            let rho = DensityMatrix::new(m / tr).unwrap();
            let residual = l.trace_residual(&rho);
            assert!(residual < 1e-10 * l.matrix().norm(), "trace residual {residual}");
        }
    }
}

#[test]
fn random_parameter_sets_give_valid_steady_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let r = rng.gen_range(2.0..30.0);
        let sol = steady_state(&build_two_atom_liouvillian(&p, r).unwrap()).unwrap();
        let v = vdw_potential(r, p.c6).unwrap();
        let scale = p.max_rate().max(v.abs());
        assert!(sol.residual < 1e-10 * scale, "residual {} at scale {scale}", sol.residual);
        sol.rho.check().unwrap();
    }
}

#[test]
fn solver_matches_long_time_integration() {
    let p = fig2(10.0, LockMode::Unlocked).with_omega1(units::mhz(1.0));
    let l = build_two_atom_liouvillian(&p, 2.0).unwrap();
    let oracle = integrate_to_steady_state(&l, 1e-12);
    let sol = steady_state(&l).unwrap();
    let diff = max_entry_diff(sol.rho.matrix(), &oracle.rho);
    assert!(diff < 1e-8, "entrywise difference {diff:e} (oracle rate {:e})", oracle.rate);
}

#[test]
fn interaction_vanishes_far_away() {
    let p = fig2(10.0, LockMode::OutOfPhase).with_omega1(units::mhz(0.2));
    let reference = asymptote(&p).unwrap();
    let core = evaluate_pair(&p, 0.5, &reference).unwrap().u;
    let far = evaluate_pair(&p, 600.0, &reference).unwrap().u;
    assert!(far.abs() < 1e-6 * core.abs());
}

#[test]
fn undriven_pair_has_no_loss() {
    let p = fig2(1.0, LockMode::Unlocked).with_omega1(0.0);
    assert_eq!(loss_rate(&p, 3.0).unwrap(), 0.0);
}

#[test]
fn far_loss_equals_single_atom_loss() {
    let p = fig2(3.0, LockMode::Unlocked).with_omega1(units::mhz(0.5));
    let reference = asymptote(&p).unwrap();
    let far = evaluate_pair(&p, 500.0, &reference).unwrap().loss;
    assert_relative_eq!(far, reference.loss, max_relative = 1e-8);
}

#[test]
fn noiseless_dressing_enhances_loss_inside_the_core() {
    let p = fig2(0.01, LockMode::Unlocked).with_omega1(units::khz(60.0));
    let reference = asymptote(&p).unwrap();
    let inside = evaluate_pair(&p, 1.0, &reference).unwrap().loss;
    assert!(inside > 10.0 * reference.loss, "{inside} vs {}", reference.loss);
}

#[test]
fn trace_form_and_matrix_element_form_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let p = random_params(&mut rng);
        let r = rng.gen_range(2.0..20.0);
        let reference = asymptote(&p).unwrap();
        let point = evaluate_pair(&p, r, &reference).unwrap();
        let an = analytic_lightshift(&point.solution.rho, &p, r).unwrap();
        assert_relative_eq!(an - reference.u_bar, point.u, max_relative = 1e-9, epsilon = 1e-12);
    }
}

#[test]
fn maximally_mixed_light_shift() {
    // Single-atom ρ is I/3: only −Δρ_pp survives, and ρ_ee,ee = 1/9.
    let p = fig2(1.0, LockMode::Unlocked);
    let rho = DensityMatrix::<f64>::maximally_mixed(9);
    let v = 1.7;
    let expected = -2.0 * p.delta / 3.0 + v / 9.0;
    assert_relative_eq!(analytic_lightshift_with_shift(&rho, &p, v), expected, max_relative = 1e-14);
    assert_relative_eq!(pair_light_shift(&rho, &p, v), expected, max_relative = 1e-14);
}

#[test]
fn incoherent_state_light_shift() {
    let p = fig2(1.0, LockMode::Unlocked);
    let mut m = CMatrix::<f64>::zeros(9, 9);
    let weights = [(pair(G, G), 0.5), (pair(P, G), 0.1), (pair(G, P), 0.1), (pair(E, E), 0.3)];
    for (k, w) in weights {
        m[(k, k)] = Complex64::new(w, 0.0);
    }
    let rho = DensityMatrix::new(m).unwrap();
    let v = 3.0;
    let rho_pp = 0.1;
    assert_relative_eq!(
        analytic_lightshift_with_shift(&rho, &p, v),
        -2.0 * p.delta * rho_pp + v * 0.3,
        max_relative = 1e-14
    );
}

#[test]
fn rho_pe_relation() {
    let p = fig2(0.0, LockMode::Unlocked);
    assert_relative_eq!(analytic_rho_pe(0.01, &p).value, 0.02, max_relative = 1e-14);
    let mut q = p.clone();
    q.gamma2 = q.gamma_p;
    assert_relative_eq!(analytic_rho_pe(0.01, &q).value, 0.01, max_relative = 1e-14);

    // Inside the EIT window the relation follows the numerically solved atom:
    // both decrease with γ₂, and they agree to 20% once γ₂ ≳ γ_p. Below that
    // the leading-order relation overshoots by up to a quarter.
    let mut w = fig2(0.0, LockMode::Unlocked).with_omega1(units::mhz(0.3));
    w.gamma1 = units::khz(50.0);
    let mut last = (f64::INFINITY, f64::INFINITY);
    for g2 in [0.01, 0.1, 0.3, 1.0, 3.0, 10.0] {
        w.gamma2 = g2 * w.gamma_p;
        let rho = steady_state(&build_single_liouvillian(&w).unwrap()).unwrap().rho;
        let numeric = 2.0 * rho.get(P, E).re;
        let model = analytic_rho_pe(rho.get(P, P).re, &w);
        assert!(model.valid);
        let ratio = model.value / numeric;
        assert!(ratio > 1.0 && ratio < 1.25, "γ₂={g2}γ_p: ratio {ratio}");
        if g2 >= 1.0 {
            assert!((ratio - 1.0).abs() < 0.2, "γ₂={g2}γ_p: ratio {ratio}");
        }
        let coefficient = (model.value / rho.get(P, P).re, numeric / rho.get(P, P).re);
        assert!(coefficient.0 < last.0 && coefficient.1 < last.1);
        last = coefficient;
    }
}

#[test]
fn rho_ge_relation() {
    let mut p = fig2(0.0, LockMode::Unlocked);
    p.gamma_p = 0.0;
    assert_eq!(analytic_rho_ge(0.01, 0.0, &p).approx, 0.0);

    let base = fig2(0.0, LockMode::Unlocked);
    let g2 = 100.0 * base.omega2 / base.omega1 * base.gamma_p;
    let mut locked = base.clone().with_lock(LockMode::OutOfPhase);
    locked.gamma1 = g2;
    locked.gamma2 = g2;
    let mut unlocked = locked.clone();
    unlocked.lock = LockMode::Unlocked;
    let l = analytic_rho_ge(0.01, 0.0, &locked).approx.abs();
    let u = analytic_rho_ge(0.01, 0.0, &unlocked).approx.abs();
    assert_relative_eq!(l, 2.0 * base.omega2 / base.omega1 * base.gamma_p * 0.01 / base.gamma_r);
    assert!(l >= 10.0 * u);
}

#[test]
fn collective_shift_limits() {
    let mut p = fig2(1.0, LockMode::Unlocked);
    assert!(collective_shift_model(0.01, &p).valid);
    assert_eq!(collective_shift_model(0.01, &p).value, 0.0);
    p.gamma2 = 0.0;
    assert_relative_eq!(collective_shift_model(0.01, &p).value, p.delta * 0.01);
    p.gamma2 = 1e9 * p.gamma_p;
    assert_relative_eq!(collective_shift_model(0.01, &p).value, -p.delta * 0.01, max_relative = 1e-8);
    assert!(!collective_shift_model(0.01, &p.with_omega2_ratio(2.0)).valid);
}

#[test]
fn out_of_phase_locking_removes_background_loss() {
    for multiple in [10.0, 100.0] {
        let locked = asymptote(&fig2(multiple, LockMode::OutOfPhase)).unwrap().loss;
        let unlocked = asymptote(&fig2(multiple, LockMode::Unlocked)).unwrap().loss;
        assert!(locked < unlocked, "γ={multiple}γ_p: {locked} vs {unlocked}");
    }
}

#[test]
fn double_rydberg_excitation_is_blockaded() {
    let p = fig2(1.0, LockMode::Unlocked).with_omega1(units::khz(100.0));
    let rho = steady_state(&build_two_atom_liouvillian(&p, 1.0).unwrap()).unwrap().rho;
    let ee_ee = rho.get(pair(E, E), pair(E, E)).re;
    let ee = rho.reduce_symmetric().get(E, E).re;
    assert!(ee_ee < 0.01 * ee, "{ee_ee} vs {ee}");
}

#[test]
fn profile_is_consistent_with_pointwise_calls() {
    let p = fig2(10.0, LockMode::OutOfPhase).with_omega1(units::mhz(0.3));
    let one = interaction_profile(&p, &[4.0]).unwrap();
    assert_relative_eq!(one.u[0], effective_interaction(&p, 4.0).unwrap(), max_relative = 1e-12);
    assert_relative_eq!(one.loss[0], loss_rate(&p, 4.0).unwrap(), max_relative = 1e-12);

    let grid = log_grid(1.0, 30.0, 24);
    let profile = interaction_profile(&p, &grid).unwrap();
    let mut shuffled = grid.clone();
    shuffled.reverse();
    shuffled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let again = interaction_profile(&p, &shuffled).unwrap();
    assert_eq!(profile.u, again.u);
    assert!(profile.failures.is_empty());
}

#[test]
fn unsorted_grids_are_rejected() {
    let p = fig2(1.0, LockMode::Unlocked);
    assert!(matches!(interaction_profile(&p, &[2.0, 1.0]), Err(Error::InvalidGrid(_))));
    assert!(matches!(interaction_profile(&p, &[]), Err(Error::InvalidGrid(_))));
    assert!(matches!(interaction_profile(&p, &[0.0, 1.0]), Err(Error::InvalidGrid(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steady_state_is_a_density_matrix(
        delta in 1.0f64..20.0,
        ratio in 0.2f64..3.0,
        om1 in 0.05f64..2.0,
        g1 in -2.0f64..2.0,
        g2 in -2.0f64..2.0,
        r in 1.0f64..40.0,
    ) {
        let mut p = DressingParams::<f64>::strontium(80)
            .with_delta(units::mhz(delta))
            .with_omega2_ratio(ratio)
            .with_omega1(units::mhz(om1));
        p.gamma1 = p.gamma_p * 10f64.powf(g1);
        p.gamma2 = p.gamma_p * 10f64.powf(g2);
        let sol = pair_steady_state_checked(&p, r);
        prop_assert!(sol.is_ok(), "{:?}", sol);
    }
}

fn pair_steady_state_checked(p: &DressingParams<f64>, r: f64) -> Result<(), String> {
    let sol = steady_state(&build_two_atom_liouvillian(p, r).unwrap()).map_err(|e| e.to_string())?;
    sol.rho.check().map_err(|e| e.to_string())?;
    let loss = rnd_core::steady::single_atom_loss(&sol.rho.reduce_symmetric(), p);
    if !(loss >= 0.0) {
        return Err(format!("negative loss {loss}"));
    }
    Ok(())
}
