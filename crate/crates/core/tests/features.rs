use rnd_core::features::{
    analytic_radii, calibrate_omega1, extract_features, feature_grid, outer_peak_radius_analytic,
    sweep, sweep_point, CalibrationOptions, Feature, SweepAxis, SweepOptions,
};
use rnd_core::model::{DressingParams, LockMode};
use rnd_core::steady::interaction_profile;
use rnd_core::{units, Error};

fn locked(delta_mhz: f64, ratio: f64, noise: f64) -> DressingParams<f64> {
    DressingParams::strontium(100)
        .with_delta(units::mhz(delta_mhz))
        .with_omega2_ratio(ratio)
        .with_equal_noise(noise)
        .with_lock(LockMode::OutOfPhase)
}

fn blue() -> DressingParams<f64> {
    locked(10.0, 0.3, 1000.0).with_omega1(units::khz(330.0))
}

fn hundred_hz() -> f64 {
    units::per_second(100.0)
}

#[test]
fn blue_profile_has_core_barrier_and_well() {
    let p = blue();
    let profile = interaction_profile(&p, &feature_grid(&p, 200)).unwrap();
    let f = extract_features(&profile).unwrap();
    let pattern: Vec<_> = f.sign_pattern();
    assert_eq!(
        pattern,
        vec![(Feature::Core, -1), (Feature::InnerPeak, 1), (Feature::Well, -1)]
    );
    let (r_ic, r_ip, r_oc) = (f.r_ic.unwrap(), f.r_ip.unwrap(), f.r_oc.unwrap());
    assert!(r_ic <= r_ip && r_ip <= r_oc);
    assert_eq!(f.delta_eit, p.omega2 * p.omega2 / (4.0 * p.delta.abs()));

    let a = analytic_radii(&p);
    assert!((r_oc / a.r_oc - 1.0).abs() < 0.25);
}

#[test]
fn split_core_outer_edge_tracks_eit_bandwidth() {
    // Reduced Ω₂/2Δ at strong locked dephasing splits the core.
    let p = locked(10.0, 0.5, 100.0);
    let c = calibrate_omega1(&p, hundred_hz(), &CalibrationOptions::default()).unwrap();
    let f = extract_features(&c.profile).unwrap();
    let r_oc = f.r_oc.expect("split core");
    let v = p.c6 / r_oc.powi(6);
    let target = 2.0 * f.delta_eit;
    assert!((v - target).abs() < 0.25 * target, "V(R_oC)={v}, 2δ_EIT={target}");
}

#[test]
fn red_profile_has_core_barrier_and_outer_peak_with_enhanced_loss() {
    let p = locked(2.0, 2.5, 100.0).with_omega1(units::khz(450.0));
    let profile = interaction_profile(&p, &feature_grid(&p, 240)).unwrap();
    let f = extract_features(&profile).unwrap();
    assert_eq!(
        f.sign_pattern(),
        vec![(Feature::Core, -1), (Feature::InnerPeak, 1), (Feature::OuterPeak, -1)]
    );
    let a = analytic_radii(&p);
    let r_op = f.r_op.unwrap();
    assert!((r_op / a.r_op.unwrap() - 1.0).abs() < 0.25);
    // Loss peaks over the outer peak and stays flat across the inner one.
    let peak = profile
        .loss
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| profile.r[i])
        .unwrap();
    assert!((peak / r_op - 1.0).abs() < 0.1, "loss peak at {peak}, outer peak at {r_op}");
    let at = |r: f64| {
        let i = profile.r.iter().position(|&x| x >= r).unwrap();
        profile.loss[i]
    };
    let r_ip = f.r_ip.unwrap();
    assert!((at(r_ip) / at(0.8 * r_ip) - 1.0).abs() < 0.2);
}

#[test]
fn detuning_sign_mirrors_the_profile_with_c6() {
    // (Δ, C₆) → (−Δ, −C₆) maps ρ to ρ* and U to −U exactly.
    let p = locked(3.0, 2.5, 100.0).with_omega1(units::khz(300.0));
    let mut q = p.clone().with_delta(-p.delta);
    q.c6 = -p.c6;
    let grid = feature_grid(&p, 60);
    assert_eq!(grid, feature_grid(&q, 60));
    let a = interaction_profile(&p, &grid).unwrap();
    let b = interaction_profile(&q, &grid).unwrap();
    for (x, y) in a.u.iter().zip(&b.u) {
        assert!((x + y).abs() <= 1e-9 * x.abs().max(1e-6));
    }
    for (x, y) in a.loss.iter().zip(&b.loss) {
        assert!((x - y).abs() <= 1e-9 * x.abs());
    }
    let fa = extract_features(&a).unwrap();
    let fb = extract_features(&b).unwrap();
    let flipped: Vec<_> = fa.sign_pattern().into_iter().map(|(f, s)| (f, -s)).collect();
    assert_eq!(flipped, fb.sign_pattern());
}

#[test]
fn outer_peak_is_set_by_detuning_not_noise() {
    let opts = CalibrationOptions::default();
    let u_op = |noise: f64, delta: f64| {
        let p = locked(delta, 2.5, noise);
        let c = calibrate_omega1(&p, hundred_hz(), &opts).unwrap();
        extract_features(&c.profile).unwrap().u_op.unwrap()
    };
    let base = u_op(100.0, 3.0);
    let noisier = u_op(200.0, 3.0);
    assert!((noisier / base - 1.0).abs() < 0.2, "{base} vs {noisier}");
    let detuned = u_op(100.0, 6.0);
    assert!((detuned / base - 1.0).abs() > 0.2, "{base} vs {detuned}");
}

#[test]
fn calibration_hits_the_loss_target() {
    let p = locked(10.0, 1.0, 10.0);
    let opts = CalibrationOptions::default();
    let c = calibrate_omega1(&p, hundred_hz(), &opts).unwrap();
    assert!((c.gamma_max / hundred_hz() - 1.0).abs() < 0.01);
    let again = interaction_profile(&p.clone().with_omega1(c.omega1), &opts.resolve_grid(&p)).unwrap();
    assert_eq!(again.max_loss(), c.gamma_max);
}

#[test]
fn calibration_rejects_unreachable_targets() {
    let p = locked(10.0, 1.0, 10.0);
    let opts = CalibrationOptions::default();
    for target in [0.0, units::per_second(1e-3), units::per_second(1e7)] {
        match calibrate_omega1(&p, target, &opts) {
            Err(Error::CalibrationOutOfRange { loss_lower, loss_upper, .. }) => {
                assert!(loss_lower < loss_upper)
            }
            other => panic!("expected out-of-range error, got {other:?}"),
        }
    }
}

#[test]
fn maximum_loss_grows_with_the_lower_drive() {
    let p = locked(10.0, 1.0, 10.0);
    let grid = feature_grid(&p, 80);
    let mut last = 0.0;
    for k in 0..12 {
        let omega1 = units::mhz(0.1 * 20f64.powf(k as f64 / 11.0));
        let g = interaction_profile(&p.clone().with_omega1(omega1), &grid).unwrap().max_loss();
        assert!(g > last);
        last = g;
    }
}

#[test]
fn single_value_sweep_matches_direct_evaluation() {
    let template = locked(10.0, 1.0, 1.0);
    let options = SweepOptions {
        gamma_target: Some(hundred_hz()),
        ..SweepOptions::default()
    };
    let rows = sweep(&template, SweepAxis::GammaMultiple, &[10.0], &options);
    let direct = sweep_point(&template.clone().with_equal_noise(10.0), &options).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].outcome.as_ref().unwrap(), &direct);
}

#[test]
fn sweep_records_row_failures() {
    let template = locked(-10.0, 1.0, 100.0);
    let options = SweepOptions {
        gamma_target: Some(hundred_hz()),
        calibration: CalibrationOptions::default().with_points(60),
    };
    let rows = sweep(&template, SweepAxis::Omega2Ratio, &[1.0, 2.5], &options);
    assert!(rows[0].outcome.is_ok());
    assert!(matches!(rows[1].outcome, Err(Error::CalibrationOutOfRange { .. })));
}

#[test]
fn outer_peak_formula_matches_numeric_position() {
    let p = locked(3.0, 2.5, 100.0);
    let c = calibrate_omega1(&p, hundred_hz(), &CalibrationOptions::default()).unwrap();
    let f = extract_features(&c.profile).unwrap();
    let r_op = outer_peak_radius_analytic(&p.with_omega1(c.omega1)).unwrap();
    assert!((f.r_op.unwrap() / r_op - 1.0).abs() < 0.25);
}
