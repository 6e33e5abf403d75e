//! Features of an interaction profile: soft-core, inner and outer peaks,
//! well and split-core radii; their closed-form estimates; calibration of
//! Ω₁ to a loss budget and one-parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DressingParams;
use crate::scalar::{lit, Real};
use crate::steady::{interaction_profile, log_grid, InteractionProfile};
use crate::units;

/// Extrema smaller than this fraction of max|U| are treated as noise.
pub const PROMINENCE_FRACTION: f64 = 0.01;

/// Numerically extracted profile features.
///
/// Strengths are in rad/μs and radii in μm. `None` marks an absent feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet<T> {
    /// U at the innermost grid point.
    pub u_c: T,
    /// Edge of the soft-core: the innermost radius where U departs from U_c
    /// by half of |U_c|. For a core that decays this is the half-value
    /// radius; a core that rises into a same-sign inner peak is measured on
    /// the way up, where its plateau ends.
    pub r_c: Option<T>,
    pub u_ip: Option<T>,
    pub r_ip: Option<T>,
    pub u_op: Option<T>,
    pub r_op: Option<T>,
    /// Depth of the attractive well (≤ 0).
    pub u_well: Option<T>,
    /// Position of the well minimum.
    pub r_well: Option<T>,
    /// Inner radius of a core split by the inner peak (equal to `r_c`).
    pub r_ic: Option<T>,
    /// Outer half-value radius of the split core's outer part.
    pub r_oc: Option<T>,
    /// Ω₂²/(4|Δ|).
    pub delta_eit: T,
    /// (Ω₁/Ω₂)².
    pub p_e: T,
}

impl<T: Real> FeatureSet<T> {
    /// Signs of core and classified extrema, ordered by radius.
    pub fn sign_pattern(&self) -> Vec<(Feature, i8)> {
        let mut items: Vec<(T, Feature, T)> = vec![(T::zero(), Feature::Core, self.u_c)];
        let extra = [
            (self.r_ip, Feature::InnerPeak, self.u_ip),
            (self.r_op, Feature::OuterPeak, self.u_op),
            (self.r_well, Feature::Well, self.u_well),
        ];
        for (r, f, u) in extra {
            if let (Some(r), Some(u)) = (r, u) {
                items.push((r, f, u));
            }
        }
        items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        items.into_iter().map(|(_, f, u)| (f, sign(u))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feature {
    Core,
    InnerPeak,
    OuterPeak,
    Well,
}

fn sign<T: Real>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

/// Soft-core radius from P_e²V²(R_c) = (Ω₁Ω₂/2Δ)² + γ₁² + γ₂².
pub fn softcore_radius_analytic<T: Real>(params: &DressingParams<T>) -> Result<T> {
    let drive = params.omega1 * params.omega2 / (lit::<T>(2.0) * params.delta);
    let width2 = drive * drive + params.gamma1 * params.gamma1 + params.gamma2 * params.gamma2;
    if !(width2 > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "omega1",
            reason: "soft-core condition has zero bandwidth".into(),
        });
    }
    Ok(radius_for(params.c6 * params.rydberg_admixture(), width2.sqrt()))
}

/// Inner-peak radius from
/// V²(R_iP) = Δ² + (γ₂+γ_p+γ_r)Ω₂²/(4γ_r) + (γ₂+γ_p+γ_r)²/4.
///
/// Returns zero in the γ_r → 0 limit.
pub fn inner_peak_radius_analytic<T: Real>(params: &DressingParams<T>) -> T {
    if params.gamma_r == T::zero() {
        return T::zero();
    }
    let s = params.gamma2 + params.gamma_p + params.gamma_r;
    let four = lit::<T>(4.0);
    let v2 = params.delta * params.delta
        + s * params.omega2 * params.omega2 / (four * params.gamma_r)
        + s * s / four;
    radius_for(params.c6, v2.sqrt())
}

/// Outer-peak radius from V(R_oP) = 2ΔΩ₂²/(Ω₂²+γ_p²−4Δ²).
///
/// Present only for Ω₂ > 2|Δ| with Δ > 0 or Ω₂ < 2|Δ| with Δ < 0 (for
/// C₆ > 0; both detuning signs swap for C₆ < 0), and when the required shift
/// has the sign of C₆.
pub fn outer_peak_radius_analytic<T: Real>(params: &DressingParams<T>) -> Option<T> {
    let two_abs = lit::<T>(2.0) * params.delta.abs();
    let aligned = params.delta * params.c6;
    let regime = (params.omega2 > two_abs && aligned > T::zero())
        || (params.omega2 < two_abs && aligned < T::zero());
    if !regime {
        return None;
    }
    let o2 = params.omega2 * params.omega2;
    let denom = o2 + params.gamma_p * params.gamma_p - lit::<T>(4.0) * params.delta * params.delta;
    if denom == T::zero() {
        return Some(T::zero());
    }
    let v = lit::<T>(2.0) * params.delta * o2 / denom;
    (v * params.c6 > T::zero()).then(|| radius_for(params.c6, v.abs()))
}

/// Outer radius of a split core from V(R_oC) = 2δ_EIT.
pub fn outer_core_radius_analytic<T: Real>(params: &DressingParams<T>) -> T {
    radius_for(params.c6, lit::<T>(2.0) * params.eit_bandwidth())
}

/// r with |C₆|/r⁶ = `v`.
fn radius_for<T: Real>(c6: T, v: T) -> T {
    (c6.abs() / v).powf(lit(1.0 / 6.0))
}

/// Closed-form radii bundled for comparison with [`FeatureSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRadii<T> {
    pub r_c: Option<T>,
    pub r_ip: T,
    pub r_op: Option<T>,
    pub r_oc: T,
}

pub fn analytic_radii<T: Real>(params: &DressingParams<T>) -> AnalyticRadii<T> {
    AnalyticRadii {
        r_c: softcore_radius_analytic(params).ok(),
        r_ip: inner_peak_radius_analytic(params),
        r_op: outer_peak_radius_analytic(params),
        r_oc: outer_core_radius_analytic(params),
    }
}

/// Log-spaced grid covering 0.2× the smallest to 3× the largest analytic
/// radius that applies to `params`.
pub fn feature_grid<T: Real>(params: &DressingParams<T>, points: usize) -> Vec<T> {
    let a = analytic_radii(params);
    let candidates = [a.r_c, Some(a.r_ip), a.r_op, Some(a.r_oc)];
    let (lo, hi) = candidates
        .into_iter()
        .flatten()
        .filter(|r| r.is_finite() && *r > T::zero())
        .fold((T::max_value().unwrap(), T::zero()), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let (lo, hi) = if hi > T::zero() { (lo, hi) } else { (T::one(), T::one()) };
    log_grid(lit::<T>(0.2) * lo, lit::<T>(3.0) * hi, points.max(2))
}

#[derive(Debug, Clone, Copy)]
struct Extremum<T> {
    index: usize,
    r: T,
    u: T,
    /// +1 for a maximum, −1 for a minimum.
    kind: i8,
}

/// Classifies the extrema of a sampled profile.
///
/// The innermost maximum (for C₆ > 0; minimum otherwise) of the sign of C₆
/// is the inner peak. In the outer-peak regime the largest remaining extremum
/// of sign −sign(Δ) is the outer peak. The deepest remaining negative
/// minimum is the well. A remaining extremum beyond the inner peak with the
/// sign of U_c makes the core split, and `r_oc` is its outer half-value point.
pub fn extract_features<T: Real>(profile: &InteractionProfile<T>) -> Result<FeatureSet<T>> {
    let (r, u) = (&profile.r, &profile.u);
    if r.len() < 3 || r.len() != u.len() {
        return Err(Error::InvalidGrid("profile needs at least three aligned samples".into()));
    }
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteProfile(i));
    }
    let params = &profile.params;
    let u_c = u[0];
    let scale = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let threshold = lit::<T>(PROMINENCE_FRACTION) * scale;
    let extrema: Vec<Extremum<T>> = local_extrema(r, u)
        .into_iter()
        .filter(|e| prominence(u, e.index, e.kind) > threshold)
        .collect();

    let c6_sign = sign(params.c6);
    let ip = extrema
        .iter()
        .position(|e| e.kind == c6_sign && sign(e.u) == c6_sign);
    let analytic_op = outer_peak_radius_analytic(params);

    let mut ip = ip;
    if let (Some(k), Some(r_op)) = (ip, analytic_op) {
        // A lone candidate in the outer-peak regime may be the outer peak.
        let same: Vec<_> = extrema.iter().filter(|e| e.kind == c6_sign && sign(e.u) == c6_sign).collect();
        if same.len() == 1 {
            let r_ip = inner_peak_radius_analytic(params);
            let d_ip = (extrema[k].r / r_ip).ln().abs();
            let d_op = (extrema[k].r / r_op).ln().abs();
            if d_op < d_ip {
                ip = None;
            }
        }
    }
    let after = |e: &Extremum<T>| ip.is_none_or(|k| e.index > extrema[k].index);
    let mut used: Vec<usize> = ip.into_iter().collect();

    let mut op = None;
    if analytic_op.is_some() {
        let want = -sign(params.delta);
        op = extrema
            .iter()
            .enumerate()
            .filter(|(i, e)| !used.contains(i) && after(e) && sign(e.u) == want && e.kind == want)
            .max_by(|a, b| a.1.u.abs().partial_cmp(&b.1.u.abs()).unwrap())
            .map(|(i, _)| i);
        used.extend(op);
    }

    let well = extrema
        .iter()
        .enumerate()
        .filter(|(i, e)| !used.contains(i) && after(e) && e.kind == -1 && e.u < T::zero())
        .max_by(|a, b| a.1.u.abs().partial_cmp(&b.1.u.abs()).unwrap())
        .map(|(i, _)| i);

    // A core below the noise floor has no meaningful radius.
    let r_c = if u_c.abs() > threshold {
        plateau_edge(r, u, u_c)
    } else {
        None
    };

    let (mut r_ic, mut r_oc) = (None, None);
    if ip.is_some() && r_c.is_some() {
        let outer = extrema
            .iter()
            .enumerate()
            .filter(|(i, e)| !used.contains(i) && after(e) && sign(e.u) == sign(u_c) && e.kind == sign(u_c))
            .max_by(|a, b| a.1.u.abs().partial_cmp(&b.1.u.abs()).unwrap());
        if let Some((_, e)) = outer {
            r_ic = r_c;
            r_oc = half_value_crossing(r, u, e.index, e.u);
        }
    }

    let pick = |k: Option<usize>| k.map(|k| extrema[k]);
    let (ip, op, well) = (pick(ip), pick(op), pick(well));
    Ok(FeatureSet {
        u_c,
        r_c,
        u_ip: ip.map(|e| e.u),
        r_ip: ip.map(|e| e.r),
        u_op: op.map(|e| e.u),
        r_op: op.map(|e| e.r),
        u_well: well.map(|e| e.u),
        r_well: well.map(|e| e.r),
        r_ic,
        r_oc,
        delta_eit: params.eit_bandwidth(),
        p_e: params.rydberg_admixture(),
    })
}

/// Interior local extrema refined by a parabola through the three samples.
fn local_extrema<T: Real>(r: &[T], u: &[T]) -> Vec<Extremum<T>> {
    let mut out = Vec::new();
    for i in 1..u.len() - 1 {
        let kind = if u[i] >= u[i - 1] && u[i] > u[i + 1] {
            1
        } else if u[i] <= u[i - 1] && u[i] < u[i + 1] {
            -1
        } else {
            continue;
        };
        let (rv, uv) = parabola_vertex([r[i - 1], r[i], r[i + 1]], [u[i - 1], u[i], u[i + 1]]);
        out.push(Extremum {
            index: i,
            r: rv,
            u: uv,
            kind,
        });
    }
    out
}

fn parabola_vertex<T: Real>(x: [T; 3], y: [T; 3]) -> (T, T) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d12 - d01) / (x[2] - x[0]);
    if a == T::zero() {
        return (x[1], y[1]);
    }
    let b = d01 - a * (x[0] + x[1]);
    let xv = (-b / (lit::<T>(2.0) * a)).max(x[0]).min(x[2]);
    let yv = y[0] + (xv - x[0]) * d01 + a * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

/// Topographic prominence of sample `i` (a maximum for `kind` = 1).
fn prominence<T: Real>(u: &[T], i: usize, kind: i8) -> T {
    let s = if kind > 0 { T::one() } else { -T::one() };
    let h = s * u[i];
    let mut left = h;
    for j in (0..i).rev() {
        let v = s * u[j];
        if v > h {
            break;
        }
        left = left.min(v);
    }
    let mut right = h;
    for &x in &u[i + 1..] {
        let v = s * x;
        if v > h {
            break;
        }
        right = right.min(v);
    }
    // Beyond the grid the profile decays to zero.
    right = right.min(T::zero());
    h - left.max(right)
}

/// First r where |U/u_c − 1| reaches 1/2, linearly interpolated.
fn plateau_edge<T: Real>(r: &[T], u: &[T], u_c: T) -> Option<T> {
    let half = lit::<T>(0.5);
    let f = |k: usize| half - (u[k] / u_c - T::one()).abs();
    (0..r.len() - 1).find_map(|k| {
        let (a, b) = (f(k), f(k + 1));
        (a > T::zero() && b <= T::zero()).then(|| r[k] + (r[k + 1] - r[k]) * a / (a - b))
    })
}

/// First r beyond sample `from` where U/`reference` falls below 1/2,
/// linearly interpolated.
fn half_value_crossing<T: Real>(
    r: &[T],
    u: &[T],
    from: usize,
    reference: T,
) -> Option<T> {
    if reference == T::zero() {
        return None;
    }
    let half = lit::<T>(0.5);
    let f = |k: usize| u[k] / reference - half;
    (from..r.len() - 1).find_map(|k| {
        let (a, b) = (f(k), f(k + 1));
        (a >= T::zero() && b < T::zero()).then(|| r[k] + (r[k + 1] - r[k]) * a / (a - b))
    })
}

/// Settings for [`calibrate_omega1`].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions<T> {
    /// Allowed Ω₁ interval (rad/μs).
    pub omega1_range: (T, T),
    /// Relative tolerance on the maximum loss.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Radial grid; `None` derives one from the parameters.
    pub grid: Option<Vec<T>>,
    pub grid_points: usize,
}

impl<T: Real> Default for CalibrationOptions<T> {
    fn default() -> Self {
        Self {
            omega1_range: (units::mhz(0.1), units::mhz(2.0)),
            tolerance: 1e-3,
            max_iterations: 60,
            grid: None,
            grid_points: 200,
        }
    }
}

impl<T: Real> CalibrationOptions<T> {
    pub fn with_points(mut self, points: usize) -> Self {
        self.grid_points = points;
        self
    }

    pub fn with_range_mhz(mut self, lo: f64, hi: f64) -> Self {
        self.omega1_range = (units::mhz(lo), units::mhz(hi));
        self
    }

    /// Grid used for every profile of a calibration of `params`. It is fixed
    /// across Ω₁ so that Γ_max(Ω₁) stays smooth.
    pub fn resolve_grid(&self, params: &DressingParams<T>) -> Vec<T> {
        if let Some(g) = &self.grid {
            return g.clone();
        }
        let (lo, hi) = self.omega1_range;
        let a = feature_grid(&params.clone().with_omega1(lo), self.grid_points);
        let b = feature_grid(&params.clone().with_omega1(hi), self.grid_points);
        log_grid(a[0].min(b[0]), a[a.len() - 1].max(b[b.len() - 1]), self.grid_points.max(2))
    }
}

/// A calibrated profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration<T: Real> {
    pub omega1: T,
    pub gamma_max: T,
    pub profile: InteractionProfile<T>,
    pub iterations: usize,
}

/// Finds Ω₁ such that the maximum loss over the profile equals
/// `gamma_target` (1/μs).
///
/// Γ_max(Ω₁) is bracketed over the configured range and the root is found by
/// regula falsi (Illinois variant) on log Γ versus log Ω₁. Every evaluated
/// point is checked for monotonicity.
pub fn calibrate_omega1<T: Real>(
    params: &DressingParams<T>,
    gamma_target: T,
    options: &CalibrationOptions<T>,
) -> Result<Calibration<T>> {
    let grid = options.resolve_grid(params);
    let (lo, hi) = options.omega1_range;
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::InvalidParameter {
            name: "omega1_range",
            reason: "needs 0 < lower < upper".into(),
        });
    }
    let eval = |omega1: T| -> Result<(T, InteractionProfile<T>)> {
        let profile = interaction_profile(&params.clone().with_omega1(omega1), &grid)?;
        if let Some(f) = profile.failures.first() {
            return Err(f.error.clone());
        }
        Ok((profile.max_loss(), profile))
    };

    let mut seen: Vec<(T, T)> = Vec::new();
    let mut record = |omega1: T, gamma: T| -> Result<()> {
        seen.push((omega1, gamma));
        seen.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if seen.windows(2).any(|w| !(w[1].1 > w[0].1)) {
            return Err(Error::NonMonotoneLoss {
                omega1: omega1.to_f64_lossy(),
            });
        }
        Ok(())
    };

    let (g_lo, p_lo) = eval(lo)?;
    let (g_hi, p_hi) = eval(hi)?;
    record(lo, g_lo)?;
    record(hi, g_hi)?;
    let out_of_range = || Error::CalibrationOutOfRange {
        target: gamma_target.to_f64_lossy(),
        lower: lo.to_f64_lossy(),
        upper: hi.to_f64_lossy(),
        loss_lower: g_lo.to_f64_lossy(),
        loss_upper: g_hi.to_f64_lossy(),
    };
    if !(gamma_target > T::zero()) || gamma_target < g_lo || gamma_target > g_hi {
        return Err(out_of_range());
    }
    let tol = lit::<T>(options.tolerance);
    let close = |g: T| (g / gamma_target - T::one()).abs() <= tol;
    if close(g_lo) {
        return Ok(Calibration { omega1: lo, gamma_max: g_lo, profile: p_lo, iterations: 0 });
    }
    if close(g_hi) {
        return Ok(Calibration { omega1: hi, gamma_max: g_hi, profile: p_hi, iterations: 0 });
    }

    let ln_t = gamma_target.ln();
    let (mut xa, mut fa) = (lo.ln(), g_lo.ln() - ln_t);
    let (mut xb, mut fb) = (hi.ln(), g_hi.ln() - ln_t);
    let mut side = 0i8;
    let mut best: Option<Calibration<T>> = None;
    for iteration in 1..=options.max_iterations {
        let mut x = (xa * fb - xb * fa) / (fb - fa);
        if !(x > xa.min(xb) && x < xa.max(xb)) {
            x = lit::<T>(0.5) * (xa + xb);
        }
        let omega1 = x.exp();
        let (g, profile) = eval(omega1)?;
        record(omega1, g)?;
        let f = g.ln() - ln_t;
        let candidate = Calibration { omega1, gamma_max: g, profile, iterations: iteration };
        if close(g) {
            return Ok(candidate);
        }
        if best
            .as_ref()
            .is_none_or(|b| (b.gamma_max / gamma_target - T::one()).abs() > (g / gamma_target - T::one()).abs())
        {
            best = Some(candidate);
        }
        if f < T::zero() {
            xa = x;
            fa = f;
            if side == -1 {
                fb *= lit(0.5);
            }
            side = -1;
        } else {
            xb = x;
            fb = f;
            if side == 1 {
                fa *= lit(0.5);
            }
            side = 1;
        }
    }
    let best = best.expect("at least one iteration");
    Err(Error::SolverFailure(format!(
        "calibration did not reach {} relative tolerance in {} iterations (best Γ_max={:e})",
        options.tolerance,
        options.max_iterations,
        best.gamma_max.to_f64_lossy()
    )))
}

/// A DressingParams field (or combination) that a sweep varies.
///
/// Frequencies are quoted as ν/2π in MHz; `*Multiple` axes are in units of γ_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Omega1Mhz,
    Omega2Mhz,
    /// Ω₂/2|Δ|.
    Omega2Ratio,
    DeltaMhz,
    Gamma1Mhz,
    Gamma2Mhz,
    /// γ₁ = γ₂ = value·γ_p.
    GammaMultiple,
    /// γ₂ = value·γ_p.
    Gamma2Multiple,
    GammaRMhz,
    C6MhzUm6,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 10] = [
        SweepAxis::Omega1Mhz,
        SweepAxis::Omega2Mhz,
        SweepAxis::Omega2Ratio,
        SweepAxis::DeltaMhz,
        SweepAxis::Gamma1Mhz,
        SweepAxis::Gamma2Mhz,
        SweepAxis::GammaMultiple,
        SweepAxis::Gamma2Multiple,
        SweepAxis::GammaRMhz,
        SweepAxis::C6MhzUm6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Omega1Mhz => "omega1_mhz",
            SweepAxis::Omega2Mhz => "omega2_mhz",
            SweepAxis::Omega2Ratio => "omega2_ratio",
            SweepAxis::DeltaMhz => "delta_mhz",
            SweepAxis::Gamma1Mhz => "gamma1_mhz",
            SweepAxis::Gamma2Mhz => "gamma2_mhz",
            SweepAxis::GammaMultiple => "gamma_multiple",
            SweepAxis::Gamma2Multiple => "gamma2_multiple",
            SweepAxis::GammaRMhz => "gamma_r_mhz",
            SweepAxis::C6MhzUm6 => "c6_mhz_um6",
        }
    }

    /// Returns `template` with this axis set to `value`. Setting Δ keeps the
    /// ratio Ω₂/2|Δ| of the template.
    pub fn apply<T: Real>(self, template: &DressingParams<T>, value: f64) -> DressingParams<T> {
        let mut p = template.clone();
        match self {
            SweepAxis::Omega1Mhz => p.omega1 = units::mhz(value),
            SweepAxis::Omega2Mhz => p.omega2 = units::mhz(value),
            SweepAxis::Omega2Ratio => p = p.with_omega2_ratio(value),
            SweepAxis::DeltaMhz => {
                let ratio = p.omega2 / (lit::<T>(2.0) * p.delta.abs());
                p.delta = units::mhz(value);
                p.omega2 = ratio * lit::<T>(2.0) * p.delta.abs();
            }
            SweepAxis::Gamma1Mhz => p.gamma1 = units::mhz(value),
            SweepAxis::Gamma2Mhz => p.gamma2 = units::mhz(value),
            SweepAxis::GammaMultiple => p = p.with_equal_noise(value),
            SweepAxis::Gamma2Multiple => p.gamma2 = lit::<T>(value) * p.gamma_p,
            SweepAxis::GammaRMhz => p.gamma_r = units::mhz(value),
            SweepAxis::C6MhzUm6 => p.c6 = units::mhz(value),
        }
        p
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAxis(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions<T> {
    /// Loss budget (1/μs); `None` keeps Ω₁ from the template.
    pub gamma_target: Option<T>,
    pub calibration: CalibrationOptions<T>,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self {
            gamma_target: None,
            calibration: CalibrationOptions::default(),
        }
    }
}

/// Successful sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T: Real> {
    pub params: DressingParams<T>,
    pub gamma_max: T,
    pub features: FeatureSet<T>,
    pub profile: InteractionProfile<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T: Real> {
    pub value: f64,
    pub outcome: std::result::Result<SweepPoint<T>, Error>,
}

/// Evaluates one profile per axis value, calibrating Ω₁ when a loss target
/// is given. Rows are computed in parallel and returned in input order.
pub fn sweep<T: Real>(
    template: &DressingParams<T>,
    axis: SweepAxis,
    values: &[f64],
    options: &SweepOptions<T>,
) -> Vec<SweepRow<T>> {
    values
        .par_iter()
        .map(|&value| SweepRow {
            value,
            outcome: sweep_point(&axis.apply(template, value), options),
        })
        .collect()
}

/// One row of [`sweep`].
pub fn sweep_point<T: Real>(
    params: &DressingParams<T>,
    options: &SweepOptions<T>,
) -> Result<SweepPoint<T>> {
    params.validate()?;
    let (params, profile) = match options.gamma_target {
        Some(target) => {
            let c = calibrate_omega1(params, target, &options.calibration)?;
            (params.clone().with_omega1(c.omega1), c.profile)
        }
        None => {
            let grid = options.calibration.grid.clone().unwrap_or_else(|| {
                feature_grid(params, options.calibration.grid_points)
            });
            let profile = interaction_profile(params, &grid)?;
            if let Some(f) = profile.failures.first() {
                return Err(f.error.clone());
            }
            (params.clone(), profile)
        }
    };
    let features = extract_features(&profile)?;
    Ok(SweepPoint {
        gamma_max: profile.max_loss(),
        params,
        features,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(u: impl Fn(f64) -> f64) -> InteractionProfile<f64> {
        let r = log_grid(0.2, 40.0, 400);
        let v = r.iter().map(|&x| u(x)).collect();
        let loss = vec![0.0; r.len()];
        InteractionProfile::from_samples(DressingParams::strontium(100), r, v, loss)
    }

    #[test]
    fn pure_softcore() {
        let f = extract_features(&synthetic(|r| 3.0 / (1.0 + (r / 5.0).powi(6)))).unwrap();
        assert!((f.u_c - 3.0).abs() < 1e-6);
        assert!((f.r_c.unwrap() - 5.0).abs() < 0.02);
        assert!(f.u_ip.is_none() && f.u_op.is_none() && f.u_well.is_none() && f.r_oc.is_none());
    }

    #[test]
    fn core_rising_into_a_same_sign_peak_ends_on_the_way_up() {
        // Plateau of 1 up to about r = 4, then a peak of 3 at r = 7.
        let f = extract_features(&synthetic(|r| 1.0 / (1.0 + (r / 4.0).powi(6)) + 3.0 * (-(r - 7.0).powi(2) / 4.0).exp()))
            .unwrap();
        let r_c = f.r_c.unwrap();
        assert!(r_c < f.r_ip.unwrap());
        assert!(r_c > 3.0 && r_c < 6.0, "{r_c}");
    }

    #[test]
    fn softcore_with_gaussian() {
        let f = extract_features(&synthetic(|r| {
            -2.0 / (1.0 + (r / 4.0).powi(6)) + 1.5 * (-(r - 7.0).powi(2) / 2.0).exp()
        }))
        .unwrap();
        let r_ip = f.r_ip.unwrap();
        assert!((r_ip - 7.0).abs() < 0.05, "{r_ip}");
        assert!(f.u_ip.unwrap() > 0.0);
    }

    #[test]
    fn small_ripples_are_ignored() {
        let f = extract_features(&synthetic(|r| {
            1.0 / (1.0 + (r / 5.0).powi(6)) + 1e-3 * (-(r - 10.0).powi(2)).exp()
        }))
        .unwrap();
        assert!(f.u_ip.is_none());
    }

    #[test]
    fn nan_profiles_are_rejected() {
        let mut p = synthetic(|r| 1.0 / (1.0 + r.powi(6)));
        p.u[17] = f64::NAN;
        assert_eq!(extract_features(&p), Err(Error::NonFiniteProfile(17)));
    }

    #[test]
    fn vertex_of_exact_parabola() {
        let (x, y) = parabola_vertex([0.5, 1.7, 2.0], [0.5f64, 1.7, 2.0].map(|t| 3.0 - (t - 1.3) * (t - 1.3)));
        assert!((x - 1.3).abs() < 1e-12 && (y - 3.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_softcore_radius_reduces() {
        let p = DressingParams::<f64>::strontium(100).with_omega2_ratio(1.3);
        let expected = (2.0 * p.delta * p.c6 * p.omega1 / p.omega2.powi(3)).powf(1.0 / 6.0);
        assert!((softcore_radius_analytic(&p).unwrap() / expected - 1.0).abs() < 1e-12);
        let mut q = p.clone().with_omega1(0.0);
        q.gamma1 = 0.0;
        assert!(softcore_radius_analytic(&q).is_err());
    }

    #[test]
    fn radii_monotone_in_dephasing() {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for m in [0.0, 0.1, 1.0, 10.0, 100.0] {
            let p = DressingParams::<f64>::strontium(100).with_equal_noise(m);
            let now = (softcore_radius_analytic(&p).unwrap(), inner_peak_radius_analytic(&p));
            assert!(now.0 < last.0 && now.1 < last.1);
            last = now;
        }
    }

    #[test]
    fn inner_peak_collapses_without_rydberg_decay() {
        let mut p = DressingParams::<f64>::strontium(100);
        let mut last = f64::INFINITY;
        for g in [1e-3, 1e-6, 1e-9] {
            p.gamma_r = g;
            let r = inner_peak_radius_analytic(&p);
            assert!(r < last);
            last = r;
        }
        p.gamma_r = 0.0;
        assert_eq!(inner_peak_radius_analytic(&p), 0.0);
    }

    #[test]
    fn outer_peak_regimes() {
        let base = DressingParams::<f64>::strontium(100);
        assert!(outer_peak_radius_analytic(&base.clone().with_omega2_ratio(2.5)).is_some());
        assert!(outer_peak_radius_analytic(&base.clone().with_omega2_ratio(0.5)).is_none());
        let neg = base.clone().with_delta(-base.delta);
        assert!(outer_peak_radius_analytic(&neg.clone().with_omega2_ratio(0.5)).is_some());
        assert!(outer_peak_radius_analytic(&neg.with_omega2_ratio(2.5)).is_none());
        // Approaching Ω₂ = 2Δ with no decay the required shift diverges.
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-3, 1e-6, 1e-12] {
            let mut edge = base.clone().with_omega2_ratio(1.0 + eps);
            edge.gamma_p = 0.0;
            let r = outer_peak_radius_analytic(&edge).unwrap();
            assert!(r < last);
            last = r;
        }
        assert!(last < 0.2);
    }

    #[test]
    fn axis_names_round_trip() {
        for a in SweepAxis::ALL {
            assert_eq!(a.name().parse::<SweepAxis>().unwrap(), a);
        }
        assert!("omega3".parse::<SweepAxis>().is_err());
    }
}
