//! Unit conventions and physical constants.
//!
//! Internally ħ = 1, lengths are in μm and times in μs. Every frequency or
//! rate is stored as an angular quantity in rad/μs, so an energy `E` and the
//! frequency `E/ħ` share one number. Inputs quoted as ν/2π (MHz, kHz) go
//! through the helpers below. Loss rates are plain rates in 1/μs.

use std::f64::consts::PI;

use crate::scalar::{lit, Real};

/// CODATA 2018 reduced Planck constant (J s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// CODATA 2018 atomic mass constant (kg).
pub const ATOMIC_MASS_UNIT_SI: f64 = 1.660_539_066_60e-27;
/// CODATA 2018 Bohr radius (m).
pub const BOHR_RADIUS_SI: f64 = 5.291_772_109_03e-11;
/// Mass of ⁸⁸Sr in atomic mass units (AME 2020).
pub const SR88_MASS_U: f64 = 87.905_612_5;

/// ħ/m for ⁸⁸Sr in μm²/μs.
pub const SR88_HBAR_OVER_M: f64 = HBAR_SI / (SR88_MASS_U * ATOMIC_MASS_UNIT_SI) * 1e12 / 1e6;
/// ⁸⁸Sr s-wave scattering length, 96 a₀, in μm.
pub const SR88_SCATTERING_LENGTH_UM: f64 = 96.0 * BOHR_RADIUS_SI * 1e6;

/// Decay rate of the Sr 5s5p ³P₁ intermediate state, γ_p/2π = 7.6 kHz, in MHz.
pub const SR_GAMMA_P_MHZ: f64 = 7.6e-3;
/// Default Rydberg decay γ_r/2π = 0.5 kHz (n = 100 order of magnitude), in MHz.
pub const DEFAULT_GAMMA_R_MHZ: f64 = 0.5e-3;

/// C₆/2π anchors in MHz·μm⁶ for n³S₁ strontium states: (n, C₆/2π).
pub const C6_ANCHORS_MHZ_UM6: [(u32, f64); 2] = [(24, 0.12), (100, 7.3e7)];

/// ν/2π in MHz → rad/μs.
#[inline]
pub fn mhz<T: Real>(nu: f64) -> T {
    lit(2.0 * PI * nu)
}

/// ν/2π in kHz → rad/μs.
#[inline]
pub fn khz<T: Real>(nu: f64) -> T {
    mhz(nu * 1e-3)
}

/// rad/μs → ν/2π in MHz.
#[inline]
pub fn to_mhz<T: Real>(omega: T) -> f64 {
    omega.to_f64_lossy() / (2.0 * PI)
}

/// rad/μs → ν/2π in kHz.
#[inline]
pub fn to_khz<T: Real>(omega: T) -> f64 {
    to_mhz(omega) * 1e3
}

/// Rate in 1/s (Hz) → 1/μs.
#[inline]
pub fn per_second<T: Real>(rate_hz: f64) -> T {
    lit(rate_hz * 1e-6)
}

/// Rate in 1/μs → 1/s.
#[inline]
pub fn to_per_second<T: Real>(rate: T) -> f64 {
    rate.to_f64_lossy() * 1e6
}

/// Density in cm⁻³ → μm⁻³.
#[inline]
pub fn per_cm3<T: Real>(density: f64) -> T {
    lit(density * 1e-12)
}

/// Van-der-Waals coefficient C₆/2π in MHz·μm⁶ for principal number `n`.
///
/// Log-log interpolation between the two anchors (and power-law extrapolation
/// outside them). This is a convenience default; configs can override C₆.
pub fn c6_mhz_um6(n: u32) -> f64 {
    let (n0, c0) = C6_ANCHORS_MHZ_UM6[0];
    let (n1, c1) = C6_ANCHORS_MHZ_UM6[1];
    let exponent = (c1 / c0).ln() / (n1 as f64 / n0 as f64).ln();
    c1 * (n as f64 / n1 as f64).powf(exponent)
}
