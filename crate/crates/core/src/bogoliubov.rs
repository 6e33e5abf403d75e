//! Bogoliubov spectrum of a uniform condensate with a nonlocal kernel.
//!
//! `ω_b²(k) = ε(k) [ε(k) + 2ρg + 2ρŨ(k)]` with `ε = (ħ/m) k²/2`. Where
//! ω_b² < 0 the mode grows at `β = √(−ω_b²)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe::{radial_integral, GpeParams, Kernel};
use crate::scalar::{count, lit, Real};

/// Radial Fourier transform of an isotropic function in `dims` dimensions:
/// 2∫f cos(kr) dr, 2π∫f J₀(kr) r dr or 4π∫f sin(kr)/(kr) r² dr.
pub fn radial_fourier<T: Real>(f: impl Fn(T) -> T, r_max: T, dims: usize, k: T, intervals: usize) -> T {
    if k == T::zero() {
        return radial_integral(f, r_max, dims, intervals);
    }
    let kf = k.to_f64_lossy();
    let basis = |r: T| -> T {
        let x = kf * r.to_f64_lossy();
        let v = match dims {
            1 => x.cos(),
            2 => libm::j0(x),
            _ => {
                if x.abs() < 1e-8 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
        };
        lit(v)
    };
    radial_integral(|r| f(r) * basis(r), r_max, dims, intervals)
}

/// Ũ(k) of a tabulated kernel by radial quadrature in `dims` dimensions.
pub fn kernel_fourier<T: Real>(kernel: &Kernel<T>, dims: usize, k: &[T]) -> Result<Vec<T>> {
    if !(1..=3).contains(&dims) {
        return Err(Error::InvalidParameter { name: "dims", reason: format!("{dims} is not 1, 2 or 3") });
    }
    let r_max = kernel.table().cutoff;
    let k_max = k.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    // At least 16 nodes per oscillation and a floor for smooth kernels.
    let oscillations = (k_max * r_max / T::two_pi()).to_f64_lossy().ceil() as usize;
    let intervals = (16 * oscillations).max(4000);
    Ok(k.iter().map(|&q| radial_fourier(|r| kernel.eval(r), r_max, dims, q.abs(), intervals)).collect())
}

/// One maximal band of unstable wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotonBand<T> {
    /// Wavenumber of the largest growth rate (1/length).
    pub k_roton: T,
    /// Growth rate β at `k_roton` (rad/time).
    pub beta: T,
    /// 2π / k_roton.
    pub lattice_a: T,
    /// First and last unstable grid wavenumbers.
    pub k_lower: T,
    pub k_upper: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovSpectrum<T> {
    pub k: Vec<T>,
    pub u_tilde: Vec<T>,
    pub omega_squared: Vec<T>,
    /// Principal square root of ω_b²: real where stable, i·β where unstable.
    pub omega: Vec<Complex<T>>,
    pub rho: T,
    pub params: GpeParams<T>,
    pub rotons: Vec<RotonBand<T>>,
}

impl<T: Real> BogoliubovSpectrum<T> {
    /// Growth rate at each k (zero where stable).
    pub fn growth(&self) -> Vec<T> {
        self.omega.iter().map(|w| w.im).collect()
    }

    /// Total width of all unstable bands.
    pub fn unstable_width(&self) -> T {
        self.rotons.iter().fold(T::zero(), |s, b| s + (b.k_upper - b.k_lower))
    }

    /// Number of unstable grid points.
    pub fn unstable_points(&self) -> usize {
        self.omega_squared.iter().filter(|&&w| w < T::zero()).count()
    }
}

/// ω_b²(k) at one wavenumber.
pub fn omega_squared<T: Real>(k: T, u_tilde: T, rho: T, params: &GpeParams<T>) -> T {
    let eps = params.hbar_over_m * k * k / lit(2.0);
    let two: T = lit(2.0);
    eps * (eps + two * rho * params.g + two * rho * u_tilde)
}

/// Spectrum on the wavenumbers `k` given Ũ sampled at the same points.
pub fn spectrum<T: Real>(k: &[T], u_tilde: &[T], rho: T, params: GpeParams<T>) -> Result<BogoliubovSpectrum<T>> {
    if !(rho > T::zero()) {
        return Err(Error::InvalidParameter { name: "rho", reason: "background density must be positive".into() });
    }
    if k.len() != u_tilde.len() {
        return Err(Error::GridMismatch(format!("{} wavenumbers, {} transform values", k.len(), u_tilde.len())));
    }
    if k.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("k grid must be strictly increasing".into()));
    }
    let omega_squared: Vec<T> = k.iter().zip(u_tilde).map(|(&q, &u)| omega_squared(q, u, rho, &params)).collect();
    let omega = omega_squared
        .iter()
        .map(|&w2| if w2 >= T::zero() { Complex::new(w2.sqrt(), T::zero()) } else { Complex::new(T::zero(), (-w2).sqrt()) })
        .collect();
    let mut spec = BogoliubovSpectrum {
        k: k.to_vec(),
        u_tilde: u_tilde.to_vec(),
        omega_squared,
        omega,
        rho,
        params,
        rotons: Vec::new(),
    };
    spec.rotons = roton_instabilities(&spec);
    Ok(spec)
}

/// Spectrum with Ũ from radial quadrature of `kernel` in `dims` dimensions.
pub fn kernel_spectrum<T: Real>(
    kernel: &Kernel<T>,
    dims: usize,
    k: &[T],
    rho: T,
    params: GpeParams<T>,
) -> Result<BogoliubovSpectrum<T>> {
    let u = kernel_fourier(kernel, dims, k)?;
    spectrum(k, &u, rho, params)
}

/// Evenly spaced wavenumbers on (0, k_max].
pub fn k_grid<T: Real>(k_max: T, points: usize) -> Vec<T> {
    (1..=points).map(|i| k_max * count::<T>(i) / count::<T>(points)).collect()
}

/// Maximal unstable intervals, strongest first. The β maximum in each band
/// is refined by a parabola through the neighbouring samples.
pub fn roton_instabilities<T: Real>(spec: &BogoliubovSpectrum<T>) -> Vec<RotonBand<T>> {
    let n = spec.k.len();
    let beta: Vec<T> = spec.omega_squared.iter().map(|&w| if w < T::zero() { (-w).sqrt() } else { T::zero() }).collect();
    let mut bands = Vec::new();
    let mut i = 0;
    while i < n {
        if spec.omega_squared[i] >= T::zero() || spec.k[i] == T::zero() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && spec.omega_squared[i] < T::zero() {
            i += 1;
        }
        let end = i - 1;
        let peak = (start..=end).fold(start, |best, j| if beta[j] > beta[best] { j } else { best });
        let (mut k_roton, mut b) = (spec.k[peak], beta[peak]);
        if peak > 0 && peak + 1 < n {
            let (k0, k1, k2) = (spec.k[peak - 1], spec.k[peak], spec.k[peak + 1]);
            let (b0, b1, b2) = (beta[peak - 1], beta[peak], beta[peak + 1]);
            if let Some((kv, bv)) = parabola_vertex(k0, k1, k2, b0, b1, b2) {
                if kv > k0 && kv < k2 && bv >= b1 {
                    k_roton = kv;
                    b = bv;
                }
            }
        }
        bands.push(RotonBand {
            k_roton,
            beta: b,
            lattice_a: T::two_pi() / k_roton,
            k_lower: spec.k[start],
            k_upper: spec.k[end],
        });
    }
    bands.sort_by(|a, b| b.beta.partial_cmp(&a.beta).unwrap_or(std::cmp::Ordering::Equal));
    bands
}

fn parabola_vertex<T: Real>(x0: T, x1: T, x2: T, y0: T, y1: T, y2: T) -> Option<(T, T)> {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < T::zero()) {
        return None;
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (lit::<T>(2.0) * a);
    let yv = y1 + d01 * (xv - x1) + a * (xv - x0) * (xv - x1);
    Some((xv, yv))
}

/// Phonon speed `√((ħ/m) ρ (g + Ũ(0)))` from the small-k limit of ω_b.
pub fn sound_speed<T: Real>(u_tilde_zero: T, rho: T, params: &GpeParams<T>) -> Option<T> {
    let c2 = params.hbar_over_m * rho * (params.g + u_tilde_zero);
    (c2 >= T::zero()).then(|| c2.sqrt())
}
