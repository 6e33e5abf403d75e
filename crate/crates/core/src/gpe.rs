//! Nonlocal Gross–Pitaevskii solver on periodic 1D and 2D grids.
//!
//! The equation integrated is
//! `i ∂ψ/∂t = [−(ħ/m)∇²/2 + g|ψ|² + W + V_ext] ψ` with `W = U ∗ |ψ|²`.
//! Frequencies and energies are angular (rad/μs, ħ = 1), so the only mass
//! dependence is through `ħ/m` in μm²/μs. Nothing else assumes μm or μs:
//! any consistent unit system (e.g. lengths in R_c) works.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::sampling::PolarGaussian;
use crate::scalar::{count, lit, Real};
use crate::steady::InteractionProfile;

/// Fraction of the table range over which the kernel is tapered to zero.
pub const TAPER_FRACTION: f64 = 0.1;
/// Largest |U| allowed at the start of the taper, relative to max |U|.
pub const TAIL_TOLERANCE: f64 = 0.05;
/// Allowed mismatch between the grid sum of U and its radial integral,
/// relative to the integral of |U|.
pub const QUADRATURE_TOLERANCE: f64 = 0.01;

/// Periodic grid with power-of-two points per axis, centred on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    points: Vec<usize>,
    extent: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn new(points: &[usize], extent: &[T]) -> Result<Self> {
        if points.is_empty() || points.len() > 2 || points.len() != extent.len() {
            return Err(Error::InvalidGrid(format!(
                "need 1 or 2 axes with matching extents, got {} points / {} extents",
                points.len(),
                extent.len()
            )));
        }
        for (&n, &l) in points.iter().zip(extent) {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("{n} points is not a power of two >= 4")));
            }
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::InvalidGrid(format!("extent {l} must be positive")));
            }
        }
        Ok(Self { points: points.to_vec(), extent: extent.to_vec() })
    }

    pub fn line(points: usize, extent: T) -> Result<Self> {
        Self::new(&[points], &[extent])
    }

    pub fn square(points: usize, extent: T) -> Result<Self> {
        Self::new(&[points, points], &[extent, extent])
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn extent(&self) -> &[T] {
        &self.extent
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> T {
        self.extent[axis] / count(self.points[axis])
    }

    pub fn cell_volume(&self) -> T {
        (0..self.dims()).fold(T::one(), |v, a| v * self.spacing(a))
    }

    pub fn volume(&self) -> T {
        self.extent.iter().fold(T::one(), |v, &l| v * l)
    }

    /// Half the shortest extent: the largest radius free of periodic images.
    pub fn half_extent(&self) -> T {
        let l = self.extent.iter().copied().fold(self.extent[0], |a, b| a.min(b));
        l / lit(2.0)
    }

    /// Coordinates `x_i = (i − n/2)·dx`, so the origin sits at index n/2.
    pub fn coords(&self, axis: usize) -> Vec<T> {
        let n = self.points[axis];
        let dx = self.spacing(axis);
        (0..n).map(|i| (count::<T>(i) - count::<T>(n / 2)) * dx).collect()
    }

    /// Wavenumbers in FFT order: 0, 1, …, n/2−1, −n/2, …, −1 times 2π/L.
    pub fn wavenumbers(&self, axis: usize) -> Vec<T> {
        let n = self.points[axis];
        let dk = T::two_pi() / self.extent[axis];
        (0..n)
            .map(|i| if i < n / 2 { count::<T>(i) * dk } else { -(count::<T>(n - i) * dk) })
            .collect()
    }

    /// |k|² at every point, in storage order.
    pub fn k_squared(&self) -> Vec<T> {
        self.map_points(|_| T::zero(), |ax| self.wavenumbers(ax), |acc, k| acc + k * k)
    }

    /// Distance of each grid offset from index 0 under the minimum-image rule.
    pub fn image_radius(&self) -> Vec<T> {
        let offsets = |ax: usize| {
            let n = self.points[ax];
            let dx = self.spacing(ax);
            (0..n)
                .map(|i| if i < n / 2 { count::<T>(i) * dx } else { count::<T>(n - i) * dx })
                .collect::<Vec<T>>()
        };
        let r2 = self.map_points(|_| T::zero(), offsets, |acc, d| acc + d * d);
        r2.into_iter().map(|v| v.sqrt()).collect()
    }

    /// Squared distance from `centre` of each grid point (not periodic).
    pub fn radius_squared_from(&self, centre: &[T]) -> Vec<T> {
        self.map_points(
            |_| T::zero(),
            |ax| self.coords(ax).into_iter().map(|x| x - centre[ax]).collect(),
            |acc, d| acc + d * d,
        )
    }

    /// Flat index of a multi-index; axis 0 varies fastest.
    pub fn index(&self, idx: &[usize]) -> usize {
        match idx.len() {
            1 => idx[0],
            _ => idx[1] * self.points[0] + idx[0],
        }
    }

    /// Builds a per-point value by folding an axis-wise table over the axes.
    fn map_points(
        &self,
        init: impl Fn(usize) -> T,
        table: impl Fn(usize) -> Vec<T>,
        fold: impl Fn(T, T) -> T,
    ) -> Vec<T> {
        let tabs: Vec<Vec<T>> = (0..self.dims()).map(&table).collect();
        let mut out = Vec::with_capacity(self.len());
        match self.dims() {
            1 => {
                for (i, &v) in tabs[0].iter().enumerate() {
                    out.push(fold(init(i), v));
                }
            }
            _ => {
                for (j, &vy) in tabs[1].iter().enumerate() {
                    for (i, &vx) in tabs[0].iter().enumerate() {
                        let flat = j * self.points[0] + i;
                        out.push(fold(fold(init(flat), vx), vy));
                    }
                }
            }
        }
        out
    }

    fn same_as(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "grid {:?} x {:?} vs {:?} x {:?}",
                self.points, self.extent, other.points, other.extent
            )));
        }
        Ok(())
    }
}

/// Cached FFT plans and scratch space for one grid shape.
pub struct Spectral<T: Real> {
    points: Vec<usize>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
    scratch: Vec<Complex<T>>,
    transpose: Vec<Complex<T>>,
}

impl<T: Real> std::fmt::Debug for Spectral<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("points", &self.points).finish()
    }
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let mut planner = FftPlanner::new();
        let points = grid.points().to_vec();
        let forward: Vec<_> = points.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse: Vec<_> = points.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        let scratch_len = forward
            .iter()
            .chain(&inverse)
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let transpose = if points.len() == 2 { vec![Complex::default(); grid.len()] } else { Vec::new() };
        Self { points, forward, inverse, scratch: vec![Complex::default(); scratch_len], transpose }
    }

    /// Unnormalised forward transform, in place.
    pub fn forward(&mut self, data: &mut [Complex<T>]) {
        self.run(data, true);
    }

    /// Inverse transform including the 1/N factor, in place.
    pub fn inverse(&mut self, data: &mut [Complex<T>]) {
        self.run(data, false);
        let scale = T::one() / count::<T>(data.len());
        for z in data.iter_mut() {
            *z = z.scale(scale);
        }
    }

    fn run(&mut self, data: &mut [Complex<T>], forward: bool) {
        let plans = if forward { &self.forward } else { &self.inverse };
        plans[0].process_with_scratch(data, &mut self.scratch);
        if self.points.len() == 2 {
            let (nx, ny) = (self.points[0], self.points[1]);
            transpose(data, &mut self.transpose, nx, ny);
            plans[1].process_with_scratch(&mut self.transpose, &mut self.scratch);
            transpose(&self.transpose, data, ny, nx);
        }
    }
}

fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(r * c, r * s)
}

/// `dst[i·rows + j] = src[j·cols + i]` for a `rows × cols` row-major source.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], cols: usize, rows: usize) {
    for j in 0..rows {
        for i in 0..cols {
            dst[i * rows + j] = src[j * cols + i];
        }
    }
}

/// Radial interaction table after tapering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialTable<T> {
    pub r: Vec<T>,
    pub u: Vec<T>,
    /// Radius where the taper begins.
    pub taper_start: T,
    /// Radius beyond which U is exactly zero.
    pub cutoff: T,
}

impl<T: Real> RadialTable<T> {
    fn window(&self, r: T) -> T {
        if r <= self.taper_start {
            T::one()
        } else if r >= self.cutoff {
            T::zero()
        } else {
            let s = (r - self.taper_start) / (self.cutoff - self.taper_start);
            let c = (T::frac_pi_2() * s).cos();
            c * c
        }
    }
}

/// Radially symmetric interaction embedded on a grid.
#[derive(Debug, Clone)]
pub struct Kernel<T: Real> {
    grid: Grid<T>,
    table: RadialTable<T>,
    interp: MonotoneCubic<T>,
    /// Real transform Σ U(x) e^{−ik·x} dV in FFT storage order.
    u_hat: Vec<T>,
    /// Radial quadrature of ∫U dV over the tapered kernel.
    integral: T,
    provenance: String,
}

impl<T: Real> Kernel<T> {
    /// Tapered U(r), zero beyond the cutoff and flat below the first sample.
    pub fn eval(&self, r: T) -> T {
        let r = r.abs();
        if r >= self.table.cutoff {
            return T::zero();
        }
        self.interp.eval(r) * self.table.window(r)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn table(&self) -> &RadialTable<T> {
        &self.table
    }

    pub fn fourier(&self) -> &[T] {
        &self.u_hat
    }

    /// Ũ(0) on the grid.
    pub fn fourier_zero(&self) -> T {
        self.u_hat[0]
    }

    /// ∫U dV by radial quadrature.
    pub fn integral(&self) -> T {
        self.integral
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Ũ along the first axis at the non-negative grid wavenumbers.
    pub fn fourier_axis(&self) -> (Vec<T>, Vec<T>) {
        let n = self.grid.points()[0];
        let k = self.grid.wavenumbers(0);
        ((0..n / 2).map(|i| k[i]).collect(), (0..n / 2).map(|i| self.u_hat[i]).collect())
    }

    /// Same kernel re-embedded on another grid.
    pub fn regrid(&self, grid: &Grid<T>) -> Result<Self> {
        tabulate_kernel(&self.table.r, &self.table.u, grid, &self.provenance)
    }
}

/// Radial integral of `f` in `dims` dimensions over [0, r_max] by Simpson's rule.
pub fn radial_integral<T: Real>(f: impl Fn(T) -> T, r_max: T, dims: usize, intervals: usize) -> T {
    let n = intervals + intervals % 2;
    let h = r_max / count(n);
    let measure = |r: T| match dims {
        1 => lit::<T>(2.0),
        2 => T::two_pi() * r,
        _ => lit::<T>(4.0) * T::pi() * r * r,
    };
    let mut acc = T::zero();
    for i in 0..=n {
        let r = count::<T>(i) * h;
        let w: T = if i == 0 || i == n { T::one() } else if i % 2 == 1 { lit(4.0) } else { lit(2.0) };
        acc += w * f(r) * measure(r);
    }
    acc * h / lit(3.0)
}

/// Embeds the radial table `(r, u)` on `grid` with the minimum-image distance.
///
/// The table is tapered to zero over the last tenth of the usable range,
/// which is the table range clipped to half the shortest grid extent.
pub fn tabulate_kernel<T: Real>(r: &[T], u: &[T], grid: &Grid<T>, provenance: &str) -> Result<Kernel<T>> {
    let interp = MonotoneCubic::new(r.to_vec(), u.to_vec())
        .ok_or_else(|| Error::InvalidGrid("kernel table needs >= 2 increasing finite radii".into()))?;
    let r_table = *r.last().expect("nonempty");
    let half = grid.half_extent();
    let cutoff = r_table.min(half);
    let taper_start = cutoff * lit(1.0 - TAPER_FRACTION);
    let u_max = u.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if u_max == T::zero() {
        return Err(Error::InvalidParameter { name: "kernel", reason: "identically zero".into() });
    }
    let tail = r
        .iter()
        .zip(u)
        .filter(|(&ri, _)| ri >= taper_start)
        .fold(interp.eval(taper_start).abs(), |m, (_, &ui)| m.max(ui.abs()))
        / u_max;
    if tail > lit(TAIL_TOLERANCE) {
        return Err(if r_table < half {
            Error::KernelTooShort { table: r_table.to_f64_lossy(), needed: half.to_f64_lossy() }
        } else {
            Error::KernelTailNotDecayed(tail.to_f64_lossy())
        });
    }
    let table = RadialTable { r: r.to_vec(), u: u.to_vec(), taper_start, cutoff };
    let mut kernel = Kernel {
        grid: grid.clone(),
        table,
        interp,
        u_hat: Vec::new(),
        integral: T::zero(),
        provenance: provenance.to_string(),
    };

    let dv = grid.cell_volume();
    let mut data: Vec<Complex<T>> =
        grid.image_radius().into_iter().map(|d| Complex::new(kernel.eval(d) * dv, T::zero())).collect();
    Spectral::new(grid).forward(&mut data);
    let scale = data.iter().fold(T::zero(), |m, z| m.max(z.re.abs()));
    let residue = data.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
    debug_assert!(residue <= scale * (lit::<T>(1e-8) + lit::<T>(64.0) * T::eps()), "kernel transform not real: {residue}");
    kernel.u_hat = data.into_iter().map(|z| z.re).collect();

    let intervals = 4000;
    kernel.integral = radial_integral(|x| kernel.eval(x), cutoff, grid.dims(), intervals);
    let abs_integral = radial_integral(|x| kernel.eval(x).abs(), cutoff, grid.dims(), intervals);
    let mismatch = (kernel.u_hat[0] - kernel.integral).abs() / abs_integral;
    if mismatch > lit(QUADRATURE_TOLERANCE) {
        return Err(Error::InvalidGrid(format!(
            "spacing too coarse for the kernel: grid sum and radial integral differ by {:.2}%",
            100.0 * mismatch.to_f64_lossy()
        )));
    }
    Ok(kernel)
}

/// Kernel from a steady-state interaction profile (U in rad/μs, r in μm).
pub fn kernel_from_profile<T: Real>(profile: &InteractionProfile<T>, grid: &Grid<T>) -> Result<Kernel<T>> {
    let p = &profile.params;
    let provenance = format!(
        "steady-state profile: omega1={:e} omega2={:e} delta={:e} gamma1={:e} gamma2={:e} c6={:e} lock={:?}",
        p.omega1.to_f64_lossy(),
        p.omega2.to_f64_lossy(),
        p.delta.to_f64_lossy(),
        p.gamma1.to_f64_lossy(),
        p.gamma2.to_f64_lossy(),
        p.c6.to_f64_lossy(),
        p.lock
    );
    tabulate_kernel(&profile.r, &profile.u, grid, &provenance)
}

/// Closed-form kernels used for synthetic runs and tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKernel {
    /// `u0 / (1 + (r/rc)^6)`.
    SoftCore { u0: f64, rc: f64 },
    /// `u0 exp(−r²/2w²)`.
    Gaussian { u0: f64, width: f64 },
    /// Soft core plus a Gaussian shell `a exp(−(r−r0)²/2w²)`.
    PlateauGaussian { u0: f64, rc: f64, amplitude: f64, centre: f64, width: f64 },
}

impl SyntheticKernel {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::SoftCore { u0, rc } => u0 / (1.0 + (r / rc).powi(6)),
            Self::Gaussian { u0, width } => u0 * (-0.5 * (r / width).powi(2)).exp(),
            Self::PlateauGaussian { u0, rc, amplitude, centre, width } => {
                u0 / (1.0 + (r / rc).powi(6)) + amplitude * (-0.5 * ((r - centre) / width).powi(2)).exp()
            }
        }
    }

    /// Radius by which the kernel has decayed to about 1e-3 of its scale.
    pub fn range(&self) -> f64 {
        match *self {
            Self::SoftCore { rc, .. } => 10.0 * rc,
            Self::Gaussian { width, .. } => 4.0 * width,
            Self::PlateauGaussian { rc, centre, width, .. } => (10.0 * rc).max(centre + 5.0 * width),
        }
    }

    pub fn describe(&self) -> String {
        format!("synthetic {self:?}")
    }

    /// Radial table over [0, r_max] with `samples` points.
    pub fn table<T: Real>(&self, r_max: f64, samples: usize) -> (Vec<T>, Vec<T>) {
        (0..samples)
            .map(|i| {
                let r = r_max * i as f64 / (samples - 1) as f64;
                (lit::<T>(r), lit::<T>(self.eval(r)))
            })
            .unzip()
    }

    /// Table reaching half the grid extent, embedded on `grid`.
    pub fn kernel<T: Real>(&self, grid: &Grid<T>) -> Result<Kernel<T>> {
        let r_max = grid.half_extent().to_f64_lossy();
        let samples = 4096;
        let (r, u) = self.table::<T>(r_max, samples);
        tabulate_kernel(&r, &u, grid, &self.describe())
    }
}

/// Trap potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapSpec {
    None,
    /// `V = Σ ω_a² x_a² / (2 ħ/m)` with one trap frequency per axis (rad/μs).
    Harmonic { omega: Vec<f64> },
    /// Flat disc of `radius` with walls of `height` (rad/μs), edges smoothed over `edge`.
    Disc { radius: f64, height: f64, edge: f64 },
}

/// External potential sampled on a grid (rad/μs).
#[derive(Debug, Clone)]
pub struct ExternalPotential<T> {
    pub spec: TrapSpec,
    pub values: Vec<T>,
}

impl<T: Real> ExternalPotential<T> {
    pub fn new(spec: TrapSpec, grid: &Grid<T>, hbar_over_m: T) -> Result<Self> {
        let values = match &spec {
            TrapSpec::None => vec![T::zero(); grid.len()],
            TrapSpec::Harmonic { omega } => {
                if omega.len() != grid.dims() {
                    return Err(Error::InvalidParameter {
                        name: "trap.omega",
                        reason: format!("need {} frequencies, got {}", grid.dims(), omega.len()),
                    });
                }
                let w: Vec<T> = omega.iter().map(|&o| lit(o)).collect();
                grid.map_points(
                    |_| T::zero(),
                    |ax| grid.coords(ax).into_iter().map(|x| w[ax] * w[ax] * x * x).collect(),
                    |acc, v| acc + v,
                )
                .into_iter()
                .map(|v| v / (lit::<T>(2.0) * hbar_over_m))
                .collect()
            }
            TrapSpec::Disc { radius, height, edge } => {
                if !(*edge > 0.0) || !(*radius > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "trap",
                        reason: "disc radius and edge must be positive".into(),
                    });
                }
                let centre = vec![T::zero(); grid.dims()];
                grid.radius_squared_from(&centre)
                    .into_iter()
                    .map(|r2| {
                        let r = r2.to_f64_lossy().sqrt();
                        lit(height * 0.5 * (1.0 + ((r - radius) / edge).tanh()))
                    })
                    .collect()
            }
        };
        Ok(Self { spec, values })
    }

    pub fn none(grid: &Grid<T>) -> Self {
        Self { spec: TrapSpec::None, values: vec![T::zero(); grid.len()] }
    }

    pub fn is_none(&self) -> bool {
        matches!(self.spec, TrapSpec::None)
    }
}

/// Condensate wave function normalised to `∫|ψ|² dV = N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T: Real> {
    pub grid: Grid<T>,
    pub psi: Vec<Complex<T>>,
    pub n_atoms: T,
}

impl<T: Real> Field<T> {
    /// Wraps amplitudes and rescales them to norm `n_atoms`.
    pub fn new(grid: Grid<T>, psi: Vec<Complex<T>>, n_atoms: T) -> Result<Self> {
        if psi.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} amplitudes for {} points", psi.len(), grid.len())));
        }
        let mut field = Self { grid, psi, n_atoms };
        if !(field.norm() > T::zero()) {
            return Err(Error::InvalidParameter { name: "psi", reason: "zero or non-finite norm".into() });
        }
        field.normalize();
        Ok(field)
    }

    pub fn uniform(grid: Grid<T>, n_atoms: T) -> Self {
        let psi = vec![Complex::new(T::one(), T::zero()); grid.len()];
        Self::new(grid, psi, n_atoms).expect("nonzero uniform field")
    }

    /// Gaussian |ψ|² ∝ exp(−|x−c|²/2s²) times the phase e^{i k·x}.
    pub fn gaussian(grid: Grid<T>, centre: &[T], sigma: T, momentum: &[T], n_atoms: T) -> Result<Self> {
        let r2 = grid.radius_squared_from(centre);
        let phase = grid.map_points(
            |_| T::zero(),
            |ax| grid.coords(ax).into_iter().map(|x| momentum.get(ax).copied().unwrap_or_else(T::zero) * x).collect(),
            |acc, v| acc + v,
        );
        let four: T = lit(4.0);
        let psi = r2
            .iter()
            .zip(&phase)
            .map(|(&d, &ph)| polar((-d / (four * sigma * sigma)).exp(), ph))
            .collect();
        Self::new(grid, psi, n_atoms)
    }

    /// Adds complex Gaussian noise of relative amplitude `fraction` and renormalises.
    pub fn with_noise(mut self, fraction: T, seed: u64) -> Self {
        let mut rng = PolarGaussian::seeded(seed);
        let scale = (self.norm() / self.grid.volume()).sqrt() * fraction;
        for z in self.psi.iter_mut() {
            let re: T = lit(rng.sample());
            let im: T = lit(rng.sample());
            *z += Complex::new(re, im).scale(scale);
        }
        self.normalize();
        self
    }

    pub fn norm(&self) -> T {
        self.psi.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) * self.grid.cell_volume()
    }

    pub fn normalize(&mut self) {
        let factor = (self.n_atoms / self.norm()).sqrt();
        for z in self.psi.iter_mut() {
            *z = z.scale(factor);
        }
    }

    pub fn density(&self) -> Vec<T> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.psi.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// ⟨x_axis⟩ weighted by |ψ|², not periodic-aware.
    pub fn center_of_mass(&self, axis: usize) -> T {
        let x = self.grid.coords(axis);
        let n0 = self.grid.points()[0];
        let mut num = T::zero();
        let mut den = T::zero();
        for (i, z) in self.psi.iter().enumerate() {
            let ia = if axis == 0 { i % n0 } else { i / n0 };
            let w = z.norm_sqr();
            num += w * x[ia];
            den += w;
        }
        num / den
    }

    /// Norm on either side of `split` along axis 0; a point exactly on the split counts half to each.
    pub fn partition(&self, split: T) -> (T, T) {
        let x = self.grid.coords(0);
        let n0 = self.grid.points()[0];
        let dv = self.grid.cell_volume();
        let mut left = T::zero();
        let mut right = T::zero();
        let half: T = lit(0.5);
        for (i, z) in self.psi.iter().enumerate() {
            let xi = x[i % n0];
            if xi < split {
                left += z.norm_sqr();
            } else if xi > split {
                right += z.norm_sqr();
            } else {
                left += z.norm_sqr() * half;
                right += z.norm_sqr() * half;
            }
        }
        (left * dv, right * dv)
    }

    /// Relative L² distance ‖ψ − φ‖ / ‖φ‖.
    pub fn relative_distance(&self, other: &Self) -> T {
        let mut d = T::zero();
        let mut n = T::zero();
        for (a, b) in self.psi.iter().zip(&other.psi) {
            d += (a - b).norm_sqr();
            n += b.norm_sqr();
        }
        (d / n).sqrt()
    }
}

/// HWHM of |sech(x/w)|² is w·arccosh(√2).
pub fn sech_width_from_hwhm<T: Real>(hwhm: T) -> T {
    hwhm / lit(std::f64::consts::SQRT_2.acosh())
}

/// One sech soliton of a two-soliton initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonSpec {
    /// Relative amplitude before normalisation.
    pub amplitude: f64,
    /// HWHM of the soliton density (μm).
    pub hwhm: f64,
    /// Velocity (μm/μs); the phase gradient is v/(ħ/m).
    pub velocity: f64,
    /// Phase offset (rad).
    pub phase: f64,
}

/// `A_r sech((x−x0)/w_r) e^{i(k_r x+φ_r)} + A_l sech((x+x0)/w_l) e^{i(k_l x+φ_l)}` on a 1D grid,
/// normalised to `n_atoms`.
pub fn initial_two_soliton<T: Real>(
    grid: &Grid<T>,
    right: SolitonSpec,
    left: SolitonSpec,
    x0: T,
    hbar_over_m: T,
    n_atoms: T,
) -> Result<Field<T>> {
    if grid.dims() != 1 {
        return Err(Error::InvalidGrid("two-soliton states are one-dimensional".into()));
    }
    let part = |s: &SolitonSpec, centre: T, x: T| -> Complex<T> {
        if s.amplitude == 0.0 {
            return Complex::default();
        }
        let w = sech_width_from_hwhm::<T>(lit(s.hwhm));
        let mag = lit::<T>(s.amplitude) / ((x - centre) / w).cosh();
        let k = lit::<T>(s.velocity) / hbar_over_m;
        polar(mag, k * x + lit(s.phase))
    };
    let psi = grid.coords(0).into_iter().map(|x| part(&right, x0, x) + part(&left, -x0, x)).collect();
    Field::new(grid.clone(), psi, n_atoms)
}

/// Contact coupling `4π (ħ/m) a` in rad/μs·μm³ for scattering length `a` (μm).
pub fn contact_coupling_3d<T: Real>(hbar_over_m: T, scattering_length: T) -> T {
    lit::<T>(4.0) * T::pi() * hbar_over_m * scattering_length
}

/// Quasi-2D coupling `g / (√(2π) l_z)` for a harmonic transverse ground state of length `l_z`.
pub fn contact_coupling_2d<T: Real>(g3d: T, l_z: T) -> T {
    g3d / ((T::two_pi()).sqrt() * l_z)
}

/// Coefficients of the GPE besides the kernel and trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpeParams<T> {
    /// ħ/m in length²/time.
    pub hbar_over_m: T,
    /// Contact coupling in frequency × length^dims.
    pub g: T,
}

/// W = U ∗ |ψ|² by spectral convolution.
pub fn mean_field<T: Real>(kernel: &Kernel<T>, field: &Field<T>) -> Result<Vec<T>> {
    kernel.grid.same_as(&field.grid)?;
    let mut spectral = Spectral::new(&field.grid);
    let mut buf = vec![Complex::default(); field.grid.len()];
    convolve(&mut spectral, &kernel.u_hat, &field.psi, &mut buf);
    Ok(buf.iter().map(|z| z.re).collect())
}

fn convolve<T: Real>(spectral: &mut Spectral<T>, u_hat: &[T], psi: &[Complex<T>], buf: &mut [Complex<T>]) {
    for (b, z) in buf.iter_mut().zip(psi) {
        *b = Complex::new(z.norm_sqr(), T::zero());
    }
    spectral.forward(buf);
    for (b, &u) in buf.iter_mut().zip(u_hat) {
        *b = b.scale(u);
    }
    spectral.inverse(buf);
}

/// Energy functional and its parts (rad/μs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables<T> {
    pub norm: T,
    pub kinetic: T,
    pub contact: T,
    pub nonlocal: T,
    pub external: T,
    pub total: T,
}

/// Azimuthally binned structure factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFactor<T> {
    pub k: Vec<T>,
    pub s: Vec<T>,
}

impl<T: Real> StructureFactor<T> {
    /// Local maxima of S above `fraction` of the global maximum, sorted by
    /// height, each refined by a parabola through its neighbours.
    pub fn rings(&self, fraction: f64) -> Vec<(T, T)> {
        let n = self.s.len();
        let max = self.s.iter().skip(1).fold(T::zero(), |m, &v| m.max(v));
        let mut rings = Vec::new();
        for i in 2..n.saturating_sub(1) {
            let (a, b, c) = (self.s[i - 1], self.s[i], self.s[i + 1]);
            if b > a && b >= c && b > max * lit(fraction) {
                let den = a - lit::<T>(2.0) * b + c;
                let shift = if den != T::zero() { (a - c) / (lit::<T>(2.0) * den) } else { T::zero() };
                let dk = self.k[i + 1] - self.k[i];
                rings.push((self.k[i] + shift * dk, b));
            }
        }
        rings.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal));
        rings
    }
}

/// Density fluctuation spectrum |FFT(|ψ|² − ⟨|ψ|²⟩)|² binned in |k| shells of width 2π/L.
pub fn structure_factor<T: Real>(field: &Field<T>) -> StructureFactor<T> {
    let grid = &field.grid;
    let rho = field.density();
    let mean = rho.iter().fold(T::zero(), |s, &v| s + v) / count(rho.len());
    let mut buf: Vec<Complex<T>> = rho.iter().map(|&v| Complex::new(v - mean, T::zero())).collect();
    Spectral::new(grid).forward(&mut buf);
    let dk = (0..grid.dims())
        .map(|a| T::two_pi() / grid.extent()[a])
        .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.max(v))))
        .expect("at least one axis");
    let nbins = grid.points().iter().copied().min().unwrap_or(0) / 2;
    let mut sum = vec![T::zero(); nbins];
    let mut hits = vec![0usize; nbins];
    let scale = T::one() / count::<T>(grid.len());
    for (k2, z) in grid.k_squared().into_iter().zip(&buf) {
        let bin = (k2.sqrt() / dk + lit(0.5)).floor().to_usize().unwrap_or(usize::MAX);
        if bin < nbins {
            sum[bin] += z.norm_sqr() * scale;
            hits[bin] += 1;
        }
    }
    let k = (0..nbins).map(|i| count::<T>(i) * dk).collect();
    let s = sum.iter().zip(&hits).map(|(&s, &h)| if h > 0 { s / count(h) } else { T::zero() }).collect();
    StructureFactor { k, s }
}

/// Settings for imaginary-time relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryOptions<T> {
    pub dt: T,
    pub max_steps: usize,
    pub renormalize_every: usize,
    /// Convergence threshold on |ΔE/E| per step.
    pub tolerance: T,
}

impl<T: Real> ImaginaryOptions<T> {
    pub fn new(dt: T, max_steps: usize) -> Self {
        Self { dt, max_steps, renormalize_every: 1, tolerance: lit(1e-9) }
    }
}

/// Result of imaginary-time relaxation.
#[derive(Debug, Clone)]
pub struct GroundState<T: Real> {
    pub field: Field<T>,
    pub energy: T,
    pub steps: usize,
    pub converged: bool,
    /// Energy after each renormalisation.
    pub energies: Vec<T>,
    /// Largest relative energy increase between renormalisations.
    pub worst_increase: T,
}

impl<T: Real> GroundState<T> {
    /// Energy never rose between renormalisations beyond rounding.
    pub fn monotone(&self) -> bool {
        self.worst_increase <= lit(1e-10)
    }
}

/// Reusable propagator for one grid, kernel and trap.
#[derive(Debug)]
pub struct Gpe<T: Real> {
    grid: Grid<T>,
    params: GpeParams<T>,
    kernel: Option<Kernel<T>>,
    external: ExternalPotential<T>,
    k2: Vec<T>,
    spectral: Spectral<T>,
    buf: Vec<Complex<T>>,
    potential: Vec<T>,
}

impl<T: Real> Gpe<T> {
    pub fn new(
        grid: Grid<T>,
        params: GpeParams<T>,
        kernel: Option<Kernel<T>>,
        external: Option<ExternalPotential<T>>,
    ) -> Result<Self> {
        if !(params.hbar_over_m > T::zero()) {
            return Err(Error::InvalidParameter { name: "hbar_over_m", reason: "must be positive".into() });
        }
        if let Some(k) = &kernel {
            k.grid.same_as(&grid)?;
        }
        let external = external.unwrap_or_else(|| ExternalPotential::none(&grid));
        if external.values.len() != grid.len() || external.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch("external potential does not match the grid".into()));
        }
        let spectral = Spectral::new(&grid);
        Ok(Self {
            k2: grid.k_squared(),
            buf: vec![Complex::default(); grid.len()],
            potential: vec![T::zero(); grid.len()],
            grid,
            params,
            kernel,
            external,
            spectral,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn params(&self) -> &GpeParams<T> {
        &self.params
    }

    pub fn kernel(&self) -> Option<&Kernel<T>> {
        self.kernel.as_ref()
    }

    pub fn external(&self) -> &ExternalPotential<T> {
        &self.external
    }

    /// Largest dt allowed by the accuracy bounds for `field`.
    pub fn max_dt(&mut self, field: &Field<T>) -> T {
        let dx_min = (0..self.grid.dims()).map(|a| self.grid.spacing(a)).fold(T::max_value().unwrap(), |m, v| m.min(v));
        let kinetic = dx_min * dx_min / (T::pi() * self.params.hbar_over_m);
        self.update_potential(&field.psi);
        let vmax = self.potential.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if vmax > T::zero() {
            kinetic.min(lit::<T>(0.1) / vmax)
        } else {
            kinetic
        }
    }

    fn check_dt(&mut self, field: &Field<T>, dt: T) -> Result<()> {
        let bound = self.max_dt(field);
        if !(dt.abs() < bound) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("|dt| = {:e} exceeds the accuracy bound {:e}", dt.abs().to_f64_lossy(), bound.to_f64_lossy()),
            });
        }
        Ok(())
    }

    /// g|ψ|² + W + V_ext into `self.potential`.
    fn update_potential(&mut self, psi: &[Complex<T>]) {
        let g = self.params.g;
        if let Some(kernel) = &self.kernel {
            convolve(&mut self.spectral, &kernel.u_hat, psi, &mut self.buf);
            for (((p, b), z), v) in self.potential.iter_mut().zip(&self.buf).zip(psi).zip(&self.external.values) {
                *p = b.re + g * z.norm_sqr() + *v;
            }
        } else {
            for ((p, z), v) in self.potential.iter_mut().zip(psi).zip(&self.external.values) {
                *p = g * z.norm_sqr() + *v;
            }
        }
    }

    /// Multiplies ψ̂ by exp(−i (ħ/m) k² τ / 2), in reciprocal space.
    fn kinetic_phase(&self, psi_hat: &mut [Complex<T>], tau: T) {
        let c = self.params.hbar_over_m * tau / lit(2.0);
        for (z, &k2) in psi_hat.iter_mut().zip(&self.k2) {
            *z *= polar(T::one(), -(c * k2));
        }
    }

    fn kinetic_decay(&self, psi_hat: &mut [Complex<T>], tau: T) {
        let c = self.params.hbar_over_m * tau / lit(2.0);
        for (z, &k2) in psi_hat.iter_mut().zip(&self.k2) {
            *z = z.scale((-(c * k2)).exp());
        }
    }

    /// `steps` Strang steps of size `dt`; adjacent half kinetic steps are fused.
    fn advance_real(&mut self, psi: &mut [Complex<T>], dt: T, steps: usize, first_step: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let half = dt / lit(2.0);
        self.spectral.forward(psi);
        self.kinetic_phase(psi, half);
        self.spectral.inverse(psi);
        for s in 0..steps {
            self.update_potential(psi);
            for (z, &p) in psi.iter_mut().zip(&self.potential) {
                *z *= polar(T::one(), -(p * dt));
            }
            self.spectral.forward(psi);
            self.kinetic_phase(psi, if s + 1 == steps { half } else { dt });
            self.spectral.inverse(psi);
            if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Diverged { step: first_step + s + 1 });
            }
        }
        Ok(())
    }

    /// Real-time evolution. `observe(step, field)` runs at step 0 and every
    /// `observe_every` steps, and at the final step.
    pub fn evolve_real(
        &mut self,
        field: &mut Field<T>,
        dt: T,
        steps: usize,
        observe_every: usize,
        mut observe: impl FnMut(usize, &Field<T>, &mut Self),
    ) -> Result<()> {
        self.grid.same_as(&field.grid)?;
        self.check_dt(field, dt)?;
        let every = observe_every.max(1);
        observe(0, field, self);
        let mut done = 0;
        while done < steps {
            let block = every.min(steps - done);
            let mut psi = std::mem::take(&mut field.psi);
            let result = self.advance_real(&mut psi, dt, block, done);
            field.psi = psi;
            result?;
            done += block;
            observe(done, field, self);
        }
        Ok(())
    }

    /// Imaginary-time relaxation with renormalisation to N.
    pub fn evolve_imaginary(&mut self, field: Field<T>, opts: &ImaginaryOptions<T>) -> Result<GroundState<T>> {
        self.grid.same_as(&field.grid)?;
        self.check_dt(&field, opts.dt)?;
        let mut field = field;
        let every = opts.renormalize_every.max(1);
        let half = opts.dt / lit(2.0);
        let mut energy = self.observables(&field).total;
        let mut energies = vec![energy];
        let mut worst = T::zero();
        let mut steps = 0;
        let mut converged = false;
        while steps < opts.max_steps {
            let block = every.min(opts.max_steps - steps);
            let psi = &mut field.psi;
            for _ in 0..block {
                self.spectral.forward(psi);
                self.kinetic_decay(psi, half);
                self.spectral.inverse(psi);
                self.update_potential(psi);
                for (z, &p) in psi.iter_mut().zip(&self.potential) {
                    *z = z.scale((-(p * opts.dt)).exp());
                }
                self.spectral.forward(psi);
                self.kinetic_decay(psi, half);
                self.spectral.inverse(psi);
            }
            steps += block;
            if !field.is_finite() {
                return Err(Error::Diverged { step: steps });
            }
            field.normalize();
            let e = self.observables(&field).total;
            let scale = e.abs().max(T::eps());
            worst = worst.max((e - energy) / scale);
            let change = (e - energy).abs() / scale / count(block);
            energy = e;
            energies.push(e);
            if change < opts.tolerance {
                converged = true;
                break;
            }
        }
        Ok(GroundState { field, energy, steps, converged, energies, worst_increase: worst })
    }

    /// Energy functional terms for `field`.
    pub fn observables(&mut self, field: &Field<T>) -> Observables<T> {
        let dv = self.grid.cell_volume();
        let n = count::<T>(self.grid.len());
        self.buf.copy_from_slice(&field.psi);
        self.spectral.forward(&mut self.buf);
        let kinetic = self
            .buf
            .iter()
            .zip(&self.k2)
            .fold(T::zero(), |s, (z, &k2)| s + z.norm_sqr() * k2)
            * self.params.hbar_over_m
            / lit(2.0)
            * dv
            / n;
        let half: T = lit(0.5);
        let contact = field.psi.iter().fold(T::zero(), |s, z| s + z.norm_sqr() * z.norm_sqr()) * self.params.g * half * dv;
        let external =
            field.psi.iter().zip(&self.external.values).fold(T::zero(), |s, (z, &v)| s + z.norm_sqr() * v) * dv;
        let nonlocal = if let Some(kernel) = &self.kernel {
            convolve(&mut self.spectral, &kernel.u_hat, &field.psi, &mut self.buf);
            field.psi.iter().zip(&self.buf).fold(T::zero(), |s, (z, w)| s + z.norm_sqr() * w.re) * half * dv
        } else {
            T::zero()
        };
        Observables {
            norm: field.norm(),
            kinetic,
            contact,
            nonlocal,
            external,
            total: kinetic + contact + nonlocal + external,
        }
    }

    /// g|ψ|² + W + V_ext for `field`.
    pub fn potential(&mut self, field: &Field<T>) -> Vec<T> {
        self.update_potential(&field.psi);
        self.potential.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_in_fft_order() {
        let g = Grid::<f64>::line(8, 8.0).unwrap();
        let k = g.wavenumbers(0);
        let dk = std::f64::consts::TAU / 8.0;
        assert_eq!(k[1], dk);
        assert_eq!(k[4], -4.0 * dk);
        assert_eq!(k[7], -dk);
        assert_eq!(g.coords(0)[4], 0.0);
    }

    #[test]
    fn spectral_round_trip_2d() {
        let g = Grid::<f64>::new(&[8, 16], &[1.0, 2.0]).unwrap();
        let mut s = Spectral::new(&g);
        let orig: Vec<Complex<f64>> = (0..g.len()).map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut d = orig.clone();
        s.forward(&mut d);
        s.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_plane_wave_lands_on_its_bin() {
        let g = Grid::<f64>::new(&[16, 8], &[16.0, 8.0]).unwrap();
        let kx = g.wavenumbers(0)[3];
        let ky = g.wavenumbers(1)[6];
        let (x, y) = (g.coords(0), g.coords(1));
        let mut d: Vec<Complex<f64>> = Vec::new();
        for yj in &y {
            for xi in &x {
                d.push(polar(1.0, kx * xi + ky * yj));
            }
        }
        Spectral::new(&g).forward(&mut d);
        let peak = (0..d.len()).max_by(|&a, &b| d[a].norm().partial_cmp(&d[b].norm()).unwrap()).unwrap();
        assert_eq!(peak, g.index(&[3, 6]));
        assert!((d[peak].norm() - 128.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::<f64>::line(100, 1.0).is_err());
        assert!(Grid::<f64>::line(64, 0.0).is_err());
        assert!(Grid::<f64>::new(&[8, 8, 8], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn sech_width_conversion() {
        let w = sech_width_from_hwhm(1.0_f64);
        let half = (1.0 / w).cosh().powi(-2);
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn harmonic_potential_values() {
        let g = Grid::<f64>::line(64, 16.0).unwrap();
        let v = ExternalPotential::new(TrapSpec::Harmonic { omega: vec![2.0] }, &g, 0.5).unwrap();
        let x = g.coords(0);
        assert!((v.values[10] - 4.0 * x[10] * x[10]).abs() < 1e-12);
    }
}
