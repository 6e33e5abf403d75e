//! Monte-Carlo energetics of 3D Gaussian solitons and bi-soliton molecules.
//!
//! Energies are in rad/μs (ħ = 1). A cloud of N atoms with per-axis density
//! HWHM σ_h has standard deviation s = σ_h/√(2 ln 2) and is treated as the
//! Gaussian wave packet |ψ|² ∝ exp(−r²/2s²), which fixes
//! `E_k = 3N(ħ/m)/(8s²)` and `E_contact = gN²/(16π^{3/2}s³)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{calibrate_omega1, extract_features, CalibrationOptions, FeatureSet};
use crate::interp::MonotoneCubic;
use crate::model::DressingParams;
use crate::sampling::PolarGaussian;
use crate::scalar::{count, lit, Real};
use crate::steady::InteractionProfile;

/// Isotropic 3D radial interaction U(r) for pair sums.
///
/// Below the first table radius U is held at the first value; beyond the
/// last radius it is zero.
#[derive(Debug, Clone)]
pub struct RadialKernel<T> {
    interp: MonotoneCubic<T>,
    cutoff: T,
    label: String,
}

impl<T: Real> RadialKernel<T> {
    pub fn new(r: Vec<T>, u: Vec<T>, label: impl Into<String>) -> Result<Self> {
        let cutoff = *r.last().ok_or_else(|| Error::InvalidGrid("empty kernel table".into()))?;
        let interp = MonotoneCubic::new(r, u)
            .ok_or_else(|| Error::InvalidGrid("kernel table needs increasing finite radii".into()))?;
        Ok(Self { interp, cutoff, label: label.into() })
    }

    pub fn from_profile(profile: &InteractionProfile<T>) -> Result<Self> {
        if let Some(i) = profile.u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteProfile(i));
        }
        Self::new(profile.r.clone(), profile.u.clone(), "steady-state profile")
    }

    /// Tabulates `f` on `samples` evenly spaced radii over [0, r_max].
    pub fn from_fn(f: impl Fn(f64) -> f64, r_max: f64, samples: usize, label: impl Into<String>) -> Result<Self> {
        let (r, u) = (0..samples)
            .map(|i| {
                let r = r_max * i as f64 / (samples - 1) as f64;
                (lit::<T>(r), lit::<T>(f(r)))
            })
            .unzip();
        Self::new(r, u, label)
    }

    pub fn eval(&self, r: T) -> T {
        if r > self.cutoff {
            T::zero()
        } else {
            self.interp.eval(r)
        }
    }

    pub fn cutoff(&self) -> T {
        self.cutoff
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same shape with every value multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let r = self.interp.knots().to_vec();
        let u = self.interp.values().iter().map(|&v| v * factor).collect();
        Self::new(r, u, self.label.clone()).expect("rescaled table stays valid")
    }
}

/// Gaussian cloud: `n_atoms` atoms, per-axis density HWHM `sigma`, centred at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudSpec<T> {
    pub n_atoms: usize,
    pub sigma: T,
    pub center: [T; 3],
}

impl<T: Real> CloudSpec<T> {
    pub fn new(n_atoms: usize, sigma: T) -> Self {
        Self { n_atoms, sigma, center: [T::zero(); 3] }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) {
            return Err(Error::InvalidParameter { name: "sigma", reason: "HWHM must be positive".into() });
        }
        Ok(())
    }

    pub fn std_dev(&self) -> T {
        hwhm_to_std(self.sigma)
    }
}

/// Standard deviation of a Gaussian with the given HWHM.
pub fn hwhm_to_std<T: Real>(hwhm: T) -> T {
    hwhm / lit::<T>((2.0 * std::f64::consts::LN_2).sqrt())
}

/// Atom positions of `spec`, drawn from stream `stream` of `seed`.
pub fn sample_gaussian_cloud<T: Real>(spec: &CloudSpec<T>, seed: u64, stream: u64) -> Vec<[T; 3]> {
    let mut rng = PolarGaussian::stream(seed, stream);
    let s = spec.std_dev().to_f64_lossy();
    (0..spec.n_atoms)
        .map(|_| {
            let mut p = [T::zero(); 3];
            for (a, c) in p.iter_mut().zip(&spec.center) {
                *a = *c + lit(rng.sample() * s);
            }
            p
        })
        .collect()
}

fn distance<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Σ_{i<j} U(r_ij) by direct summation.
pub fn dressing_energy<T: Real>(positions: &[[T; 3]], kernel: &RadialKernel<T>) -> T {
    let mut e = T::zero();
    for (i, a) in positions.iter().enumerate() {
        for b in &positions[i + 1..] {
            e += kernel.eval(distance(a, b));
        }
    }
    e
}

/// Σ_i Σ_j U(|a_i − b_j|) between two sets.
pub fn cross_energy<T: Real>(a: &[[T; 3]], b: &[[T; 3]], kernel: &RadialKernel<T>) -> T {
    let mut e = T::zero();
    for p in a {
        for q in b {
            e += kernel.eval(distance(p, q));
        }
    }
    e
}

/// Σ_{i<j} U(r_ij) using cells of side equal to the kernel cutoff; only
/// neighbouring cells are visited.
pub fn dressing_energy_cells<T: Real>(positions: &[[T; 3]], kernel: &RadialKernel<T>) -> T {
    use std::collections::HashMap;
    if positions.len() < 2 {
        return T::zero();
    }
    let h = kernel.cutoff();
    let cell = |p: &[T; 3]| -> [i64; 3] {
        let f = |x: T| (x / h).floor().to_i64().unwrap_or(0);
        [f(p[0]), f(p[1]), f(p[2])]
    };
    let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        cells.entry(cell(p)).or_default().push(i);
    }
    let mut e = T::zero();
    for (i, p) in positions.iter().enumerate() {
        let c = cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        for &j in list {
                            if j > i {
                                e += kernel.eval(distance(p, &positions[j]));
                            }
                        }
                    }
                }
            }
        }
    }
    e
}

/// Quantum kinetic energy of a Gaussian packet of `n` atoms with HWHM `sigma`.
pub fn kinetic_energy<T: Real>(n: usize, sigma: T, hbar_over_m: T) -> T {
    let s = hwhm_to_std(sigma);
    count::<T>(n) * lit::<T>(3.0) * hbar_over_m / (lit::<T>(8.0) * s * s)
}

/// (g/2)∫|ψ|⁴ for one Gaussian cloud of `n` atoms.
pub fn contact_energy<T: Real>(n: usize, sigma: T, g: T) -> T {
    let s = hwhm_to_std(sigma);
    let nn = count::<T>(n);
    g * nn * nn / (lit::<T>(16.0) * T::pi().powf(lit(1.5)) * s * s * s)
}

/// g∫ρ₁ρ₂ for two equal-width clouds a distance `d` apart.
pub fn contact_cross_energy<T: Real>(n1: usize, n2: usize, sigma: T, d: T, g: T) -> T {
    let s = hwhm_to_std(sigma);
    let four: T = lit(4.0);
    let norm = (four * T::pi() * s * s).powf(lit(1.5));
    g * count::<T>(n1) * count::<T>(n2) * (-(d * d) / (four * s * s)).exp() / norm
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub mean: T,
    pub stderr: T,
}

fn estimate<T: Real>(samples: &[T]) -> Estimate<T> {
    let n = count::<T>(samples.len());
    let mean = samples.iter().fold(T::zero(), |s, &v| s + v) / n;
    if samples.len() < 2 {
        return Estimate { mean, stderr: T::zero() };
    }
    let var = samples.iter().fold(T::zero(), |s, &v| s + (v - mean) * (v - mean)) / (n - T::one());
    Estimate { mean, stderr: (var / n).sqrt() }
}

/// Energy model shared by the landscapes.
#[derive(Debug, Clone)]
pub struct EnergyModel<T> {
    pub kernel: RadialKernel<T>,
    pub hbar_over_m: T,
    /// 3D contact coupling (rad/μs·μm³).
    pub g: T,
    pub include_contact: bool,
}

impl<T: Real> EnergyModel<T> {
    fn contact(&self, n: usize, sigma: T) -> T {
        if self.include_contact {
            contact_energy(n, sigma, self.g)
        } else {
            T::zero()
        }
    }

    fn contact_cross(&self, n1: usize, n2: usize, sigma: T, d: T) -> T {
        if self.include_contact {
            contact_cross_energy(n1, n2, sigma, d, self.g)
        } else {
            T::zero()
        }
    }
}

/// One landscape point; `x` is σ for single solitons and D for molecules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRow<T> {
    pub x: T,
    pub kinetic: T,
    pub contact: T,
    pub dress: T,
    pub dress_stderr: T,
    pub total: T,
}

/// Total energy of one soliton of `n` atoms versus HWHM, averaged over `trials` clouds.
pub fn soliton_energy_landscape<T: Real>(
    model: &EnergyModel<T>,
    n: usize,
    sigmas: &[T],
    trials: usize,
    seed: u64,
) -> Result<Vec<LandscapeRow<T>>> {
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "need at least one trial".into() });
    }
    sigmas
        .iter()
        .map(|&sigma| {
            let spec = CloudSpec::new(n, sigma);
            spec.validate()?;
            let samples: Vec<T> = (0..trials)
                .into_par_iter()
                .map(|t| dressing_energy(&sample_gaussian_cloud(&spec, seed, t as u64), &model.kernel))
                .collect();
            let dress = estimate(&samples);
            let kinetic = kinetic_energy(n, sigma, model.hbar_over_m);
            let contact = model.contact(n, sigma);
            Ok(LandscapeRow {
                x: sigma,
                kinetic,
                contact,
                dress: dress.mean,
                dress_stderr: dress.stderr,
                total: kinetic + contact + dress.mean,
            })
        })
        .collect()
}

/// Molecule landscape with the inter-cloud part separated out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeLandscape<T> {
    pub rows: Vec<LandscapeRow<T>>,
    /// Energy of the two clouds at infinite separation.
    pub asymptote: T,
    pub n_total: usize,
    pub sigma: T,
}

/// Left cloud, right cloud and their intra-cloud energy.
type CloudPair<T> = (Vec<[T; 3]>, Vec<[T; 3]>, T);

/// Total energy of two clouds of `n_total/2` atoms at ±D/2 along x.
///
/// Each trial draws both clouds once and reuses them at every D, so the
/// intra-cloud sums are identical across rows and the D dependence is
/// free of sampling jitter between rows.
pub fn molecule_energy_landscape<T: Real>(
    model: &EnergyModel<T>,
    n_total: usize,
    sigma: T,
    distances: &[T],
    trials: usize,
    seed: u64,
) -> Result<MoleculeLandscape<T>> {
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "need at least one trial".into() });
    }
    let n1 = n_total / 2;
    let n2 = n_total - n1;
    let spec1 = CloudSpec::new(n1, sigma);
    let spec2 = CloudSpec::new(n2, sigma);
    spec1.validate()?;
    let clouds: Vec<CloudPair<T>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_gaussian_cloud(&spec1, seed, 2 * t as u64);
            let b = sample_gaussian_cloud(&spec2, seed, 2 * t as u64 + 1);
            let intra = dressing_energy(&a, &model.kernel) + dressing_energy(&b, &model.kernel);
            (a, b, intra)
        })
        .collect();
    let intra: Vec<T> = clouds.iter().map(|c| c.2).collect();
    let intra_mean = estimate(&intra).mean;
    let kinetic = kinetic_energy(n1, sigma, model.hbar_over_m) + kinetic_energy(n2, sigma, model.hbar_over_m);
    let self_contact = model.contact(n1, sigma) + model.contact(n2, sigma);
    let half: T = lit(0.5);
    let rows = distances
        .iter()
        .map(|&d| {
            let samples: Vec<T> = clouds
                .par_iter()
                .map(|(a, b, intra)| {
                    let shift = |p: &[T; 3], dx: T| [p[0] + dx, p[1], p[2]];
                    let left: Vec<[T; 3]> = a.iter().map(|p| shift(p, -d * half)).collect();
                    let right: Vec<[T; 3]> = b.iter().map(|p| shift(p, d * half)).collect();
                    *intra + cross_energy(&left, &right, &model.kernel)
                })
                .collect();
            let dress = estimate(&samples);
            let contact = self_contact + model.contact_cross(n1, n2, sigma, d);
            LandscapeRow {
                x: d,
                kinetic,
                contact,
                dress: dress.mean,
                dress_stderr: dress.stderr,
                total: kinetic + contact + dress.mean,
            }
        })
        .collect();
    Ok(MoleculeLandscape { rows, asymptote: kinetic + self_contact + intra_mean, n_total, sigma })
}

/// Index of the lowest row if it is strictly inside the scanned range.
pub fn interior_minimum<T: Real>(rows: &[LandscapeRow<T>]) -> Option<usize> {
    let (imin, _) = rows
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, T)>, (i, r)| match best {
            Some((_, e)) if e <= r.total => best,
            _ => Some((i, r.total)),
        })?;
    (imin > 0 && imin + 1 < rows.len()).then_some(imin)
}

/// Depth and half-depth half-width of the molecular well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolecularWell<T> {
    /// Separation of the minimum.
    pub d_min: T,
    /// Depth below the infinite-separation asymptote (positive).
    pub u_mol: T,
    /// Half width at half depth.
    pub sigma_osc: T,
}

/// Extracts the molecular well: the outermost local minimum that lies
/// significantly below the infinite-separation asymptote. With an
/// attractive core the global minimum is the fused cloud at D = 0, which
/// is not a molecule, so the search runs inward from large D.
pub fn molecular_well<T: Real>(land: &MoleculeLandscape<T>) -> Option<MolecularWell<T>> {
    let rows = &land.rows;
    let n = rows.len();
    if n < 3 {
        return None;
    }
    let floor = land.asymptote.abs() * lit(1e-9);
    let i = (1..n - 1).rev().find(|&i| {
        let r = &rows[i];
        let depth = land.asymptote - r.total;
        r.total < rows[i - 1].total
            && r.total <= rows[i + 1].total
            && depth > floor
            && depth > lit::<T>(3.0) * r.dress_stderr
    })?;
    let (d_min, e_min) = refine_minimum(&rows[i - 1], &rows[i], &rows[i + 1]);
    let depth = land.asymptote - e_min;
    let level = land.asymptote - depth / lit(2.0);
    let cross = |j: usize, k: usize| {
        let (a, b) = (&rows[j], &rows[k]);
        a.x + (level - a.total) * (b.x - a.x) / (b.total - a.total)
    };
    let left = (1..=i).rev().find(|&j| rows[j - 1].total >= level).map(|j| cross(j - 1, j))?;
    let right = (i..n - 1).find(|&j| rows[j + 1].total >= level).map(|j| cross(j, j + 1))?;
    Some(MolecularWell { d_min, u_mol: depth, sigma_osc: (right - left) / lit(2.0) })
}

/// Vertex of the parabola through three points bracketing a minimum.
fn refine_minimum<T: Real>(a: &LandscapeRow<T>, b: &LandscapeRow<T>, c: &LandscapeRow<T>) -> (T, T) {
    let d01 = (b.total - a.total) / (b.x - a.x);
    let d12 = (c.total - b.total) / (c.x - b.x);
    let curv = (d12 - d01) / (c.x - a.x);
    if !(curv > T::zero()) {
        return (b.x, b.total);
    }
    let slope = d01 - curv * (a.x + b.x);
    let x = -slope / (lit::<T>(2.0) * curv);
    if !(x > a.x && x < c.x) {
        return (b.x, b.total);
    }
    let e = b.total + d01 * (x - b.x) + curv * (x - a.x) * (x - b.x);
    (x, e.min(b.total))
}

/// Molecule oscillation frequency `√(U_mol (ħ/m) / (N σ_osc²))`.
pub fn molecule_frequency<T: Real>(u_mol: T, n: T, sigma_osc: T, hbar_over_m: T) -> T {
    (u_mol * hbar_over_m / (n * sigma_osc * sigma_osc)).sqrt()
}

/// Two oscillation periods, 2·(2π/ω).
pub fn two_periods<T: Real>(omega_mol: T) -> T {
    lit::<T>(2.0) * T::two_pi() / omega_mol
}

/// Self-consistent N with N·Γ·t₂(N) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NMax<T> {
    /// Continuous solution; `None` when Γ = 0 (unbounded).
    pub n: Option<T>,
    pub omega_mol: T,
    pub t2: T,
    pub u_mol: T,
    pub iterations: usize,
}

/// Largest molecule size surviving two oscillations with 37% probability.
///
/// The well depth measured at `n_ref` atoms is scaled as (N/n_ref)², the
/// scaling of the inter-cloud pair sum. Fixed-point iteration
/// N ← 1/(Γ t₂(N)) from `n_start`.
pub fn n_max_fixed_point<T: Real>(
    well: &MolecularWell<T>,
    n_ref: usize,
    hbar_over_m: T,
    gamma: T,
    n_start: T,
) -> Result<NMax<T>> {
    let n_ref_t = count::<T>(n_ref);
    let at = |n: T| {
        let u = well.u_mol * (n / n_ref_t) * (n / n_ref_t);
        let w = molecule_frequency(u, n, well.sigma_osc, hbar_over_m);
        (u, w, two_periods(w))
    };
    if gamma == T::zero() {
        let (u, w, t2) = at(n_start);
        return Ok(NMax { n: None, omega_mol: w, t2, u_mol: u, iterations: 0 });
    }
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter { name: "gamma", reason: "loss rate must be non-negative".into() });
    }
    let mut n = n_start.max(T::one());
    for it in 1..=50 {
        let (_, _, t2) = at(n);
        let next = T::one() / (gamma * t2);
        let done = ((next - n) / next).abs() < lit(1e-13);
        n = next;
        if done {
            let (u, w, t2) = at(n);
            return Ok(NMax { n: Some(n), omega_mol: w, t2, u_mol: u, iterations: it });
        }
    }
    Err(Error::SolverFailure("N_max fixed point did not converge in 50 iterations".into()))
}

/// Smallest N in [2, n_cap] whose single-soliton energy has an interior
/// minimum over `sigmas`, using the pair-averaged dressing energy of `base`.
///
/// `base` must be a soliton landscape computed at `n_base` atoms; its
/// dressing energies are rescaled by N(N−1)/(n_base(n_base−1)).
pub fn n_min<T: Real>(model: &EnergyModel<T>, base: &[LandscapeRow<T>], n_base: usize, n_cap: usize) -> Option<usize> {
    let pairs = |n: usize| count::<T>(n * (n - 1)) / lit(2.0);
    let bound = |n: usize| {
        let rows: Vec<LandscapeRow<T>> = base
            .iter()
            .map(|r| {
                let kinetic = kinetic_energy(n, r.x, model.hbar_over_m);
                let contact = model.contact(n, r.x);
                let dress = r.dress / pairs(n_base) * pairs(n);
                LandscapeRow { x: r.x, kinetic, contact, dress, dress_stderr: T::zero(), total: kinetic + contact + dress }
            })
            .collect();
        interior_minimum(&rows).is_some()
    };
    if !bound(n_cap) {
        return None;
    }
    let (mut lo, mut hi) = (2usize, n_cap);
    if bound(lo) {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bound(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Settings for a stability scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySettings {
    /// Soliton HWHM as a fraction of the inner core radius.
    pub sigma_fraction: f64,
    /// Atoms per single-soliton landscape.
    pub n_single: usize,
    /// Atoms per molecule landscape.
    pub n_molecule: usize,
    pub trials: usize,
    pub seed: u64,
    /// HWHM scan for N_min, as multiples of the inner core radius.
    pub sigma_scan: (f64, f64, usize),
    /// Separation scan, as multiples of the outermost feature radius.
    pub distance_scan: (f64, f64, usize),
    pub n_cap: usize,
    pub include_contact: bool,
    /// Scattering length (μm) for the contact term.
    pub scattering_length: f64,
}

impl Default for StabilitySettings {
    fn default() -> Self {
        Self {
            sigma_fraction: 0.2,
            n_single: 20,
            n_molecule: 40,
            trials: 100,
            seed: 1,
            sigma_scan: (0.02, 3.0, 40),
            distance_scan: (0.0, 2.0, 81),
            n_cap: 1_000_000,
            include_contact: true,
            scattering_length: 96.0 * 5.29177210903e-5,
        }
    }
}

/// One Γ row of the stability window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub gamma: f64,
    pub omega1: f64,
    pub r_ic: f64,
    pub sigma: f64,
    pub n_min: Option<usize>,
    /// Continuous N_max; `None` when unbounded.
    pub n_max: Option<f64>,
    /// Largest whole atom number within the budget.
    pub n_max_atoms: Option<u64>,
    pub omega_mol: f64,
    pub t2: f64,
    pub u_mol: f64,
    pub sigma_osc: f64,
    pub viable: bool,
    pub note: String,
}

impl StabilityRow {
    /// N_max·Γ·t₂, which equals 1 at a converged solution.
    pub fn budget(&self) -> Option<f64> {
        self.n_max.map(|n| n * self.gamma * self.t2)
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Inner core radius used to size the solitons.
pub fn inner_core_radius<T: Real>(features: &FeatureSet<T>) -> Option<T> {
    features.r_ic.or(features.r_c)
}

/// Loss-independent part of a stability analysis: both landscapes, N_min
/// and the molecular well of one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscapes<T: Real> {
    pub features: FeatureSet<T>,
    pub omega1: T,
    pub r_ic: T,
    pub sigma: T,
    pub single: Vec<LandscapeRow<T>>,
    pub molecule: MoleculeLandscape<T>,
    pub n_min: Option<usize>,
    pub well: Option<MolecularWell<T>>,
}

/// Computes both landscapes of `profile` with the scans of `settings`.
pub fn landscapes<T: Real>(
    profile: &InteractionProfile<T>,
    hbar_over_m: T,
    settings: &StabilitySettings,
) -> Result<Landscapes<T>> {
    let features = extract_features(profile)?;
    let r_ic = inner_core_radius(&features)
        .ok_or_else(|| Error::InvalidParameter { name: "profile", reason: "no soft core".into() })?;
    let sigma = r_ic * lit(settings.sigma_fraction);
    let outer = [features.r_well, features.r_op, features.r_ip, Some(r_ic)]
        .into_iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v));
    let g = lit::<T>(4.0) * T::pi() * hbar_over_m * lit(settings.scattering_length);
    let model = EnergyModel {
        kernel: RadialKernel::from_profile(profile)?,
        hbar_over_m,
        g,
        include_contact: settings.include_contact,
    };
    let (s_lo, s_hi, s_n) = settings.sigma_scan;
    let sigmas: Vec<T> = log_space(s_lo, s_hi, s_n).into_iter().map(|f| r_ic * lit(f)).collect();
    let single = soliton_energy_landscape(&model, settings.n_single, &sigmas, settings.trials, settings.seed)?;
    let n_min = n_min(&model, &single, settings.n_single, settings.n_cap);
    let (d_lo, d_hi, d_n) = settings.distance_scan;
    let ds: Vec<T> = lin_space(d_lo, d_hi, d_n).into_iter().map(|f| outer * lit(f)).collect();
    let molecule = molecule_energy_landscape(&model, settings.n_molecule, sigma, &ds, settings.trials, settings.seed)?;
    let well = molecular_well(&molecule);
    Ok(Landscapes { features, omega1: profile.params.omega1, r_ic, sigma, single, molecule, n_min, well })
}

/// Atom-number window of precomputed landscapes at loss `gamma` (1/μs).
pub fn budget_row<T: Real>(land: &Landscapes<T>, gamma: T, hbar_over_m: T, settings: &StabilitySettings) -> StabilityRow {
    let mut row = StabilityRow {
        gamma: gamma.to_f64_lossy(),
        omega1: land.omega1.to_f64_lossy(),
        r_ic: land.r_ic.to_f64_lossy(),
        sigma: land.sigma.to_f64_lossy(),
        n_min: land.n_min,
        n_max: None,
        n_max_atoms: None,
        omega_mol: f64::NAN,
        t2: f64::NAN,
        u_mol: f64::NAN,
        sigma_osc: f64::NAN,
        viable: false,
        note: String::new(),
    };
    let Some(well) = land.well else {
        row.note = "molecule landscape has no bound minimum".into();
        return row;
    };
    row.sigma_osc = well.sigma_osc.to_f64_lossy();
    let start = count::<T>(land.n_min.unwrap_or(settings.n_molecule));
    match n_max_fixed_point(&well, settings.n_molecule, hbar_over_m, gamma, start) {
        Ok(nm) => {
            row.n_max = nm.n.map(|v| v.to_f64_lossy());
            row.n_max_atoms = row.n_max.map(|v| v.floor() as u64);
            row.omega_mol = nm.omega_mol.to_f64_lossy();
            row.t2 = nm.t2.to_f64_lossy();
            row.u_mol = nm.u_mol.to_f64_lossy();
            row.viable = match (land.n_min, row.n_max) {
                (Some(lo), Some(_)) => row.n_max_atoms.is_some_and(|hi| lo as u64 <= hi),
                (Some(_), None) => true,
                _ => false,
            };
            if land.n_min.is_none() {
                row.note = format!("no bound single soliton up to N = {}", settings.n_cap);
            } else if row.n_max.is_none() {
                row.note = "no loss: N_max unbounded".into();
            }
        }
        Err(e) => row.note = e.to_string(),
    }
    row
}

/// Stability row for an already computed profile with loss `gamma` (1/μs).
pub fn stability_row<T: Real>(
    profile: &InteractionProfile<T>,
    gamma: T,
    hbar_over_m: T,
    settings: &StabilitySettings,
) -> Result<StabilityRow> {
    Ok(budget_row(&landscapes(profile, hbar_over_m, settings)?, gamma, hbar_over_m, settings))
}

/// Per-Γ rows of a stability scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub settings: StabilitySettings,
    pub rows: Vec<StabilityRow>,
}

/// Stability window over loss rates: Ω₁ is calibrated for each Γ (1/μs) and
/// the resulting kernel is analysed with [`stability_row`].
pub fn stability_window<T: Real>(
    params: &DressingParams<T>,
    gammas: &[T],
    calibration: &CalibrationOptions<T>,
    hbar_over_m: T,
    settings: &StabilitySettings,
) -> Vec<Result<StabilityRow>> {
    gammas
        .iter()
        .map(|&gamma| {
            let cal = calibrate_omega1(params, gamma, calibration)?;
            stability_row(&cal.profile, gamma, hbar_over_m, settings)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hwhm_conversion() {
        let s = hwhm_to_std(1.0_f64);
        assert!(((-0.5 / (s * s)).exp() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kernel_clamps_and_cuts_off() {
        let k = RadialKernel::<f64>::new(vec![1.0, 2.0, 3.0], vec![-5.0, -1.0, 0.0], "t").unwrap();
        assert_eq!(k.eval(0.2), -5.0);
        assert_eq!(k.eval(3.5), 0.0);
        assert_eq!(k.scaled(2.0).eval(1.0), -10.0);
    }

    #[test]
    fn fixed_point_closes_the_budget() {
        let well = MolecularWell { d_min: 5.0, u_mol: 30.0, sigma_osc: 1.2 };
        let nm = n_max_fixed_point::<f64>(&well, 40, 7.2e-4, 1e-5, 40.0).unwrap();
        let n = nm.n.unwrap();
        assert!((n * 1e-5 * nm.t2 - 1.0).abs() < 1e-12);
        let unbounded = n_max_fixed_point(&well, 40, 7.2e-4, 0.0, 40.0).unwrap();
        assert!(unbounded.n.is_none());
    }

    #[test]
    fn cell_list_handles_tiny_sets() {
        let k = RadialKernel::<f64>::new(vec![0.0, 1.0], vec![1.0, 0.0], "t").unwrap();
        assert_eq!(dressing_energy_cells(&[[0.0; 3]], &k), 0.0);
    }
}
