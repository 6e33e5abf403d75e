//! Physical model: dressing parameters, single- and two-atom Hamiltonians,
//! Lindblad channels and the Liouvillian superoperator.
//!
//! Basis ordering is fixed to (g, p, e) = (0, 1, 2) for one atom. Pair states
//! use row-major tensor order, `|a b⟩ ↦ 3·a + b`, with the first atom as the
//! slow index. Density matrices are vectorised by column stacking, which is
//! the native storage order of [`DMatrix`].

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::units;

pub const G: usize = 0;
pub const P: usize = 1;
pub const E: usize = 2;

/// Index of the pair state `|a b⟩`.
#[inline]
pub const fn pair(a: usize, b: usize) -> usize {
    3 * a + b
}

pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Correlation between the phase noise of the two dressing lasers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LockMode<T> {
    /// γ_lock = |γ₁ − γ₂|: two-photon dephasing cancels.
    OutOfPhase,
    /// γ_lock = γ₁ + γ₂: worst case of in-phase fluctuations.
    Unlocked,
    /// Explicit γ_lock in rad/μs, must lie in [|γ₁−γ₂|, γ₁+γ₂].
    Custom(T),
}

/// Laser and atom parameters of the two-photon dressing scheme.
///
/// All frequencies are angular (rad/μs); `c6` is in rad/μs·μm⁶.
#[derive(Debug, Clone, PartialEq)]
pub struct DressingParams<T> {
    /// Rabi frequency of the |g⟩↔|p⟩ laser.
    pub omega1: T,
    /// Rabi frequency of the |p⟩↔|e⟩ laser.
    pub omega2: T,
    /// Intermediate-state detuning Δ (signed).
    pub delta: T,
    /// Linewidth of the lower laser.
    pub gamma1: T,
    /// Linewidth of the upper laser.
    pub gamma2: T,
    pub lock: LockMode<T>,
    /// Intermediate-state decay |p⟩→|g⟩.
    pub gamma_p: T,
    /// Rydberg decay |e⟩→|p⟩.
    pub gamma_r: T,
    /// Van-der-Waals coefficient (signed).
    pub c6: T,
    /// Principal quantum number (metadata).
    pub n: u32,
}

impl<T: Real> DressingParams<T> {
    /// Strontium defaults for principal number `n`: Δ/2π = 10 MHz, Ω₂ = 2Δ,
    /// Ω₁/2π = 0.5 MHz, noiseless unlocked lasers.
    pub fn strontium(n: u32) -> Self {
        Self {
            omega1: units::mhz(0.5),
            omega2: units::mhz(20.0),
            delta: units::mhz(10.0),
            gamma1: T::zero(),
            gamma2: T::zero(),
            lock: LockMode::Unlocked,
            gamma_p: units::mhz(units::SR_GAMMA_P_MHZ),
            gamma_r: units::mhz(units::DEFAULT_GAMMA_R_MHZ),
            c6: units::mhz(units::c6_mhz_um6(n)),
            n,
        }
    }

    /// Sets Ω₂ from the ratio Ω₂/2Δ (uses |Δ|).
    pub fn with_omega2_ratio(mut self, ratio: f64) -> Self {
        self.omega2 = lit::<T>(2.0 * ratio) * self.delta.abs();
        self
    }

    /// Sets γ₁ = γ₂ = `multiple`·γ_p.
    pub fn with_equal_noise(mut self, multiple: f64) -> Self {
        self.gamma1 = lit::<T>(multiple) * self.gamma_p;
        self.gamma2 = self.gamma1;
        self
    }

    pub fn with_lock(mut self, lock: LockMode<T>) -> Self {
        self.lock = lock;
        self
    }

    pub fn with_omega1(mut self, omega1: T) -> Self {
        self.omega1 = omega1;
        self
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    /// γ_lock implied by the lock mode (rad/μs).
    pub fn lock_rate(&self) -> T {
        match self.lock {
            LockMode::OutOfPhase => (self.gamma1 - self.gamma2).abs(),
            LockMode::Unlocked => self.gamma1 + self.gamma2,
            LockMode::Custom(v) => v,
        }
    }

    /// Excited-state admixture P_e = (Ω₁/Ω₂)².
    pub fn rydberg_admixture(&self) -> T {
        let ratio = self.omega1 / self.omega2;
        ratio * ratio
    }

    /// EIT bandwidth δ_EIT = Ω₂²/(4|Δ|).
    pub fn eit_bandwidth(&self) -> T {
        self.omega2 * self.omega2 / (lit::<T>(4.0) * self.delta.abs())
    }

    /// Largest rate among the parameters, used to scale residual tolerances.
    pub fn max_rate(&self) -> T {
        [
            self.omega1,
            self.omega2,
            self.delta.abs(),
            self.gamma1,
            self.gamma2,
            self.gamma_p,
            self.gamma_r,
        ]
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b))
    }

    /// Checks finiteness, sign constraints and the locking interval.
    ///
    /// Rabi frequencies may be zero; that limit is used to probe decoupled
    /// sectors.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("delta", self.delta),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_p", self.gamma_p),
            ("gamma_r", self.gamma_r),
            ("c6", self.c6),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "not finite".into(),
                });
            }
        }
        let non_negative = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_p", self.gamma_p),
            ("gamma_r", self.gamma_r),
        ];
        for (name, v) in non_negative {
            if v < T::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be non-negative, got {v}"),
                });
            }
        }
        derive_lock_rates(self).map(|_| ())
    }
}

/// Dephasing rates (Γ_gg, Γ_pp, Γ_ee) of the projector jump operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockRates<T> {
    pub gg: T,
    pub pp: T,
    pub ee: T,
}

/// Converts laser linewidths and locking into projector dephasing rates:
/// Γ_gg = (γ_lock+γ₁−γ₂)/2, Γ_pp = (−γ_lock+γ₁+γ₂)/2, Γ_ee = (γ_lock−γ₁+γ₂)/2.
pub fn derive_lock_rates<T: Real>(params: &DressingParams<T>) -> Result<LockRates<T>> {
    let (g1, g2) = (params.gamma1, params.gamma2);
    let lock = params.lock_rate();
    if let LockMode::Custom(v) = params.lock {
        let lower = (g1 - g2).abs();
        let upper = g1 + g2;
        let slack = T::tol(1e-12) * upper.max(T::one());
        if !v.is_finite() || v < lower - slack || v > upper + slack {
            return Err(Error::LockOutOfRange {
                value: v.to_f64_lossy(),
                lower: lower.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            });
        }
    }
    let half = lit::<T>(0.5);
    // Clamp rounding noise of order ulp(γ) so the jump rates stay non-negative.
    let clamp = |x: T| if x < T::zero() { T::zero() } else { x };
    Ok(LockRates {
        gg: clamp(half * (lock + g1 - g2)),
        pp: clamp(half * (-lock + g1 + g2)),
        ee: clamp(half * (lock - g1 + g2)),
    })
}

/// Van-der-Waals shift V = C₆/r⁶ (rad/μs) of the |ee⟩ pair state.
pub fn vdw_potential<T: Real>(r: T, c6: T) -> Result<T> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::NonPositiveSeparation(r.to_f64_lossy()));
    }
    Ok(c6 / r.powi(6))
}

fn ket_bra<T: Real>(dim: usize, i: usize, j: usize, amp: T) -> CMatrix<T> {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = c(amp);
    m
}

/// Single-atom Hamiltonian (Ω₁/2)(σ_gp+σ_pg) + (Ω₂/2)(σ_ep+σ_pe) − Δσ_pp.
pub fn build_single_hamiltonian<T: Real>(params: &DressingParams<T>) -> CMatrix<T> {
    let half = lit::<T>(0.5);
    let mut h = CMatrix::zeros(3, 3);
    h[(G, P)] = c(half * params.omega1);
    h[(P, G)] = c(half * params.omega1);
    h[(E, P)] = c(half * params.omega2);
    h[(P, E)] = c(half * params.omega2);
    h[(P, P)] = c(-params.delta);
    h
}

/// Lindblad jump operators of one atom: √γ_p|g⟩⟨p|, √γ_r|p⟩⟨e| and the three
/// projector dephasings. Zero-rate channels are omitted.
pub fn single_jump_operators<T: Real>(params: &DressingParams<T>) -> Result<Vec<CMatrix<T>>> {
    let rates = derive_lock_rates(params)?;
    let channels = [
        (G, P, params.gamma_p),
        (P, E, params.gamma_r),
        (G, G, rates.gg),
        (P, P, rates.pp),
        (E, E, rates.ee),
    ];
    Ok(channels
        .into_iter()
        .filter(|&(_, _, rate)| rate > T::zero())
        .map(|(i, j, rate)| ket_bra(3, i, j, rate.sqrt()))
        .collect())
}

/// A Hilbert-space density matrix of dimension 3 (one atom) or 9 (pair).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    entries: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        let rho = Self { entries };
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a matrix without validation.
    pub fn from_matrix_unchecked(entries: CMatrix<T>) -> Self {
        Self { entries }
    }

    /// Pure state |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        Self {
            entries: ket_bra(dim, k, k, T::one()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / lit::<T>(dim as f64);
        Self {
            entries: CMatrix::from_diagonal_element(dim, dim, c(w)),
        }
    }

    /// Tensor product ρ_a ⊗ ρ_b.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        Self {
            entries: a.entries.kronecker(&b.entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// Tr[ρ A].
    pub fn expect(&self, op: &CMatrix<T>) -> Complex<T> {
        (&self.entries * op).trace()
    }

    /// Reduced state of the first (`which = 0`) or second atom of a pair.
    pub fn reduce(&self, which: usize) -> Self {
        assert_eq!(self.dim(), 9, "partial trace needs a pair state");
        let mut out = CMatrix::zeros(3, 3);
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..3 {
                    acc += if which == 0 {
                        self.entries[(pair(a, k), pair(b, k))]
                    } else {
                        self.entries[(pair(k, a), pair(k, b))]
                    };
                }
                out[(a, b)] = acc;
            }
        }
        Self { entries: out }
    }

    /// Exchange-symmetrised single-atom reduction (ρ_i + ρ_j)/2.
    pub fn reduce_symmetric(&self) -> Self {
        let half = c(lit::<T>(0.5));
        Self {
            entries: (self.reduce(0).entries + self.reduce(1).entries) * half,
        }
    }

    /// Projects onto the Hermitian part and rescales to unit trace.
    pub fn hermitize_normalize(&mut self) {
        let adj = self.entries.adjoint();
        let half = c(lit::<T>(0.5));
        self.entries = (&self.entries + adj) * half;
        let tr = self.entries.trace().re;
        self.entries /= c(tr);
    }

    /// Largest |ρ − ρ†| entry.
    pub fn hermiticity_defect(&self) -> T {
        let d = &self.entries - self.entries.adjoint();
        d.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let half = c(lit::<T>(0.5));
        let h = (&self.entries + self.entries.adjoint()) * half;
        let mut ev: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Hermitian to 1e-12, unit trace to 1e-10, eigenvalues ≥ −1e-10.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        if self.entries.ncols() != n || !(n == 3 || n == 9) {
            return Err(Error::InvalidDensityMatrix(format!(
                "dimension {}x{} is not 3 or 9",
                n,
                self.entries.ncols()
            )));
        }
        if self.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = self.hermiticity_defect();
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian: {herm:e}")));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_ev = self.eigenvalues()[0];
        if min_ev < -T::tol(1e-10) {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn to_vector(&self) -> DVector<Complex<T>> {
        DVector::from_column_slice(self.entries.as_slice())
    }

    pub(crate) fn from_vector(v: &DVector<Complex<T>>, dim: usize) -> Self {
        Self {
            entries: CMatrix::from_column_slice(dim, dim, v.as_slice()),
        }
    }
}

/// Linear generator dρ/dt = 𝓛(ρ) acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian<T: Real> {
    dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Liouvillian<T> {
    /// Builds −i[H, ·] + Σ_k D[L_k].
    pub fn from_parts(hamiltonian: &CMatrix<T>, jumps: &[CMatrix<T>]) -> Self {
        let dim = hamiltonian.nrows();
        let id = CMatrix::<T>::identity(dim, dim);
        let minus_i = Complex::new(T::zero(), -T::one());
        let half = c(lit::<T>(0.5));
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let mut matrix = (id.kronecker(hamiltonian) - hamiltonian.transpose().kronecker(&id)) * minus_i;
        for l in jumps {
            let ldl = l.adjoint() * l;
            matrix += l.conjugate().kronecker(l);
            matrix -= (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * half;
        }
        Self { dim, matrix }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Superoperator matrix (dim² × dim²).
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// 𝓛(ρ) as a dim × dim matrix.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> CMatrix<T> {
        let v = &self.matrix * rho.to_vector();
        CMatrix::from_column_slice(self.dim, self.dim, v.as_slice())
    }

    /// |Tr 𝓛(ρ)|, zero for a trace-preserving generator.
    pub fn trace_residual(&self, rho: &DensityMatrix<T>) -> T {
        self.apply(rho).trace().modulus()
    }
}

/// Single-atom generator.
pub fn build_single_liouvillian<T: Real>(params: &DressingParams<T>) -> Result<Liouvillian<T>> {
    params.validate()?;
    let h = build_single_hamiltonian(params);
    let jumps = single_jump_operators(params)?;
    Ok(Liouvillian::from_parts(&h, &jumps))
}

/// Pair Hamiltonian H⊗I + I⊗H + V(r)|ee⟩⟨ee|; `v` is the van-der-Waals shift.
pub fn build_pair_hamiltonian<T: Real>(params: &DressingParams<T>, v: T) -> CMatrix<T> {
    let h = build_single_hamiltonian(params);
    let id = CMatrix::<T>::identity(3, 3);
    let mut h2 = h.kronecker(&id) + id.kronecker(&h);
    h2[(pair(E, E), pair(E, E))] += c(v);
    h2
}

/// Two-atom generator at separation `r` (μm), three-body terms dropped.
pub fn build_two_atom_liouvillian<T: Real>(
    params: &DressingParams<T>,
    r: T,
) -> Result<Liouvillian<T>> {
    let v = vdw_potential(r, params.c6)?;
    build_two_atom_liouvillian_with_shift(params, v)
}

/// Two-atom generator for an explicit |ee⟩ shift `v` (v = 0 is r = ∞).
pub fn build_two_atom_liouvillian_with_shift<T: Real>(
    params: &DressingParams<T>,
    v: T,
) -> Result<Liouvillian<T>> {
    params.validate()?;
    let h2 = build_pair_hamiltonian(params, v);
    let id = CMatrix::<T>::identity(3, 3);
    let jumps: Vec<CMatrix<T>> = single_jump_operators(params)?
        .iter()
        .flat_map(|l| [l.kronecker(&id), id.kronecker(l)])
        .collect();
    Ok(Liouvillian::from_parts(&h2, &jumps))
}

/// Parameter-file representation: frequencies quoted as ν/2π in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DressingConfig {
    pub omega1_mhz: f64,
    pub omega2_mhz: f64,
    pub delta_mhz: f64,
    #[serde(default)]
    pub gamma1_mhz: f64,
    #[serde(default)]
    pub gamma2_mhz: f64,
    #[serde(default)]
    pub lock: LockConfig,
    #[serde(default = "default_gamma_p")]
    pub gamma_p_mhz: f64,
    #[serde(default = "default_gamma_r")]
    pub gamma_r_mhz: f64,
    /// C₆/2π in MHz·μm⁶; defaults to the interpolation table at `n`.
    #[serde(default)]
    pub c6_mhz_um6: Option<f64>,
    #[serde(default = "default_n")]
    pub n: u32,
}

fn default_gamma_p() -> f64 {
    units::SR_GAMMA_P_MHZ
}
fn default_gamma_r() -> f64 {
    units::DEFAULT_GAMMA_R_MHZ
}
fn default_n() -> u32 {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LockConfig {
    OutOfPhase,
    #[default]
    Unlocked,
    /// γ_lock/2π in MHz.
    CustomMhz(f64),
}

impl DressingConfig {
    pub fn to_params<T: Real>(&self) -> Result<DressingParams<T>> {
        let params = DressingParams {
            omega1: units::mhz(self.omega1_mhz),
            omega2: units::mhz(self.omega2_mhz),
            delta: units::mhz(self.delta_mhz),
            gamma1: units::mhz(self.gamma1_mhz),
            gamma2: units::mhz(self.gamma2_mhz),
            lock: match self.lock {
                LockConfig::OutOfPhase => LockMode::OutOfPhase,
                LockConfig::Unlocked => LockMode::Unlocked,
                LockConfig::CustomMhz(v) => LockMode::Custom(units::mhz(v)),
            },
            gamma_p: units::mhz(self.gamma_p_mhz),
            gamma_r: units::mhz(self.gamma_r_mhz),
            c6: units::mhz(self.c6_mhz_um6.unwrap_or_else(|| units::c6_mhz_um6(self.n))),
            n: self.n,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn from_params<T: Real>(params: &DressingParams<T>) -> Self {
        Self {
            omega1_mhz: units::to_mhz(params.omega1),
            omega2_mhz: units::to_mhz(params.omega2),
            delta_mhz: units::to_mhz(params.delta),
            gamma1_mhz: units::to_mhz(params.gamma1),
            gamma2_mhz: units::to_mhz(params.gamma2),
            lock: match params.lock {
                LockMode::OutOfPhase => LockConfig::OutOfPhase,
                LockMode::Unlocked => LockConfig::Unlocked,
                LockMode::Custom(v) => LockConfig::CustomMhz(units::to_mhz(v)),
            },
            gamma_p_mhz: units::to_mhz(params.gamma_p),
            gamma_r_mhz: units::to_mhz(params.gamma_r),
            c6_mhz_um6: Some(units::to_mhz(params.c6)),
            n: params.n,
        }
    }
}

/// Physical constants of the condensed species.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies<T> {
    /// ħ/m in μm²/μs.
    pub hbar_over_m: T,
    /// s-wave scattering length in μm.
    pub scattering_length: T,
    pub label: String,
}

impl<T: Real> AtomSpecies<T> {
    /// ⁸⁸Sr with a = 96 a₀.
    pub fn strontium88() -> Self {
        Self {
            hbar_over_m: lit(units::SR88_HBAR_OVER_M),
            scattering_length: lit(units::SR88_SCATTERING_LENGTH_UM),
            label: "88Sr".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar_over_m > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "hbar_over_m",
                reason: "mass must be positive".into(),
            });
        }
        Ok(())
    }

    /// Contact coupling g = 4πħ²a/m, in rad/μs·μm³ (ħ = 1).
    pub fn contact_coupling(&self) -> T {
        lit::<T>(4.0) * T::PI() * self.hbar_over_m * self.scattering_length
    }

    /// Quasi-2D coupling g/(√(2π)·l_z) for an axial oscillator length `l_z` (μm).
    pub fn contact_coupling_2d(&self, l_z: T) -> T {
        self.contact_coupling() / ((lit::<T>(2.0) * T::PI()).sqrt() * l_z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy() -> DressingParams<f64> {
        DressingParams::strontium(100)
            .with_equal_noise(10.0)
            .with_lock(LockMode::Unlocked)
    }

    #[test]
    fn lock_rates_symmetric_limits() {
        let g = 0.3;
        let mut p = DressingParams::<f64>::strontium(100);
        p.gamma1 = g;
        p.gamma2 = g;
        let close = |a: LockRates<f64>, b: [f64; 3]| {
            (a.gg - b[0]).abs() < 1e-15 && (a.pp - b[1]).abs() < 1e-15 && (a.ee - b[2]).abs() < 1e-15
        };
        p.lock = LockMode::OutOfPhase;
        assert!(close(derive_lock_rates(&p).unwrap(), [0.0, g, 0.0]));
        p.lock = LockMode::Unlocked;
        assert!(close(derive_lock_rates(&p).unwrap(), [g, 0.0, g]));
    }

    #[test]
    fn lock_rates_asymmetric_unlocked() {
        let mut p = DressingParams::<f64>::strontium(100);
        p.gamma1 = units::khz(50.0);
        p.gamma2 = units::khz(76.0);
        p.lock = LockMode::Unlocked;
        let r = derive_lock_rates(&p).unwrap();
        // Hand evaluation: γ_lock = 2π·126 kHz, Γ_gg = 2π·50 kHz, Γ_pp = 0, Γ_ee = 2π·76 kHz.
        let tau = 2.0 * std::f64::consts::PI;
        assert!((r.gg - tau * 0.050).abs() < 1e-14);
        assert!(r.pp.abs() < 1e-14);
        assert!((r.ee - tau * 0.076).abs() < 1e-14);
    }

    #[test]
    fn custom_lock_outside_interval_rejected() {
        let mut p = noisy();
        p.lock = LockMode::Custom(3.0 * p.gamma1);
        assert!(matches!(
            derive_lock_rates(&p),
            Err(Error::LockOutOfRange { .. })
        ));
        p.lock = LockMode::Custom(p.gamma1);
        let r = derive_lock_rates(&p).unwrap();
        assert!(r.gg >= 0.0 && r.pp >= 0.0 && r.ee >= 0.0);
    }

    #[test]
    fn hamiltonian_without_drive_is_detuning_only() {
        let mut p = DressingParams::<f64>::strontium(100);
        p.omega1 = 0.0;
        p.omega2 = 0.0;
        let h = build_single_hamiltonian(&p);
        let delta: f64 = units::mhz(10.0);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == P && j == P { -delta } else { 0.0 };
                assert_eq!(h[(i, j)], Complex::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn hamiltonian_hermitian_and_dark_state() {
        let p = noisy().with_omega1(units::mhz(0.7));
        let h = build_single_hamiltonian(&p);
        assert_eq!(h, h.adjoint());
        let mut d = DVector::zeros(3);
        d[G] = Complex::new(p.omega2, 0.0);
        d[E] = Complex::new(-p.omega1, 0.0);
        let hd = &h * d;
        assert!(hd.norm() < 1e-12 * p.omega2);
    }

    #[test]
    fn vdw_scaling() {
        let c6: f64 = units::mhz(7.3e7);
        let v1 = vdw_potential(1.0, c6).unwrap();
        assert!((units::to_mhz(v1) - 7.3e7).abs() < 1e-6);
        let v2 = vdw_potential(2.0, c6).unwrap();
        assert!((v1 / v2 - 64.0).abs() < 1e-12);
        let c6_low: f64 = units::khz(120.0);
        assert!((units::to_khz(vdw_potential(1.0, c6_low).unwrap()) - 120.0).abs() < 1e-9);
        assert!(vdw_potential(-2.0, c6).unwrap_err() == Error::NonPositiveSeparation(-2.0));
        assert!(vdw_potential(0.0, c6).is_err());
        assert!(vdw_potential(1.0, -c6).unwrap() < 0.0);
    }

    #[test]
    fn pair_interaction_only_on_double_rydberg_state() {
        let p = noisy();
        let h0 = build_pair_hamiltonian(&p, 0.0);
        let h1 = build_pair_hamiltonian(&p, 5.0);
        let d = h1 - h0;
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == pair(E, E) && j == pair(E, E) { 5.0 } else { 0.0 };
                assert_eq!(d[(i, j)].re, expect);
            }
        }
    }

    #[test]
    fn pair_generator_at_infinity_is_tensor_sum() {
        let p = noisy();
        let l1 = build_single_liouvillian(&p).unwrap();
        let l2 = build_two_atom_liouvillian_with_shift(&p, 0.0).unwrap();
        // Apply to a product state and compare with L1 ρa ⊗ ρb + ρa ⊗ L1 ρb.
        let a = DensityMatrix::<f64>::maximally_mixed(3);
        let mut b_m = CMatrix::zeros(3, 3);
        b_m[(0, 0)] = Complex::new(0.7, 0.0);
        b_m[(1, 1)] = Complex::new(0.3, 0.0);
        b_m[(0, 1)] = Complex::new(0.1, 0.2);
        b_m[(1, 0)] = Complex::new(0.1, -0.2);
        let b = DensityMatrix::from_matrix_unchecked(b_m);
        let lhs = l2.apply(&DensityMatrix::tensor(&a, &b));
        let rhs = l1.apply(&a).kronecker(b.matrix()) + a.matrix().kronecker(&l1.apply(&b));
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn config_round_trip() {
        let p = noisy().with_lock(LockMode::OutOfPhase);
        let cfg = DressingConfig::from_params(&p);
        let back: DressingParams<f64> = cfg.to_params().unwrap();
        assert!((back.omega2 - p.omega2).abs() < 1e-12 * p.omega2);
        assert!((back.gamma2 - p.gamma2).abs() < 1e-15);
        assert_eq!(back.lock, LockMode::OutOfPhase);
    }

    #[test]
    fn species_contact_coupling() {
        let sr = AtomSpecies::<f64>::strontium88();
        let g = sr.contact_coupling();
        let expect = 4.0 * std::f64::consts::PI * units::SR88_HBAR_OVER_M * units::SR88_SCATTERING_LENGTH_UM;
        assert_eq!(g, expect);
        assert!(sr.contact_coupling_2d(1.0) < g);
    }
}
