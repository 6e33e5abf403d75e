//! Steady states of the dissipative dressing problem and the quantities
//! derived from them: effective pair interaction U(r) and loss per atom Γ(r).

use nalgebra::{ComplexField, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::{
    build_pair_hamiltonian, build_single_hamiltonian, build_single_liouvillian,
    build_two_atom_liouvillian, vdw_potential, CMatrix, DensityMatrix, DressingParams,
    Liouvillian, E, G, P,
};
use crate::scalar::{lit, Real};

/// Pivot ratio below which the bordered system is treated as near-singular.
const PIVOT_FLOOR: f64 = 1e-13;
/// Required gap between the two smallest singular values for a unique steady state.
const UNIQUENESS_GAP: f64 = 1e6;
const REFINEMENT_STEPS: usize = 2;

/// Diagnostics of one steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverInfo {
    /// Iterative-refinement passes applied after the LU solve.
    pub refinements: usize,
    /// min/max |pivot| of the row-equilibrated bordered system.
    pub pivot_ratio: f64,
    /// Whether the singular-vector fallback produced the result.
    pub used_svd: bool,
    /// Two smallest singular values of 𝓛 when the fallback ran.
    pub singular_values: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSolution<T: Real> {
    pub rho: DensityMatrix<T>,
    /// ‖𝓛(ρ)‖_F in 1/μs.
    pub residual: T,
    pub info: SolverInfo,
}

/// Solves 𝓛(ρ) = 0 with Tr ρ = 1.
///
/// The equation for ρ₀₀ is replaced by the trace constraint (the diagonal
/// equations of a trace-preserving generator are linearly dependent). Rows are
/// equilibrated before an LU solve with iterative refinement. A near-singular
/// bordered system falls back to the smallest right singular vector of 𝓛 and
/// reports a degenerate steady-state manifold when the singular-value gap is
/// below 10⁶.
pub fn steady_state<T: Real>(l: &Liouvillian<T>) -> Result<SteadyStateSolution<T>> {
    let dim = l.dim();
    let n = dim * dim;
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());

    let mut a = l.matrix().clone();
    for j in 0..n {
        a[(0, j)] = zero;
    }
    for k in 0..dim {
        a[(0, k * dim + k)] = one;
    }
    let mut b = DVector::from_element(n, zero);
    b[0] = one;

    for i in 0..n {
        let scale = a.row(i).iter().fold(T::zero(), |m, z| m.max(z.modulus()));
        if scale > T::zero() {
            let inv = Complex::new(T::one() / scale, T::zero());
            a.row_mut(i).scale_mut(inv.re);
            b[i] *= inv;
        }
    }

    let lu = a.clone().lu();
    let u = lu.u();
    let (pmin, pmax) = u
        .diagonal()
        .iter()
        .fold((T::max_value().unwrap(), T::zero()), |(lo, hi), z| {
            (lo.min(z.modulus()), hi.max(z.modulus()))
        });
    let pivot_ratio = if pmax > T::zero() {
        (pmin / pmax).to_f64_lossy()
    } else {
        0.0
    };
    let mut info = SolverInfo {
        pivot_ratio,
        ..SolverInfo::default()
    };

    let solved = if pivot_ratio > PIVOT_FLOOR {
        lu.solve(&b).map(|mut x| {
            for _ in 0..REFINEMENT_STEPS {
                let r = &b - &a * &x;
                match lu.solve(&r) {
                    Some(dx) => {
                        x += dx;
                        info.refinements += 1;
                    }
                    None => break,
                }
            }
            x
        })
    } else {
        None
    };

    let x = match solved {
        Some(x) if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => x,
        _ => {
            info.used_svd = true;
            let (x, smallest, second) = smallest_singular_vector(l)?;
            info.singular_values = Some((smallest, second));
            x
        }
    };

    let mut rho = DensityMatrix::from_vector(&x, dim);
    rho.hermitize_normalize();
    let residual = l.apply(&rho).norm();
    Ok(SteadyStateSolution { rho, residual, info })
}

/// Two smallest singular values (s_min, s_2) of 𝓛 after row equilibration.
pub fn null_space_gap<T: Real>(l: &Liouvillian<T>) -> (f64, f64) {
    let (_, s, _) = equilibrated_svd(l);
    (s[0], s.get(1).copied().unwrap_or(f64::INFINITY))
}

type EquilibratedSvd<T> = (nalgebra::SVD<Complex<T>, nalgebra::Dyn, nalgebra::Dyn>, Vec<f64>, Vec<usize>);

fn equilibrated_svd<T: Real>(l: &Liouvillian<T>) -> EquilibratedSvd<T> {
    let mut a = l.matrix().clone();
    for i in 0..a.nrows() {
        let scale = a.row(i).iter().fold(T::zero(), |m, z| m.max(z.modulus()));
        if scale > T::zero() {
            a.row_mut(i).scale_mut(T::one() / scale);
        }
    }
    let svd = a.svd(false, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted = order
        .iter()
        .map(|&i| svd.singular_values[i].to_f64_lossy())
        .collect();
    (svd, sorted, order)
}

fn smallest_singular_vector<T: Real>(
    l: &Liouvillian<T>,
) -> Result<(DVector<Complex<T>>, f64, f64)> {
    let (svd, s, order) = equilibrated_svd(l);
    let smallest = s[0];
    let second = s.get(1).copied().unwrap_or(f64::INFINITY);
    if !(second > UNIQUENESS_GAP * smallest) {
        let dimension = s
            .iter()
            .take_while(|&&v| v <= second.max(smallest) * UNIQUENESS_GAP.sqrt())
            .count()
            .max(2);
        return Err(Error::DegenerateSteadyState {
            dimension,
            smallest,
            second,
        });
    }
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::SolverFailure("SVD did not return V^H".into()))?;
    let row = v_t.row(order[0]);
    let x = DVector::from_iterator(row.len(), row.iter().map(|z| z.conj()));
    let tr: Complex<T> = (0..l.dim()).map(|k| x[k * l.dim() + k]).sum();
    if tr.modulus() <= T::eps() {
        return Err(Error::SolverFailure("null vector has zero trace".into()));
    }
    Ok((x.map(|z| z / tr), smallest, second))
}

/// Tr[ρ_ij (H_i + H_j + V_ij)] for a pair state, with `v` the |ee⟩ shift.
pub fn pair_light_shift<T: Real>(rho: &DensityMatrix<T>, params: &DressingParams<T>, v: T) -> T {
    rho.expect(&build_pair_hamiltonian(params, v)).re
}

/// Loss per atom Tr[ρ_i(γ_p σ_pp + γ_r σ_ee)] of a single-atom state (1/μs).
pub fn single_atom_loss<T: Real>(rho: &DensityMatrix<T>, params: &DressingParams<T>) -> T {
    params.gamma_p * rho.get(P, P).re + params.gamma_r * rho.get(E, E).re
}

/// Non-interacting reference: the single-atom steady state and the r = ∞
/// pair light shift Ū(∞) = 2 Tr[ρ₁H₁] and loss Γ(∞).
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote<T: Real> {
    pub single: SteadyStateSolution<T>,
    pub u_bar: T,
    pub loss: T,
}

pub fn asymptote<T: Real>(params: &DressingParams<T>) -> Result<Asymptote<T>> {
    let single = steady_state(&build_single_liouvillian(params)?)?;
    let h = build_single_hamiltonian(params);
    let u_bar = lit::<T>(2.0) * single.rho.expect(&h).re;
    let loss = single_atom_loss(&single.rho, params);
    Ok(Asymptote { single, u_bar, loss })
}

/// Two-atom steady state at separation `r` (μm).
pub fn pair_steady_state<T: Real>(
    params: &DressingParams<T>,
    r: T,
) -> Result<SteadyStateSolution<T>> {
    steady_state(&build_two_atom_liouvillian(params, r)?)
}

/// Everything evaluated at one separation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPoint<T: Real> {
    pub r: T,
    /// Ū(r) (rad/μs).
    pub u_bar: T,
    /// U(r) = Ū(r) − Ū(∞) (rad/μs).
    pub u: T,
    /// Loss per atom (1/μs).
    pub loss: T,
    pub solution: SteadyStateSolution<T>,
}

pub fn evaluate_pair<T: Real>(
    params: &DressingParams<T>,
    r: T,
    reference: &Asymptote<T>,
) -> Result<PairPoint<T>> {
    let v = vdw_potential(r, params.c6)?;
    let solution = pair_steady_state(params, r)?;
    let u_bar = pair_light_shift(&solution.rho, params, v);
    let loss = single_atom_loss(&solution.rho.reduce_symmetric(), params);
    Ok(PairPoint {
        r,
        u_bar,
        u: u_bar - reference.u_bar,
        loss,
        solution,
    })
}

/// Effective interaction U(r) = Ū(r) − Ū(∞) in rad/μs.
pub fn effective_interaction<T: Real>(params: &DressingParams<T>, r: T) -> Result<T> {
    let reference = asymptote(params)?;
    Ok(evaluate_pair(params, r, &reference)?.u)
}

/// Loss per atom Γ(r) in 1/μs, from the reduced pair steady state.
pub fn loss_rate<T: Real>(params: &DressingParams<T>, r: T) -> Result<T> {
    let reference = asymptote(params)?;
    Ok(evaluate_pair(params, r, &reference)?.loss)
}

/// A grid point that failed to solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub index: usize,
    pub r: f64,
    pub error: Error,
}

/// Sampled U(r) and Γ(r) on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionProfile<T: Real> {
    pub params: DressingParams<T>,
    /// Separations (μm), strictly increasing.
    pub r: Vec<T>,
    /// U(r) in rad/μs; NaN where the solve failed.
    pub u: Vec<T>,
    /// Γ(r) in 1/μs; NaN where the solve failed.
    pub loss: Vec<T>,
    /// Ū(∞) (rad/μs) subtracted from every point.
    pub u_bar_inf: T,
    /// Γ(∞) (1/μs).
    pub loss_inf: T,
    pub failures: Vec<PointFailure>,
}

impl<T: Real> InteractionProfile<T> {
    /// Builds a profile from already sampled values (synthetic kernels, tests).
    pub fn from_samples(params: DressingParams<T>, r: Vec<T>, u: Vec<T>, loss: Vec<T>) -> Self {
        Self {
            params,
            r,
            u,
            loss,
            u_bar_inf: T::zero(),
            loss_inf: T::zero(),
            failures: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Largest loss over the profile (1/μs), ignoring failed points.
    pub fn max_loss(&self) -> T {
        self.loss
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Monotone-cubic interpolant of U(r) over the successful points.
    pub fn u_interpolant(&self) -> Option<MonotoneCubic<T>> {
        self.interpolant(&self.u)
    }

    pub fn loss_interpolant(&self) -> Option<MonotoneCubic<T>> {
        self.interpolant(&self.loss)
    }

    fn interpolant(&self, y: &[T]) -> Option<MonotoneCubic<T>> {
        let (xs, ys): (Vec<T>, Vec<T>) = self
            .r
            .iter()
            .zip(y)
            .filter(|(_, v)| v.is_finite())
            .map(|(a, b)| (*a, *b))
            .unzip();
        MonotoneCubic::new(xs, ys)
    }
}

/// Evaluates U and Γ on `r_grid` (strictly increasing, positive) in parallel.
///
/// Points that fail to solve are recorded in `failures` and hold NaN.
pub fn interaction_profile<T: Real>(
    params: &DressingParams<T>,
    r_grid: &[T],
) -> Result<InteractionProfile<T>> {
    if r_grid.is_empty() {
        return Err(Error::InvalidGrid("empty radial grid".into()));
    }
    if r_grid.iter().any(|r| !(*r > T::zero()) || !r.is_finite()) {
        return Err(Error::InvalidGrid("radii must be positive and finite".into()));
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("radii must be strictly increasing".into()));
    }
    let reference = asymptote(params)?;
    let points: Vec<Result<PairPoint<T>>> = r_grid
        .par_iter()
        .map(|&r| evaluate_pair(params, r, &reference))
        .collect();
    let mut u = Vec::with_capacity(points.len());
    let mut loss = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    for (index, point) in points.into_iter().enumerate() {
        match point {
            Ok(p) => {
                u.push(p.u);
                loss.push(p.loss);
            }
            Err(error) => {
                u.push(T::nan());
                loss.push(T::nan());
                failures.push(PointFailure {
                    index,
                    r: r_grid[index].to_f64_lossy(),
                    error,
                });
            }
        }
    }
    Ok(InteractionProfile {
        params: params.clone(),
        r: r_grid.to_vec(),
        u,
        loss,
        u_bar_inf: reference.u_bar,
        loss_inf: reference.loss,
        failures,
    })
}

/// Geometric radial grid with `n` points on [r_min, r_max].
pub fn log_grid<T: Real>(r_min: T, r_max: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![r_min];
    }
    let ratio = (r_max / r_min).ln();
    (0..n)
        .map(|i| r_min * (ratio * lit::<T>(i as f64 / (n - 1) as f64)).exp())
        .collect()
}

/// Uniform radial grid with `n` points on [r_min, r_max].
pub fn linear_grid<T: Real>(r_min: T, r_max: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![r_min];
    }
    (0..n)
        .map(|i| r_min + (r_max - r_min) * lit::<T>(i as f64 / (n - 1) as f64))
        .collect()
}

/// Result of a closed-form cross-check, flagged when applied outside the
/// regime where the approximation holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advisory<T> {
    pub value: T,
    /// `false` means the value is indicative only.
    pub valid: bool,
}

/// Light shift from matrix elements:
/// Ū_an = 2[(Ω₁/2)ρ_gp₊ + (Ω₂/2)ρ_pe₊ − Δρ_pp] + V(r)ρ_ee,ee,
/// with the single-atom elements taken from the exchange-symmetrised reduction.
pub fn analytic_lightshift<T: Real>(
    rho_pair: &DensityMatrix<T>,
    params: &DressingParams<T>,
    r: T,
) -> Result<T> {
    let v = vdw_potential(r, params.c6)?;
    Ok(analytic_lightshift_with_shift(rho_pair, params, v))
}

pub fn analytic_lightshift_with_shift<T: Real>(
    rho_pair: &DensityMatrix<T>,
    params: &DressingParams<T>,
    v: T,
) -> T {
    let single = rho_pair.reduce_symmetric();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let gp_plus = two * single.get(G, P).re;
    let pe_plus = two * single.get(P, E).re;
    let pp = single.get(P, P).re;
    let ee_ee = rho_pair.get(crate::model::pair(E, E), crate::model::pair(E, E)).re;
    two * (half * params.omega1 * gp_plus + half * params.omega2 * pe_plus - params.delta * pp)
        + v * ee_ee
}

/// ρ_pe₊ ≈ (4Δ/Ω₂)·γ_p/(γ₂+γ_p)·ρ_pp for one dressed atom; valid when every
/// decoherence rate is below δ_EIT.
pub fn analytic_rho_pe<T: Real>(rho_pp: T, params: &DressingParams<T>) -> Advisory<T> {
    let value = lit::<T>(4.0) * params.delta / params.omega2 * params.gamma_p
        / (params.gamma2 + params.gamma_p)
        * rho_pp;
    Advisory {
        value,
        valid: decoherence_below_eit(params),
    }
}

fn decoherence_below_eit<T: Real>(params: &DressingParams<T>) -> bool {
    let worst = [params.gamma1, params.gamma2, params.gamma_p, params.gamma_r, params.lock_rate()]
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b));
    worst < params.eit_bandwidth()
}

/// Ground–Rydberg coherence ρ_ge₊ of one dressed atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoGe<T> {
    /// (−(2Ω₂/Ω₁)γ_pρ_pp + (2Ω₁/Ω₂)γ_rρ_ee)/(γ_lock+γ_r).
    pub full: T,
    /// −(2Ω₂/Ω₁)γ_pρ_pp/(γ_lock+γ_r).
    pub approx: T,
    pub valid: bool,
}

pub fn analytic_rho_ge<T: Real>(rho_pp: T, rho_ee: T, params: &DressingParams<T>) -> RhoGe<T> {
    let two = lit::<T>(2.0);
    let denom = params.lock_rate() + params.gamma_r;
    let pump = -two * params.omega2 / params.omega1 * params.gamma_p * rho_pp;
    let feed = two * params.omega1 / params.omega2 * params.gamma_r * rho_ee;
    RhoGe {
        full: (pump + feed) / denom,
        approx: pump / denom,
        valid: decoherence_below_eit(params),
    }
}

/// Collective light shift Ū_c = Δρ_pp(γ_p−γ₂)/(γ_p+γ₂), derived for Ω₂ = 2|Δ|.
pub fn collective_shift_model<T: Real>(rho_pp: T, params: &DressingParams<T>) -> Advisory<T> {
    let value = params.delta * rho_pp * (params.gamma_p - params.gamma2)
        / (params.gamma_p + params.gamma2);
    let ratio = params.omega2 / (lit::<T>(2.0) * params.delta.abs());
    Advisory {
        value,
        valid: (ratio - T::one()).abs() < lit(1e-6),
    }
}

/// 𝓛 applied to a raw matrix (used by time-domain checks).
pub fn generator_action<T: Real>(l: &Liouvillian<T>, rho: &CMatrix<T>) -> CMatrix<T> {
    l.apply(&DensityMatrix::from_matrix_unchecked(rho.clone()))
}
