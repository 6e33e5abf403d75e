//! Long-time RK4 integration of dρ/dt = 𝓛ρ, used as an oracle for the
//! linear steady-state solver.
//!
//! One RK4 step is the matrix polynomial P = I + Q with
//! Q = hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24. Applying it 2^k times is done by
//! repeated squaring carried out on Q alone, Q ← 2Q + Q², so that the
//! identity never swamps the small increments in floating point.

#![allow(dead_code)]

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rnd_core::model::Liouvillian;

pub struct Rk4Outcome {
    pub rho: DMatrix<Complex64>,
    /// Total integrated time (μs).
    pub time: f64,
    /// ‖𝓛ρ‖_F at the end (1/μs).
    pub rate: f64,
    pub squarings: usize,
}

/// Integrates from the maximally mixed state until ‖dρ/dt‖_F < `tol`.
pub fn integrate_to_steady_state(l: &Liouvillian<f64>, tol: f64) -> Rk4Outcome {
    let n = l.matrix().nrows();
    let dim = l.dim();
    let lm = l.matrix();
    let norm1 = (0..n)
        .map(|j| lm.column(j).iter().map(|z| z.modulus()).sum::<f64>())
        .fold(0.0, f64::max);
    let h = 0.5 / norm1;
    let a = lm * Complex64::new(h, 0.0);
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let a4 = &a3 * &a;
    let mut q = &a + &a2 * Complex64::new(0.5, 0.0) + &a3 * Complex64::new(1.0 / 6.0, 0.0)
        + &a4 * Complex64::new(1.0 / 24.0, 0.0);

    let mut rho0 = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for k in 0..dim {
        rho0[k * dim + k] = Complex64::new(1.0 / dim as f64, 0.0);
    }

    let mut squarings = 0;
    let mut time = h;
    let mut x = rho0.clone();
    let mut rate = f64::INFINITY;
    while squarings < 120 {
        let q2 = &q * &q;
        q = &q * Complex64::new(2.0, 0.0) + q2;
        squarings += 1;
        time *= 2.0;
        x = &rho0 + &q * &rho0;
        let tr: Complex64 = (0..dim).map(|k| x[k * dim + k]).sum();
        x /= tr;
        rate = (lm * &x).norm();
        if rate < tol {
            break;
        }
    }
    let rho = DMatrix::from_column_slice(dim, dim, x.as_slice());
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Rk4Outcome {
        rho,
        time,
        rate,
        squarings,
    }
}
