//! Large-squeezing studies, weak eigenvalue residuals and the finite-N
//! position kernel.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{build_momentum, build_position, fidelity, FockDim, StateVector};
use crate::hermite::hermite_functions;
use crate::states::{
    caves_state, coherent_state, momentum_eigenstate, position_eigenstate, yuen_limit_state, yuen_state,
    PositionForm,
};

/// Rows whose top-quarter weight exceeds this are flagged untrusted. The
/// center error of a truncated squeezed state tracks its tail weight, so
/// trusted rows hold center identities to about this level.
pub const LIMIT_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitStudyRow {
    pub r: f64,
    /// ⟨x̂⟩ of the squeezed state.
    pub center_x: f64,
    pub fidelity_to_target: f64,
    pub norm_check: f64,
    /// Weight of the state in the top quarter of the basis.
    pub tail_mass: f64,
    /// tail_mass ≤ [`LIMIT_TAIL_TOL`].
    pub trusted: bool,
}

fn position_center(state: &StateVector) -> Result<f64> {
    Ok(build_position(state.dim()).expectation(state)?.re / state.norm_sqr())
}

fn limit_row(r: f64, state: &StateVector, target: &StateVector) -> Result<LimitStudyRow> {
    let tail_mass = state.tail_mass(state.dim().n_levels() / 4);
    Ok(LimitStudyRow {
        r,
        center_x: position_center(state)?,
        fidelity_to_target: fidelity(state, target)?,
        norm_check: state.norm(),
        tail_mass,
        trusted: tail_mass <= LIMIT_TAIL_TOL,
    })
}

/// S(r)D(x/√2)|0⟩ for each r, compared with the normalized S(r)|0⟩.
///
/// The center shrinks as e^{−r}x. Because both vectors share the same S(r),
/// the fidelity stays at |⟨0|x/√2⟩|² = e^{−x²/2} for every r.
pub fn yuen_limit_study(x: f64, r_list: &[f64], dim: FockDim) -> Result<Vec<LimitStudyRow>> {
    r_list
        .par_iter()
        .map(|&r| {
            let state = yuen_state(x / SQRT_2, r, dim)?;
            let target = yuen_limit_state(r, dim)?;
            limit_row(r, &state, &target)
        })
        .collect()
}

/// Fidelity between the Yuen states built from x1 and x2 at squeezing r.
pub fn yuen_pairwise_fidelity(x1: f64, x2: f64, r: f64, dim: FockDim) -> Result<f64> {
    let u = yuen_state(x1 / SQRT_2, r, dim)?;
    let v = yuen_state(x2 / SQRT_2, r, dim)?;
    fidelity(&u, &v)
}

/// D(x/√2)S(r)|0⟩ for each r, compared with the normalized Hermite vector |x⟩_N.
pub fn caves_limit_study(x: f64, r_list: &[f64], dim: FockDim) -> Result<Vec<LimitStudyRow>> {
    let target = position_eigenstate(x, dim, PositionForm::Hermite)?.normalize()?;
    r_list
        .par_iter()
        .map(|&r| {
            let state = caves_state(x / SQRT_2, r, dim)?;
            limit_row(r, &state, &target)
        })
        .collect()
}

/// True when fidelities never decrease along the rows, in row order.
pub fn fidelity_nondecreasing(rows: &[LimitStudyRow]) -> bool {
    rows.windows(2).all(|w| w[1].fidelity_to_target >= w[0].fidelity_to_target)
}

pub fn fidelity_strictly_increasing(rows: &[LimitStudyRow]) -> bool {
    rows.windows(2).all(|w| w[1].fidelity_to_target > w[0].fidelity_to_target)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: f64,
    pub probe_beta: Complex64,
    /// |⟨β|(x̂ − x)|x⟩_N|
    pub weak_residual: f64,
    /// √(N/2)|ψ_N(x)⟨β|N−1⟩|, the exact value of the weak residual.
    pub boundary_term: f64,
}

/// Coherent-state matrix elements of (x̂ − x) on the Hermite approximant.
///
/// Truncation leaves exactly one defect, (x̂ − x)|x⟩_N = −√(N/2)ψ_N(x)|N−1⟩,
/// which a coherent probe suppresses by |β|^{N−1}/√((N−1)!).
pub fn weak_eigenvalue_check(x: f64, beta_list: &[Complex64], dim: FockDim) -> Result<Vec<ResidualRow>> {
    let n = dim.n_levels();
    let pos = position_eigenstate(x, dim, PositionForm::Hermite)?;
    let shifted = build_position(dim).apply(&pos)?.sub(&pos.scale(Complex64::new(x, 0.0)))?;
    let psi_n = hermite_functions(x, n + 1)[n];
    beta_list
        .par_iter()
        .map(|&beta| {
            let probe = coherent_state(beta, dim)?;
            Ok(ResidualRow {
                x,
                probe_beta: beta,
                weak_residual: probe.inner(&shifted)?.norm(),
                boundary_term: (n as f64 / 2.0).sqrt() * psi_n.abs() * probe.amp(n - 1).norm(),
            })
        })
        .collect()
}

/// ‖(x̂ − x)|x⟩_N‖ / ‖|x⟩_N‖. Of order one by construction; reported only.
pub fn strong_residual(x: f64, dim: FockDim) -> Result<f64> {
    let pos = position_eigenstate(x, dim, PositionForm::Hermite)?;
    let shifted = build_position(dim).apply(&pos)?.sub(&pos.scale(Complex64::new(x, 0.0)))?;
    Ok(shifted.norm() / pos.norm())
}

/// Momentum analogue of [`weak_eigenvalue_check`]: |⟨β|(p̂ − p)|p⟩_N|.
pub fn weak_momentum_check(p: f64, beta_list: &[Complex64], dim: FockDim) -> Result<Vec<ResidualRow>> {
    let mom = momentum_eigenstate(p, dim)?;
    let shifted = build_momentum(dim).apply(&mom)?.sub(&mom.scale(Complex64::new(p, 0.0)))?;
    let n = dim.n_levels();
    let psi_n = hermite_functions(p, n + 1)[n];
    beta_list
        .par_iter()
        .map(|&beta| {
            let probe = coherent_state(beta, dim)?;
            Ok(ResidualRow {
                x: p,
                probe_beta: beta,
                weak_residual: probe.inner(&shifted)?.norm(),
                boundary_term: (n as f64 / 2.0).sqrt() * psi_n.abs() * probe.amp(n - 1).norm(),
            })
        })
        .collect()
}

/// ⟨p|x⟩_N; tends to e^{−ipx}/√(2π) as N grows.
pub fn momentum_position_overlap(p: f64, x: f64, dim: FockDim) -> Result<Complex64> {
    let mom = momentum_eigenstate(p, dim)?;
    let pos = position_eigenstate(x, dim, PositionForm::Hermite)?;
    mom.inner(&pos)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub x_prime: f64,
    pub kernel: f64,
}

/// K_N(x, x′) = Σ_{n<N} ψ_n(x)ψ_n(x′) = ⟨x|x′⟩_N over a grid of x′.
///
/// Meaningful for |x′| inside the classical turning point √(2N).
pub fn localization_profile(x: f64, x_prime_grid: &[f64], dim: FockDim) -> Vec<KernelPoint> {
    let n = dim.n_levels();
    let psi_x = hermite_functions(x, n);
    x_prime_grid
        .par_iter()
        .map(|&xp| {
            let psi = hermite_functions(xp, n);
            KernelPoint {
                x_prime: xp,
                kernel: psi.iter().zip(&psi_x).map(|(a, b)| a * b).sum(),
            }
        })
        .collect()
}

/// The point of largest kernel value; ties resolve to the first.
pub fn kernel_peak(profile: &[KernelPoint]) -> Option<KernelPoint> {
    profile.iter().copied().fold(None, |best, p| match best {
        Some(b) if b.kernel >= p.kernel => Some(b),
        _ => Some(p),
    })
}
