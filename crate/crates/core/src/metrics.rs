//! Fidelities, state-averaged fidelity and Wootters concurrence.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{mu_plus, BathSpec};
use crate::error::{Error, Result};
use crate::gates::{sequence_superoperator, GateSequence};
use crate::qmath::{self, c, eigh_descending, hermitian_eigenvalues, on_qubit, sigma_y, ComplexMatrix, StateVector};
use crate::redfield::{CouplingSpec, Trajectory};
use crate::states::{sample_state, StateSampler};

/// Eigenvalues of ρ below this are treated as a positivity failure.
pub const POSITIVITY_FLOOR: f64 = -1e-6;
const WOOTTERS_CLIP: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub value: f64,
    pub input_label: String,
    pub phi: f64,
    pub alpha: Option<f64>,
}

impl FidelityReport {
    /// Value clipped to [0, 1] for reporting.
    pub fn clamped(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }
}

/// `⟨ψ|U†ρU|ψ⟩`.
pub fn fidelity(psi_in: &StateVector, target: &ComplexMatrix, rho_out: &ComplexMatrix) -> f64 {
    let ideal = psi_in.evolve(target);
    let v = ideal.amplitudes();
    let f = (v.adjoint() * rho_out * v)[(0, 0)];
    debug_assert!(f.im.abs() < 1e-10, "fidelity has imaginary part {}", f.im);
    f.re
}

/// `cos⁴α + sin⁴α + 2 e^{−4πkTλ t_d} cos²α sin²α` with `t_d = 2π/B₀`.
pub fn f_d_closed_form(alpha: f64, _phi: f64, bath: &BathSpec, b0: f64) -> f64 {
    let t_d = 2.0 * PI / b0;
    let (c2, s2) = (alpha.cos().powi(2), alpha.sin().powi(2));
    c2 * c2 + s2 * s2 + 2.0 * (-4.0 * PI * bath.kt * bath.lambda * t_d).exp() * c2 * s2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageFidelity {
    pub mean: f64,
    pub std_error: f64,
    pub n_states: usize,
}

/// Mean of the output fidelity over `n_states` random pure inputs. Input
/// `k` is drawn from its own substream of `seed`, so the result does not
/// depend on thread count.
pub fn average_fidelity(
    seq: &GateSequence,
    couplings: &[CouplingSpec],
    n_states: usize,
    seed: u64,
    sampler: StateSampler,
) -> Result<AverageFidelity> {
    if n_states == 0 {
        return Err(Error::InvalidInput("n_states must be >= 1".into()));
    }
    let sup = sequence_superoperator(seq, couplings)?;
    let dim = seq.dim();
    let values: Vec<f64> = (0..n_states as u64)
        .into_par_iter()
        .map(|k| {
            let psi = sample_state(dim, seed, k, sampler);
            let out = qmath::apply_superoperator(&sup, &psi.density_matrix());
            fidelity(&psi, &seq.target_unitary, &out)
        })
        .collect();
    let n = n_states as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_error = if n_states > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(AverageFidelity { mean, std_error, n_states })
}

fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh_descending(rho);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < POSITIVITY_FLOOR {
        return Err(Error::NumericalPositivity { eigenvalue: min });
    }
    let roots = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0)));
    Ok(&vecs * ComplexMatrix::from_diagonal(&roots) * vecs.adjoint())
}

/// Wootters concurrence of a two-qubit density matrix in the computational
/// basis. Eigenvalues of ρ down to −1e-6 are truncated.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.nrows() });
    }
    if !qmath::is_finite(rho) {
        return Err(Error::NonFinite);
    }
    qmath::require_hermitian(rho, 1e-8)?;
    let yy = on_qubit(&sigma_y(), 0, 2) * on_qubit(&sigma_y(), 1, 2);
    let tilde = &yy * rho.conjugate() * &yy;
    let sq = psd_sqrt(rho)?;
    // √ρ ρ̃ √ρ is Hermitian and shares its spectrum with ρρ̃
    let r = &sq * tilde * &sq;
    let r = (&r + r.adjoint()).map(|z| z * 0.5);
    let eig = hermitian_eigenvalues(&r);
    // Eigenvalues at rounding level are zero; their square roots would
    // otherwise leave ~1e-8 of noise in the concurrence of pure states.
    let floor = 64.0 * f64::EPSILON * eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lambdas: Vec<f64> = eig
        .into_iter()
        .map(|v| if (WOOTTERS_CLIP..floor).contains(&v) { 0.0 } else { v })
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrencePoint {
    pub t: f64,
    pub value: f64,
}

pub fn concurrence_trajectory(traj: &Trajectory) -> Result<Vec<ConcurrencePoint>> {
    traj.iter()
        .map(|(t, rho)| Ok(ConcurrencePoint { t, value: concurrence(rho)? }))
        .collect()
}

/// Populations `(P, Q)` of `|ψ₊⟩` and `|φ₊⟩` for the exchange gate with
/// coupling `J` and one common σ_z bath, starting from `|φ₊⟩`.
pub fn analytic_pq(t: f64, j: f64, bath: &BathSpec) -> Result<(f64, f64)> {
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::InvalidInput(format!("J must be > 0, got {j}")));
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let (up, down) = (mu_plus(j, bath), mu_plus(-j, bath));
    let total = up + down;
    if total == 0.0 {
        return Ok((0.0, 1.0));
    }
    let p = up * -(-4.0 * t * total).exp_m1() / total;
    Ok((p, 1.0 - p))
}
