//! Bloch-Redfield generators for piecewise-constant Hamiltonians.
//!
//! Two routes produce the same superoperator for a single qubit coupled
//! through σ_z: [`closed_form_single_qubit`] transcribes the analytic 4×4
//! matrix, and [`build_generator`] assembles the full (non-secular) Redfield
//! tensor for any Hermitian `H` and any set of coupling operators. The generic
//! route evaluates Γ at half the Bohr frequency, `Γ((E_b − E_a)/2)`, which is
//! the convention under which the closed form carries the coherence entry
//! `−2iB` for a Hamiltonian `−(B_z σ_z + B_x σ_x)` of gap `2B`.
//!
//! All generators are stored in the computational basis and act on row-major
//! vectorized density matrices (see [`crate::qmath`]).

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{self, BathSpec};
use crate::error::{Error, Result};
use crate::qmath::{
    self, c, conjugation, eigh_descending, expm, identity, kron, on_qubit, require_hermitian,
    ComplexMatrix,
};

/// Eigenvalues closer than this are treated as one Bohr-frequency class.
pub const DEGENERACY_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-8;

/// A system operator coupled linearly to one harmonic bath.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    pub operator: ComplexMatrix,
    pub bath: BathSpec,
    pub label: String,
}

impl CouplingSpec {
    pub fn new(operator: ComplexMatrix, bath: BathSpec, label: impl Into<String>) -> Result<Self> {
        require_hermitian(&operator, HERMITIAN_TOL)?;
        bath.validate()?;
        Ok(Self { operator, bath, label: label.into() })
    }
}

/// Which Pauli operator of each qubit couples to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CouplingAxis {
    #[default]
    Z,
    X,
}

impl CouplingAxis {
    pub fn pauli(self) -> ComplexMatrix {
        match self {
            CouplingAxis::Z => qmath::sigma_z(),
            CouplingAxis::X => qmath::sigma_x(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingAxis::Z => "z",
            CouplingAxis::X => "x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathTopology {
    /// One bath coupled to the collective operator σ⁽¹⁾ + σ⁽²⁾.
    Common,
    /// One bath per qubit, with identical spectral densities.
    Independent,
}

impl BathTopology {
    pub fn name(self) -> &'static str {
        match self {
            BathTopology::Common => "common",
            BathTopology::Independent => "independent",
        }
    }
}

pub fn single_qubit_coupling(axis: CouplingAxis, bath: BathSpec) -> Result<Vec<CouplingSpec>> {
    Ok(vec![CouplingSpec::new(axis.pauli(), bath, format!("sigma_{}", axis.name()))?])
}

pub fn two_qubit_couplings(
    axis: CouplingAxis,
    topology: BathTopology,
    bath: BathSpec,
) -> Result<Vec<CouplingSpec>> {
    let p = axis.pauli();
    let (a1, a2) = (on_qubit(&p, 0, 2), on_qubit(&p, 1, 2));
    match topology {
        BathTopology::Common => Ok(vec![CouplingSpec::new(
            a1 + a2,
            bath,
            format!("sigma_{0}^(1) + sigma_{0}^(2)", axis.name()),
        )?]),
        BathTopology::Independent => Ok(vec![
            CouplingSpec::new(a1, bath, format!("sigma_{}^(1)", axis.name()))?,
            CouplingSpec::new(a2, bath, format!("sigma_{}^(2)", axis.name()))?,
        ]),
    }
}

/// A Redfield superoperator `M` with `d(vec ρ)/dt = M vec ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    matrix: ComplexMatrix,
    basis: ComplexMatrix,
    energies: Vec<f64>,
    bohr_frequencies: Vec<f64>,
}

impl Generator {
    /// System dimension `d` (the superoperator is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Superoperator in the computational basis.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenbasis of the segment Hamiltonian, one column per level, ordered
    /// by descending energy.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Distinct non-negative Bohr frequencies `E_a − E_b` (GHz).
    pub fn bohr_frequencies(&self) -> &[f64] {
        &self.bohr_frequencies
    }

    /// The superoperator expressed in the Hamiltonian eigenbasis.
    pub fn in_eigenbasis(&self) -> ComplexMatrix {
        let t = conjugation(&self.basis);
        t.adjoint() * &self.matrix * t
    }

    /// Propagator `exp(M t)`.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        expm(&self.matrix.map(|z| z * t))
    }
}

fn distinct_gaps(energies: &[f64]) -> Vec<f64> {
    let mut gaps: Vec<f64> = Vec::new();
    for &ea in energies {
        for &eb in energies {
            let g = ea - eb;
            if g >= 0.0 && !gaps.iter().any(|&x| (x - g).abs() < DEGENERACY_TOL) {
                gaps.push(if g < DEGENERACY_TOL { 0.0 } else { g });
            }
        }
    }
    gaps.sort_by(f64::total_cmp);
    gaps
}

/// Replace each run of nearly equal (descending) eigenvalues by its mean.
fn cluster_levels(energies: &[f64]) -> Vec<f64> {
    let mut out = energies.to_vec();
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && (energies[end - 1] - energies[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let mean = energies[start..end].iter().sum::<f64>() / (end - start) as f64;
        out[start..end].iter_mut().for_each(|e| *e = mean);
        start = end;
    }
    out
}

fn commutator_superoperator(h: &ComplexMatrix) -> ComplexMatrix {
    let id = identity(h.nrows());
    (kron(h, &id) - kron(&id, &h.transpose())).map(|z| z * c(0.0, -1.0))
}

/// Full Redfield generator of `H` with the given bath couplings.
///
/// For each coupling `A` the transformed operator `Λ = Σ_{ab} A_ab Γ((E_b − E_a)/2) |a⟩⟨b|`
/// (eigenbasis of `H`) enters `D(ρ) = −[A, Λρ] + [A, ρΛ†]`. Degenerate levels
/// share one frequency class so the result does not depend on how the
/// eigensolver rotates within a degenerate subspace.
pub fn build_generator(h: &ComplexMatrix, couplings: &[CouplingSpec]) -> Result<Generator> {
    if !qmath::is_finite(h) {
        return Err(Error::NonFinite);
    }
    require_hermitian(h, HERMITIAN_TOL * h.norm().max(1.0))?;
    let d = h.nrows();
    let (raw_energies, basis) = eigh_descending(h);
    let energies = cluster_levels(&raw_energies);

    let id = identity(d);
    let mut m = commutator_superoperator(h);
    for coupling in couplings {
        let a = &coupling.operator;
        if a.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: a.nrows() });
        }
        let a_eig = basis.adjoint() * a * &basis;
        let mut lambda_eig = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if a_eig[(i, j)].norm() == 0.0 {
                    continue;
                }
                let arg = 0.5 * (energies[j] - energies[i]);
                lambda_eig[(i, j)] = a_eig[(i, j)] * bath::gamma(arg, &coupling.bath)?;
            }
        }
        let lambda = &basis * lambda_eig * basis.adjoint();
        let lambda_dag = lambda.adjoint();
        m -= kron(&(a * &lambda), &id);
        m += kron(&lambda, &a.transpose());
        m += kron(a, &lambda.map(|z| z.conj()));
        m -= kron(&id, &(lambda_dag * a).transpose());
    }

    Ok(Generator {
        matrix: m,
        basis,
        bohr_frequencies: distinct_gaps(&energies),
        energies,
    })
}

/// The analytic single-qubit generator for `H = −(B_z σ_z + B_x σ_x)` coupled
/// through σ_z, with `B = √(B_z² + B_x²)` and `tan θ = B_x / B_z`.
///
/// In the eigenbasis (upper level first) the matrix is
///
/// ```text
/// [ −s²μ₊(B)               ½S μ₊(0)                 ½S μ₊(0)                s²μ₊(−B)              ]
/// [ ½S(μ₋(0)+2Γ*(B))       −2iB−2c²μ₊(0)−s²ξ₊*(B)   s²ξ₊(B)                 ½S(μ₋(0)−2Γ(−B))      ]
/// [ ½S(−μ₋(0)+2Γ(B))       s²ξ₊*(B)                 2iB−2c²μ₊(0)−s²ξ₊(B)    −½S(μ₋(0)+2Γ*(−B))    ]
/// [ s²μ₊(B)                −½S μ₊(0)                −½S μ₊(0)               −s²μ₊(−B)             ]
/// ```
///
/// with `s = sin θ`, `c = cos θ`, `S = sin 2θ`. For `B_x = 0` it is diagonal.
/// At `B = 0` the σ_z-aligned form (θ = 0) is used, i.e. pure dephasing.
pub fn closed_form_single_qubit(bz: f64, bx: f64, bath: &BathSpec) -> Result<Generator> {
    if !(bz.is_finite() && bx.is_finite()) {
        return Err(Error::NonFinite);
    }
    let b = bz.hypot(bx);
    let theta = if b == 0.0 { 0.0 } else { bx.atan2(bz) };
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    let half_sin2 = Complex64::from(0.5 * (2.0 * theta).sin());

    let r = bath::rate_set(b, bath)?;
    let r0 = bath::rate_set(0.0, bath)?;
    let (g_p, g_m) = (r.gamma_plus, r.gamma_minus);
    let mu_p_b = r.mu_plus;
    let mu_p_mb = g_m + g_m.conj();
    let mu_p0 = r0.mu_plus;
    let mu_m0 = r0.mu_minus;
    let xi = r.xi_plus;
    let two = Complex64::from(2.0);
    let ib2 = c(0.0, 2.0 * b);

    #[rustfmt::skip]
    let m_eig = ComplexMatrix::from_row_slice(4, 4, &[
        -mu_p_b * s2, half_sin2 * mu_p0, half_sin2 * mu_p0, mu_p_mb * s2,
        half_sin2 * (mu_m0 + two * g_p.conj()), -ib2 - mu_p0 * (2.0 * c2) - xi.conj() * s2, xi * s2, half_sin2 * (mu_m0 - two * g_m),
        half_sin2 * (-mu_m0 + two * g_p), xi.conj() * s2, ib2 - mu_p0 * (2.0 * c2) - xi * s2, -half_sin2 * (mu_m0 + two * g_m.conj()),
        mu_p_b * s2, -half_sin2 * mu_p0, -half_sin2 * mu_p0, -mu_p_mb * s2,
    ]);

    // −(B_z σ_z + B_x σ_x) = B (cos φ σ_z + sin φ σ_x) with φ = θ + π.
    let phi = if b == 0.0 { 0.0 } else { (-bx).atan2(-bz) };
    let (sh, ch) = (0.5 * phi).sin_cos();
    let basis = ComplexMatrix::from_row_slice(2, 2, &[c(ch, 0.0), c(sh, 0.0), c(sh, 0.0), c(-ch, 0.0)]);
    let t = conjugation(&basis);
    let matrix = &t * m_eig * t.adjoint();

    Ok(Generator {
        matrix,
        basis,
        energies: vec![b, -b],
        bohr_frequencies: if b == 0.0 { vec![0.0] } else { vec![0.0, 2.0 * b] },
    })
}

/// Density matrices sampled along an evolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&ComplexMatrix> {
        self.states.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &ComplexMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn max_trace_error(&self) -> f64 {
        self.states
            .iter()
            .map(|r| (r.trace() - Complex64::from(1.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states.iter().map(qmath::hermiticity_deviation).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.states
            .iter()
            .map(|r| qmath::hermitian_eigenvalues(r)[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Checks shape, finiteness, Hermiticity and unit trace.
pub fn check_density_matrix(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rho.nrows() });
    }
    if !qmath::is_finite(rho) {
        return Err(Error::NonFinite);
    }
    require_hermitian(rho, STATE_TOL)?;
    let tr = rho.trace();
    if (tr - Complex64::from(1.0)).norm() > STATE_TOL {
        return Err(Error::InvalidInput(format!("density matrix trace {tr} is not 1")));
    }
    Ok(())
}

/// `ρ(t) = devec(exp(M t) vec ρ₀)`.
pub fn evolve(gen: &Generator, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    check_density_matrix(rho0, gen.dim())?;
    let p = gen.propagator(t)?;
    Ok(qmath::apply_superoperator(&p, rho0))
}

/// States at `n_samples` uniformly spaced times in `[0, t_final]`, both ends
/// included. Each sample is propagated directly from `ρ₀`.
pub fn evolve_trajectory(
    gen: &Generator,
    rho0: &ComplexMatrix,
    t_final: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    if t_final < 0.0 || t_final.is_nan() {
        return Err(Error::NegativeTime(t_final));
    }
    if n_samples < 2 {
        return Err(Error::InvalidInput("a trajectory needs at least 2 samples".into()));
    }
    check_density_matrix(rho0, gen.dim())?;
    let v0: DVector<Complex64> = qmath::vectorize(rho0);
    let mut traj = Trajectory::default();
    for k in 0..n_samples {
        let t = t_final * k as f64 / (n_samples - 1) as f64;
        let state = qmath::devectorize(&(gen.propagator(t)? * &v0));
        traj.times.push(t);
        traj.states.push(state);
    }
    Ok(traj)
}
