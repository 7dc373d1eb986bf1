//! Multistep geometric (AA) gates and their dynamical equivalents.
//!
//! Segment Hamiltonians:
//! - one qubit: `H = −½ (B_z σ_z + B_x σ_x)`
//! - two qubits: `H = Σᵢ −½ (B_z⁽ⁱ⁾ σ_z⁽ⁱ⁾ + B_x⁽ⁱ⁾ σ_x⁽ⁱ⁾) − J σ_x⁽¹⁾σ_x⁽²⁾`
//!
//! Field signs are chosen so that each noiseless sequence reproduces its
//! target unitary up to a global phase. Each geometric sequence and its
//! dynamical equivalent share the same total duration.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    self, c, expm, identity, on_qubit, sigma_x, sigma_z, ComplexMatrix,
};
use crate::redfield::{self, build_generator, CouplingSpec, Generator, Trajectory};
use crate::states;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentParams {
    Single { bz: f64, bx: f64 },
    Two { bz1: f64, bx1: f64, bz2: f64, bx2: f64, j: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSegment {
    pub params: SegmentParams,
    /// ns
    pub duration: f64,
}

pub fn single_qubit_hamiltonian(bz: f64, bx: f64) -> ComplexMatrix {
    (sigma_z().map(|z| z * bz) + sigma_x().map(|z| z * bx)).map(|z| z * -0.5)
}

pub fn two_qubit_hamiltonian(bz1: f64, bx1: f64, bz2: f64, bx2: f64, j: f64) -> ComplexMatrix {
    let local = |q: usize, bz: f64, bx: f64| on_qubit(&single_qubit_hamiltonian(bz, bx), q, 2);
    let xx = on_qubit(&sigma_x(), 0, 2) * on_qubit(&sigma_x(), 1, 2);
    local(0, bz1, bx1) + local(1, bz2, bx2) - xx.map(|z| z * j)
}

impl GateSegment {
    pub fn hamiltonian(&self) -> ComplexMatrix {
        match self.params {
            SegmentParams::Single { bz, bx } => single_qubit_hamiltonian(bz, bx),
            SegmentParams::Two { bz1, bx1, bz2, bx2, j } => two_qubit_hamiltonian(bz1, bx1, bz2, bx2, j),
        }
    }

    pub fn dim(&self) -> usize {
        match self.params {
            SegmentParams::Single { .. } => 2,
            SegmentParams::Two { .. } => 4,
        }
    }

    /// Noiseless propagator `exp(−iHt)` for `0 ≤ t ≤ duration`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        expm(&self.hamiltonian().map(|z| z * c(0.0, -t))).expect("Hamiltonian entries are finite")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    AaSingle,
    DynSingle,
    AaTwo,
    DynTwo,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::AaSingle => "aa-single",
            GateKind::DynSingle => "dyn-single",
            GateKind::AaTwo => "aa-two",
            GateKind::DynTwo => "dyn-two",
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::AaTwo | GateKind::DynTwo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    pub kind: GateKind,
    pub phi: f64,
    pub segments: Vec<GateSegment>,
    pub target_unitary: ComplexMatrix,
}

impl GateSequence {
    pub fn dim(&self) -> usize {
        self.target_unitary.nrows()
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Cumulative segment end times.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |t, s| {
                *t += s.duration;
                Some(*t)
            })
            .collect()
    }

    /// Noiseless propagator of the whole sequence.
    pub fn ideal_propagator(&self) -> ComplexMatrix {
        self.ideal_propagator_at(self.total_duration())
    }

    /// Noiseless propagator from 0 to `t` (clamped to the sequence).
    pub fn ideal_propagator_at(&self, t: f64) -> ComplexMatrix {
        let mut u = identity(self.dim());
        let mut start = 0.0;
        for seg in &self.segments {
            let local = (t - start).clamp(0.0, seg.duration);
            if local > 0.0 {
                u = seg.unitary(local) * u;
            }
            start += seg.duration;
            if t <= start {
                break;
            }
        }
        u
    }

    /// The same sequence with every segment duration scaled so that the last
    /// segment runs until `t_final`. Used to follow a one-segment gate beyond
    /// its nominal time.
    pub fn extended_to(&self, t_final: f64) -> Result<Self> {
        let before: f64 = self.segments[..self.segments.len() - 1].iter().map(|s| s.duration).sum();
        if t_final <= before {
            return Err(Error::InvalidInput(format!(
                "cannot extend sequence to {t_final} ns, earlier segments already last {before} ns"
            )));
        }
        let mut out = self.clone();
        out.segments.last_mut().expect("non-empty").duration = t_final - before;
        Ok(out)
    }
}

/// `t₁ = π/(2B₀)`.
pub fn t1(b0: f64) -> f64 {
    PI / (2.0 * b0)
}

/// `t_m1 = π/(4J_m)`.
pub fn tm1(jm: f64) -> f64 {
    PI / (4.0 * jm)
}

/// `diag(e^{−iΦ}, e^{iΦ})`.
pub fn u_single(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(0.0, -phi).exp(),
        c(0.0, phi).exp(),
    ]))
}

/// Diagonal in the σ_x⊗σ_x product basis with phases
/// `e^{i(π−Φ)}, e^{i(π+Φ)}, e^{−i(π−Φ)}, e^{−i(π+Φ)}` on `|++⟩, |+−⟩, |−+⟩, |−−⟩`.
pub fn u_two(phi: f64) -> ComplexMatrix {
    let phases = [PI - phi, PI + phi, -(PI - phi), -(PI + phi)];
    let kets = [(true, true), (true, false), (false, true), (false, false)];
    kets.iter().zip(phases).fold(ComplexMatrix::zeros(4, 4), |acc, (&(a, b), p)| {
        let k = states::x_product(a, b);
        acc + k.density_matrix().map(|z| z * c(0.0, p).exp())
    })
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

fn require_finite_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `U₁U₂U₁` with `U₁ = e^{−iπσ_x/4}` (t₁) and `U₂ = e^{−iπ(sinΦ σ_z − cosΦ σ_x)/2}` (2t₁).
pub fn aa_single(phi: f64, b0: f64) -> Result<GateSequence> {
    require_positive("B0", b0)?;
    require_finite_phi(phi)?;
    let t = t1(b0);
    let u1 = GateSegment { params: SegmentParams::Single { bz: 0.0, bx: -b0 }, duration: t };
    let u2 = GateSegment {
        params: SegmentParams::Single { bz: -b0 * phi.sin(), bx: b0 * phi.cos() },
        duration: 2.0 * t,
    };
    Ok(GateSequence { kind: GateKind::AaSingle, phi, segments: vec![u1, u2, u1], target_unitary: u_single(phi) })
}

/// One σ_z segment of length 4t₁ producing `e^{−iΦσ_z}`.
pub fn dyn_single(phi: f64, b0: f64) -> Result<GateSequence> {
    require_positive("B0", b0)?;
    require_finite_phi(phi)?;
    let duration = 4.0 * t1(b0);
    let seg = GateSegment { params: SegmentParams::Single { bz: -2.0 * phi / duration, bx: 0.0 }, duration };
    Ok(GateSequence { kind: GateKind::DynSingle, phi, segments: vec![seg], target_unitary: u_single(phi) })
}

fn two(bz1: f64, j: f64) -> SegmentParams {
    SegmentParams::Two { bz1, bx1: 0.0, bz2: 0.0, bx2: 0.0, j }
}

/// `U₁⁽¹⁾U₂⁽¹²⁾U₁⁽¹⁾` with `U₁⁽¹⁾ = e^{−iπσ_z⁽¹⁾/4}` (t_m1) and
/// `U₂⁽¹²⁾ = e^{−iπ(cosΦ σ_z⁽¹⁾ − sinΦ σ_x⁽¹⁾σ_x⁽²⁾)/2}` (2t_m1).
pub fn aa_two(phi: f64, jm: f64) -> Result<GateSequence> {
    require_positive("Jm", jm)?;
    require_finite_phi(phi)?;
    let t = tm1(jm);
    let u1 = GateSegment { params: two(-2.0 * jm, 0.0), duration: t };
    let u2 = GateSegment { params: two(-2.0 * jm * phi.cos(), jm * phi.sin()), duration: 2.0 * t };
    Ok(GateSequence { kind: GateKind::AaTwo, phi, segments: vec![u1, u2, u1], target_unitary: u_two(phi) })
}

/// Exchange-only segment `J = (π−Φ)J_m/π` for 4t_m1, giving `e^{i(π−Φ)σ_x⁽¹⁾σ_x⁽²⁾}`.
pub fn dyn_two(phi: f64, jm: f64) -> Result<GateSequence> {
    require_positive("Jm", jm)?;
    require_finite_phi(phi)?;
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::InvalidInput(format!("dyn-two needs phi in [0, pi], got {phi}")));
    }
    let seg = GateSegment { params: two(0.0, (PI - phi) * jm / PI), duration: 4.0 * tm1(jm) };
    Ok(GateSequence { kind: GateKind::DynTwo, phi, segments: vec![seg], target_unitary: u_two(phi) })
}

pub fn build_sequence(kind: GateKind, phi: f64, field: f64) -> Result<GateSequence> {
    match kind {
        GateKind::AaSingle => aa_single(phi, field),
        GateKind::DynSingle => dyn_single(phi, field),
        GateKind::AaTwo => aa_two(phi, field),
        GateKind::DynTwo => dyn_two(phi, field),
    }
}

/// CNOT in the σ_x⊗σ_x basis (control qubit 1): `|−⟩_x` on qubit 1 flips
/// qubit 2 between `|+⟩_x` and `|−⟩_x`.
pub fn cnot_x_basis() -> ComplexMatrix {
    let map = [((true, true), (true, true)), ((true, false), (true, false)), ((false, true), (false, false)), ((false, false), (false, true))];
    map.iter().fold(ComplexMatrix::zeros(4, 4), |acc, &(from, to)| {
        let out = states::x_product(to.0, to.1);
        let inp = states::x_product(from.0, from.1);
        acc + out.amplitudes() * inp.amplitudes().adjoint()
    })
}

/// CNOT assembled from the noiseless conditional AA gate at Φ = π/4 and
/// single-qubit rotations:
/// `e^{iπ(σ_z⁽²⁾−σ_x⁽²⁾)/(2√2)} e^{iπσ_x⁽¹⁾/4} e^{iπσ_x⁽²⁾/4} U_two(π/4) e^{iπσ_x⁽¹⁾/2} e^{iπ(σ_z⁽²⁾−σ_x⁽²⁾)/(2√2)}`.
pub fn cnot_composition(jm: f64) -> Result<ComplexMatrix> {
    let u_two = aa_two(PI / 4.0, jm)?.ideal_propagator();
    let rot = |op: ComplexMatrix, angle: f64| expm(&op.map(|z| z * c(0.0, angle))).expect("finite");
    let x1 = on_qubit(&sigma_x(), 0, 2);
    let x2 = on_qubit(&sigma_x(), 1, 2);
    let zx2 = (on_qubit(&sigma_z(), 1, 2) - &x2).map(|z| z * FRAC_1_SQRT_2);
    let outer = rot(zx2, PI / 2.0);
    Ok(&outer * rot(x1.clone(), PI / 4.0) * rot(x2, PI / 4.0) * u_two * rot(x1, PI / 2.0) * &outer)
}

pub fn sequence_generators(seq: &GateSequence, couplings: &[CouplingSpec]) -> Result<Vec<Generator>> {
    seq.segments.iter().map(|s| build_generator(&s.hamiltonian(), couplings)).collect()
}

/// Superoperator of the full noisy sequence, `Π_k exp(M_k t_k)`.
pub fn sequence_superoperator(seq: &GateSequence, couplings: &[CouplingSpec]) -> Result<ComplexMatrix> {
    let d2 = seq.dim() * seq.dim();
    seq.segments
        .iter()
        .zip(sequence_generators(seq, couplings)?)
        .try_fold(identity(d2), |acc, (seg, gen)| Ok(gen.propagator(seg.duration)? * acc))
}

/// Sample times: a uniform grid over the sequence merged with the exact
/// segment boundaries.
pub fn sample_times(seq: &GateSequence, n_time_samples: usize) -> Vec<f64> {
    let total = seq.total_duration();
    let n = n_time_samples.max(2);
    let mut times: Vec<f64> = (0..n).map(|k| total * k as f64 / (n - 1) as f64).collect();
    times.extend(seq.boundaries());
    times.sort_by(f64::total_cmp);
    let eps = 1e-12 * total.max(1.0);
    let mut merged: Vec<f64> = Vec::with_capacity(times.len());
    for t in times {
        match merged.last_mut() {
            // keep exact boundary values over nearby grid points
            Some(last) if (t - *last).abs() <= eps => {
                if seq.boundaries().contains(&t) {
                    *last = t;
                }
            }
            _ => merged.push(t),
        }
    }
    merged
}

/// Superoperators taking the initial state to each time in `times`
/// (clamped to the sequence). Each segment's generator is built once.
pub fn propagators_at(seq: &GateSequence, couplings: &[CouplingSpec], times: &[f64]) -> Result<Vec<ComplexMatrix>> {
    if let Some(&t) = times.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let generators = sequence_generators(seq, couplings)?;
    let d2 = seq.dim() * seq.dim();
    let mut starts = Vec::with_capacity(seq.segments.len());
    let mut acc = identity(d2);
    let mut t0 = 0.0;
    for (seg, gen) in seq.segments.iter().zip(&generators) {
        starts.push((t0, acc.clone()));
        acc = gen.propagator(seg.duration)? * acc;
        t0 += seg.duration;
    }
    let ends = seq.boundaries();
    times
        .iter()
        .map(|&t| {
            let k = ends.iter().position(|&e| t <= e).unwrap_or(ends.len() - 1);
            let (start, ref before) = starts[k];
            let local = (t - start).clamp(0.0, seq.segments[k].duration);
            Ok(generators[k].propagator(local)? * before)
        })
        .collect()
}

/// Evolve `rho0` through the noisy sequence, sampled on [`sample_times`].
/// Coupling operators are the same for every segment.
pub fn run_sequence(
    seq: &GateSequence,
    rho0: &ComplexMatrix,
    couplings: &[CouplingSpec],
    n_time_samples: usize,
) -> Result<Trajectory> {
    redfield::check_density_matrix(rho0, seq.dim())?;
    let times = sample_times(seq, n_time_samples);
    let props = propagators_at(seq, couplings, &times)?;
    Ok(Trajectory {
        states: props.iter().map(|p| qmath::apply_superoperator(p, rho0)).collect(),
        times,
    })
}

/// Global-phase-insensitive distance between the noiseless sequence and its
/// target unitary.
pub fn target_error(seq: &GateSequence) -> f64 {
    qmath::phase_distance(&seq.ideal_propagator(), &seq.target_unitary)
}
