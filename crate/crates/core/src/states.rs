//! Named input states and reproducible random-state samplers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, StateVector};

/// σ_z eigenstate: `|+⟩_z = |0⟩` (σ_z = +1) or `|−⟩_z = |1⟩`.
pub fn ket_z(plus: bool) -> StateVector {
    let amps = if plus { [c(1., 0.), c(0., 0.)] } else { [c(0., 0.), c(1., 0.)] };
    StateVector::from_slice(&amps).expect("basis state is normalized")
}

/// σ_x eigenstate `(|0⟩ ± |1⟩)/√2`.
pub fn ket_x(plus: bool) -> StateVector {
    let s = if plus { 1.0 } else { -1.0 };
    StateVector::from_slice(&[c(FRAC_1_SQRT_2, 0.), c(s * FRAC_1_SQRT_2, 0.)])
        .expect("basis state is normalized")
}

/// `cos α |+⟩_z + sin α |−⟩_z`.
pub fn alpha_state(alpha: f64) -> StateVector {
    StateVector::from_slice(&[c(alpha.cos(), 0.), c(alpha.sin(), 0.)]).expect("unit vector")
}

/// Two-qubit product of σ_x eigenstates, `|s1⟩_x|s2⟩_x`.
pub fn x_product(plus1: bool, plus2: bool) -> StateVector {
    ket_x(plus1).tensor(&ket_x(plus2))
}

/// Bell states written in the σ_x eigenbasis of each qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellState {
    /// (|++⟩ + |−−⟩)/√2
    PsiPlus,
    /// (|++⟩ − |−−⟩)/√2
    PsiMinus,
    /// (|+−⟩ + |−+⟩)/√2
    PhiPlus,
    /// (|+−⟩ − |−+⟩)/√2
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus];

    pub fn label(self) -> &'static str {
        match self {
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        }
    }

    pub fn state(self) -> StateVector {
        let (a, b, sign) = match self {
            BellState::PsiPlus => ((true, true), (false, false), 1.0),
            BellState::PsiMinus => ((true, true), (false, false), -1.0),
            BellState::PhiPlus => ((true, false), (false, true), 1.0),
            BellState::PhiMinus => ((true, false), (false, true), -1.0),
        };
        let first = x_product(a.0, a.1);
        let second = x_product(b.0, b.1);
        let amps = first.amplitudes() + second.amplitudes() * c(sign, 0.0);
        StateVector::new(amps).expect("Bell state is non-zero")
    }
}

/// Parse a two-qubit input label: a Bell state (`psi+`, `psi-`, `phi+`,
/// `phi-`) or a σ_x product such as `++` or `+-`.
pub fn two_qubit_state(label: &str) -> Result<StateVector> {
    if let Some(bell) = BellState::ALL.iter().find(|b| b.label() == label) {
        return Ok(bell.state());
    }
    let signs: Vec<bool> = label
        .chars()
        .map(|ch| match ch {
            '+' => Ok(true),
            '-' => Ok(false),
            _ => Err(()),
        })
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("unknown two-qubit state '{label}'")))?;
    match signs.as_slice() {
        [a, b] => Ok(x_product(*a, *b)),
        _ => Err(Error::InvalidInput(format!("unknown two-qubit state '{label}'"))),
    }
}

/// Distribution of random pure input states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StateSampler {
    /// Unitarily invariant measure: normalized complex Gaussian amplitudes.
    #[default]
    Haar,
    /// Hyperspherical moduli angles uniform on [0, π/2] and relative phases
    /// uniform on [0, 2π).
    Parametric,
}

/// The `index`-th state of the stream defined by `seed`. Each index owns its
/// own ChaCha stream, so results do not depend on evaluation order.
pub fn sample_state(dim: usize, seed: u64, index: u64, sampler: StateSampler) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let amps: Vec<_> = match sampler {
        StateSampler::Haar => (0..dim)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
        StateSampler::Parametric => {
            let mut remaining = 1.0;
            let mut moduli = Vec::with_capacity(dim);
            for _ in 0..dim - 1 {
                let angle = rng.random::<f64>() * PI / 2.0;
                moduli.push(remaining * angle.cos());
                remaining *= angle.sin();
            }
            moduli.push(remaining);
            moduli
                .into_iter()
                .enumerate()
                .map(|(k, r)| {
                    let phase = if k == 0 { 0.0 } else { rng.random::<f64>() * 2.0 * PI };
                    c(r * phase.cos(), r * phase.sin())
                })
                .collect()
        }
    };
    StateVector::from_slice(&amps).expect("sampled amplitudes are non-zero")
}
