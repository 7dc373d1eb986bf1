//! One function per experiment. Sweep points run in parallel; rows are
//! assembled in grid order so output does not depend on scheduling.

use geophase_core::bath::BathSpec;
use geophase_core::gates::{self, build_sequence, GateSequence};
use geophase_core::metrics::{average_fidelity, concurrence, f_d_closed_form, fidelity};
use geophase_core::qmath::{self, hermitian_eigenvalues, ComplexMatrix, StateVector};
use geophase_core::redfield::{single_qubit_coupling, two_qubit_couplings, CouplingSpec, Trajectory};
use geophase_core::states::{alpha_state, two_qubit_state};
use geophase_core::{BathTopology, Error as CoreError, GateKind};
use rayon::prelude::*;

use crate::config::{Experiment, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Dataset};

fn bath(cfg: &RunConfig, kt: f64) -> Result<BathSpec> {
    Ok(BathSpec::new(cfg.lambda, cfg.omega_cutoff, kt)?)
}

fn couplings(cfg: &RunConfig, gate: GateKind, kt: f64, topology: BathTopology) -> Result<Vec<CouplingSpec>> {
    let spec = bath(cfg, kt)?;
    Ok(if gate.is_two_qubit() {
        two_qubit_couplings(cfg.coupling_axis, topology, spec)?
    } else {
        single_qubit_coupling(cfg.coupling_axis, spec)?
    })
}

fn sequence(cfg: &RunConfig, gate: GateKind, phi: f64) -> Result<GateSequence> {
    let seq = build_sequence(gate, phi, cfg.field_scale(gate))?;
    match cfg.t_final {
        None => Ok(seq),
        Some(t) if seq.segments.len() == 1 => Ok(seq.extended_to(t)?),
        Some(_) => Err(CliError::config("t-final", format!("{} has several segments and cannot be extended", gate.label()))),
    }
}

/// Concurrence, or NaN when the state fails the positivity check.
fn concurrence_or_nan(rho: &ComplexMatrix, violations: &mut usize) -> Result<f64> {
    match concurrence(rho) {
        Ok(c) => Ok(c),
        Err(CoreError::NumericalPositivity { .. }) => {
            *violations += 1;
            Ok(f64::NAN)
        }
        Err(e) => Err(e.into()),
    }
}

fn positivity_warning(violations: usize, context: &str) -> Option<String> {
    (violations > 0).then(|| {
        format!("{violations} states in {context} have an eigenvalue below -1e-6; their concurrence is written as NaN")
    })
}

pub fn run(cfg: &RunConfig) -> Result<Dataset> {
    match cfg.experiment {
        Experiment::Fig2Grid => fig2(cfg),
        Experiment::Fig3DynFidelity => fig3(cfg),
        Experiment::Fig4Contour => fig4(cfg),
        Experiment::Fig6AvgFidelity => fig6(cfg),
        Experiment::Fig7Concurrence => fig7(cfg),
        Experiment::SingleRun => single_run(cfg),
    }
}

/// Whole-sequence superoperator and target for every Φ of the grid.
fn per_phi(cfg: &RunConfig, gate: GateKind, kt: f64) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let cp = couplings(cfg, gate, kt, BathTopology::Common)?;
    cfg.phi
        .values()
        .par_iter()
        .map(|&phi| {
            let seq = build_sequence(gate, phi, cfg.b0)?;
            Ok((gates::sequence_superoperator(&seq, &cp)?, seq.target_unitary))
        })
        .collect()
}

fn output_fidelity(psi: &StateVector, (sup, target): &(ComplexMatrix, ComplexMatrix)) -> f64 {
    fidelity(psi, target, &qmath::apply_superoperator(sup, &psi.density_matrix()))
}

fn fig2(cfg: &RunConfig) -> Result<Dataset> {
    let aa = per_phi(cfg, GateKind::AaSingle, cfg.kt.values()[0])?;
    let mut data = Dataset::new(&["alpha", "phi", "fidelity_aa"]);
    for &alpha in cfg.alpha.values() {
        let psi = alpha_state(alpha);
        for (&phi, op) in cfg.phi.values().iter().zip(&aa) {
            data.push(vec![alpha.into(), phi.into(), output_fidelity(&psi, op).into()]);
        }
    }
    Ok(data)
}

fn fig3(cfg: &RunConfig) -> Result<Dataset> {
    let mut data = Dataset::new(&["kt", "phi", "alpha", "f_dyn", "f_dyn_closed_form"]);
    for &kt in cfg.kt.values() {
        let spec = bath(cfg, kt)?;
        let dy = per_phi(cfg, GateKind::DynSingle, kt)?;
        for (&phi, op) in cfg.phi.values().iter().zip(&dy) {
            for &alpha in cfg.alpha.values() {
                let f = output_fidelity(&alpha_state(alpha), op);
                let closed = f_d_closed_form(alpha, phi, &spec, cfg.b0);
                data.push(vec![kt.into(), phi.into(), alpha.into(), f.into(), closed.into()]);
            }
        }
    }
    Ok(data)
}

fn fig4(cfg: &RunConfig) -> Result<Dataset> {
    let kt = cfg.kt.values()[0];
    let aa = per_phi(cfg, GateKind::AaSingle, kt)?;
    let dy = per_phi(cfg, GateKind::DynSingle, kt)?;
    let mut data = Dataset::new(&["alpha", "phi", "f_aa", "f_dyn", "diff"]);
    for &alpha in cfg.alpha.values() {
        let psi = alpha_state(alpha);
        for ((&phi, a), d) in cfg.phi.values().iter().zip(&aa).zip(&dy) {
            let (fa, fd) = (output_fidelity(&psi, a), output_fidelity(&psi, d));
            data.push(vec![alpha.into(), phi.into(), fa.into(), fd.into(), (fa - fd).into()]);
        }
    }
    Ok(data)
}

fn fig6(cfg: &RunConfig) -> Result<Dataset> {
    let mut points = Vec::new();
    for &kt in cfg.kt.values() {
        for &topology in &cfg.bath_topology {
            for &gate in &cfg.gate {
                for &phi in cfg.phi.values() {
                    points.push((kt, topology, gate, phi));
                }
            }
        }
    }
    let results: Vec<_> = points
        .par_iter()
        .map(|&(kt, topology, gate, phi)| {
            let seq = build_sequence(gate, phi, cfg.field_scale(gate))?;
            let cp = couplings(cfg, gate, kt, topology)?;
            Ok(average_fidelity(&seq, &cp, cfg.n_states, cfg.seed, cfg.sampler)?)
        })
        .collect::<Result<_>>()?;
    let mut data = Dataset::new(&["kt", "topology", "gate", "phi", "mean_fidelity", "std_error", "n_states"]);
    for (&(kt, topology, gate, phi), avg) in points.iter().zip(results) {
        data.push(vec![
            kt.into(),
            topology.name().into(),
            gate.label().into(),
            phi.into(),
            avg.mean.into(),
            avg.std_error.into(),
            Cell::Int(avg.n_states as u64),
        ]);
    }
    Ok(data)
}

fn trajectory(cfg: &RunConfig, seq: &GateSequence, cp: &[CouplingSpec], rho: &ComplexMatrix) -> Result<Trajectory> {
    Ok(gates::run_sequence(seq, rho, cp, cfg.time_samples)?)
}

fn fig7(cfg: &RunConfig) -> Result<Dataset> {
    let phi = cfg.phi.values()[0];
    let mut runs = Vec::new();
    for &kt in cfg.kt.values() {
        for &topology in &cfg.bath_topology {
            for &gate in &cfg.gate {
                for input in &cfg.input {
                    runs.push((kt, topology, gate, input.as_str()));
                }
            }
        }
    }
    let trajectories: Vec<Trajectory> = runs
        .par_iter()
        .map(|&(kt, topology, gate, input)| {
            let seq = sequence(cfg, gate, phi)?;
            let rho = two_qubit_state(input)?.density_matrix();
            trajectory(cfg, &seq, &couplings(cfg, gate, kt, topology)?, &rho)
        })
        .collect::<Result<_>>()?;
    let mut data = Dataset::new(&["kt", "topology", "gate", "input", "t", "concurrence", "min_eigenvalue"]);
    let mut violations = 0;
    for (&(kt, topology, gate, input), traj) in runs.iter().zip(&trajectories) {
        for (t, rho) in traj.iter() {
            let c = concurrence_or_nan(rho, &mut violations)?;
            data.push(vec![
                kt.into(),
                topology.name().into(),
                gate.label().into(),
                input.into(),
                t.into(),
                c.into(),
                hermitian_eigenvalues(rho)[0].into(),
            ]);
        }
    }
    data.warnings.extend(positivity_warning(violations, "fig7-concurrence"));
    Ok(data)
}

fn single_run(cfg: &RunConfig) -> Result<Dataset> {
    let gate = cfg.gate[0];
    let seq = sequence(cfg, gate, cfg.phi.values()[0])?;
    let two = gate.is_two_qubit();
    let psi = if two { two_qubit_state(&cfg.input[0])? } else { alpha_state(cfg.alpha.values()[0]) };
    let cp = couplings(cfg, gate, cfg.kt.values()[0], cfg.bath_topology[0])?;
    let traj = trajectory(cfg, &seq, &cp, &psi.density_matrix())?;
    let columns: &[&'static str] = if two {
        &["t", "fidelity", "concurrence", "trace", "min_eigenvalue"]
    } else {
        &["t", "fidelity", "trace", "min_eigenvalue"]
    };
    let mut data = Dataset::new(columns);
    let mut violations = 0;
    for (t, rho) in traj.iter() {
        let mut row: Vec<Cell> = vec![t.into(), fidelity(&psi, &seq.ideal_propagator_at(t), rho).into()];
        if two {
            row.push(concurrence_or_nan(rho, &mut violations)?.into());
        }
        row.push(rho.trace().re.into());
        row.push(hermitian_eigenvalues(rho)[0].into());
        data.push(row);
    }
    data.warnings.extend(positivity_warning(violations, "single-run"));
    Ok(data)
}
