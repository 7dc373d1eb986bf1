//! Experiment configuration: a config file, overridden by flags, completed
//! with per-experiment defaults.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use geophase_core::{BathTopology, CouplingAxis, GateKind, StateSampler};
use serde::de::{DeserializeOwned, IntoDeserializer};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig2Grid,
    Fig3DynFidelity,
    Fig4Contour,
    Fig6AvgFidelity,
    Fig7Concurrence,
    SingleRun,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2Grid => "fig2-grid",
            Experiment::Fig3DynFidelity => "fig3-dyn-fidelity",
            Experiment::Fig4Contour => "fig4-contour",
            Experiment::Fig6AvgFidelity => "fig6-avg-fidelity",
            Experiment::Fig7Concurrence => "fig7-concurrence",
            Experiment::SingleRun => "single-run",
        }
    }
}

fn parse_named<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    let de: serde::de::value::StrDeserializer<'_, serde::de::value::Error> = s.trim().into_deserializer();
    T::deserialize(de).map_err(|e| e.to_string())
}

/// Settings shared by all experiments. Every field is optional here; unset
/// fields take the experiment's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    /// Config file (TOML, or a JSON sidecar from an earlier run)
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Single-qubit field scale B0 (GHz)
    #[arg(long)]
    pub b0: Option<f64>,
    /// Two-qubit exchange scale Jm (GHz)
    #[arg(long)]
    pub jm: Option<f64>,
    /// Dimensionless bath coupling
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Spectral cutoff (GHz); defaults to 50·B0 or 50·Jm
    #[arg(long)]
    pub omega_cutoff: Option<f64>,
    /// Bath temperatures kT (GHz)
    #[arg(long, value_parser = Grid::from_str_parser)]
    pub kt: Option<Grid>,
    /// Phase grid: start:stop:points or a list, values like 3pi/4 allowed
    #[arg(long, value_parser = Grid::from_str_parser)]
    pub phi: Option<Grid>,
    /// Input-state angle grid for single-qubit runs
    #[arg(long, value_parser = Grid::from_str_parser)]
    pub alpha: Option<Grid>,
    /// Pauli axis coupled to the bath: z or x
    #[arg(long, value_parser = parse_named::<CouplingAxis>)]
    pub coupling_axis: Option<CouplingAxis>,
    /// Bath topologies: common, independent
    #[arg(long, value_delimiter = ',', value_parser = parse_named::<BathTopology>)]
    pub bath_topology: Option<Vec<BathTopology>>,
    /// Gates: aa-single, dyn-single, aa-two, dyn-two
    #[arg(long, value_delimiter = ',', value_parser = parse_named::<GateKind>)]
    pub gate: Option<Vec<GateKind>>,
    /// Two-qubit inputs: psi+, psi-, phi+, phi-, or products like ++
    #[arg(long, value_delimiter = ',')]
    pub input: Option<Vec<String>>,
    /// Random input states per average
    #[arg(long)]
    pub n_states: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random-state distribution: haar or parametric
    #[arg(long, value_parser = parse_named::<StateSampler>)]
    pub sampler: Option<StateSampler>,
    /// Points on the uniform time grid (segment ends are added)
    #[arg(long)]
    pub time_samples: Option<usize>,
    /// Follow a one-segment gate until this time (ns)
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Output CSV; the JSON sidecar is written next to it
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Grid {
    pub fn from_str_parser(s: &str) -> std::result::Result<Grid, String> {
        s.parse()
    }
}

impl Overrides {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            config: self.config.or(base.config),
            b0: self.b0.or(base.b0),
            jm: self.jm.or(base.jm),
            lambda: self.lambda.or(base.lambda),
            omega_cutoff: self.omega_cutoff.or(base.omega_cutoff),
            kt: self.kt.or(base.kt),
            phi: self.phi.or(base.phi),
            alpha: self.alpha.or(base.alpha),
            coupling_axis: self.coupling_axis.or(base.coupling_axis),
            bath_topology: self.bath_topology.or(base.bath_topology),
            gate: self.gate.or(base.gate),
            input: self.input.or(base.input),
            n_states: self.n_states.or(base.n_states),
            seed: self.seed.or(base.seed),
            sampler: self.sampler.or(base.sampler),
            time_samples: self.time_samples.or(base.time_samples),
            t_final: self.t_final.or(base.t_final),
            output: self.output.or(base.output),
        }
    }
}

/// Reads a TOML config, or the `config` table of a JSON sidecar.
pub fn load_file(path: &Path) -> Result<Overrides> {
    let err = |message: String| CliError::ConfigFile { path: path.to_path_buf(), message };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    if path.extension().is_some_and(|e| e == "json") {
        #[derive(Deserialize)]
        struct Sidecar {
            config: serde_json::Value,
        }
        let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
        let mut value = sidecar.config;
        if let Some(map) = value.as_object_mut() {
            map.remove("experiment");
        }
        serde_json::from_value(value).map_err(|e| err(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| err(e.to_string()))
    }
}

/// Fully resolved settings, recorded verbatim in the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub experiment: Experiment,
    pub b0: f64,
    pub jm: f64,
    pub lambda: f64,
    pub omega_cutoff: f64,
    pub kt: Grid,
    pub phi: Grid,
    pub alpha: Grid,
    pub coupling_axis: CouplingAxis,
    pub bath_topology: Vec<BathTopology>,
    pub gate: Vec<GateKind>,
    pub input: Vec<String>,
    pub n_states: usize,
    pub seed: u64,
    pub sampler: StateSampler,
    pub time_samples: usize,
    pub t_final: Option<f64>,
    pub output: PathBuf,
}

const DEFAULT_B0: f64 = 10.0;
const DEFAULT_JM: f64 = 5.0;
const DEFAULT_LAMBDA: f64 = 1e-3;
const DEFAULT_SEED: u64 = 20_240_917;
/// Temperatures, as multiples of the field scale, where no figure fixes them.
const TEMPERATURE_FACTORS: [f64; 3] = [0.0, 0.05, 0.1];

fn two_qubit(experiment: Experiment, gates: &[GateKind]) -> bool {
    match experiment {
        Experiment::Fig6AvgFidelity | Experiment::Fig7Concurrence => true,
        Experiment::SingleRun => gates.iter().any(|g| g.is_two_qubit()),
        _ => false,
    }
}

fn experiment_fixes_gates(experiment: Experiment) -> bool {
    matches!(experiment, Experiment::Fig2Grid | Experiment::Fig3DynFidelity | Experiment::Fig4Contour)
}

fn positive(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be a positive number, got {v}")))
    }
}

fn exactly_one<T: Clone>(field: &'static str, values: &[T]) -> Result<()> {
    if values.len() == 1 {
        Ok(())
    } else {
        Err(CliError::config(field, format!("this experiment needs exactly one value, got {}", values.len())))
    }
}

impl RunConfig {
    pub fn resolve(experiment: Experiment, o: Overrides) -> Result<RunConfig> {
        let b0 = positive("b0", o.b0.unwrap_or(DEFAULT_B0))?;
        let jm = positive("jm", o.jm.unwrap_or(DEFAULT_JM))?;
        let lambda = o.lambda.unwrap_or(DEFAULT_LAMBDA);
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(CliError::config("lambda", format!("must be >= 0, got {lambda}")));
        }
        let default_gates = match experiment {
            Experiment::Fig2Grid | Experiment::Fig4Contour => vec![GateKind::AaSingle, GateKind::DynSingle],
            Experiment::Fig3DynFidelity => vec![GateKind::DynSingle],
            Experiment::Fig6AvgFidelity | Experiment::Fig7Concurrence => vec![GateKind::AaTwo, GateKind::DynTwo],
            Experiment::SingleRun => vec![GateKind::AaTwo],
        };
        let o_gate_given = o.gate.is_some();
        let gate = o.gate.unwrap_or(default_gates);
        if gate.is_empty() {
            return Err(CliError::config("gate", "no gates given"));
        }
        let two = two_qubit(experiment, &gate);
        if matches!(experiment, Experiment::Fig6AvgFidelity | Experiment::Fig7Concurrence | Experiment::SingleRun)
            && gate.iter().any(|g| g.is_two_qubit() != two)
        {
            return Err(CliError::config("gate", "cannot mix single- and two-qubit gates"));
        }
        if matches!(experiment, Experiment::Fig6AvgFidelity | Experiment::Fig7Concurrence) && !two {
            return Err(CliError::config("gate", "this experiment needs two-qubit gates"));
        }
        let scale = if two { jm } else { b0 };
        let omega_cutoff = positive("omega-cutoff", o.omega_cutoff.unwrap_or(50.0 * scale))?;

        let factors = |f: &[f64]| Grid(f.iter().map(|x| x * scale).collect());
        let kt = o.kt.unwrap_or_else(|| match experiment {
            Experiment::Fig2Grid | Experiment::SingleRun => Grid(vec![0.0]),
            Experiment::Fig4Contour => factors(&[0.05]),
            _ => factors(&TEMPERATURE_FACTORS),
        });
        if kt.values().iter().any(|&t| !(t.is_finite() && t >= 0.0)) {
            return Err(CliError::config("kt", "temperatures must be >= 0"));
        }
        let phi = o.phi.unwrap_or_else(|| match experiment {
            Experiment::Fig2Grid | Experiment::Fig4Contour => Grid::linspace(0.0, PI, 50),
            Experiment::Fig3DynFidelity => Grid(vec![FRAC_PI_2]),
            Experiment::Fig6AvgFidelity => Grid::linspace(0.0, PI, 17),
            Experiment::Fig7Concurrence | Experiment::SingleRun => Grid(vec![FRAC_PI_4]),
        });
        let alpha = o.alpha.unwrap_or_else(|| match experiment {
            Experiment::Fig2Grid | Experiment::Fig4Contour => Grid::linspace(0.0, PI, 50),
            Experiment::Fig3DynFidelity => Grid::linspace(0.0, PI, 101),
            _ => Grid(vec![FRAC_PI_4]),
        });
        let bath_topology = o.bath_topology.unwrap_or_else(|| match experiment {
            Experiment::SingleRun => vec![BathTopology::Common],
            _ => vec![BathTopology::Common, BathTopology::Independent],
        });
        let input = o.input.unwrap_or_else(|| match experiment {
            Experiment::SingleRun => vec!["psi+".to_string()],
            _ => ["psi+", "psi-", "phi+", "phi-"].map(String::from).to_vec(),
        });
        for label in &input {
            geophase_core::states::two_qubit_state(label).map_err(|e| CliError::config("input", e.to_string()))?;
        }
        let n_states = o.n_states.unwrap_or(1000);
        if n_states == 0 {
            return Err(CliError::config("n-states", "must be >= 1"));
        }
        let time_samples = o.time_samples.unwrap_or(101);
        if time_samples < 2 {
            return Err(CliError::config("time-samples", "must be >= 2"));
        }
        if let Some(t) = o.t_final {
            positive("t-final", t)?;
        }

        match experiment {
            Experiment::Fig2Grid | Experiment::Fig4Contour => exactly_one("kt", kt.values())?,
            Experiment::Fig7Concurrence => exactly_one("phi", phi.values())?,
            Experiment::SingleRun => {
                exactly_one("kt", kt.values())?;
                exactly_one("phi", phi.values())?;
                exactly_one("gate", &gate)?;
                exactly_one("bath-topology", &bath_topology)?;
                if two {
                    exactly_one("input", &input)?;
                } else {
                    exactly_one("alpha", alpha.values())?;
                }
            }
            _ => {}
        }
        if gate.contains(&GateKind::DynTwo) {
            if let Some(bad) = phi.values().iter().find(|p| !(0.0..=PI).contains(*p)) {
                return Err(CliError::config("phi", format!("dyn-two needs phi in [0, pi], got {bad}")));
            }
        }
        if experiment_fixes_gates(experiment) && o_gate_given {
            return Err(CliError::config("gate", format!("{} always uses its own gates", experiment.name())));
        }

        Ok(RunConfig {
            experiment,
            b0,
            jm,
            lambda,
            omega_cutoff,
            kt,
            phi,
            alpha,
            coupling_axis: o.coupling_axis.unwrap_or_default(),
            bath_topology,
            gate,
            input,
            n_states,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            sampler: o.sampler.unwrap_or_default(),
            time_samples,
            t_final: o.t_final,
            output: o.output.unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name()))),
        })
    }

    /// Field scale of the gates in this run.
    pub fn field_scale(&self, gate: GateKind) -> f64 {
        if gate.is_two_qubit() {
            self.jm
        } else {
            self.b0
        }
    }
}
