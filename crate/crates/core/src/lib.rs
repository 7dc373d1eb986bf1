//! Bloch-Redfield simulation of geometric (Aharonov-Anandan) and dynamical
//! phase gates coupled to Ohmic oscillator baths.
//!
//! Units: ħ = 1, energies in GHz, times in ns.

pub mod bath;
pub mod error;
pub mod gates;
pub mod metrics;
pub mod qmath;
pub mod quad;
pub mod redfield;
pub mod states;

pub use bath::{BathSpec, RateSet};
pub use error::{Error, Result};
pub use gates::{GateKind, GateSegment, GateSequence, SegmentParams};
pub use metrics::{AverageFidelity, ConcurrencePoint, FidelityReport};
pub use qmath::{ComplexMatrix, StateVector};
pub use redfield::{BathTopology, CouplingAxis, CouplingSpec, Generator, Trajectory};
pub use states::{BellState, StateSampler};
