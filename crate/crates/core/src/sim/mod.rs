//! Exact statevector simulation: states, gates, circuits and observables.
//!
//! Gate application works in place on the amplitude array via bit-masked
//! strides; no 2^n x 2^n matrix is ever materialized.

mod circuit;
mod gate;
mod observable;
mod statevector;

pub use circuit::Circuit;
pub use gate::{apply_gate, AngleSource, Gate, GateKind};
pub use observable::{Observable, PauliTerm};
pub use statevector::{Statevector, MAX_QUBITS};
