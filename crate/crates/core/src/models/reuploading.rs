use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{AngleSource, Circuit, GateKind, Observable, Statevector};

/// A circuit interlaying data-encoding and variational gates, measured against
/// a fixed observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReuploadingModel {
    pub circuit: Circuit,
    pub observable: Observable,
}

impl ReuploadingModel {
    pub fn new(circuit: Circuit, observable: Observable) -> Result<Self> {
        if observable.num_qubits != circuit.num_qubits {
            return Err(Error::QubitCountMismatch {
                left: observable.num_qubits,
                right: circuit.num_qubits,
            });
        }
        circuit.validate()?;
        observable.validate()?;
        let first_param = circuit
            .gates
            .iter()
            .position(|g| matches!(g.angle, Some(AngleSource::Param { .. })));
        let re_uploads = match first_param {
            Some(p) => circuit.gates[p..]
                .iter()
                .any(|g| matches!(g.angle, Some(AngleSource::Data { .. }))),
            None => false,
        };
        if !re_uploads {
            return Err(Error::InvalidModel(
                "no data gate appears after the first variational gate; this is an explicit model"
                    .into(),
            ));
        }
        Ok(Self { circuit, observable })
    }

    pub fn num_params(&self) -> usize {
        self.circuit.num_parameter_slots
    }

    pub fn data_arity(&self) -> usize {
        self.circuit.num_data_slots
    }

    pub fn eval(&self, params: &[f64], x: &[f64]) -> Result<f64> {
        let state = self.circuit.run(params, x)?;
        self.observable.expectation(&state)
    }

    pub(crate) fn eval_shifted(
        &self,
        params: &[f64],
        x: &[f64],
        gate_idx: usize,
        shift: f64,
    ) -> Result<f64> {
        let mut state = Statevector::zero(self.circuit.num_qubits)?;
        self.circuit
            .apply_to(&mut state, params, x, Some((gate_idx, shift)))?;
        self.observable.expectation(&state)
    }

    /// Indices of the data-encoding gates, in circuit order.
    pub fn encoding_gate_indices(&self) -> Vec<usize> {
        self.circuit
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| matches!(g.angle, Some(AngleSource::Data { .. })))
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks that every encoding gate is a single-qubit RZ of a data slot, the
    /// form the mappings consume, and returns (gate index, target, slot, scale).
    pub fn rz_encoding_gates(&self) -> Result<Vec<(usize, usize, usize, f64)>> {
        let mut out = Vec::new();
        for (i, g) in self.circuit.gates.iter().enumerate() {
            if let Some(AngleSource::Data { slot, scale }) = g.angle {
                let is_rz = matches!(g.kind, GateKind::Rz)
                    || matches!(&g.kind, GateKind::PauliRotation(p) if p == "Z");
                if !is_rz || !g.controls.is_empty() {
                    return Err(Error::Unmappable(format!(
                        "encoding gate {i} is not an uncontrolled single-qubit RZ"
                    )));
                }
                out.push((i, g.targets[0], slot, scale));
            }
        }
        Ok(out)
    }
}

/// Either parametrized model family, for equivalence checking.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ParamModel {
    Explicit(crate::models::ExplicitModel),
    Reuploading(ReuploadingModel),
}

impl ParamModel {
    pub fn num_params(&self) -> usize {
        match self {
            ParamModel::Explicit(m) => m.num_params(),
            ParamModel::Reuploading(m) => m.num_params(),
        }
    }

    pub fn data_arity(&self) -> usize {
        match self {
            ParamModel::Explicit(m) => m.data_arity(),
            ParamModel::Reuploading(m) => m.data_arity(),
        }
    }

    pub fn eval(&self, params: &[f64], x: &[f64]) -> Result<f64> {
        match self {
            ParamModel::Explicit(m) => m.eval(params, x),
            ParamModel::Reuploading(m) => m.eval(params, x),
        }
    }
}
