use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FeatureEncoding;
use crate::sim::{Circuit, Observable, Statevector};

/// f_theta(x) = w * <V(theta) U_phi(x) 0 | O | V(theta) U_phi(x) 0>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitModel {
    pub encoding: FeatureEncoding,
    /// Parameter slots only, applied after the encoding.
    pub variational: Circuit,
    pub observable: Observable,
    /// Trainable observable weight w.
    pub observable_weight: f64,
}

impl ExplicitModel {
    pub fn new(
        encoding: FeatureEncoding,
        variational: Circuit,
        observable: Observable,
    ) -> Result<Self> {
        if variational.num_data_slots != 0 {
            return Err(Error::InvalidModel(
                "explicit variational circuit must not consume data slots".into(),
            ));
        }
        if variational.num_qubits != encoding.num_qubits() {
            return Err(Error::QubitCountMismatch {
                left: variational.num_qubits,
                right: encoding.num_qubits(),
            });
        }
        if observable.num_qubits != variational.num_qubits {
            return Err(Error::QubitCountMismatch {
                left: observable.num_qubits,
                right: variational.num_qubits,
            });
        }
        variational.validate()?;
        observable.validate()?;
        Ok(Self {
            encoding,
            variational,
            observable,
            observable_weight: 1.0,
        })
    }

    pub fn num_params(&self) -> usize {
        self.variational.num_parameter_slots
    }

    pub fn data_arity(&self) -> usize {
        self.encoding.arity()
    }

    pub fn eval(&self, params: &[f64], x: &[f64]) -> Result<f64> {
        let state = self.encoding.encode(x)?;
        self.eval_from_state(&state, params)
    }

    /// Evaluation from a pre-encoded feature state; training loops cache the
    /// encodings and only re-run the variational part.
    pub fn eval_from_state(&self, encoded: &Statevector, params: &[f64]) -> Result<f64> {
        let mut state = encoded.clone();
        self.variational.apply_to(&mut state, params, &[], None)?;
        Ok(self.observable_weight * self.observable.expectation(&state)?)
    }

    /// Same, with a single gate occurrence nudged by `shift` radians
    /// (parameter-shift evaluations).
    pub(crate) fn eval_shifted(
        &self,
        encoded: &Statevector,
        params: &[f64],
        gate_idx: usize,
        shift: f64,
    ) -> Result<f64> {
        let mut state = encoded.clone();
        self.variational
            .apply_to(&mut state, params, &[], Some((gate_idx, shift)))?;
        Ok(self.observable_weight * self.observable.expectation(&state)?)
    }
}
