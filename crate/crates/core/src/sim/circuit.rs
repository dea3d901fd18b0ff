use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::gate::{apply_gate, AngleSource, Gate, GateKind};
use crate::sim::Statevector;

/// Ordered gate list with symbolic parameter and data slots. Immutable once built;
/// the builder methods consume and return `self`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_parameter_slots: usize,
    pub num_data_slots: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            num_parameter_slots: 0,
            num_data_slots: 0,
            gates: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.num_qubits)?;
            match gate.angle {
                Some(AngleSource::Param { slot, .. }) if slot >= self.num_parameter_slots => {
                    return Err(Error::SlotOutOfRange {
                        kind: "parameter",
                        slot,
                        count: self.num_parameter_slots,
                    });
                }
                Some(AngleSource::Data { slot, .. }) if slot >= self.num_data_slots => {
                    return Err(Error::SlotOutOfRange {
                        kind: "data",
                        slot,
                        count: self.num_data_slots,
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn push(mut self, gate: Gate) -> Self {
        if let Some(AngleSource::Param { slot, .. }) = gate.angle {
            self.num_parameter_slots = self.num_parameter_slots.max(slot + 1);
        }
        if let Some(AngleSource::Data { slot, .. }) = gate.angle {
            self.num_data_slots = self.num_data_slots.max(slot + 1);
        }
        self.gates.push(gate);
        self
    }

    pub fn h(self, q: usize) -> Self {
        self.push(Gate {
            kind: GateKind::H,
            targets: vec![q],
            controls: vec![],
            angle: None,
        })
    }

    pub fn x(self, q: usize) -> Self {
        self.push(Gate {
            kind: GateKind::X,
            targets: vec![q],
            controls: vec![],
            angle: None,
        })
    }

    pub fn cz(self, a: usize, b: usize) -> Self {
        self.push(Gate {
            kind: GateKind::Cz,
            targets: vec![a, b],
            controls: vec![],
            angle: None,
        })
    }

    pub fn cnot(self, control: usize, target: usize) -> Self {
        self.push(Gate {
            kind: GateKind::Cnot,
            targets: vec![control, target],
            controls: vec![],
            angle: None,
        })
    }

    pub fn rotation(self, kind: GateKind, q: usize, angle: AngleSource) -> Self {
        self.push(Gate {
            kind,
            targets: vec![q],
            controls: vec![],
            angle: Some(angle),
        })
    }

    pub fn rx(self, q: usize, angle: AngleSource) -> Self {
        self.rotation(GateKind::Rx, q, angle)
    }

    pub fn ry(self, q: usize, angle: AngleSource) -> Self {
        self.rotation(GateKind::Ry, q, angle)
    }

    pub fn rz(self, q: usize, angle: AngleSource) -> Self {
        self.rotation(GateKind::Rz, q, angle)
    }

    pub fn pauli_rotation(self, label: &str, targets: Vec<usize>, angle: AngleSource) -> Self {
        self.push(Gate {
            kind: GateKind::PauliRotation(label.to_string()),
            targets,
            controls: vec![],
            angle: Some(angle),
        })
    }

    /// Declare slot counts explicitly (useful when not every slot is referenced).
    pub fn with_slots(mut self, parameter_slots: usize, data_slots: usize) -> Self {
        self.num_parameter_slots = self.num_parameter_slots.max(parameter_slots);
        self.num_data_slots = self.num_data_slots.max(data_slots);
        self
    }

    pub fn check_bindings(&self, params: &[f64], data: &[f64]) -> Result<()> {
        if params.len() != self.num_parameter_slots {
            return Err(Error::LengthMismatch {
                what: "parameters",
                expected: self.num_parameter_slots,
                got: params.len(),
            });
        }
        if data.len() != self.num_data_slots {
            return Err(Error::LengthMismatch {
                what: "data values",
                expected: self.num_data_slots,
                got: data.len(),
            });
        }
        Ok(())
    }

    /// Apply all gates in order to `state`.
    ///
    /// `angle_shift` adds an offset to the resolved angle of the gate at the given
    /// index; the parameter-shift rule uses it to nudge a single gate occurrence.
    pub fn apply_to(
        &self,
        state: &mut Statevector,
        params: &[f64],
        data: &[f64],
        angle_shift: Option<(usize, f64)>,
    ) -> Result<()> {
        self.check_bindings(params, data)?;
        for (idx, gate) in self.gates.iter().enumerate() {
            let angle = match &gate.angle {
                Some(src) => {
                    let mut a = src.resolve(params, data)?;
                    if let Some((shift_idx, shift)) = angle_shift {
                        if shift_idx == idx {
                            a += shift;
                        }
                    }
                    Some(a)
                }
                None => None,
            };
            apply_gate(state, gate, angle)?;
        }
        Ok(())
    }

    /// State obtained by applying all gates in order to |0...0>.
    pub fn run(&self, params: &[f64], data: &[f64]) -> Result<Statevector> {
        let mut state = Statevector::zero(self.num_qubits)?;
        self.apply_to(&mut state, params, data, None)?;
        Ok(state)
    }

    /// Gate-wise inverse circuit (reversed order, negated angles).
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            num_parameter_slots: self.num_parameter_slots,
            num_data_slots: self.num_data_slots,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates re-declared on a wider register.
    pub fn widened(&self, num_qubits: usize) -> Result<Circuit> {
        if num_qubits < self.num_qubits {
            return Err(Error::InvalidArgument(
                "widened circuit must not shrink".into(),
            ));
        }
        let mut c = self.clone();
        c.num_qubits = num_qubits;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_circuit_is_identity() {
        let s = Circuit::new(2).run(&[], &[]).unwrap();
        assert_eq!(s.amplitudes()[0].re, 1.0);
    }

    #[test]
    fn cz_acts_trivially_on_zero_partner() {
        let s = Circuit::new(2).h(0).cz(0, 1).run(&[], &[]).unwrap();
        let f = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0b00].re, f, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[0b01].re, f, epsilon = 1e-15);
    }

    #[test]
    fn slot_length_mismatch_is_an_error() {
        let c = Circuit::new(1).rz(0, AngleSource::param(0));
        assert!(c.run(&[], &[]).is_err());
        assert!(c.run(&[0.1], &[]).is_ok());
    }

    #[test]
    fn teleportation_gadget_pre_measurement_state() {
        // Data qubit 0 in alpha|0> + beta|1>, ancilla 1 as RZ(x)|+>, CNOT data -> ancilla.
        let x = 1.3;
        let (alpha, beta) = (0.6, 0.8);
        let mut state = Statevector::from_amplitudes(
            2,
            vec![
                num_complex::Complex64::new(alpha, 0.0),
                num_complex::Complex64::new(beta, 0.0),
                num_complex::Complex64::ZERO,
                num_complex::Complex64::ZERO,
            ],
        )
        .unwrap();
        let gadget = Circuit::new(2)
            .h(1)
            .rz(1, AngleSource::Constant { value: x })
            .cnot(0, 1);
        gadget.apply_to(&mut state, &[], &[], None).unwrap();

        // Expected: (1/sqrt2)(RZ(x)|psi> ⊗ |0> + RZ(-x)|psi> ⊗ |1>), the
        // accepted branch carrying the teleported rotation and the rejected
        // branch needing an RZ(2x) correction.
        let f = std::f64::consts::FRAC_1_SQRT_2;
        let e = |phi: f64| num_complex::Complex64::from_polar(1.0, phi);
        let expected = [
            f * alpha * e(-x / 2.0), // qubit0=0, anc=0
            f * beta * e(x / 2.0),   // qubit0=1, anc=0
            f * alpha * e(x / 2.0),  // qubit0=0, anc=1
            f * beta * e(-x / 2.0),  // qubit0=1, anc=1
        ];
        for (got, want) in state.amplitudes().iter().zip(&expected) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_returns_to_zero() {
        let c = Circuit::new(2)
            .h(0)
            .rz(0, AngleSource::Constant { value: 0.4 })
            .cnot(0, 1)
            .ry(1, AngleSource::Constant { value: -1.1 });
        let mut s = c.run(&[], &[]).unwrap();
        c.inverse().apply_to(&mut s, &[], &[], None).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }
}
