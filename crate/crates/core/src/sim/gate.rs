use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Statevector;

/// Where a parametric gate gets its rotation angle from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AngleSource {
    /// Fixed angle in radians.
    Constant { value: f64 },
    /// angle = scale * theta[slot] + offset
    Param { slot: usize, scale: f64, offset: f64 },
    /// angle = scale * x[slot]
    Data { slot: usize, scale: f64 },
}

impl AngleSource {
    pub fn param(slot: usize) -> Self {
        AngleSource::Param {
            slot,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn data(slot: usize, scale: f64) -> Self {
        AngleSource::Data { slot, scale }
    }

    pub fn resolve(&self, params: &[f64], data: &[f64]) -> Result<f64> {
        Ok(match *self {
            AngleSource::Constant { value } => value,
            AngleSource::Param { slot, scale, offset } => {
                let theta = params.get(slot).ok_or(Error::SlotOutOfRange {
                    kind: "parameter",
                    slot,
                    count: params.len(),
                })?;
                scale * theta + offset
            }
            AngleSource::Data { slot, scale } => {
                let x = data.get(slot).ok_or(Error::SlotOutOfRange {
                    kind: "data",
                    slot,
                    count: data.len(),
                })?;
                scale * x
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    H,
    X,
    Rx,
    Ry,
    Rz,
    Cz,
    Cnot,
    /// exp(-i angle P / 2) for the Pauli string over the gate's targets.
    PauliRotation(String),
    /// X on the target, conditioned on all controls reading 1.
    MultiControlledX,
}

impl GateKind {
    pub fn is_parametric(&self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::PauliRotation(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<AngleSource>,
}

impl Gate {
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        for &c in &self.controls {
            if self.targets.contains(&c) {
                return Err(Error::BadGateWiring);
            }
        }
        let expected_targets = match &self.kind {
            GateKind::Cz | GateKind::Cnot => 2,
            GateKind::PauliRotation(s) => {
                if s.is_empty() || !s.chars().all(|c| "IXYZ".contains(c)) {
                    return Err(Error::BadPauliString(s.clone()));
                }
                s.len()
            }
            _ => 1,
        };
        if self.targets.len() != expected_targets {
            return Err(Error::BadGateWiring);
        }
        // duplicate targets
        for (i, a) in self.targets.iter().enumerate() {
            if self.targets[i + 1..].contains(a) {
                return Err(Error::BadGateWiring);
            }
        }
        Ok(())
    }

    /// Gate with every angle negated; H/X/CZ/CNOT/MCX are self-inverse.
    pub fn inverse(&self) -> Gate {
        let angle = self.angle.map(|a| match a {
            AngleSource::Constant { value } => AngleSource::Constant { value: -value },
            AngleSource::Param { slot, scale, offset } => AngleSource::Param {
                slot,
                scale: -scale,
                offset: -offset,
            },
            AngleSource::Data { slot, scale } => AngleSource::Data { slot, scale: -scale },
        });
        Gate {
            kind: self.kind.clone(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
            angle,
        }
    }
}

fn control_mask(controls: &[usize]) -> usize {
    controls.iter().fold(0usize, |m, &c| m | (1 << c))
}

/// Apply a 2x2 unitary to `target`, restricted to amplitudes whose control bits are all 1.
fn apply_single_qubit(
    state: &mut Statevector,
    target: usize,
    controls: &[usize],
    u: [[Complex64; 2]; 2],
) {
    let t = 1usize << target;
    let cmask = control_mask(controls);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & t == 0 && i & cmask == cmask {
            let a = amps[i];
            let b = amps[i | t];
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[i | t] = u[1][0] * a + u[1][1] * b;
        }
    }
}

/// Masks of the X-like (bit flip) and Z-like (phase) parts of a Pauli string,
/// plus the number of Y factors.
fn pauli_masks(label: &str, targets: &[usize]) -> (usize, usize, u32) {
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    let mut num_y = 0u32;
    for (ch, &q) in label.chars().zip(targets) {
        match ch {
            'X' => x_mask |= 1 << q,
            'Y' => {
                x_mask |= 1 << q;
                z_mask |= 1 << q;
                num_y += 1;
            }
            'Z' => z_mask |= 1 << q,
            _ => {}
        }
    }
    (x_mask, z_mask, num_y)
}

/// Phase c(b) such that P|b> = c(b) |b XOR x_mask>.
fn pauli_phase(b: usize, z_mask: usize, num_y: u32) -> Complex64 {
    let sign = if (b & z_mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let i_pow = match num_y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    i_pow * sign
}

/// exp(-i angle P / 2) applied in place, restricted to the control subspace.
fn apply_pauli_rotation(
    state: &mut Statevector,
    label: &str,
    targets: &[usize],
    controls: &[usize],
    angle: f64,
) {
    let (x_mask, z_mask, num_y) = pauli_masks(label, targets);
    let cmask = control_mask(controls);
    let cos = Complex64::new((angle / 2.0).cos(), 0.0);
    let misin = Complex64::new(0.0, -(angle / 2.0).sin());
    let amps = state.amplitudes_mut();
    if x_mask == 0 {
        for (b, amp) in amps.iter_mut().enumerate() {
            if b & cmask == cmask {
                *amp *= cos + misin * pauli_phase(b, z_mask, num_y);
            }
        }
    } else {
        for b in 0..amps.len() {
            let b2 = b ^ x_mask;
            if b < b2 && b & cmask == cmask {
                let a = amps[b];
                let c = amps[b2];
                amps[b] = cos * a + misin * pauli_phase(b2, z_mask, num_y) * c;
                amps[b2] = cos * c + misin * pauli_phase(b, z_mask, num_y) * a;
            }
        }
    }
}

/// Apply `gate` to `state` with its angle already resolved (`None` for fixed gates).
pub fn apply_gate(state: &mut Statevector, gate: &Gate, angle: Option<f64>) -> Result<()> {
    gate.validate(state.num_qubits())?;
    let need_angle = || angle.ok_or(Error::MissingAngle);
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    match &gate.kind {
        GateKind::H => {
            let h = Complex64::new(frac, 0.0);
            apply_single_qubit(
                state,
                gate.targets[0],
                &gate.controls,
                [[h, h], [h, -h]],
            );
        }
        GateKind::X => {
            let u = [
                [Complex64::ZERO, Complex64::ONE],
                [Complex64::ONE, Complex64::ZERO],
            ];
            apply_single_qubit(state, gate.targets[0], &gate.controls, u);
        }
        GateKind::MultiControlledX => {
            let u = [
                [Complex64::ZERO, Complex64::ONE],
                [Complex64::ONE, Complex64::ZERO],
            ];
            apply_single_qubit(state, gate.targets[0], &gate.controls, u);
        }
        GateKind::Rx => {
            apply_pauli_rotation(state, "X", &gate.targets, &gate.controls, need_angle()?)
        }
        GateKind::Ry => {
            apply_pauli_rotation(state, "Y", &gate.targets, &gate.controls, need_angle()?)
        }
        GateKind::Rz => {
            apply_pauli_rotation(state, "Z", &gate.targets, &gate.controls, need_angle()?)
        }
        GateKind::Cz => {
            let mask = (1 << gate.targets[0]) | (1 << gate.targets[1]) | control_mask(&gate.controls);
            for (b, amp) in state.amplitudes_mut().iter_mut().enumerate() {
                if b & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        GateKind::Cnot => {
            let u = [
                [Complex64::ZERO, Complex64::ONE],
                [Complex64::ONE, Complex64::ZERO],
            ];
            let mut controls = gate.controls.clone();
            controls.push(gate.targets[0]);
            apply_single_qubit(state, gate.targets[1], &controls, u);
        }
        GateKind::PauliRotation(label) => {
            apply_pauli_rotation(state, label, &gate.targets, &gate.controls, need_angle()?)
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single(kind: GateKind, target: usize) -> Gate {
        Gate {
            kind,
            targets: vec![target],
            controls: vec![],
            angle: None,
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = Statevector::zero(1).unwrap();
        apply_gate(&mut s, &single(GateKind::H, 0), None).unwrap();
        let f = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, f, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, f, epsilon = 1e-15);
    }

    #[test]
    fn rz_on_plus() {
        let x = 0.7;
        let mut s = Statevector::zero(1).unwrap();
        apply_gate(&mut s, &single(GateKind::H, 0), None).unwrap();
        apply_gate(&mut s, &single(GateKind::Rz, 0), Some(x)).unwrap();
        let f = std::f64::consts::FRAC_1_SQRT_2;
        let expect0 = Complex64::from_polar(f, -x / 2.0);
        let expect1 = Complex64::from_polar(f, x / 2.0);
        assert_abs_diff_eq!((s.amplitudes()[0] - expect0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((s.amplitudes()[1] - expect1).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cnot_basis_action() {
        // |10> means qubit 0 = 1, qubit 1 = 0, i.e. basis index 1.
        let mut s = Statevector::basis(2, 0b01).unwrap();
        let gate = Gate {
            kind: GateKind::Cnot,
            targets: vec![0, 1],
            controls: vec![],
            angle: None,
        };
        apply_gate(&mut s, &gate, None).unwrap();
        assert_eq!(s.amplitudes()[0b11], Complex64::ONE);
    }

    #[test]
    fn pauli_rotation_z_matches_rz() {
        for &angle in &[0.3, -1.2, 2.9] {
            let mut a = Statevector::zero(1).unwrap();
            apply_gate(&mut a, &single(GateKind::H, 0), None).unwrap();
            let mut b = a.clone();
            apply_gate(&mut a, &single(GateKind::Rz, 0), Some(angle)).unwrap();
            apply_gate(
                &mut b,
                &single(GateKind::PauliRotation("Z".into()), 0),
                Some(angle),
            )
            .unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn bad_wiring_rejected() {
        let gate = Gate {
            kind: GateKind::Cnot,
            targets: vec![0, 1],
            controls: vec![1],
            angle: None,
        };
        let mut s = Statevector::zero(2).unwrap();
        assert!(apply_gate(&mut s, &gate, None).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        let mut s = Statevector::zero(1).unwrap();
        assert!(apply_gate(&mut s, &single(GateKind::H, 3), None).is_err());
    }
}
