use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{AngleSource, Circuit, Statevector};

/// angle value = scale * x[slot]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleFn {
    pub slot: usize,
    pub scale: f64,
}

/// Fixed map from an input vector to a quantum feature state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureEncoding {
    /// U_z(x) H^n U_z(x) H^n with single-Z and ZZ couplings; `dim` data
    /// components are assigned to qubits cyclically, so `dim == qubits` is the
    /// textbook form.
    Havlicek { qubits: usize, dim: usize },
    /// Fixed-point bit registers: component values reduced mod 1 and written as
    /// `bits` most-significant bits on dedicated ancillas (X gates), after `working`
    /// untouched qubits.
    BitString {
        working: usize,
        dim: usize,
        components: Vec<AngleFn>,
        bits: u32,
    },
    /// Gadget product state |0^working> (x) prod_{i,j} RZ(2^{j-1} h_i(x))|+>,
    /// with one extra |0> witness qubit per angle when reps >= 2.
    GadgetProduct {
        working: usize,
        dim: usize,
        angles: Vec<AngleFn>,
        reps: usize,
    },
    /// Reserved for the data re-uploading parity circuit; has no fixed state.
    ParityAngles { dim: usize },
}

impl FeatureEncoding {
    pub fn havlicek(qubits: usize) -> Self {
        FeatureEncoding::Havlicek {
            qubits,
            dim: qubits,
        }
    }

    pub fn bit_string(dim: usize, bits: u32) -> Self {
        FeatureEncoding::BitString {
            working: 0,
            dim,
            components: (0..dim).map(|slot| AngleFn { slot, scale: 1.0 }).collect(),
            bits,
        }
    }

    /// Input arity expected by `encode`.
    pub fn arity(&self) -> usize {
        match self {
            FeatureEncoding::Havlicek { dim, .. }
            | FeatureEncoding::BitString { dim, .. }
            | FeatureEncoding::GadgetProduct { dim, .. }
            | FeatureEncoding::ParityAngles { dim } => *dim,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            FeatureEncoding::Havlicek { qubits, .. } => *qubits,
            FeatureEncoding::BitString {
                working,
                components,
                bits,
                ..
            } => working + components.len() * *bits as usize,
            FeatureEncoding::GadgetProduct {
                working,
                angles,
                reps,
                ..
            } => {
                let witnesses = if *reps >= 2 { angles.len() } else { 0 };
                working + angles.len() * reps + witnesses
            }
            FeatureEncoding::ParityAngles { .. } => 1,
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arity() {
            return Err(Error::LengthMismatch {
                what: "input components",
                expected: self.arity(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// The bit pattern of every register, for BitString encodings.
    pub fn bit_pattern(&self, x: &[f64]) -> Result<Vec<u64>> {
        match self {
            FeatureEncoding::BitString {
                components, bits, ..
            } => {
                self.check_arity(x)?;
                Ok(components
                    .iter()
                    .map(|c| quantize_fraction(c.scale * x[c.slot], *bits))
                    .collect())
            }
            _ => Err(Error::InvalidArgument(
                "bit_pattern only applies to BitString encodings".into(),
            )),
        }
    }

    /// rho(x) as a pure statevector.
    pub fn encode(&self, x: &[f64]) -> Result<Statevector> {
        self.check_arity(x)?;
        match self {
            FeatureEncoding::Havlicek { qubits, dim } => {
                havlicek_circuit(*qubits, *dim).run(&[], &havlicek_slots(*qubits, *dim, x))
            }
            FeatureEncoding::BitString {
                working,
                components,
                bits,
                ..
            } => {
                let n = self.num_qubits();
                let mut index = 0usize;
                for (i, c) in components.iter().enumerate() {
                    let pattern = quantize_fraction(c.scale * x[c.slot], *bits);
                    for j in 1..=*bits as usize {
                        // bit j (MSB first) lands on ancilla working + i*bits + j - 1
                        if pattern >> (*bits as usize - j) & 1 == 1 {
                            index |= 1 << (working + i * *bits as usize + j - 1);
                        }
                    }
                }
                Statevector::basis(n, index)
            }
            FeatureEncoding::GadgetProduct { .. } => {
                let circuit = self.gadget_circuit()?;
                let slots = self.gadget_slots(x)?;
                circuit.run(&[], &slots)
            }
            FeatureEncoding::ParityAngles { .. } => Err(Error::InvalidModel(
                "ParityAngles is reserved for data re-uploading models and has no fixed feature state"
                    .into(),
            )),
        }
    }

    /// The data-slot circuit preparing the gadget product state.
    pub(crate) fn gadget_circuit(&self) -> Result<Circuit> {
        let FeatureEncoding::GadgetProduct {
            working,
            angles,
            reps,
            ..
        } = self
        else {
            return Err(Error::InvalidArgument(
                "gadget_circuit only applies to GadgetProduct encodings".into(),
            ));
        };
        let mut c = Circuit::new(self.num_qubits()).with_slots(0, angles.len());
        for (i, _) in angles.iter().enumerate() {
            for j in 1..=*reps {
                let q = working + i * reps + (j - 1);
                c = c.h(q).rz(
                    q,
                    AngleSource::data(i, (1u64 << (j - 1)) as f64),
                );
            }
        }
        Ok(c)
    }

    fn gadget_slots(&self, x: &[f64]) -> Result<Vec<f64>> {
        let FeatureEncoding::GadgetProduct { angles, .. } = self else {
            unreachable!()
        };
        Ok(angles.iter().map(|a| a.scale * x[a.slot]).collect())
    }

    /// Fidelity kernel k(x, x') = Tr[rho(x) rho(x')], computed by simulation.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.encode(x)?.fidelity(&self.encode(y)?)
    }

    /// Closed-form kernel where one exists (BitString, GadgetProduct).
    pub fn kernel_analytic(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        self.check_arity(x)?;
        self.check_arity(y)?;
        Ok(match self {
            FeatureEncoding::BitString { .. } => {
                let a = self.bit_pattern(x)?;
                let b = self.bit_pattern(y)?;
                Some(if a == b { 1.0 } else { 0.0 })
            }
            FeatureEncoding::GadgetProduct { angles, reps, .. } => {
                let mut k = 1.0;
                for a in angles {
                    let delta = a.scale * (x[a.slot] - y[a.slot]);
                    for j in 1..=*reps {
                        let c = ((1u64 << (j - 1)) as f64 * delta / 2.0).cos();
                        k *= c * c;
                    }
                }
                Some(k)
            }
            _ => None,
        })
    }

    /// Symmetric Gram matrix over a point set, rows computed in parallel.
    pub fn gram_matrix(&self, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty point set".into()));
        }
        let states = points
            .iter()
            .map(|x| self.encode(x))
            .collect::<Result<Vec<_>>>()?;
        let m = states.len();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if j < i {
                            0.0
                        } else if j == i {
                            1.0
                        } else {
                            states[i].fidelity(&states[j]).unwrap()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut gram = rows;
        for i in 0..m {
            for j in 0..i {
                gram[i][j] = gram[j][i];
            }
        }
        Ok(gram)
    }
}

/// Bits of `value` reduced mod 1, rounded to the nearest `bits`-bit fraction
/// (wrapping, so 0.999... rounds to 0).
fn quantize_fraction(value: f64, bits: u32) -> u64 {
    let frac = value.rem_euclid(1.0);
    let levels = 1u64 << bits;
    (frac * levels as f64).round() as u64 % levels
}

/// Data-slot values consumed by the Havlicek circuit: singles then ordered pairs.
pub(crate) fn havlicek_slots(qubits: usize, dim: usize, x: &[f64]) -> Vec<f64> {
    let mut slots = Vec::with_capacity(dim + dim * (dim - 1) / 2);
    slots.extend_from_slice(x);
    for i in 0..dim {
        for j in (i + 1)..dim {
            if i % qubits != j % qubits {
                slots.push(x[i] * x[j]);
            } else {
                slots.push(0.0);
            }
        }
    }
    slots
}

/// U_z(x) H^n U_z(x) H^n as a data-slot circuit; all U_z terms commute, so the
/// term-by-term product is exact.
pub(crate) fn havlicek_circuit(qubits: usize, dim: usize) -> Circuit {
    let num_slots = dim + dim * (dim - 1) / 2;
    let mut c = Circuit::new(qubits).with_slots(0, num_slots);
    for _ in 0..2 {
        for q in 0..qubits {
            c = c.h(q);
        }
        // exp(-i pi x_i Z) = PauliRotation angle 2 pi x_i
        for i in 0..dim {
            c = c.pauli_rotation("Z", vec![i % qubits], AngleSource::data(i, TAU));
        }
        let mut pair_slot = dim;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (qi, qj) = (i % qubits, j % qubits);
                if qi != qj {
                    c = c.pauli_rotation("ZZ", vec![qi, qj], AngleSource::data(pair_slot, TAU));
                }
                pair_slot += 1;
            }
        }
    }
    c
}
