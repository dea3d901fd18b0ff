use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Statevector;

/// One weighted Pauli string over all qubits (alphabet I/X/Y/Z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub weight: f64,
    pub paulis: String,
}

/// Real-weighted Pauli sum, optionally tensored with single-qubit acceptance
/// projectors, scaled by a real multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub num_qubits: usize,
    pub terms: Vec<PauliTerm>,
    /// (qubit, accepted bit); amplitudes with any other bit value are projected out.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub projectors: Vec<(usize, u8)>,
    pub scale: f64,
}

impl Observable {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
            projectors: Vec::new(),
            scale: 1.0,
        }
    }

    /// Single Pauli operator `p` on one qubit, weight 1.
    pub fn single(num_qubits: usize, qubit: usize, p: char) -> Result<Self> {
        let mut label: Vec<char> = vec!['I'; num_qubits];
        *label.get_mut(qubit).ok_or(Error::QubitOutOfRange {
            index: qubit,
            num_qubits,
        })? = p;
        Ok(Self::new(num_qubits).term(1.0, &label.iter().collect::<String>()))
    }

    pub fn term(mut self, weight: f64, paulis: &str) -> Self {
        self.terms.push(PauliTerm {
            weight,
            paulis: paulis.to_string(),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if t.paulis.len() != self.num_qubits
                || !t.paulis.chars().all(|c| "IXYZ".contains(c))
            {
                return Err(Error::BadPauliString(t.paulis.clone()));
            }
        }
        for &(q, b) in &self.projectors {
            if q >= self.num_qubits || b > 1 {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    /// scale * sum |w_k|; an upper bound on the spectral norm, used by the
    /// mapping resource formulas.
    pub fn norm_bound(&self) -> f64 {
        self.scale.abs() * self.terms.iter().map(|t| t.weight.abs()).sum::<f64>()
    }

    /// Re-declare on a wider register, padding every term with I and keeping
    /// existing projectors.
    pub fn widened(&self, num_qubits: usize) -> Result<Observable> {
        if num_qubits < self.num_qubits {
            return Err(Error::InvalidArgument(
                "widened observable must not shrink".into(),
            ));
        }
        let pad: String = "I".repeat(num_qubits - self.num_qubits);
        Ok(Observable {
            num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    weight: t.weight,
                    paulis: format!("{}{}", t.paulis, pad),
                })
                .collect(),
            projectors: self.projectors.clone(),
            scale: self.scale,
        })
    }

    /// Exact expectation scale * <psi| (sum_k w_k P_k) Pi |psi|>; projector
    /// factors are applied by zeroing non-accepted amplitudes in a scratch copy,
    /// never by collapsing the caller's state.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        self.validate()?;
        if state.num_qubits() != self.num_qubits {
            return Err(Error::QubitCountMismatch {
                left: state.num_qubits(),
                right: self.num_qubits,
            });
        }
        let projected;
        let amps: &[Complex64] = if self.projectors.is_empty() {
            state.amplitudes()
        } else {
            let mut mask = 0usize;
            let mut want = 0usize;
            for &(q, b) in &self.projectors {
                mask |= 1 << q;
                if b == 1 {
                    want |= 1 << q;
                }
            }
            projected = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| if i & mask == want { *a } else { Complex64::ZERO })
                .collect::<Vec<_>>();
            &projected
        };

        let mut total = Complex64::ZERO;
        for t in &self.terms {
            let mut x_mask = 0usize;
            let mut z_mask = 0usize;
            let mut num_y = 0u32;
            for (q, ch) in t.paulis.chars().enumerate() {
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
            let i_pow = match num_y % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            // <psi|P|psi> = sum_b conj(psi[b ^ x_mask]) c(b) psi[b]
            let mut acc = Complex64::ZERO;
            for (b, amp) in amps.iter().enumerate() {
                if amp == &Complex64::ZERO {
                    continue;
                }
                let sign = if (b & z_mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                acc += amps[b ^ x_mask].conj() * (i_pow * sign) * amp;
            }
            total += Complex64::new(t.weight, 0.0) * acc;
        }
        Ok(self.scale * total.re)
    }
}
