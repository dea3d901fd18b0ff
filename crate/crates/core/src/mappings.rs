//! Constructive mappings from data re-uploading models to explicit models:
//! an approximate bit-string construction and exact gate-teleportation
//! constructions (simple and nested), with resource accounting and a
//! simulation-backed equivalence verifier.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{AngleFn, ExplicitModel, FeatureEncoding, ParamModel, ReuploadingModel};
use crate::sim::{AngleSource, Circuit, Gate, GateKind, MAX_QUBITS};

/// Resource accounting for one mapping application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub kind: MappingKind,
    pub added_qubits: usize,
    pub added_gates: usize,
    /// Bits per encoding-gate register (approximate mapping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    /// Nested gate-teleportation repetitions per encoding gate (nested mapping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    pub acceptance_probability: f64,
    pub observable_rescale: f64,
    /// Guaranteed sup-norm error of the mapped model; 0 for exact mappings.
    pub guaranteed_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingKind {
    Approximate,
    ExactSimple,
    ExactNested,
}

fn budget_check(total_qubits: usize) -> Result<()> {
    if total_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: total_qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Bits needed so that the bit-string approximation stays within `delta`:
/// p = ceil(log2(2 sqrt(2) D ||O|| / delta)).
pub fn precision_bits(num_encoding_gates: usize, norm_bound: f64, delta: f64) -> Result<u32> {
    if delta <= 0.0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let raw = (2.0 * 2.0_f64.sqrt() * num_encoding_gates as f64 * norm_bound / delta).log2();
    Ok(raw.ceil().max(1.0) as u32)
}

/// Repetitions needed so that (1 - 2^-N)^D >= 1 - delta':
/// N = ceil(log2(1 / (1 - (1 - delta')^(1/D)))).
pub fn nested_repetitions(num_encoding_gates: usize, delta_prime: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&delta_prime) || delta_prime == 0.0 {
        return Err(Error::InvalidArgument(
            "delta' must lie in (0, 1)".into(),
        ));
    }
    let d = num_encoding_gates as f64;
    let per_gate = 1.0 - (1.0 - delta_prime).powf(1.0 / d);
    Ok((1.0 / per_gate).log2().ceil().max(1.0) as usize)
}

/// Replace every encoding gate by `p` fixed controlled RZ(2 pi 2^-j) rotations
/// controlled on a bit-string register holding h_i(x)/(2 pi), giving an explicit
/// model within `delta` of the source everywhere.
pub fn map_approximate(src: &ReuploadingModel, delta: f64) -> Result<(ExplicitModel, MappingReport)> {
    let enc_gates = src.rz_encoding_gates()?;
    if enc_gates.is_empty() {
        return Err(Error::Unmappable("model has no encoding gates".into()));
    }
    let n = src.circuit.num_qubits;
    let d = enc_gates.len();
    let p = precision_bits(d, src.observable.norm_bound(), delta)?;
    let total = n + d * p as usize;
    budget_check(total)?;

    let components: Vec<AngleFn> = enc_gates
        .iter()
        .map(|&(_, _, slot, scale)| AngleFn {
            slot,
            scale: scale / TAU,
        })
        .collect();
    let encoding = FeatureEncoding::BitString {
        working: n,
        dim: src.circuit.num_data_slots,
        components,
        bits: p,
    };

    let mut variational = Circuit::new(total).with_slots(src.circuit.num_parameter_slots, 0);
    let mut gadget = 0usize;
    for (idx, gate) in src.circuit.gates.iter().enumerate() {
        if enc_gates.iter().any(|&(i, _, _, _)| i == idx) {
            let target = gate.targets[0];
            for j in 1..=p as usize {
                variational = variational.push(Gate {
                    kind: GateKind::Rz,
                    targets: vec![target],
                    controls: vec![n + gadget * p as usize + j - 1],
                    angle: Some(AngleSource::Constant {
                        value: TAU / (1u64 << j) as f64,
                    }),
                });
            }
            gadget += 1;
        } else {
            variational = variational.push(gate.clone());
        }
    }

    let observable = src.observable.widened(total)?;
    let model = ExplicitModel::new(encoding, variational, observable)?;
    let report = MappingReport {
        kind: MappingKind::Approximate,
        added_qubits: d * p as usize,
        added_gates: 2 * d * p as usize, // X encodings plus controlled rotations
        precision_bits: Some(p),
        repetitions: None,
        acceptance_probability: 1.0,
        observable_rescale: 1.0,
        guaranteed_error: delta,
    };
    Ok((model, report))
}

/// One teleportation gadget per encoding gate: ancilla prepared as
/// RZ(h_i(x))|+>, CNOT from the data qubit, acceptance projector |0><0| on the
/// ancilla and an observable rescale of 2^D. Exact in expectation.
pub fn map_exact_simple(src: &ReuploadingModel) -> Result<(ExplicitModel, MappingReport)> {
    let enc_gates = src.rz_encoding_gates()?;
    if enc_gates.is_empty() {
        return Err(Error::Unmappable("model has no encoding gates".into()));
    }
    let n = src.circuit.num_qubits;
    let d = enc_gates.len();
    if d > 12 {
        return Err(Error::Unmappable(format!(
            "{d} encoding gates exceed the simple-mapping budget of 12"
        )));
    }
    let total = n + d;
    budget_check(total)?;

    let angles: Vec<AngleFn> = enc_gates
        .iter()
        .map(|&(_, _, slot, scale)| AngleFn { slot, scale })
        .collect();
    let encoding = FeatureEncoding::GadgetProduct {
        working: n,
        dim: src.circuit.num_data_slots,
        angles,
        reps: 1,
    };

    let mut variational = Circuit::new(total).with_slots(src.circuit.num_parameter_slots, 0);
    let mut gadget = 0usize;
    for (idx, gate) in src.circuit.gates.iter().enumerate() {
        if enc_gates.iter().any(|&(i, _, _, _)| i == idx) {
            variational = variational.cnot(gate.targets[0], n + gadget);
            gadget += 1;
        } else {
            variational = variational.push(gate.clone());
        }
    }

    let mut observable = src.observable.widened(total)?;
    for i in 0..d {
        observable.projectors.push((n + i, 0));
    }
    observable.scale *= (1u64 << d) as f64;

    let model = ExplicitModel::new(encoding, variational, observable)?;
    let report = MappingReport {
        kind: MappingKind::ExactSimple,
        added_qubits: d,
        added_gates: 3 * d, // H + RZ preparation, CNOT teleportation
        precision_bits: None,
        repetitions: None,
        acceptance_probability: 0.5_f64.powi(d as i32),
        observable_rescale: (1u64 << d) as f64,
        guaranteed_error: 0.0,
    };
    Ok((model, report))
}

/// Nested gate teleportation: per encoding gate, N ancillas prepared as
/// RZ(2^(j-1) h_i(x))|+>, a correction cascade of multi-controlled CNOTs, and
/// a witness qubit flipped only when every nested teleportation failed. The
/// acceptance projector keeps witness = 0 and the observable is rescaled by
/// p_acc^-1 with p_acc = (1 - 2^-N)^D.
pub fn map_exact_nested(
    src: &ReuploadingModel,
    delta_prime: f64,
) -> Result<(ExplicitModel, MappingReport)> {
    let enc_gates = src.rz_encoding_gates()?;
    if enc_gates.is_empty() {
        return Err(Error::Unmappable("model has no encoding gates".into()));
    }
    let n = src.circuit.num_qubits;
    let d = enc_gates.len();
    let reps = nested_repetitions(d, delta_prime)?;
    if reps == 1 {
        // A single repetition has no retries to record, so the construction
        // collapses to the single-shot gadget with the same acceptance rate.
        let (model, _) = map_exact_simple(src)?;
        let p_acc = 0.5_f64.powi(d as i32);
        let report = MappingReport {
            kind: MappingKind::ExactNested,
            added_qubits: d,
            added_gates: 3 * d,
            precision_bits: None,
            repetitions: Some(1),
            acceptance_probability: p_acc,
            observable_rescale: 1.0 / p_acc,
            guaranteed_error: 0.0,
        };
        return Ok((model, report));
    }
    let total = n + d * reps + d;
    budget_check(total)?;

    let angles: Vec<AngleFn> = enc_gates
        .iter()
        .map(|&(_, _, slot, scale)| AngleFn { slot, scale })
        .collect();
    let encoding = FeatureEncoding::GadgetProduct {
        working: n,
        dim: src.circuit.num_data_slots,
        angles,
        reps,
    };
    let witness_base = n + d * reps;

    let mut variational = Circuit::new(total).with_slots(src.circuit.num_parameter_slots, 0);
    let mut gadget = 0usize;
    for (idx, gate) in src.circuit.gates.iter().enumerate() {
        if enc_gates.iter().any(|&(i, _, _, _)| i == idx) {
            let data_qubit = gate.targets[0];
            let anc = |j: usize| n + gadget * reps + j; // j = 0-based repetition
            for j in 0..reps {
                // Teleport, conditioned on every earlier repetition having failed.
                let mut controls: Vec<usize> = vec![data_qubit];
                controls.extend((0..j).map(anc));
                variational = variational.push(Gate {
                    kind: GateKind::MultiControlledX,
                    targets: vec![anc(j)],
                    controls,
                    angle: None,
                });
            }
            // Witness records the all-failures event.
            variational = variational.push(Gate {
                kind: GateKind::MultiControlledX,
                targets: vec![witness_base + gadget],
                controls: (0..reps).map(anc).collect(),
                angle: None,
            });
            gadget += 1;
        } else {
            variational = variational.push(gate.clone());
        }
    }

    let p_acc = (1.0 - 0.5_f64.powi(reps as i32)).powi(d as i32);
    let mut observable = src.observable.widened(total)?;
    for i in 0..d {
        observable.projectors.push((witness_base + i, 0));
    }
    observable.scale /= p_acc;

    let model = ExplicitModel::new(encoding, variational, observable)?;
    let report = MappingReport {
        kind: MappingKind::ExactNested,
        added_qubits: d * reps + d,
        added_gates: d * (3 * reps + 1), // preparations, cascade, witness flips
        precision_bits: None,
        repetitions: Some(reps),
        acceptance_probability: p_acc,
        observable_rescale: 1.0 / p_acc,
        guaranteed_error: 0.0,
    };
    Ok((model, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub trials: usize,
    pub tolerance: f64,
    pub max_abs_diff: f64,
    pub pass: bool,
}

/// Samples (x, theta) uniformly (x in [-pi, pi per component], theta in
/// [0, 2 pi)) and reports the worst deviation between the two models.
pub fn verify_equivalence(
    a: &ParamModel,
    b: &ParamModel,
    trials: usize,
    tolerance: f64,
    rng_seed: u64,
) -> Result<EquivalenceReport> {
    if a.data_arity() != b.data_arity() || a.num_params() != b.num_params() {
        return Err(Error::InvalidArgument(format!(
            "model arity mismatch: data {}/{} params {}/{}",
            a.data_arity(),
            b.data_arity(),
            a.num_params(),
            b.num_params()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let draws: Vec<(Vec<f64>, Vec<f64>)> = (0..trials)
        .map(|_| {
            let x: Vec<f64> = (0..a.data_arity())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let theta: Vec<f64> = (0..a.num_params())
                .map(|_| rng.random_range(0.0..TAU))
                .collect();
            (x, theta)
        })
        .collect();
    let max_abs_diff = draws
        .par_iter()
        .map(|(x, theta)| {
            let fa = a.eval(theta, x)?;
            let fb = b.eval(theta, x)?;
            Ok((fa - fb).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(EquivalenceReport {
        trials,
        tolerance,
        max_abs_diff,
        pass: max_abs_diff <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Observable;

    fn toy_model(d: usize) -> ReuploadingModel {
        let mut c = Circuit::new(1);
        for i in 0..d {
            c = c
                .ry(0, AngleSource::param(i))
                .rz(0, AngleSource::data(i % 2.max(1), 1.0));
        }
        let c = c.ry(0, AngleSource::param(d));
        ReuploadingModel::new(c, Observable::single(1, 0, 'X').unwrap()).unwrap()
    }

    #[test]
    fn precision_bits_examples() {
        assert_eq!(precision_bits(1, 1.0, 0.1).unwrap(), 5);
        assert_eq!(precision_bits(4, 1.0, 0.1).unwrap(), 7);
    }

    #[test]
    fn nested_repetition_examples() {
        assert_eq!(nested_repetitions(1, 0.1).unwrap(), 4);
        assert_eq!(nested_repetitions(2, 0.5).unwrap(), 2);
    }

    #[test]
    fn simple_report_constants() {
        let (_, report) = map_exact_simple(&toy_model(3)).unwrap();
        assert_eq!(report.added_qubits, 3);
        assert_eq!(report.acceptance_probability, 0.125);
        assert_eq!(report.observable_rescale, 8.0);
    }

    #[test]
    fn nested_report_pinned_constants() {
        let (_, report) = map_exact_nested(&toy_model(1), 0.1).unwrap();
        assert_eq!(report.repetitions, Some(4));
        assert_eq!(report.acceptance_probability, 0.9375);
    }

    #[test]
    fn exact_simple_is_equivalent() {
        let src = toy_model(2);
        let (mapped, _) = map_exact_simple(&src).unwrap();
        let report = verify_equivalence(
            &ParamModel::Reuploading(src),
            &ParamModel::Explicit(mapped),
            50,
            1e-9,
            11,
        )
        .unwrap();
        assert!(report.pass, "max diff {}", report.max_abs_diff);
    }

    #[test]
    fn exact_nested_is_equivalent() {
        let src = toy_model(1);
        let (mapped, _) = map_exact_nested(&src, 0.4).unwrap();
        let report = verify_equivalence(
            &ParamModel::Reuploading(src),
            &ParamModel::Explicit(mapped),
            50,
            1e-9,
            13,
        )
        .unwrap();
        assert!(report.pass, "max diff {}", report.max_abs_diff);
    }

    #[test]
    fn approximate_respects_delta() {
        let src = toy_model(1);
        let delta = 0.1;
        let (mapped, report) = map_approximate(&src, delta).unwrap();
        assert_eq!(report.precision_bits, Some(5));
        let eq = verify_equivalence(
            &ParamModel::Reuploading(src),
            &ParamModel::Explicit(mapped),
            200,
            delta,
            17,
        )
        .unwrap();
        assert!(eq.pass, "max diff {}", eq.max_abs_diff);
        // The bound is not tight to delta/100.
        assert!(eq.max_abs_diff > delta / 100.0);
    }

    #[test]
    fn model_vs_itself_is_zero() {
        let src = toy_model(2);
        let report = verify_equivalence(
            &ParamModel::Reuploading(src.clone()),
            &ParamModel::Reuploading(src),
            5,
            1e-12,
            1,
        )
        .unwrap();
        assert_eq!(report.max_abs_diff, 0.0);
    }

    #[test]
    fn rejects_delta_out_of_range() {
        assert!(map_approximate(&toy_model(1), 0.0).is_err());
        assert!(map_exact_nested(&toy_model(1), 1.0).is_err());
    }
}
