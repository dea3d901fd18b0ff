//! Label generation and dataset splitting for the regression task.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::{Dataset, Split};
use crate::models::{hardware_efficient_ansatz, layer_schedule, FeatureEncoding};
use crate::sim::Observable;

/// Provenance of one generated labeling function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub qubits: usize,
    pub layers: usize,
    pub theta: Vec<f64>,
    /// Factor that set the training-label standard deviation to 1.
    pub weight_norm: f64,
    pub rng_seed: u64,
}

/// Quantum labels: y = w_norm * <psi(x)| V(theta)^dag Z_1 V(theta) |psi(x)>
/// with theta drawn uniformly from [0, 2 pi) and w_norm fixed so the labels
/// of `fit_split` (the training inputs) have standard deviation exactly 1.
pub fn generate_labels(
    fit_split: &[Vec<f64>],
    other_splits: &[&[Vec<f64>]],
    qubits: usize,
    rng_seed: u64,
) -> Result<(Vec<Vec<f64>>, LabelRecord)> {
    if fit_split.is_empty() {
        return Err(Error::InvalidArgument("empty fitting split".into()));
    }
    let layers = layer_schedule(qubits)?;
    let circuit = hardware_efficient_ansatz(qubits, layers)?;
    let encoding = FeatureEncoding::havlicek(qubits);
    let observable = Observable::single(qubits, 0, 'Z')?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let theta: Vec<f64> = (0..circuit.num_parameter_slots)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();

    let eval = |x: &Vec<f64>| -> Result<f64> {
        let mut state = encoding.encode(x)?;
        circuit.apply_to(&mut state, &theta, &[], None)?;
        observable.expectation(&state)
    };
    let raw_fit: Vec<f64> = fit_split.par_iter().map(eval).collect::<Result<_>>()?;
    let m = raw_fit.len() as f64;
    let mean = raw_fit.iter().sum::<f64>() / m;
    let std = (raw_fit.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / m).sqrt();
    if std < 1e-12 {
        return Err(Error::ZeroVariance(0));
    }
    let weight_norm = 1.0 / std;

    let mut labels = vec![raw_fit.iter().map(|y| y * weight_norm).collect::<Vec<f64>>()];
    for split in other_splits {
        let raw: Vec<f64> = split.par_iter().map(eval).collect::<Result<_>>()?;
        labels.push(raw.iter().map(|y| y * weight_norm).collect());
    }
    Ok((
        labels,
        LabelRecord {
            qubits,
            layers,
            theta,
            weight_norm,
            rng_seed,
        },
    ))
}

/// Index sets of a three-way split: training indices drawn from the training
/// pool, validation and test from the test pool, all without replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub rng_seed: u64,
}

pub fn make_splits(
    train_pool: usize,
    test_pool: usize,
    m_train: usize,
    m_val: usize,
    m_test: usize,
    rng_seed: u64,
) -> Result<SplitIndices> {
    if m_train > train_pool {
        return Err(Error::PoolExhausted {
            need: m_train,
            have: train_pool,
        });
    }
    if m_val + m_test > test_pool {
        return Err(Error::PoolExhausted {
            need: m_val + m_test,
            have: test_pool,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut train: Vec<usize> = (0..train_pool).collect();
    train.shuffle(&mut rng);
    train.truncate(m_train);
    let mut held: Vec<usize> = (0..test_pool).collect();
    held.shuffle(&mut rng);
    let validation = held[..m_val].to_vec();
    let test = held[m_val..m_val + m_test].to_vec();
    Ok(SplitIndices {
        train,
        validation,
        test,
        rng_seed,
    })
}

/// Synthetic stand-in for the image corpus: standard-normal vectors, for
/// offline runs of the regression pipeline.
pub fn synthetic_inputs(count: usize, dim: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        })
        .collect()
}

/// CSV with header x_1..x_n,y; row formatting uses the shortest exact float
/// representation, so reruns are byte-identical.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let n = data.arity();
    let mut out = String::new();
    for j in 1..=n {
        out.push_str(&format!("x_{j},"));
    }
    out.push_str("y\n");
    for (x, y) in data.inputs.iter().zip(&data.labels) {
        for v in x {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{y}\n"));
    }
    out
}

pub fn dataset_from_csv(text: &str, split: Split) -> Result<Dataset> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty dataset CSV".into()))?;
    let cols = header.split(',').count();
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.parse()
                    .map_err(|_| Error::Config(format!("bad float {f:?} on data row {lineno}")))
            })
            .collect::<Result<_>>()?;
        if fields.len() != cols {
            return Err(Error::Config(format!(
                "row {lineno} has {} fields, expected {cols}",
                fields.len()
            )));
        }
        labels.push(*fields.last().unwrap());
        inputs.push(fields[..cols - 1].to_vec());
    }
    Dataset::new(inputs, labels, split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn training_labels_have_unit_std() {
        let x = synthetic_inputs(30, 2, 1);
        let held = synthetic_inputs(10, 2, 2);
        let (labels, record) = generate_labels(&x, &[&held], 2, 3).unwrap();
        let m = labels[0].len() as f64;
        let mean = labels[0].iter().sum::<f64>() / m;
        let var = labels[0].iter().map(|y| (y - mean).powi(2)).sum::<f64>() / m;
        assert_abs_diff_eq!(var.sqrt(), 1.0, epsilon = 1e-10);
        assert_eq!(labels[1].len(), 10);
        // Raw labels are Z expectations, bounded by the rescale factor.
        for y in &labels[0] {
            assert!(y.abs() <= record.weight_norm + 1e-12);
        }
    }

    #[test]
    fn label_generation_is_deterministic() {
        let x = synthetic_inputs(12, 2, 4);
        let (a, ra) = generate_labels(&x, &[], 2, 9).unwrap();
        let (b, rb) = generate_labels(&x, &[], 2, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn splits_default_sizes_and_disjointness() {
        let s = make_splits(60_000, 10_000, 1000, 100, 100, 5).unwrap();
        assert_eq!(s.train.len(), 1000);
        assert_eq!(s.validation.len(), 100);
        assert_eq!(s.test.len(), 100);
        let mut seen = s.validation.clone();
        seen.extend(&s.test);
        seen.sort_unstable();
        let before = seen.len();
        seen.dedup();
        assert_eq!(seen.len(), before, "validation/test overlap");
    }

    #[test]
    fn identical_seed_identical_splits() {
        assert_eq!(
            make_splits(500, 200, 100, 20, 20, 8).unwrap(),
            make_splits(500, 200, 100, 20, 20, 8).unwrap()
        );
    }

    #[test]
    fn exhausted_pool_rejected() {
        assert!(make_splits(10, 100, 50, 10, 10, 0).is_err());
        assert!(make_splits(100, 15, 50, 10, 10, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = Dataset::new(
            vec![vec![0.25, -1.5], vec![3.0, 0.125]],
            vec![1.0, -0.5],
            Split::Train,
        )
        .unwrap();
        let csv = dataset_to_csv(&data);
        assert!(csv.starts_with("x_1,x_2,y\n"));
        let back = dataset_from_csv(&csv, Split::Train).unwrap();
        assert_eq!(back, data);
    }
}
