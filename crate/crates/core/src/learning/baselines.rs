//! Classical kernel baselines: linear and Gaussian kernel ridge regression
//! with a grid search over the regularization strength (and bandwidth for the
//! Gaussian kernel).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::krr::krr_fit;
use super::Dataset;

/// Regularization grid; the fitted penalty is lambda = 1 / (2C).
pub const C_GRID: [f64; 18] = [
    0.006, 0.015, 0.03, 0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0,
    256.0, 512.0, 1024.0,
];

/// Gaussian bandwidth grid, later divided by n * Var[x] of the training
/// inputs.
pub const GAMMA_GRID: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 20.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Linear,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineFit {
    pub kind: BaselineKind,
    pub c: f64,
    pub gamma: Option<f64>,
    pub alpha: Vec<f64>,
    pub train_loss: f64,
    pub validation_loss: f64,
    /// Every grid point evaluated: (C, gamma, validation loss).
    pub table: Vec<(f64, Option<f64>, f64)>,
}

fn linear_kernel(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn gaussian_kernel(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

fn kernel_matrix<K: Fn(&[f64], &[f64]) -> f64 + Sync>(
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
    k: K,
) -> Vec<Vec<f64>> {
    rows.par_iter()
        .map(|x| cols.iter().map(|y| k(x, y)).collect())
        .collect()
}

fn mse(pred: &[f64], labels: &[f64]) -> f64 {
    pred.iter()
        .zip(labels)
        .map(|(p, y)| (p - y).powi(2))
        .sum::<f64>()
        / labels.len() as f64
}

fn predict(cross: &[Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    cross
        .iter()
        .map(|row| row.iter().zip(alpha).map(|(k, a)| k * a).sum())
        .collect()
}

/// Pooled variance of all training input entries, for the Gaussian bandwidth
/// normalization gamma / (n * Var[x]).
fn pooled_variance(inputs: &[Vec<f64>]) -> f64 {
    let all: Vec<f64> = inputs.iter().flatten().copied().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / all.len() as f64
}

/// Fit KRR for every grid point and keep the hyperparameters with minimal
/// validation loss.
pub fn baseline_grid_search(
    kind: BaselineKind,
    train: &Dataset,
    validation: &Dataset,
) -> Result<BaselineFit> {
    if train.arity() != validation.arity() {
        return Err(Error::LengthMismatch {
            what: "validation arity",
            expected: train.arity(),
            got: validation.arity(),
        });
    }
    let gammas: Vec<Option<f64>> = match kind {
        BaselineKind::Linear => vec![None],
        BaselineKind::Gaussian => {
            let scale = train.arity() as f64 * pooled_variance(&train.inputs);
            if scale <= 0.0 {
                return Err(Error::ZeroVariance(0));
            }
            GAMMA_GRID.iter().map(|g| Some(g / scale)).collect()
        }
    };

    let mut table = Vec::new();
    let mut best: Option<BaselineFit> = None;
    for &gamma in &gammas {
        let k = |x: &[f64], y: &[f64]| match gamma {
            None => linear_kernel(x, y),
            Some(g) => gaussian_kernel(x, y, g),
        };
        let gram = kernel_matrix(&train.inputs, &train.inputs, k);
        let cross_val = kernel_matrix(&validation.inputs, &train.inputs, k);
        for &c in &C_GRID {
            let lambda = 1.0 / (2.0 * c);
            let alpha = krr_fit(&gram, &train.labels, lambda)?;
            let val_loss = mse(&predict(&cross_val, &alpha), &validation.labels);
            table.push((c, gamma, val_loss));
            if best.as_ref().is_none_or(|b| val_loss < b.validation_loss) {
                let train_loss = mse(&predict(&gram, &alpha), &train.labels);
                best = Some(BaselineFit {
                    kind,
                    c,
                    gamma,
                    alpha,
                    train_loss,
                    validation_loss: val_loss,
                    table: Vec::new(),
                });
            }
        }
    }
    let mut fit = best.expect("grids are non-empty");
    fit.table = table;
    Ok(fit)
}

/// Predictions of a fitted baseline on new inputs.
pub fn baseline_predict(fit: &BaselineFit, train: &Dataset, inputs: &[Vec<f64>]) -> Vec<f64> {
    let k = |x: &[f64], y: &[f64]| match fit.gamma {
        None => linear_kernel(x, y),
        Some(g) => gaussian_kernel(x, y, g),
    };
    let cross = kernel_matrix(inputs, &train.inputs, k);
    predict(&cross, &fit.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::Split;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_task(m: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = [0.7, -1.2, 0.4];
        let inputs: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..3).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let labels = inputs
            .iter()
            .map(|x| x.iter().zip(&w).map(|(a, b)| a * b).sum())
            .collect();
        Dataset::new(inputs, labels, Split::Train).unwrap()
    }

    #[test]
    fn linear_task_is_realizable() {
        let train = linear_task(40, 1);
        let val = linear_task(20, 2);
        let fit = baseline_grid_search(BaselineKind::Linear, &train, &val).unwrap();
        assert!(fit.validation_loss < 1e-6, "loss {}", fit.validation_loss);
        assert_eq!(fit.table.len(), 18);
    }

    #[test]
    fn gaussian_grid_size() {
        let train = linear_task(25, 3);
        let val = linear_task(10, 4);
        let fit = baseline_grid_search(BaselineKind::Gaussian, &train, &val).unwrap();
        assert_eq!(fit.table.len(), 18 * 8);
        assert!(fit.gamma.is_some());
    }

    #[test]
    fn selection_is_argmin_of_table() {
        let train = linear_task(20, 5);
        let val = linear_task(10, 6);
        let fit = baseline_grid_search(BaselineKind::Gaussian, &train, &val).unwrap();
        let min = fit
            .table
            .iter()
            .map(|&(_, _, l)| l)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(fit.validation_loss, min);
    }
}
