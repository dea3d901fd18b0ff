//! Training machinery: mean-squared losses, kernel ridge regression,
//! parameter-shift gradients with an ADAM loop, the thresholded parity
//! learner, and classical kernel baselines.

mod baselines;
mod gradient;
mod krr;
mod parity_learner;
mod train;

pub use baselines::{
    baseline_grid_search, baseline_predict, BaselineFit, BaselineKind, C_GRID, GAMMA_GRID,
};
pub use gradient::{model_gradient, parameter_shift_gradient};
pub use krr::{fit_implicit, krr_fit};
pub use parity_learner::{parity_learn, parity_sample_count, ParityLearnOutcome};
pub use train::{train_explicit, TrainConfig, TrainResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ImplicitModel, ParamModel};

/// Which split a dataset was drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub split: Split,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<f64>, split: Split) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        if inputs.len() != labels.len() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: inputs.len(),
                got: labels.len(),
            });
        }
        let arity = inputs[0].len();
        if inputs.iter().any(|x| x.len() != arity) {
            return Err(Error::InvalidArgument(
                "dataset inputs have mixed arities".into(),
            ));
        }
        Ok(Self {
            inputs,
            labels,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.inputs[0].len()
    }
}

/// Mean squared error of any f over a dataset, parallel over samples.
pub fn mse_of<F>(f: F, data: &Dataset) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    let total: f64 = data
        .inputs
        .par_iter()
        .zip(&data.labels)
        .map(|(x, &y)| Ok((f(x)? - y).powi(2)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(total / data.len() as f64)
}

/// Mean squared error of a parametrized model at `theta`.
pub fn mse_loss(model: &ParamModel, theta: &[f64], data: &Dataset) -> Result<f64> {
    mse_of(|x| model.eval(theta, x), data)
}

/// MSE of an implicit model plus the RKHS penalty lambda * alpha^T K alpha.
pub fn implicit_regularized_loss(
    model: &ImplicitModel,
    data: &Dataset,
    lambda: f64,
) -> Result<f64> {
    let mse = mse_of(|x| model.eval(x), data)?;
    let gram = model.encoding.gram_matrix(&model.support_points)?;
    let m = model.weights.len();
    let mut quad = 0.0;
    for i in 0..m {
        for j in 0..m {
            quad += model.weights[i] * gram[i][j] * model.weights[j];
        }
    }
    Ok(mse + lambda * quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{parity_model, parity_params};
    use approx::assert_abs_diff_eq;

    fn pm1_dataset(d: usize, subset: &[usize]) -> Dataset {
        let inputs: Vec<Vec<f64>> = (0..1usize << d)
            .map(|b| {
                (0..d)
                    .map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect();
        let labels = inputs
            .iter()
            .map(|x| subset.iter().map(|&i| x[i]).product())
            .collect();
        Dataset::new(inputs, labels, Split::Train).unwrap()
    }

    #[test]
    fn perfect_parity_model_has_zero_loss() {
        let d = 4;
        let subset = [0, 2, 3];
        let model = ParamModel::Reuploading(parity_model(d).unwrap());
        let theta = parity_params(d, &subset);
        let loss = mse_loss(&model, &theta, &pm1_dataset(d, &subset)).unwrap();
        assert_abs_diff_eq!(loss, 0.0, epsilon = 1e-20);
    }

    #[test]
    fn constant_zero_model_on_unit_labels() {
        let data = pm1_dataset(3, &[0]);
        let loss = mse_of(|_| Ok(0.0), &data).unwrap();
        assert_abs_diff_eq!(loss, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mixed_arity_rejected() {
        let bad = Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0, 0.0], Split::Train);
        assert!(bad.is_err());
    }
}
