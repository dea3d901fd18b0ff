//! Kernel ridge regression on a precomputed Gram matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::{FeatureEncoding, ImplicitModel};

use super::Dataset;

const PINV_CUTOFF: f64 = 1e-10;

/// Solve (K + lambda * M * I) alpha = y. With lambda = 0 the system is solved
/// by SVD pseudo-inverse with a relative singular-value cutoff of 1e-10, so
/// singular Gram matrices yield the minimum-norm interpolant instead of
/// failing.
pub fn krr_fit(gram: &[Vec<f64>], labels: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let m = labels.len();
    if gram.len() != m || gram.iter().any(|row| row.len() != m) {
        return Err(Error::LengthMismatch {
            what: "gram rows",
            expected: m,
            got: gram.len(),
        });
    }
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(
            "regularization must be non-negative".into(),
        ));
    }
    let mut k = DMatrix::from_fn(m, m, |i, j| gram[i][j]);
    let y = DVector::from_column_slice(labels);
    if lambda > 0.0 {
        for i in 0..m {
            k[(i, i)] += lambda * m as f64;
        }
        let chol = k
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("gram matrix is not PSD".into()))?;
        return Ok(chol.solve(&y).iter().copied().collect());
    }
    let svd = k.svd(true, true);
    let alpha = svd
        .solve(&y, PINV_CUTOFF * svd.singular_values.max())
        .map_err(|e| Error::InvalidArgument(e.into()))?;
    Ok(alpha.iter().copied().collect())
}

/// Fit an implicit model on a training set: build the Gram matrix for the
/// encoding, run KRR, and wrap the support points and weights up as a model.
pub fn fit_implicit(
    encoding: FeatureEncoding,
    train: &Dataset,
    lambda: f64,
) -> Result<ImplicitModel> {
    let gram = encoding.gram_matrix(&train.inputs)?;
    let alpha = krr_fit(&gram, &train.labels, lambda)?;
    ImplicitModel::new(encoding, train.inputs.clone(), alpha)
}
