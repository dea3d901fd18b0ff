//! Brute-force certificates for the dimension-based lower bounds: the best
//! achievable averaged mean-squared error of any observable-based model on
//! k-sparse parities, computed exactly over all 2^d inputs.
//!
//! A model's outputs are linear in the encoded density matrix, so the space
//! of realizable functions is spanned by the (real-parametrized) feature
//! vectors of the encoded states. The oracle orthonormalizes that span once
//! and reads off each parity's least-squares residual by projection.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FeatureEncoding;
use crate::sim::Statevector;

use super::concept::{enumerate_signs, ParityConcept};

const RANK_CUTOFF: f64 = 1e-10;
/// Exact subset enumeration up to this d; larger problems subsample.
const EXACT_SUBSET_LIMIT: usize = 10;
const SUBSET_SAMPLE: usize = 1000;
/// Memory budget on 4^n * 2^d feature-matrix entries.
const BUDGET_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub epsilon_avg: f64,
    /// Dimension of the realizable function span.
    pub span_dim: usize,
    /// Lower bound on epsilon_avg implied by the span dimension (explicit) or
    /// the training-set size (implicit).
    pub bound: f64,
    pub subsets_used: usize,
}

/// C(d, k) as a float.
pub fn binomial(d: usize, k: usize) -> f64 {
    let k = k.min(d - k);
    let mut out = 1.0;
    for i in 0..k {
        out *= (d - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Parity sparsity schedule: floor(d/2), bumped to the nearest odd value.
pub fn sparsity_schedule(d: usize) -> usize {
    let k = d / 2;
    if k % 2 == 0 {
        k + 1
    } else {
        k
    }
}

/// Real feature vector of a pure state with the Frobenius geometry:
/// Tr[rho sigma] is the Euclidean inner product of the two feature vectors.
fn density_features(state: &Statevector) -> Vec<f64> {
    let amps = state.amplitudes();
    let dim = amps.len();
    let mut out = Vec::with_capacity(dim * dim);
    for a in amps {
        out.push(a.norm_sqr());
    }
    let root2 = 2.0_f64.sqrt();
    for i in 0..dim {
        for j in i + 1..dim {
            let rho_ij = amps[i] * amps[j].conj();
            out.push(root2 * rho_ij.re);
            out.push(root2 * rho_ij.im);
        }
    }
    out
}

fn check_budget(encoding: &FeatureEncoding, d: usize) -> Result<usize> {
    if encoding.arity() != d {
        return Err(Error::LengthMismatch {
            what: "encoding arity",
            expected: d,
            got: encoding.arity(),
        });
    }
    if d > 12 {
        return Err(Error::InvalidArgument(format!(
            "oracle budget allows d <= 12, got {d}"
        )));
    }
    let n = encoding.num_qubits();
    let entries = (1usize << (2 * n)) << d;
    if entries > BUDGET_ENTRIES {
        return Err(Error::InvalidArgument(format!(
            "feature matrix of 4^{n} * 2^{d} entries exceeds the memory budget"
        )));
    }
    Ok(n)
}

/// Weighted design matrix sqrt(w) * features over all 2^d inputs.
fn design_matrix(
    encoding: &FeatureEncoding,
    d: usize,
    weights: &[f64],
) -> Result<DMatrix<f64>> {
    let n_inputs = 1usize << d;
    let rows: Vec<Vec<f64>> = (0..n_inputs)
        .into_par_iter()
        .map(|b| {
            let x = enumerate_signs(d, b);
            Ok(density_features(&encoding.encode(&x)?)
                .into_iter()
                .map(|v| v * weights[b].sqrt())
                .collect())
        })
        .collect::<Result<_>>()?;
    let cols = rows[0].len();
    Ok(DMatrix::from_fn(n_inputs, cols, |i, j| rows[i][j]))
}

/// Orthonormal basis of the column span (columns of the returned matrix).
fn column_basis(m: DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_CUTOFF * smax)
        .count();
    (u.columns(0, rank).into_owned(), rank)
}

fn subset_list(d: usize, k: usize, rng_seed: u64) -> Vec<Vec<usize>> {
    let all: Vec<Vec<usize>> = (0..d).combinations(k).collect();
    if d <= EXACT_SUBSET_LIMIT || all.len() <= SUBSET_SAMPLE {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut all = all;
    all.shuffle(&mut rng);
    all.truncate(SUBSET_SAMPLE);
    all
}

/// Averaged residual of the k-sparse parities against an orthonormal span
/// basis, under the weights baked into the basis.
fn average_residual(
    basis: &DMatrix<f64>,
    d: usize,
    subsets: &[Vec<usize>],
    weights: &[f64],
) -> Result<f64> {
    let total: f64 = subsets
        .par_iter()
        .map(|subset| {
            let concept = ParityConcept::new(d, subset.clone())?;
            let g = concept.label_table();
            let g_w: Vec<f64> = g
                .iter()
                .zip(weights)
                .map(|(gi, w)| gi * w.sqrt())
                .collect();
            let norm_sq: f64 = g_w.iter().map(|v| v * v).sum();
            let mut captured = 0.0;
            for col in basis.column_iter() {
                let dot: f64 = col.iter().zip(&g_w).map(|(u, v)| u * v).sum();
                captured += dot * dot;
            }
            // Guard against rounding pushing the residual slightly negative.
            Ok((norm_sq - captured).max(0.0) / norm_sq)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(total / subsets.len() as f64)
}

fn uniform_weights(d: usize) -> Vec<f64> {
    vec![1.0 / (1u64 << d) as f64; 1 << d]
}

/// Best averaged MSE of any explicit (observable-based) model with this
/// encoding on k-sparse parities, with the span-dimension lower bound
/// 1 - span_dim / C(d, k).
pub fn best_linear_mse(
    encoding: &FeatureEncoding,
    d: usize,
    k: usize,
    weights: Option<&[f64]>,
    rng_seed: u64,
) -> Result<OracleReport> {
    check_budget(encoding, d)?;
    let w = match weights {
        Some(w) => w.to_vec(),
        None => uniform_weights(d),
    };
    if w.len() != 1 << d {
        return Err(Error::LengthMismatch {
            what: "weight table",
            expected: 1 << d,
            got: w.len(),
        });
    }
    let (basis, rank) = column_basis(design_matrix(encoding, d, &w)?);
    let subsets = subset_list(d, k, rng_seed);
    let epsilon_avg = average_residual(&basis, d, &subsets, &w)?;
    Ok(OracleReport {
        epsilon_avg,
        span_dim: rank,
        bound: (1.0 - rank as f64 / binomial(d, k)).max(0.0),
        subsets_used: subsets.len(),
    })
}

/// Same, but the span is restricted to the kernel sections of M training
/// points sampled without replacement; the bound becomes 1 - M / C(d, k).
pub fn best_implicit_mse(
    encoding: &FeatureEncoding,
    d: usize,
    k: usize,
    m: usize,
    weights: Option<&[f64]>,
    rng_seed: u64,
) -> Result<OracleReport> {
    check_budget(encoding, d)?;
    let n_inputs = 1usize << d;
    if m == 0 || m > n_inputs {
        return Err(Error::InvalidArgument(format!(
            "training-set size {m} outside 1..={n_inputs}"
        )));
    }
    let w = match weights {
        Some(w) => w.to_vec(),
        None => uniform_weights(d),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut indices: Vec<usize> = (0..n_inputs).collect();
    indices.shuffle(&mut rng);
    indices.truncate(m);

    // Orthonormal basis of the training feature vectors, in feature space.
    let train_rows: Vec<Vec<f64>> = indices
        .iter()
        .map(|&b| Ok(density_features(&encoding.encode(&enumerate_signs(d, b))?)))
        .collect::<Result<_>>()?;
    let cols = train_rows[0].len();
    let train = DMatrix::from_fn(m, cols, |i, j| train_rows[i][j]);
    let svd = train.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let feat_rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_CUTOFF * smax)
        .count();
    let feature_basis = vt.rows(0, feat_rank).transpose(); // cols x feat_rank

    // Realizable functions: weighted design restricted to that basis.
    let design = design_matrix(encoding, d, &w)? * feature_basis;
    let (basis, rank) = column_basis(design);
    let subsets = subset_list(d, k, rng_seed);
    let epsilon_avg = average_residual(&basis, d, &subsets, &w)?;
    Ok(OracleReport {
        epsilon_avg,
        span_dim: rank,
        bound: (1.0 - m as f64 / binomial(d, k)).max(0.0),
        subsets_used: subsets.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn havlicek(n: usize, d: usize) -> FeatureEncoding {
        FeatureEncoding::Havlicek { qubits: n, dim: d }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 0), 1.0);
    }

    #[test]
    fn schedule_prefers_odd() {
        assert_eq!(sparsity_schedule(4), 3);
        assert_eq!(sparsity_schedule(6), 3);
        assert_eq!(sparsity_schedule(7), 3);
        assert_eq!(sparsity_schedule(10), 5);
    }

    #[test]
    fn constant_encoding_cannot_fit_parities() {
        // Bit-string encoding with no components maps everything to |0...0>.
        let enc = FeatureEncoding::BitString {
            working: 0,
            dim: 4,
            components: vec![],
            bits: 1,
        };
        let report = best_linear_mse(&enc, 4, 2, None, 0).unwrap();
        assert_abs_diff_eq!(report.epsilon_avg, 1.0, epsilon = 1e-12);
        assert_eq!(report.span_dim, 1);
    }

    #[test]
    fn dimension_bound_certificate() {
        for (d, k, n) in [(4, 2, 1), (4, 3, 2), (6, 3, 1)] {
            let report = best_linear_mse(&havlicek(n, d), d, k, None, 0).unwrap();
            assert!(
                report.epsilon_avg + report.span_dim as f64 / binomial(d, k) >= 1.0 - 1e-9,
                "certificate violated: {report:?}"
            );
            assert!(report.epsilon_avg >= report.bound - 1e-9);
        }
    }

    #[test]
    fn matches_dense_least_squares_oracle() {
        // Independent route: explicit normal equations on the raw feature
        // matrix, no orthonormalization.
        let (d, k, n) = (4, 2, 2);
        let enc = havlicek(n, d);
        let report = best_linear_mse(&enc, d, k, None, 0).unwrap();

        let w = uniform_weights(d);
        let a = design_matrix(&enc, d, &w).unwrap();
        let subsets: Vec<Vec<usize>> = (0..d).combinations(k).collect();
        let mut total = 0.0;
        for subset in &subsets {
            let g = ParityConcept::new(d, subset.clone()).unwrap().label_table();
            let g_w = nalgebra::DVector::from_iterator(
                1 << d,
                g.iter().zip(&w).map(|(gi, wi)| gi * wi.sqrt()),
            );
            let sol = a.clone().svd(true, true).solve(&g_w, 1e-12).unwrap();
            let resid = (&a * sol - &g_w).norm_squared();
            total += resid / g_w.norm_squared();
        }
        assert_abs_diff_eq!(report.epsilon_avg, total / subsets.len() as f64, epsilon = 1e-8);
    }

    #[test]
    fn implicit_bound_with_one_sample() {
        let report = best_implicit_mse(&havlicek(1, 4), 4, 2, 1, None, 3).unwrap();
        assert!(report.epsilon_avg >= 1.0 - 1.0 / 6.0 - 1e-9);
    }

    #[test]
    fn implicit_bound_with_small_training_set() {
        let report = best_implicit_mse(&havlicek(3, 6), 6, 3, 5, None, 4).unwrap();
        assert!(
            report.epsilon_avg >= report.bound - 1e-9,
            "{report:?}"
        );
    }

    #[test]
    fn epsilon_monotone_in_resources() {
        let d = 4;
        let k = 2;
        let e1 = best_linear_mse(&havlicek(1, d), d, k, None, 0).unwrap();
        let e2 = best_linear_mse(&havlicek(2, d), d, k, None, 0).unwrap();
        assert!(e2.epsilon_avg <= e1.epsilon_avg + 1e-9);
        let m2 = best_implicit_mse(&havlicek(2, d), d, k, 2, None, 9).unwrap();
        let m8 = best_implicit_mse(&havlicek(2, d), d, k, 8, None, 9).unwrap();
        assert!(m8.epsilon_avg <= m2.epsilon_avg + 1e-9);
    }

    #[test]
    fn budget_rejects_oversized_requests() {
        assert!(best_linear_mse(&havlicek(1, 4), 13, 2, None, 0).is_err());
    }
}
