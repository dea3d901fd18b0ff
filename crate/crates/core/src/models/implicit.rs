use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FeatureEncoding;
use crate::sim::Statevector;

/// f(x) = sum_m alpha_m k(x, x^(m)) over stored support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitModel {
    pub encoding: FeatureEncoding,
    pub support_points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl ImplicitModel {
    pub fn new(
        encoding: FeatureEncoding,
        support_points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if support_points.len() != weights.len() {
            return Err(Error::LengthMismatch {
                what: "implicit weights",
                expected: support_points.len(),
                got: weights.len(),
            });
        }
        Ok(Self {
            encoding,
            support_points,
            weights,
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let query = self.encoding.encode(x)?;
        let mut acc = 0.0;
        for (alpha, point) in self.weights.iter().zip(&self.support_points) {
            acc += alpha * query.fidelity(&self.encoding.encode(point)?)?;
        }
        Ok(acc)
    }

    /// The linear-model route: materialize O = sum_m alpha_m rho(x^(m)) as a dense
    /// Hermitian matrix and take <psi(x)|O|psi(x)>. Kept as an independent second
    /// path and capped at dense-matrix scale.
    pub fn eval_as_observable(&self, x: &[f64]) -> Result<f64> {
        let n = self.encoding.num_qubits();
        if n > 12 {
            return Err(Error::TooManyQubits {
                requested: n,
                cap: 12,
            });
        }
        let dim = 1usize << n;
        let mut obs = vec![num_complex::Complex64::ZERO; dim * dim];
        for (alpha, point) in self.weights.iter().zip(&self.support_points) {
            let psi = self.encoding.encode(point)?;
            let amps = psi.amplitudes();
            for r in 0..dim {
                for c in 0..dim {
                    obs[r * dim + c] += alpha * amps[r] * amps[c].conj();
                }
            }
        }
        let query: Statevector = self.encoding.encode(x)?;
        let q = query.amplitudes();
        let mut acc = num_complex::Complex64::ZERO;
        for r in 0..dim {
            for c in 0..dim {
                acc += q[r].conj() * obs[r * dim + c] * q[c];
            }
        }
        Ok(acc.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn self_support_returns_weight() {
        let x = vec![0.7, -0.3];
        let m = ImplicitModel::new(
            FeatureEncoding::havlicek(2),
            vec![x.clone()],
            vec![1.0],
        )
        .unwrap();
        assert_abs_diff_eq!(m.eval(&x).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_kernel_vanishes_off_support() {
        let m = ImplicitModel::new(
            FeatureEncoding::bit_string(1, 4),
            vec![vec![0.25], vec![0.5]],
            vec![3.0, -2.0],
        )
        .unwrap();
        assert_eq!(m.eval(&[0.126]).unwrap(), 0.0);
        assert_eq!(m.eval(&[0.25]).unwrap(), 3.0);
    }

    #[test]
    fn dual_paths_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let enc = FeatureEncoding::havlicek(2);
        for _ in 0..10 {
            let support: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let weights: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let m = ImplicitModel::new(enc.clone(), support, weights).unwrap();
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert_abs_diff_eq!(
                m.eval(&x).unwrap(),
                m.eval_as_observable(&x).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn weight_length_mismatch_rejected() {
        let r = ImplicitModel::new(FeatureEncoding::havlicek(1), vec![vec![0.1]], vec![]);
        assert!(r.is_err());
    }
}
