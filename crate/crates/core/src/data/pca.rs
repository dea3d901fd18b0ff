//! Principal component analysis with a deterministic sign convention, plus
//! per-component affine normalization.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal directions, one per retained component, by descending
    /// explained variance.
    pub components: Vec<Vec<f64>>,
    pub explained_variances: Vec<f64>,
}

/// Top-n principal components of the sample covariance. Signs are fixed by
/// making each component's largest-magnitude entry positive, so refits are
/// bit-reproducible.
pub fn fit_pca(x: &[Vec<f64>], n: usize) -> Result<PcaModel> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let dim = x[0].len();
    if n == 0 || n > dim {
        return Err(Error::InvalidArgument(format!(
            "component count {n} outside 1..={dim}"
        )));
    }
    if x.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need at least {n} samples, have {}",
            x.len()
        )));
    }
    let m = x.len();
    let mut mean = vec![0.0; dim];
    for row in x {
        for (s, v) in mean.iter_mut().zip(row) {
            *s += v / m as f64;
        }
    }
    let centered = DMatrix::from_fn(m, dim, |i, j| x[i][j] - mean[j]);
    let cov = centered.transpose() * &centered / m as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let mut components = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);
    for &idx in order.iter().take(n) {
        let col = eig.eigenvectors.column(idx);
        let mut v: Vec<f64> = col.iter().copied().collect();
        let lead = v
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap();
        if lead < 0.0 {
            for e in &mut v {
                *e = -*e;
            }
        }
        components.push(v);
        variances.push(eig.eigenvalues[idx].max(0.0));
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variances: variances,
    })
}

impl PcaModel {
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::LengthMismatch {
                what: "input dimension",
                expected: self.mean.len(),
                got: x.len(),
            });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn project_all(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        x.iter().map(|row| self.project(row)).collect()
    }
}

/// A per-component affine map fitted on one split and reused on the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Normalizer {
    /// Fit so the given samples get mean 0 and standard deviation 1 per
    /// component. A constant component is an error (named by index).
    pub fn fit(x: &[Vec<f64>]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument("empty sample set".into()));
        }
        let dim = x[0].len();
        let m = x.len() as f64;
        let mut means = vec![0.0; dim];
        for row in x {
            for (s, v) in means.iter_mut().zip(row) {
                *s += v / m;
            }
        }
        let mut stds = vec![0.0; dim];
        for row in x {
            for ((s, v), mu) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - mu).powi(2) / m;
            }
        }
        for (i, s) in stds.iter_mut().enumerate() {
            *s = s.sqrt();
            if *s < 1e-12 {
                return Err(Error::ZeroVariance(i));
            }
        }
        Ok(Self { means, stds })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, mu), s)| (v - mu) / s)
            .collect()
    }

    pub fn apply_all(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|row| self.apply(row)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_samples(m: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn line_data_recovers_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dir = [0.6, 0.8];
        let x: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                let t: f64 = rng.random_range(-2.0..2.0);
                vec![t * dir[0] + 1.0, t * dir[1] - 0.5]
            })
            .collect();
        let pca = fit_pca(&x, 1).unwrap();
        let dot: f64 = pca.components[0].iter().zip(&dir).map(|(a, b)| a * b).sum();
        assert!(dot.abs() > 1.0 - 1e-6, "component misaligned: {dot}");
    }

    #[test]
    fn components_are_orthonormal_and_ordered() {
        let x = random_samples(60, 6, 3);
        let pca = fit_pca(&x, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = pca.components[i]
                    .iter()
                    .zip(&pca.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-8);
            }
        }
        for w in pca.explained_variances.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn reconstruction_error_non_increasing_in_n() {
        let x = random_samples(40, 5, 4);
        let mut last = f64::INFINITY;
        for n in 1..=5 {
            let pca = fit_pca(&x, n).unwrap();
            let err: f64 = x
                .iter()
                .map(|row| {
                    let proj = pca.project(row).unwrap();
                    let mut recon = pca.mean.clone();
                    for (c, p) in pca.components.iter().zip(&proj) {
                        for (r, e) in recon.iter_mut().zip(c) {
                            *r += p * e;
                        }
                    }
                    row.iter()
                        .zip(&recon)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                })
                .sum();
            assert!(err <= last + 1e-9, "n={n}: {err} > {last}");
            last = err;
        }
    }

    /// Independent oracle: cyclic Jacobi eigensolver on the covariance.
    #[test]
    fn matches_jacobi_oracle() {
        let x = random_samples(30, 4, 5);
        let pca = fit_pca(&x, 4).unwrap();

        let dim = 4;
        let m = x.len() as f64;
        let mean: Vec<f64> = (0..dim)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / m)
            .collect();
        let mut a = vec![vec![0.0; dim]; dim];
        for r in &x {
            for i in 0..dim {
                for j in 0..dim {
                    a[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / m;
                }
            }
        }
        let mut v = vec![vec![0.0; dim]; dim];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        // Cyclic Jacobi sweeps until off-diagonal mass is negligible.
        for _ in 0..100 {
            let off: f64 = (0..dim)
                .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-22 {
                break;
            }
            for p in 0..dim {
                for q in p + 1..dim {
                    if a[p][q].abs() < 1e-15 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                    let (s, c) = theta.sin_cos();
                    for k in 0..dim {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..dim {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..dim {
                        let (vkp, vkq) = (v[k][p], v[k][q]);
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut eigs: Vec<(f64, Vec<f64>)> = (0..dim)
            .map(|j| (a[j][j], (0..dim).map(|i| v[i][j]).collect()))
            .collect();
        eigs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

        for (idx, (lam, vec)) in eigs.iter().enumerate() {
            assert_abs_diff_eq!(pca.explained_variances[idx], *lam, epsilon = 1e-8);
            let dot: f64 = pca.components[idx].iter().zip(vec).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(dot.abs(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn normalizer_zero_mean_unit_std() {
        let x = random_samples(30, 3, 6);
        let norm = Normalizer::fit(&x).unwrap();
        let y = norm.apply_all(&x);
        for j in 0..3 {
            let mean: f64 = y.iter().map(|r| r[j]).sum::<f64>() / y.len() as f64;
            let var: f64 = y.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / y.len() as f64;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(var.sqrt(), 1.0, epsilon = 1e-10);
        }
        // Refitting on normalized data is the identity map.
        let norm2 = Normalizer::fit(&y).unwrap();
        for (mu, s) in norm2.means.iter().zip(&norm2.stds) {
            assert_abs_diff_eq!(*mu, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(*s, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_column_rejected() {
        let x = vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]];
        match Normalizer::fit(&x) {
            Err(Error::ZeroVariance(1)) => {}
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }
}
