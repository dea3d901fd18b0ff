//! Parity concepts over {-1, 1}^d and the two-component mixture distribution
//! the learner draws from.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A parity function g_A(x) = prod_{i in A} x_i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityConcept {
    pub d: usize,
    pub subset: Vec<usize>,
}

impl ParityConcept {
    pub fn new(d: usize, mut subset: Vec<usize>) -> Result<Self> {
        subset.sort_unstable();
        subset.dedup();
        if subset.iter().any(|&i| i >= d) {
            return Err(Error::InvalidArgument(format!(
                "subset exceeds dimension {d}"
            )));
        }
        Ok(Self { d, subset })
    }

    pub fn k(&self) -> usize {
        self.subset.len()
    }

    pub fn label(&self, x: &[f64]) -> f64 {
        self.subset.iter().map(|&i| x[i]).product()
    }

    /// Labels over all 2^d sign vectors in enumeration order.
    pub fn label_table(&self) -> Vec<f64> {
        (0..1usize << self.d)
            .map(|b| enumerate_signs(self.d, b))
            .map(|x| self.label(&x))
            .collect()
    }
}

/// The x for enumeration index b: bit i set means x_i = -1.
pub fn enumerate_signs(d: usize, b: usize) -> Vec<f64> {
    (0..d)
        .map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// Even mixture of the uniform distribution over {-1,1}^d and a correlated
/// component where every coordinate in A shares one uniform sign while the
/// rest stay independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureDistribution {
    pub concept: ParityConcept,
}

impl MixtureDistribution {
    pub fn new(concept: ParityConcept) -> Self {
        Self { concept }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.concept.d;
        let mut x: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        if rng.random::<bool>() {
            // Correlated component: one shared sign across A.
            let shared = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for &i in &self.concept.subset {
                x[i] = shared;
            }
        }
        x
    }

    /// Probability of each of the 2^d sign vectors in enumeration order.
    pub fn weight_table(&self) -> Vec<f64> {
        let d = self.concept.d;
        let uniform = 0.5 / (1u64 << d) as f64;
        let corr_base = 0.25 / (1u64 << (d - self.concept.k())) as f64;
        (0..1usize << d)
            .map(|b| {
                let x = enumerate_signs(d, b);
                let first = self.concept.subset.first().map(|&i| x[i]);
                let constant = self
                    .concept
                    .subset
                    .iter()
                    .all(|&i| Some(x[i]) == first);
                let corr = if self.concept.subset.is_empty() {
                    // Empty A: the correlated component degenerates to uniform.
                    2.0 * corr_base
                } else if constant {
                    corr_base
                } else {
                    0.0
                };
                uniform + corr
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn odd_parity_fixes_in_subset_coordinates() {
        // Under the correlated component with |A| odd, x_i = g_A(x) on A.
        let concept = ParityConcept::new(5, vec![0, 2, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dist = MixtureDistribution::new(concept.clone());
        for _ in 0..200 {
            let x = dist.sample(&mut rng);
            let on_a: Vec<f64> = concept.subset.iter().map(|&i| x[i]).collect();
            if on_a.windows(2).all(|w| w[0] == w[1]) && on_a[0] != 0.0 {
                // Whenever A is constant (always in mode 2), x_i = g_A(x).
                if concept.k() % 2 == 1 && on_a.iter().all(|&v| v == on_a[0]) {
                    assert_eq!(concept.label(&x), on_a[0].powi(concept.k() as i32));
                }
            }
        }
    }

    #[test]
    fn marginals_stay_uniform() {
        let concept = ParityConcept::new(6, vec![1, 2, 5]).unwrap();
        let dist = MixtureDistribution::new(concept);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trials = 10_000;
        let mut sums = vec![0.0; 6];
        for _ in 0..trials {
            for (s, v) in sums.iter_mut().zip(dist.sample(&mut rng)) {
                *s += v;
            }
        }
        for s in sums {
            assert!((s / trials as f64).abs() < 0.04, "biased marginal {s}");
        }
    }

    #[test]
    fn weight_table_sums_to_one() {
        for subset in [vec![], vec![0], vec![0, 1, 3]] {
            let dist = MixtureDistribution::new(ParityConcept::new(4, subset).unwrap());
            let total: f64 = dist.weight_table().iter().sum();
            approx::assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_subset_degenerates_to_uniform() {
        let dist = MixtureDistribution::new(ParityConcept::new(3, vec![]).unwrap());
        let w = dist.weight_table();
        for v in w {
            approx::assert_abs_diff_eq!(v, 1.0 / 8.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn weight_table_matches_sampler() {
        let dist = MixtureDistribution::new(ParityConcept::new(3, vec![0, 2]).unwrap());
        let w = dist.weight_table();
        let mut counts = vec![0usize; 8];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let trials = 40_000;
        for _ in 0..trials {
            let x = dist.sample(&mut rng);
            let idx: usize = (0..3).map(|i| usize::from(x[i] < 0.0) << i).sum();
            counts[idx] += 1;
        }
        for (c, expect) in counts.iter().zip(w) {
            let freq = *c as f64 / trials as f64;
            assert!((freq - expect).abs() < 0.01, "{freq} vs {expect}");
        }
    }
}
