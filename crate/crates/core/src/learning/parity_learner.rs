//! Thresholded parity learner: identify the active subset A from samples of
//! the mixture distribution by testing one coordinate at a time.
//!
//! For each i the single-active-coordinate model f_i computes x_i exactly, so
//! the per-sample statistic (f_i(x) - y)^2 has mean 1 when i is in A and mean
//! 2 otherwise; a Hoeffding bound at M = ceil(32 ln(2d/delta)) samples makes
//! the empirical means separate at 1.5 with probability at least 1 - delta.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{parity_model, parity_params};



const LOSS_THRESHOLD: f64 = 1.5;

/// M = ceil(32 ln(2d / delta)).
pub fn parity_sample_count(d: usize, delta: f64) -> usize {
    (32.0 * (2.0 * d as f64 / delta).ln()).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityLearnOutcome {
    pub subset: Vec<usize>,
    pub samples_used: usize,
    /// Empirical per-coordinate losses, in coordinate order.
    pub losses: Vec<f64>,
}

/// Learn the parity subset from a labeled-sample source. The oracle must
/// yield (x, g_A(x)) pairs with x in {-1, 1}^d drawn from the mixture
/// distribution for a hidden A of odd size.
pub fn parity_learn<F>(mut oracle: F, d: usize, delta: f64) -> Result<ParityLearnOutcome>
where
    F: FnMut() -> (Vec<f64>, f64),
{
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidArgument("delta must lie in (0, 1)".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let m = parity_sample_count(d, delta);
    let samples: Vec<(Vec<f64>, f64)> = (0..m).map(|_| oracle()).collect();
    for (x, _) in &samples {
        if x.len() != d {
            return Err(Error::LengthMismatch {
                what: "sample components",
                expected: d,
                got: x.len(),
            });
        }
    }

    let model = parity_model(d)?;
    let mut losses = Vec::with_capacity(d);
    let mut subset = Vec::new();
    for i in 0..d {
        let theta = parity_params(d, &[i]);
        let mut loss = 0.0;
        for (x, y) in &samples {
            let f = model.eval(&theta, x)?;
            loss += (f - y).powi(2);
        }
        loss /= m as f64;
        if loss <= LOSS_THRESHOLD {
            subset.push(i);
        }
        losses.push(loss);
    }
    Ok(ParityLearnOutcome {
        subset,
        samples_used: m,
        losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seplab::{MixtureDistribution, ParityConcept};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_count_formula() {
        assert_eq!(parity_sample_count(20, 0.1), 192);
    }

    #[test]
    fn recovers_planted_subset() {
        let d = 6;
        let concept = ParityConcept::new(d, vec![1, 3, 4]).unwrap();
        let dist = MixtureDistribution::new(concept.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let outcome = parity_learn(
            || {
                let x = dist.sample(&mut rng);
                let y = concept.label(&x);
                (x, y)
            },
            d,
            0.1,
        )
        .unwrap();
        assert_eq!(outcome.subset, vec![1, 3, 4]);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(parity_learn(|| (vec![1.0], 1.0), 1, 0.0).is_err());
    }
}
