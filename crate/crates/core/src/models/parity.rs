use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::models::ReuploadingModel;
use crate::sim::{AngleSource, Circuit, Observable};

/// Single-qubit data re-uploading circuit representing k-sparse parities.
///
/// Per input component: RY(theta_i - pi/2), RZ(pi/2 (x_i - 1)), RY(pi/2 - theta_i)
/// between an initial H and a final X measurement. theta_i = 0 hides the qubit
/// from the flip, theta_i = pi/2 exposes it, so the parity of {i : theta_i = pi/2}
/// is read out exactly.
pub fn parity_model(d: usize) -> Result<ReuploadingModel> {
    let mut c = Circuit::new(1).h(0);
    for i in 0..d {
        c = c
            .ry(0, AngleSource::Param {
                slot: i,
                scale: 1.0,
                offset: -FRAC_PI_2,
            })
            // RZ(pi/2 (x_i - 1)) split into a data part and a constant offset
            .rz(0, AngleSource::data(i, FRAC_PI_2))
            .rz(0, AngleSource::Constant { value: -FRAC_PI_2 })
            .ry(0, AngleSource::Param {
                slot: i,
                scale: -1.0,
                offset: FRAC_PI_2,
            });
    }
    ReuploadingModel::new(c.with_slots(d, d), Observable::single(1, 0, 'X')?)
}

/// theta with pi/2 on the subset components and 0 elsewhere (Lemma-style
/// exact parameters).
pub fn parity_params(d: usize, subset: &[usize]) -> Vec<f64> {
    let mut theta = vec![0.0; d];
    for &i in subset {
        theta[i] = FRAC_PI_2;
    }
    theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn parity(subset: &[usize], x: &[f64]) -> f64 {
        subset.iter().map(|&i| x[i]).product()
    }

    #[test]
    fn two_bit_parity_on_minus_minus() {
        let model = parity_model(2).unwrap();
        let theta = parity_params(2, &[0, 1]);
        assert_abs_diff_eq!(
            model.eval(&theta, &[-1.0, -1.0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn all_zero_params_give_constant_one() {
        let model = parity_model(3).unwrap();
        let theta = parity_params(3, &[]);
        for bits in 0..8u32 {
            let x: Vec<f64> = (0..3)
                .map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            assert_abs_diff_eq!(model.eval(&theta, &x).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_on_all_inputs_small_d() {
        for d in 1..=4usize {
            let model = parity_model(d).unwrap();
            for mask in 0..(1u32 << d) {
                let subset: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
                let theta = parity_params(d, &subset);
                for bits in 0..(1u32 << d) {
                    let x: Vec<f64> = (0..d)
                        .map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    assert_abs_diff_eq!(
                        model.eval(&theta, &x).unwrap(),
                        parity(&subset, &x),
                        epsilon = 1e-10
                    );
                }
            }
        }
    }
}
