//! Parameter-shift gradients. Every parametric gate is a Pauli rotation
//! exp(-i theta P / 2), whose expectation value obeys the exact two-point
//! shift rule df/dtheta = (f(theta + pi/2) - f(theta - pi/2)) / 2; a slot
//! feeding several gates (or entering with a scale) chains through each
//! occurrence.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::ParamModel;
use crate::sim::{AngleSource, Circuit, GateKind, Statevector};

use super::Dataset;

/// (gate index, chain-rule scale) pairs grouped by parameter slot.
pub(crate) fn slot_occurrences(circuit: &Circuit) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut occ = vec![Vec::new(); circuit.num_parameter_slots];
    for (idx, gate) in circuit.gates.iter().enumerate() {
        if let Some(AngleSource::Param { slot, scale, .. }) = gate.angle {
            let shiftable = matches!(
                gate.kind,
                GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::PauliRotation(_)
            );
            if !shiftable {
                return Err(Error::InvalidArgument(format!(
                    "gate {idx} is parametric but not a Pauli rotation; no shift rule"
                )));
            }
            occ[slot].push((idx, scale));
        }
    }
    Ok(occ)
}

fn eval_shifted(model: &ParamModel, theta: &[f64], x: &[f64], gate: usize, shift: f64) -> Result<f64> {
    match model {
        ParamModel::Explicit(m) => {
            let encoded = m.encoding.encode(x)?;
            m.eval_shifted(&encoded, theta, gate, shift)
        }
        ParamModel::Reuploading(m) => m.eval_shifted(theta, x, gate, shift),
    }
}

/// Gradient of f(theta; x) with respect to theta at a single input.
pub fn model_gradient(model: &ParamModel, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let occ = match model {
        ParamModel::Explicit(m) => slot_occurrences(&m.variational)?,
        ParamModel::Reuploading(m) => slot_occurrences(&m.circuit)?,
    };
    occ.par_iter()
        .map(|gates| {
            let mut g = 0.0;
            for &(idx, scale) in gates {
                let plus = eval_shifted(model, theta, x, idx, FRAC_PI_2)?;
                let minus = eval_shifted(model, theta, x, idx, -FRAC_PI_2)?;
                g += scale * (plus - minus) / 2.0;
            }
            Ok(g)
        })
        .collect()
}

/// Gradient of the mean-squared error over a dataset with respect to theta.
pub fn parameter_shift_gradient(
    model: &ParamModel,
    theta: &[f64],
    data: &Dataset,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    let per_sample: Vec<Vec<f64>> = data
        .inputs
        .par_iter()
        .zip(&data.labels)
        .map(|(x, &y)| {
            let f = model.eval(theta, x)?;
            let grad = model_gradient(model, theta, x)?;
            Ok(grad.iter().map(|g| 2.0 * (f - y) * g).collect())
        })
        .collect::<Result<_>>()?;
    let m = data.len() as f64;
    let mut total = vec![0.0; theta.len()];
    for sample in per_sample {
        for (t, g) in total.iter_mut().zip(sample) {
            *t += g / m;
        }
    }
    Ok(total)
}

/// Gradient of the MSE for an explicit model with pre-encoded feature states;
/// returns (theta gradient, weight gradient, loss). The weight derivative is
/// analytic: df/dw = f/w.
pub(crate) fn explicit_loss_gradient(
    model: &crate::models::ExplicitModel,
    encoded: &[Statevector],
    theta: &[f64],
    labels: &[f64],
) -> Result<(Vec<f64>, f64, f64)> {
    let occ = slot_occurrences(&model.variational)?;
    let m = labels.len() as f64;
    let parts: Vec<(Vec<f64>, f64, f64)> = encoded
        .par_iter()
        .zip(labels)
        .map(|(state, &y)| {
            let f = model.eval_from_state(state, theta)?;
            let resid = f - y;
            let grad: Vec<f64> = occ
                .iter()
                .map(|gates| {
                    let mut g = 0.0;
                    for &(idx, scale) in gates {
                        let plus = model.eval_shifted(state, theta, idx, FRAC_PI_2)?;
                        let minus = model.eval_shifted(state, theta, idx, -FRAC_PI_2)?;
                        g += scale * (plus - minus) / 2.0;
                    }
                    Ok(2.0 * resid * g)
                })
                .collect::<Result<_>>()?;
            let wg = 2.0 * resid * f / model.observable_weight;
            Ok((grad, wg, resid * resid))
        })
        .collect::<Result<_>>()?;
    let mut theta_grad = vec![0.0; theta.len()];
    let mut weight_grad = 0.0;
    let mut loss = 0.0;
    for (g, wg, l) in parts {
        for (t, gi) in theta_grad.iter_mut().zip(g) {
            *t += gi / m;
        }
        weight_grad += wg / m;
        loss += l / m;
    }
    Ok((theta_grad, weight_grad, loss))
}
