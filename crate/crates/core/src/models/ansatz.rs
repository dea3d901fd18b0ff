use crate::error::{Error, Result};
use crate::sim::{AngleSource, Circuit};

/// L layers of per-qubit RX·RY·RZ rotations interlaid with linear-chain CZ
/// entanglers; 3nL parameter slots.
pub fn hardware_efficient_ansatz(n: usize, layers: usize) -> Result<Circuit> {
    if n < 1 || layers < 1 {
        return Err(Error::InvalidArgument(
            "ansatz needs n >= 1 and L >= 1".into(),
        ));
    }
    let mut c = Circuit::new(n);
    let mut slot = 0;
    for layer in 0..layers {
        for q in 0..n {
            c = c
                .rx(q, AngleSource::param(slot))
                .ry(q, AngleSource::param(slot + 1))
                .rz(q, AngleSource::param(slot + 2));
            slot += 3;
        }
        let _ = layer;
        for q in 0..n.saturating_sub(1) {
            c = c.cz(q, q + 1);
        }
    }
    Ok(c)
}

/// L layers of e^{i theta ZZ} e^{i theta YY} e^{i theta XX} on circular
/// nearest-neighbour pairs; 3nL parameter slots.
pub fn heisenberg_ansatz(n: usize, layers: usize) -> Result<Circuit> {
    if n < 1 || layers < 1 {
        return Err(Error::InvalidArgument(
            "ansatz needs n >= 1 and L >= 1".into(),
        ));
    }
    let mut c = Circuit::new(n);
    let mut slot = 0;
    for _ in 0..layers {
        for q in 0..n {
            let partner = (q + 1) % n;
            if partner == q {
                // n = 1: no pair exists; rotations act on the single qubit alone.
                c = c
                    .rz(q, AngleSource::Param { slot, scale: -2.0, offset: 0.0 })
                    .ry(q, AngleSource::Param { slot: slot + 1, scale: -2.0, offset: 0.0 })
                    .rx(q, AngleSource::Param { slot: slot + 2, scale: -2.0, offset: 0.0 });
            } else {
                // e^{i theta P} = exp(-i (-2 theta) P / 2)
                c = c
                    .pauli_rotation(
                        "ZZ",
                        vec![q, partner],
                        AngleSource::Param { slot, scale: -2.0, offset: 0.0 },
                    )
                    .pauli_rotation(
                        "YY",
                        vec![q, partner],
                        AngleSource::Param { slot: slot + 1, scale: -2.0, offset: 0.0 },
                    )
                    .pauli_rotation(
                        "XX",
                        vec![q, partner],
                        AngleSource::Param { slot: slot + 2, scale: -2.0, offset: 0.0 },
                    );
            }
            slot += 3;
        }
    }
    Ok(c)
}

/// Layer count keeping 3nL near 90 parameters, for 2 <= n <= 12.
pub fn layer_schedule(n: usize) -> Result<usize> {
    const TABLE: [usize; 11] = [15, 10, 7, 6, 5, 4, 4, 3, 3, 3, 3];
    if !(2..=12).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "layer schedule is tabulated for 2 <= n <= 12, got {n}"
        )));
    }
    Ok(TABLE[n - 2])
}
