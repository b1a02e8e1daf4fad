use serde::Serialize;

use crate::hilbert::{evolve, inner_raw, moments, GridState, HermitianOperator};
use crate::{BoundReport, Result, TempusError};

/// `tau = Delta A / |d<A>/dt|` together with both derivative estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicTime {
    pub tau: f64,
    pub delta_a: f64,
    pub delta_h: f64,
    /// `(i / hbar) <[H, A]>`.
    pub derivative: f64,
    /// Richardson-extrapolated central difference of `<A>(t)`.
    pub derivative_fd: f64,
}

/// Relative agreement demanded between the two derivative estimates.
pub const DERIVATIVE_AGREEMENT: f64 = 1e-5;

pub fn characteristic_time(
    a: &HermitianOperator,
    state: &GridState,
    h: &HermitianOperator,
) -> Result<CharacteristicTime> {
    let psi = state.normalized()?;
    let (_, var_a) = moments(a, &psi)?;
    let (_, var_h) = moments(h, &psi)?;
    let (delta_a, delta_h) = (var_a.sqrt(), var_h.sqrt());
    let hbar = psi.hbar;

    let hpsi = h.apply(&psi)?;
    let apsi = a.apply(&psi)?;
    let derivative = -2.0 / hbar * inner_raw(&hpsi.amplitudes, &apsi.amplitudes).im * psi.axis.step;

    let scale = delta_a * delta_h / hbar;
    if !(delta_h > 0.0) || !(derivative.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return Err(TempusError::Stationary(format!("d<A>/dt = {derivative:e}")));
    }

    let mean_at = |t: f64| -> Result<f64> { Ok(moments(a, &evolve(&psi, h, t)?)?.0) };
    let d = |step: f64| -> Result<f64> { Ok((mean_at(step)? - mean_at(-step)?) / (2.0 * step)) };
    let step = 1e-2 * hbar / delta_h;
    let derivative_fd = (4.0 * d(step / 2.0)? - d(step)?) / 3.0;
    if (derivative_fd - derivative).abs() > DERIVATIVE_AGREEMENT * derivative.abs() {
        return Err(TempusError::Conditioning(format!(
            "commutator derivative {derivative:e} disagrees with finite difference {derivative_fd:e}"
        )));
    }
    Ok(CharacteristicTime {
        tau: delta_a / derivative.abs(),
        delta_a,
        delta_h,
        derivative,
        derivative_fd,
    })
}

/// `tau(A) Delta H >= hbar / 2`.
pub fn mandelstam_tamm_check(
    a: &HermitianOperator,
    state: &GridState,
    h: &HermitianOperator,
) -> Result<(CharacteristicTime, BoundReport)> {
    let c = characteristic_time(a, state, h)?;
    let hbar = state.hbar;
    let r = BoundReport::new("MT-ur", c.tau * c.delta_h, hbar / 2.0, 1e-8 * hbar);
    Ok((c, r))
}
