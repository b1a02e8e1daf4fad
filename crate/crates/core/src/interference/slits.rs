use std::f64::consts::PI;

use crate::hilbert::{Axis, AxisKind, GridState};
use crate::{Result, TempusError, C64};

/// `psi0(x) = (4a)^{-1/2}` on `A - a <= |x| <= A + a`, zero elsewhere.
pub fn two_slit_state(axis: Axis, a: f64, big_a: f64, hbar: f64) -> Result<GridState> {
    if !(a > 0.0 && big_a >= a) {
        return Err(TempusError::Parameter(format!(
            "need 0 < a <= A, got a = {a}, A = {big_a}"
        )));
    }
    if axis.kind != AxisKind::Position {
        return Err(TempusError::Domain(
            "two-slit state lives on a position axis".into(),
        ));
    }
    let h = (4.0 * a).sqrt().recip();
    GridState::from_fn(axis, hbar, |x| {
        let r = x.abs();
        if r >= big_a - a && r <= big_a + a {
            C64::new(h, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Momentum amplitude of [`two_slit_state`] under the unitary transform
/// `(2 pi hbar)^{-1/2} ∫ psi e^{-ipx/hbar} dx`:
/// `(2 pi hbar)^{-1/2} 2 sqrt(a) cos(Ap/hbar) sin(ap/hbar)/(ap/hbar)`.
pub fn two_slit_momentum_amplitude(p: f64, a: f64, big_a: f64, hbar: f64) -> f64 {
    let k = a * p / hbar;
    let sinc = if k == 0.0 { 1.0 } else { k.sin() / k };
    2.0 * a.sqrt() * (big_a * p / hbar).cos() * sinc / (2.0 * PI * hbar).sqrt()
}
