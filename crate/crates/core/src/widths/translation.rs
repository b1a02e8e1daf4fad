use crate::hilbert::{Axis, TemporalAmplitude};
use crate::{Result, TempusError};

/// First grid time at or after index `from` where `values` drops to `level`,
/// linearly interpolated between the bracketing samples.
pub fn first_crossing(axis: &Axis, values: &[f64], from: usize, level: f64) -> Result<f64> {
    if values.len() != axis.count {
        return Err(TempusError::Validation(
            "sample count does not match axis".into(),
        ));
    }
    if from >= values.len() {
        return Err(TempusError::Domain(
            "crossing search starts outside the grid".into(),
        ));
    }
    if values[from] <= level {
        return Ok(axis.value(from));
    }
    for i in from + 1..values.len() {
        if values[i] <= level {
            let (a, b) = (values[i - 1], values[i]);
            let w = if a > b { (a - level) / (a - b) } else { 1.0 };
            return Ok(axis.value(i - 1) + w * axis.step);
        }
    }
    Err(TempusError::NotAttained {
        horizon: axis.end(),
    })
}

/// Smallest `t >= 0` with `|f(t)| = 1 - rho`.
///
/// `f` must satisfy `|f(0)| = 1` and the time grid must contain `t = 0`.
pub fn translation_width(f: &TemporalAmplitude, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(TempusError::Parameter(format!(
            "rho must lie in (0, 1], got {rho}"
        )));
    }
    let ax = f.time_axis;
    let i0 = ax.nearest_index(0.0);
    if ax.value(i0).abs() > 1e-9 * ax.step {
        return Err(TempusError::Domain(
            "time grid does not contain t = 0".into(),
        ));
    }
    let modulus: Vec<f64> = f.f.iter().map(|z| z.norm()).collect();
    if (modulus[i0] - 1.0).abs() > 1e-6 {
        return Err(TempusError::Precondition(format!(
            "|f(0)| = {} instead of 1",
            modulus[i0]
        )));
    }
    first_crossing(&ax, &modulus, i0, 1.0 - rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AxisKind, C64};

    fn amplitude<F: Fn(f64) -> C64>(dt: f64, n: usize, f: F) -> TemporalAmplitude {
        let ax = Axis::centered(AxisKind::Time, dt, n).unwrap();
        let vals: Vec<C64> = ax.values().into_iter().map(f).collect();
        let e = Axis::centered(AxisKind::Energy, 1.0, n).unwrap();
        TemporalAmplitude::from_parts(ax, vals, e, vec![C64::new(0.0, 0.0); n], 1.0).unwrap()
    }

    #[test]
    fn pure_phase_never_decays() {
        let f = amplitude(0.01, 1001, |t| C64::from_polar(1.0, -2.0 * t));
        assert!(matches!(
            translation_width(&f, 0.3),
            Err(TempusError::NotAttained { .. })
        ));
    }

    #[test]
    fn exponential_decay_inverts() {
        let g = 0.8;
        let f = amplitude(1e-3, 40001, |t| {
            C64::from_polar((-t.abs() * g / 2.0).exp(), -t)
        });
        for rho in [0.1, 0.5, 1.0 - 0.5f64.sqrt(), 0.9] {
            let w = translation_width(&f, rho).unwrap();
            let exact = -(2.0 / g) * (1.0 - rho).ln();
            assert!((w - exact).abs() < 1e-6, "rho={rho}");
        }
    }

    #[test]
    fn two_level_cosine() {
        let dh = 1.3;
        let f = amplitude(1e-4, 40001, |t| {
            C64::new((dh * t).cos(), 0.0) * C64::from_polar(1.0, -0.4 * t)
        });
        for rho in [0.2, 0.6, 0.95] {
            let w = translation_width(&f, rho).unwrap();
            let exact = (1.0 - rho).acos() / dh;
            assert!((w - exact).abs() < 1e-7);
        }
    }

    #[test]
    fn monotone_in_rho() {
        let f = amplitude(1e-3, 20001, |t| C64::new((-t * t).exp(), 0.0));
        let mut last = 0.0;
        for k in 1..20 {
            let w = translation_width(&f, k as f64 / 20.0).unwrap();
            assert!(w >= last);
            last = w;
        }
    }
}
