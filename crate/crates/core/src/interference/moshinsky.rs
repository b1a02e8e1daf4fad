use std::f64::consts::PI;

use serde::Serialize;

use crate::hilbert::{Axis, AxisKind};
use crate::widths::overall_width;
use crate::{BoundReport, Result, TempusError};

/// `E^{1/2} sin^2((E - E0) T/2hbar) / (E - E0)^2`, unnormalised; the limit
/// `E0^{1/2} T^2/4hbar^2` at `E = E0`.
pub fn moshinsky_density(e: f64, e0: f64, t_prep: f64, hbar: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let d = e - e0;
    let x = 0.5 * d * t_prep / hbar;
    if x.abs() < 1e-8 {
        return e.sqrt() * t_prep * t_prep / (4.0 * hbar * hbar) * (1.0 - x * x / 3.0);
    }
    e.sqrt() * (x.sin() / d).powi(2)
}

/// `E0 ± 2 pi j hbar / T` for `j = 1..=j_max`, positive ones only.
pub fn moshinsky_zeros(e0: f64, t_prep: f64, hbar: f64, j_max: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 1..=j_max {
        let s = 2.0 * PI * j as f64 * hbar / t_prep;
        if e0 - s > 0.0 {
            out.push(e0 - s);
        }
        out.push(e0 + s);
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moshinsky {
    pub axis: Axis,
    /// Normalised so that `sum density * step = 1`.
    pub density: Vec<f64>,
    /// `W(density, 1/2)`.
    pub delta_e: f64,
    /// `T_prep Delta E >= hbar/2`.
    pub report: BoundReport,
}

impl Moshinsky {
    /// Grid positions of the local minima nearest each analytic zero, paired
    /// with the zero.
    pub fn located_zeros(&self, zeros: &[f64]) -> Vec<(f64, Option<f64>)> {
        let d = &self.density;
        let minima: Vec<f64> = (1..d.len() - 1)
            .filter(|&i| d[i] <= d[i - 1] && d[i] <= d[i + 1])
            .map(|i| self.axis.value(i))
            .collect();
        zeros
            .iter()
            .map(|&z| {
                let best = minima
                    .iter()
                    .cloned()
                    .filter(|m| (m - z).abs() <= self.axis.step)
                    .min_by(|a, b| (a - z).abs().total_cmp(&(b - z).abs()));
                (z, best)
            })
            .collect()
    }
}

/// Energy distribution behind a shutter open for `t_prep`, for a sharp
/// incident energy `e0`.
pub fn moshinsky_distribution(e0: f64, t_prep: f64, axis: Axis, hbar: f64) -> Result<Moshinsky> {
    if !(e0 > 0.0 && t_prep > 0.0 && hbar > 0.0) {
        return Err(TempusError::Parameter(format!(
            "need E0, T, hbar > 0 (E0 = {e0}, T = {t_prep})"
        )));
    }
    if axis.kind != AxisKind::Energy || axis.start <= 0.0 {
        return Err(TempusError::Domain(
            "energy grid must lie in (0, inf)".into(),
        ));
    }
    let lobe = 2.0 * PI * hbar / t_prep;
    let lo = (e0 - lobe).max(0.0);
    if axis.start > lo + axis.step || axis.end() < e0 + lobe {
        return Err(TempusError::Coverage(format!(
            "grid [{}, {}] misses the main lobe [{lo}, {}]",
            axis.start,
            axis.end(),
            e0 + lobe
        )));
    }
    let raw: Vec<f64> = axis
        .values()
        .iter()
        .map(|&e| moshinsky_density(e, e0, t_prep, hbar))
        .collect();
    let total: f64 = raw.iter().sum::<f64>() * axis.step;
    let density: Vec<f64> = raw.iter().map(|d| d / total).collect();
    let delta_e = overall_width(&density, &axis, 0.5)?;
    let report = BoundReport::new("prep-ur", t_prep * delta_e, 0.5 * hbar, 1e-12 * hbar);
    Ok(Moshinsky {
        axis,
        density,
        delta_e,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Axis {
        Axis::linspace(AxisKind::Energy, 0.01, 200.0, 40001).unwrap()
    }

    #[test]
    fn limit_at_carrier_is_continuous() {
        let (e0, t) = (50.0, 2.0);
        let at = moshinsky_density(e0, e0, t, 1.0);
        assert!((at - e0.sqrt() * t * t / 4.0).abs() < 1e-12);
        let near = moshinsky_density(e0 + 1e-6, e0, t, 1.0);
        assert!((near - at).abs() < 1e-6 * at);
    }

    #[test]
    fn normalised_non_negative_and_zeros_located() {
        let m = moshinsky_distribution(50.0, 2.0, grid(), 1.0).unwrap();
        assert!(m.density.iter().all(|d| *d >= 0.0));
        assert!((m.density.iter().sum::<f64>() * m.axis.step - 1.0).abs() < 1e-12);
        for (z, found) in m.located_zeros(&moshinsky_zeros(50.0, 2.0, 1.0, 4)) {
            assert!(found.is_some(), "zero at {z} not found");
        }
        assert!(m.report.pass);
    }

    #[test]
    fn width_halves_when_time_doubles() {
        let w = |t: f64| {
            moshinsky_distribution(50.0, t, grid(), 1.0)
                .unwrap()
                .delta_e
        };
        for t in [1.0, 2.0, 4.0] {
            let r = w(2.0 * t) / w(t);
            assert!((r - 0.5).abs() < 0.025, "{t}: {r}");
        }
    }

    #[test]
    fn coverage_error_when_lobe_missing() {
        let axis = Axis::linspace(AxisKind::Energy, 49.0, 51.0, 101).unwrap();
        assert!(matches!(
            moshinsky_distribution(50.0, 1.0, axis, 1.0),
            Err(TempusError::Coverage(_))
        ));
    }
}
