//! Spread measures of distributions and amplitudes, and the inequalities
//! that tie a function's width to that of its Fourier transform.

mod overall;
mod relations;
mod translation;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::hilbert::Axis;
use crate::{Result, TempusError};

pub use overall::{overall_width, overall_width_atoms, overall_width_with, Tails};
pub use relations::{
    calibrate_overall_constant, check_decay_equivalent_width, check_equivalent_width_identity,
    check_hu_lifetime, check_hu_relation, check_overall_width_relation, hu_rhs, overall_constant,
    overall_product, CalibrationPoint, HALF_TIME_RHO, OVERALL_CALIBRATION,
};
pub use translation::{first_crossing, translation_width};

/// Which width a [`WidthReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "measure", rename_all = "lowercase")]
pub enum WidthMeasure {
    Variance,
    Fwhm,
    Equivalent,
    Overall { alpha: f64 },
    Translation { rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthReport {
    pub measure: WidthMeasure,
    /// Non-negative, possibly `+inf`.
    pub value: f64,
    pub parameters: Vec<f64>,
}

/// Mean and variance of a non-negative density sampled on `axis`
/// (self-normalised).
pub fn variance_width(dist: &[f64], axis: &Axis) -> Result<(f64, f64)> {
    check_density(dist, axis)?;
    let x = axis.values();
    let m0: f64 = dist.iter().sum();
    let m1: f64 = dist.iter().zip(&x).map(|(d, x)| d * x).sum::<f64>() / m0;
    let m2: f64 = dist
        .iter()
        .zip(&x)
        .map(|(d, x)| d * (x - m1) * (x - m1))
        .sum::<f64>()
        / m0;
    Ok((m1, m2.max(0.0)))
}

/// Full width at half maximum. Each flank crossing is located on the cubic
/// through the four nearest samples.
pub fn fwhm(dist: &[f64], axis: &Axis) -> Result<f64> {
    check_density(dist, axis)?;
    let (imax, &peak) = dist
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let half = peak / 2.0;
    let lo = (0..imax)
        .rev()
        .find(|&i| dist[i] <= half)
        .map(|i| crossing(dist, axis, i, half));
    let hi = (imax + 1..dist.len())
        .find(|&i| dist[i] <= half)
        .map(|i| crossing(dist, axis, i - 1, half));
    match (lo, hi) {
        (Some(a), Some(b)) => Ok(b - a),
        _ => Err(TempusError::Coverage(
            "half maximum not reached inside the grid".into(),
        )),
    }
}

/// Root of `dist = level` between samples `i` and `i + 1`.
fn crossing(dist: &[f64], axis: &Axis, i: usize, level: f64) -> f64 {
    let n = dist.len();
    let first = i.saturating_sub(1).min(n.saturating_sub(4));
    let idx: Vec<usize> = (first..(first + 4).min(n)).collect();
    let cubic = |x: f64| -> f64 {
        idx.iter()
            .map(|&j| {
                let mut l = dist[j];
                for &k in &idx {
                    if k != j {
                        l *= (x - k as f64) / (j as f64 - k as f64);
                    }
                }
                l
            })
            .sum::<f64>()
            - level
    };
    let (mut a, mut b) = (i as f64, i as f64 + 1.0);
    let fa = cubic(a);
    if fa * cubic(b) > 0.0 {
        // fall back to the chord
        let w = (dist[i] - level) / (dist[i] - dist[i + 1]);
        return axis.value(i) + w * axis.step;
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if cubic(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    axis.start + 0.5 * (a + b) * axis.step
}

/// Relative floor below which a reference value counts as zero.
pub const REFERENCE_FLOOR: f64 = 1e-10;

/// `W(phi) = phi(x0)^-1 ∫ phi dx`, with `phi(x0)` linearly interpolated.
pub fn equivalent_width(phi: &[C64], axis: &Axis, x0: f64) -> Result<C64> {
    if phi.len() != axis.count {
        return Err(TempusError::Validation(
            "sample count does not match axis".into(),
        ));
    }
    let peak = phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let s = (x0 - axis.start) / axis.step;
    let r = if s < 0.0 || s > (axis.count - 1) as f64 {
        C64::new(0.0, 0.0)
    } else {
        let i = (s.floor() as usize).min(axis.count - 2);
        let w = s - i as f64;
        phi[i] * (1.0 - w) + phi[i + 1] * w
    };
    if !(r.norm() > REFERENCE_FLOOR * peak) {
        return Err(TempusError::SingularReference(r.norm()));
    }
    let integral: C64 = phi.iter().sum::<C64>() * axis.step;
    Ok(integral / r)
}

fn check_density(dist: &[f64], axis: &Axis) -> Result<()> {
    if dist.len() != axis.count {
        return Err(TempusError::Validation(
            "sample count does not match axis".into(),
        ));
    }
    if dist.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(TempusError::Validation(
            "density must be finite and non-negative".into(),
        ));
    }
    if !(dist.iter().sum::<f64>() > 0.0) {
        return Err(TempusError::Validation("density has zero mass".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AxisKind;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_equivalent_width() {
        let ax = Axis::centered(AxisKind::Position, 0.01, 4001).unwrap();
        let sigma = 0.8;
        let phi: Vec<C64> = ax
            .values()
            .iter()
            .map(|x| C64::new((-x * x / (2.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let w = equivalent_width(&phi, &ax, 0.0).unwrap();
        assert!((w.re - sigma * (2.0 * PI).sqrt()).abs() < 1e-10);
        assert!(w.im.abs() < 1e-15);
        // global phase leaves W unchanged
        let ph = C64::from_polar(1.0, 0.7);
        let rotated: Vec<C64> = phi.iter().map(|z| z * ph).collect();
        assert!((equivalent_width(&rotated, &ax, 0.0).unwrap() - w).norm() < 1e-12);
    }

    #[test]
    fn indicator_equivalent_width() {
        let l = 2.0;
        let n = 200;
        let ax = Axis::new(AxisKind::Position, l / (2.0 * n as f64), l / n as f64, n).unwrap();
        let phi = vec![C64::new(1.0, 0.0); n];
        assert!((equivalent_width(&phi, &ax, l / 2.0).unwrap().re - l).abs() < 1e-12);
    }

    #[test]
    fn singular_reference() {
        let ax = Axis::centered(AxisKind::Position, 0.1, 101).unwrap();
        let phi: Vec<C64> = ax.values().iter().map(|x| C64::new(*x, 0.0)).collect();
        assert!(matches!(
            equivalent_width(&phi, &ax, 0.0),
            Err(TempusError::SingularReference(_))
        ));
    }

    #[test]
    fn gaussian_variance_and_fwhm() {
        let ax = Axis::centered(AxisKind::Time, 0.005, 4001).unwrap();
        let s = 0.9;
        let d: Vec<f64> = ax
            .values()
            .iter()
            .map(|t| (-(t - 0.3) * (t - 0.3) / (2.0 * s * s)).exp())
            .collect();
        let (m, v) = variance_width(&d, &ax).unwrap();
        assert!((m - 0.3).abs() < 1e-10 && (v - s * s).abs() < 1e-9);
        let f = fwhm(&d, &ax).unwrap();
        assert!((f - 2.0 * (2.0 * 2f64.ln()).sqrt() * s).abs() < 1e-8);
    }
}
