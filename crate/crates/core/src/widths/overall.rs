use crate::hilbert::Axis;
use crate::{Result, TempusError};

/// How to treat mass beyond the ends of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tails {
    /// The grid holds the whole distribution.
    Closed,
    /// The distribution continues past the grid; if the end samples are
    /// non-zero the full-mass width (`alpha = 1`) is infinite.
    Open,
}

/// Length of the shortest interval carrying a fraction `alpha` of the mass of
/// `dist`.
///
/// Each sample is spread uniformly over its own cell, so the CDF is piecewise
/// linear and the answer is exact for that model. Between breakpoints the
/// interval length is linear in its left end, so the optimum has one end on a
/// cell boundary; both families are scanned.
pub fn overall_width(dist: &[f64], axis: &Axis, alpha: f64) -> Result<f64> {
    overall_width_with(dist, axis, alpha, Tails::Closed)
}

pub fn overall_width_with(dist: &[f64], axis: &Axis, alpha: f64, tails: Tails) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TempusError::Parameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
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
    let n = dist.len();
    if tails == Tails::Open && alpha == 1.0 && (dist[0] > 0.0 || dist[n - 1] > 0.0) {
        return Ok(f64::INFINITY);
    }
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for d in dist {
        cum.push(cum.last().unwrap() + d);
    }
    let total = cum[n];
    if !(total > 0.0) {
        return Err(TempusError::Validation("density has zero mass".into()));
    }
    let target = alpha * total;
    let slack = 1e-12 * total;
    let edge = |k: usize| axis.start - 0.5 * axis.step + k as f64 * axis.step;

    // smallest x with F(x) >= y
    let upper = |y: f64| -> f64 {
        if y <= 0.0 {
            return edge(0);
        }
        let y = y.min(total);
        let i = cum[1..].partition_point(|c| *c < y);
        let i = i.min(n - 1);
        let frac = if dist[i] > 0.0 {
            ((y - cum[i]) / dist[i]).clamp(0.0, 1.0)
        } else {
            1.0
        };
        edge(i) + frac * axis.step
    };
    // largest x with F(x) <= y
    let lower = |y: f64| -> f64 {
        let y = y.max(0.0);
        let j = cum.partition_point(|c| *c <= y) - 1;
        if j >= n {
            return edge(n);
        }
        let frac = if dist[j] > 0.0 {
            ((y - cum[j]) / dist[j]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        edge(j) + frac * axis.step
    };

    let mut best = f64::INFINITY;
    for (k, &c) in cum.iter().enumerate() {
        if c + target <= total + slack {
            best = best.min(upper(c + target) - edge(k));
        }
        if c - target >= -slack {
            best = best.min(edge(k) - lower(c - target));
        }
    }
    Ok(best.max(0.0))
}

/// Shortest closed interval `[x_i, x_j]` carrying a fraction `alpha` of the
/// weight of a point distribution. `positions` must be sorted.
pub fn overall_width_atoms(positions: &[f64], weights: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TempusError::Parameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if positions.len() != weights.len() || positions.is_empty() {
        return Err(TempusError::Validation(
            "positions and weights must match".into(),
        ));
    }
    if positions.windows(2).any(|w| w[1] < w[0]) {
        return Err(TempusError::Validation(
            "atom positions must be sorted".into(),
        ));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(TempusError::Validation("negative atom weight".into()));
    }
    let total: f64 = weights.iter().sum();
    let target = alpha * total * (1.0 - 1e-12);
    let mut best = f64::INFINITY;
    let mut j = 0;
    let mut mass = 0.0;
    for i in 0..positions.len() {
        while j < positions.len() && mass < target {
            mass += weights[j];
            j += 1;
        }
        if mass < target {
            break;
        }
        best = best.min(positions[j - 1] - positions[i]);
        mass -= weights[i];
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AxisKind;
    use proptest::prelude::*;
    use statrs::function::erf::erf;

    fn cells(lo: f64, hi: f64, n: usize) -> Axis {
        let h = (hi - lo) / n as f64;
        Axis::new(AxisKind::Time, lo + h / 2.0, h, n).unwrap()
    }

    #[test]
    fn uniform_density() {
        let ax = cells(0.0, 1.0, 1000);
        let d = vec![1.0; 1000];
        assert!((overall_width(&d, &ax, 0.9).unwrap() - 0.9).abs() < 1e-12);
        assert!((overall_width(&d, &ax, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compact_support_at_full_mass() {
        let ax = cells(-2.0, 2.0, 400);
        let d: Vec<f64> = ax
            .values()
            .iter()
            .map(|x| if x.abs() < 0.5 { 1.0 - x.abs() } else { 0.0 })
            .collect();
        assert!((overall_width(&d, &ax, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(overall_width_with(&d, &ax, 1.0, Tails::Open).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_one_sigma() {
        let ax = Axis::centered(AxisKind::Time, 0.002, 8001).unwrap();
        let s = 1.1;
        let d: Vec<f64> = ax
            .values()
            .iter()
            .map(|t| (-t * t / (2.0 * s * s)).exp())
            .collect();
        let a = erf(1.0 / 2f64.sqrt());
        assert!((overall_width(&d, &ax, a).unwrap() - 2.0 * s).abs() < ax.step);
    }

    #[test]
    fn open_tails_make_full_width_infinite() {
        let ax = Axis::centered(AxisKind::Energy, 0.01, 1001).unwrap();
        let d: Vec<f64> = ax.values().iter().map(|e| 1.0 / (1.0 + e * e)).collect();
        assert!(overall_width_with(&d, &ax, 1.0, Tails::Open)
            .unwrap()
            .is_infinite());
        assert!(overall_width_with(&d, &ax, 0.5, Tails::Open)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn rejects_bad_alpha() {
        let ax = cells(0.0, 1.0, 10);
        assert!(matches!(
            overall_width(&[1.0; 10], &ax, 0.0),
            Err(TempusError::Parameter(_))
        ));
        assert!(matches!(
            overall_width(&[1.0; 10], &ax, 1.5),
            Err(TempusError::Parameter(_))
        ));
    }

    #[test]
    fn atoms() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let w = [0.25; 4];
        assert_eq!(overall_width_atoms(&x, &w, 1.0).unwrap(), 3.0);
        assert_eq!(overall_width_atoms(&x, &w, 0.5).unwrap(), 1.0);
        assert_eq!(overall_width_atoms(&x, &w, 0.25).unwrap(), 0.0);
        assert_eq!(
            overall_width_atoms(&x, &[0.1, 0.0, 0.0, 0.9], 0.95).unwrap(),
            3.0
        );
    }

    proptest! {
        #[test]
        fn monotone_in_alpha(d in prop::collection::vec(0.0f64..1.0, 8..64), a in 0.05f64..0.95, da in 0.0f64..0.05) {
            prop_assume!(d.iter().sum::<f64>() > 1e-3);
            let ax = cells(0.0, 1.0, d.len());
            let w1 = overall_width(&d, &ax, a).unwrap();
            let w2 = overall_width(&d, &ax, a + da).unwrap();
            prop_assert!(w2 >= w1 - 1e-12);
        }

        #[test]
        fn shift_invariant(d in prop::collection::vec(0.0f64..1.0, 8..64), a in 0.05f64..1.0, shift in -5.0f64..5.0) {
            prop_assume!(d.iter().sum::<f64>() > 1e-3);
            let ax = cells(0.0, 1.0, d.len());
            let moved = Axis::new(AxisKind::Time, ax.start + shift, ax.step, ax.count).unwrap();
            let w1 = overall_width(&d, &ax, a).unwrap();
            let w2 = overall_width(&d, &moved, a).unwrap();
            prop_assert!((w1 - w2).abs() < 1e-9);
        }

        #[test]
        fn brute_force_agreement(d in prop::collection::vec(0.0f64..1.0, 4..24), a in 0.05f64..1.0) {
            prop_assume!(d.iter().sum::<f64>() > 1e-3);
            let ax = cells(0.0, 1.0, d.len());
            // dense sampling of left endpoints
            let total: f64 = d.iter().sum::<f64>() * ax.step;
            let cdf = |x: f64| -> f64 {
                let mut m = 0.0;
                for (i, di) in d.iter().enumerate() {
                    let lo = i as f64 * ax.step;
                    m += di * (x - lo).clamp(0.0, ax.step);
                }
                m
            };
            let mut best = f64::INFINITY;
            for i in 0..=2000 {
                let a0 = i as f64 / 2000.0;
                let (mut lo, mut hi) = (a0, 1.0);
                if cdf(1.0) - cdf(a0) < a * total - 1e-12 { continue; }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if cdf(mid) - cdf(a0) >= a * total - 1e-13 { hi = mid } else { lo = mid }
                }
                best = best.min(hi - a0);
            }
            let w = overall_width(&d, &ax, a).unwrap();
            prop_assert!(w <= best + 1e-9);
        }
    }
}
