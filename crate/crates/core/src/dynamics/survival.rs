use std::f64::consts::PI;

use serde::Serialize;

use crate::hilbert::{evolve, inner_raw, moments, Axis, GridState, HermitianOperator};
use crate::sampling::{complex_normal, rng};
use crate::widths::first_crossing;
use crate::{par, BoundReport, Result, TempusError};

/// `p(t) = <psi_t | P | psi_t>` on a time grid starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub time_axis: Axis,
    pub p_values: Vec<f64>,
    /// Energy spread of the initial state (`inf` when unknown or divergent).
    pub delta_h: f64,
    pub hbar: f64,
    /// Worst sample of `p(t) >= cos^2(t Delta H / hbar)` on
    /// `[0, pi hbar / (2 Delta H)]`; `None` when `Delta H` is not finite.
    pub cosine_bound: Option<BoundReport>,
}

impl SurvivalCurve {
    /// A curve given directly by samples (e.g. a model decay law).
    pub fn from_samples(
        time_axis: Axis,
        p_values: Vec<f64>,
        delta_h: f64,
        hbar: f64,
    ) -> Result<Self> {
        if p_values.len() != time_axis.count {
            return Err(TempusError::Validation(
                "sample count does not match axis".into(),
            ));
        }
        if p_values
            .iter()
            .any(|p| !(*p >= -1e-12 && *p <= 1.0 + 1e-12))
        {
            return Err(TempusError::Validation(
                "survival probabilities must lie in [0, 1]".into(),
            ));
        }
        let cosine_bound = cosine_bound(&time_axis, &p_values, delta_h, hbar);
        Ok(Self {
            time_axis,
            p_values,
            delta_h,
            hbar,
            cosine_bound,
        })
    }
}

fn cosine_bound(axis: &Axis, p: &[f64], delta_h: f64, hbar: f64) -> Option<BoundReport> {
    if !(delta_h.is_finite() && delta_h > 0.0) {
        return None;
    }
    let limit = PI * hbar / (2.0 * delta_h);
    let mut worst: Option<(f64, f64)> = None;
    for (i, pi) in p.iter().enumerate() {
        let t = axis.value(i);
        if t < 0.0 || t > limit {
            continue;
        }
        let c = (t * delta_h / hbar).cos().powi(2);
        if worst.is_none_or(|(wp, wc)| pi - c < wp - wc) {
            worst = Some((*pi, c));
        }
    }
    worst.map(|(lhs, rhs)| BoundReport::new("MT-p", lhs, rhs, 1e-9))
}

fn check_projection(p: &HermitianOperator) -> Result<()> {
    let mut r = rng(0x5eed);
    for _ in 0..3 {
        let v: Vec<_> = (0..p.dim()).map(|_| complex_normal(&mut r)).collect();
        let pv = p.apply_raw(&v);
        let ppv = p.apply_raw(&pv);
        let err: f64 = pv
            .iter()
            .zip(&ppv)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if err > 1e-10 * norm {
            return Err(TempusError::Validation(format!(
                "operator is not a projection (defect {err:e})"
            )));
        }
    }
    Ok(())
}

/// Survival probability of the property `P` along the evolution of `psi0`.
pub fn survival_curve(
    psi0: &GridState,
    p: &HermitianOperator,
    h: &HermitianOperator,
    time_axis: Axis,
) -> Result<SurvivalCurve> {
    check_projection(p)?;
    let psi = psi0.normalized()?;
    let (p0, _) = moments(p, &psi)?;
    if (p0 - 1.0).abs() > 1e-6 {
        return Err(TempusError::Precondition(format!(
            "property not actual initially: p(0) = {p0}"
        )));
    }
    let (_, var_h) = moments(h, &psi)?;
    let values = par::map_range(time_axis.count, |i| -> Result<f64> {
        Ok(moments(p, &evolve(&psi, h, time_axis.value(i))?)?
            .0
            .clamp(0.0, 1.0))
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    SurvivalCurve::from_samples(time_axis, values, var_h.sqrt(), psi.hbar)
}

/// Survival curve for `P = |psi0><psi0|`, computed from overlaps.
pub fn return_probability_curve(
    psi0: &GridState,
    h: &HermitianOperator,
    time_axis: Axis,
) -> Result<SurvivalCurve> {
    let psi = psi0.normalized()?;
    let (_, var_h) = moments(h, &psi)?;
    let values = par::map_range(time_axis.count, |i| -> Result<f64> {
        let pt = evolve(&psi, h, time_axis.value(i))?;
        Ok((inner_raw(&psi.amplitudes, &pt.amplitudes) * psi.axis.step)
            .norm_sqr()
            .min(1.0))
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    SurvivalCurve::from_samples(time_axis, values, var_h.sqrt(), psi.hbar)
}

/// `tau_P` from `p(tau_P) = 1/2`, with the check `tau_P Delta H >= pi hbar / 4`
/// (informational when `Delta H` is not finite).
pub fn property_lifetime(curve: &SurvivalCurve) -> Result<(f64, BoundReport)> {
    let start = curve.time_axis.nearest_index(0.0);
    let tau = first_crossing(&curve.time_axis, &curve.p_values, start, 0.5)?;
    let rhs = PI * curve.hbar / 4.0;
    let r = if curve.delta_h.is_finite() {
        BoundReport::new("MT-lifetime", tau * curve.delta_h, rhs, 1e-8 * curve.hbar)
    } else {
        BoundReport::new("MT-lifetime", f64::INFINITY, rhs, 0.0).informational()
    };
    Ok((tau, r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrabowskiLifetime {
    pub tau0: f64,
    /// Part of `tau0` supplied by the fitted exponential tail.
    pub tail: f64,
    pub report: BoundReport,
}

/// Level below which the horizon value needs no tail correction.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// `tau_0 = ∫_0^∞ p(t) dt`: trapezoid over the grid plus, when the curve has
/// not yet died out, an exponential fitted to the last tenth of the samples
/// and integrated analytically.
pub fn grabowski_lifetime(curve: &SurvivalCurve) -> Result<GrabowskiLifetime> {
    let ax = curve.time_axis;
    let start = ax.nearest_index(0.0);
    let p = &curve.p_values[start..];
    let n = p.len();
    if n < 20 {
        return Err(TempusError::Resolution(
            "too few samples after t = 0".into(),
        ));
    }
    let body = crate::quad::trapezoid(p, ax.step);
    let last = p[n - 1];
    let tail = if last <= TAIL_TOLERANCE {
        0.0
    } else {
        let k0 = n - n / 10;
        if p[k0..].iter().any(|v| !(*v > 0.0)) {
            return Err(TempusError::Divergent("tail not strictly positive".into()));
        }
        let xs: Vec<f64> = (k0..n).map(|i| i as f64 * ax.step).collect();
        let ys: Vec<f64> = p[k0..].iter().map(|v| v.ln()).collect();
        let m = xs.len() as f64;
        let (sx, sy) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let sxx: f64 = xs.iter().map(|x| (x - sx) * (x - sx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - sx) * (y - sy)).sum();
        let slope = sxy / sxx;
        let resid: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - sy - slope * (x - sx)).powi(2))
            .sum();
        let total: f64 = ys.iter().map(|y| (y - sy).powi(2)).sum();
        let decades = -slope * (xs[xs.len() - 1] - xs[0]) / std::f64::consts::LN_10;
        if !(slope < 0.0) || resid > 1e-2 * total || decades < 0.05 {
            return Err(TempusError::Divergent(format!(
                "p(t) = {last:e} at the horizon without an exponential tail"
            )));
        }
        last / -slope
    };
    let tau0 = body + tail;
    let rhs = curve.hbar / 2.0;
    let report = if curve.delta_h.is_finite() {
        BoundReport::new(
            "Grabo-lifetime",
            tau0 * curve.delta_h,
            rhs,
            1e-8 * curve.hbar,
        )
    } else {
        BoundReport::new("Grabo-lifetime", f64::INFINITY, rhs, 0.0).informational()
    };
    Ok(GrabowskiLifetime { tau0, tail, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AxisKind, C64};

    fn pair(dh: f64) -> (GridState, HermitianOperator) {
        let ax = Axis::fock(2).unwrap();
        let h = HermitianOperator::diagonal(ax, vec![0.3 - dh, 0.3 + dh]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (
            GridState::new(ax, vec![C64::new(s, 0.0); 2], 1.0).unwrap(),
            h,
        )
    }

    #[test]
    fn two_level_equality_chain() {
        let dh = 0.9;
        let (psi, h) = pair(dh);
        let ax = Axis::linspace(AxisKind::Time, 0.0, PI / (2.0 * dh), 2001).unwrap();
        let c = return_probability_curve(&psi, &h, ax).unwrap();
        for (i, p) in c.p_values.iter().enumerate() {
            assert!((p - (ax.value(i) * dh).cos().powi(2)).abs() < 1e-12);
        }
        let b = c.cosine_bound.clone().unwrap();
        assert!(b.pass && b.slack.abs() < 1e-8);
        let (tau, r) = property_lifetime(&c).unwrap();
        assert!((tau - PI / (4.0 * dh)).abs() < 1e-6);
        assert!((r.lhs - PI / 4.0).abs() < 1e-6);
        // the projector route agrees with overlaps
        let pm = nalgebra::DMatrix::from_element(2, 2, C64::new(0.5, 0.0));
        let proj = HermitianOperator::dense(Axis::fock(2).unwrap(), pm).unwrap();
        let c2 = survival_curve(&psi, &proj, &h, ax).unwrap();
        for (a, b) in c.p_values.iter().zip(&c2.p_values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_projection_and_initial_condition() {
        let (psi, h) = pair(1.0);
        let ax = Axis::linspace(AxisKind::Time, 0.0, 1.0, 11).unwrap();
        let notp = HermitianOperator::diagonal(Axis::fock(2).unwrap(), vec![0.5, 1.0]).unwrap();
        assert!(matches!(
            survival_curve(&psi, &notp, &h, ax),
            Err(TempusError::Validation(_))
        ));
        let p0 = HermitianOperator::diagonal(Axis::fock(2).unwrap(), vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            survival_curve(&psi, &p0, &h, ax),
            Err(TempusError::Precondition(_))
        ));
    }

    #[test]
    fn exponential_law() {
        let g = 1.5;
        let ax = Axis::linspace(AxisKind::Time, 0.0, 4.0, 4001).unwrap();
        let p: Vec<f64> = ax.values().iter().map(|t| (-g * t).exp()).collect();
        let c = SurvivalCurve::from_samples(ax, p, f64::INFINITY, 1.0).unwrap();
        let (tau, r) = property_lifetime(&c).unwrap();
        assert!((tau - 2f64.ln() / g).abs() < 1e-6);
        assert!(!r.asserted);
        let gl = grabowski_lifetime(&c).unwrap();
        assert!(gl.tail > 0.0);
        assert!((gl.tau0 - 1.0 / g).abs() < 1e-6, "{}", gl.tau0);
    }

    #[test]
    fn constant_curve_fails() {
        let ax = Axis::linspace(AxisKind::Time, 0.0, 4.0, 401).unwrap();
        let c = SurvivalCurve::from_samples(ax, vec![1.0; 401], 1.0, 1.0).unwrap();
        assert!(matches!(
            property_lifetime(&c),
            Err(TempusError::NotAttained { .. })
        ));
        assert!(matches!(
            grabowski_lifetime(&c),
            Err(TempusError::Divergent(_))
        ));
    }

    #[test]
    fn gaussian_spectrum_grabowski() {
        // energy grid with Gaussian weights: p(t) = exp(-s^2 t^2)
        let s = 0.8;
        let e = Axis::centered(AxisKind::Energy, 0.01, 1201).unwrap();
        let h = HermitianOperator::multiplication(e, |x| x).unwrap();
        let psi =
            GridState::from_fn(e, 1.0, |x| C64::new((-x * x / (4.0 * s * s)).exp(), 0.0)).unwrap();
        let ax = Axis::linspace(AxisKind::Time, 0.0, 8.0, 801).unwrap();
        let c = return_probability_curve(&psi, &h, ax).unwrap();
        let g = grabowski_lifetime(&c).unwrap();
        assert!((g.tau0 - PI.sqrt() / (2.0 * s)).abs() < 1e-6);
        assert!(g.report.pass);
        assert!((c.delta_h - s).abs() < 1e-9);
    }
}
