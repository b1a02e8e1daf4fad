//! Orthogonalization times and clock-resolution bounds.
//!
//! A clock pointer advances by `delta t` when `psi_t` and `psi_{t + delta t}`
//! are (nearly) orthogonal: `|<psi|psi_delta t>|^2 <= eps`. For `eps > 0`
//! the bounds are evaluated in their `eps`-corrected form, which is what the
//! cosine and translation-width inequalities actually imply; the `eps = 0`
//! values are reported alongside.

use std::f64::consts::PI;

use serde::Serialize;

use crate::hilbert::{spectral_weights, Axis, GridState, HermitianOperator};
use crate::widths::{overall_width_atoms, overall_width_with, Tails};
use crate::{BoundReport, Result, TempusError, C64};

/// Default overlap tolerance for "nearly orthogonal".
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Largest accepted overlap tolerance.
pub const MAX_EPSILON: f64 = 0.05;
/// `|<psi|psi_t>|` below this counts as an exact zero when `eps = 0`.
const ZERO_AMPLITUDE: f64 = 1e-7;
/// Weights below this fraction of the largest are ignored for the energy
/// spread that sets the scan step.
const SPREAD_FLOOR: f64 = 1e-14;

fn check_epsilon(eps: f64) -> Result<()> {
    if !(0.0..=MAX_EPSILON).contains(&eps) {
        return Err(TempusError::Parameter(format!(
            "epsilon must lie in [0, {MAX_EPSILON}], got {eps}"
        )));
    }
    Ok(())
}

/// Energy distribution entering the clock constant.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyDistribution {
    /// Point spectrum: sorted energies with weights.
    Atoms {
        energies: Vec<f64>,
        weights: Vec<f64>,
    },
    /// Sampled density on a grid; mass may continue past the ends.
    Grid { axis: Axis, density: Vec<f64> },
}

impl EnergyDistribution {
    pub fn atoms(energies: &[f64], weights: &[f64]) -> Result<Self> {
        if energies.len() != weights.len() || energies.is_empty() {
            return Err(TempusError::Validation(
                "energies and weights must match".into(),
            ));
        }
        let mut idx: Vec<usize> = (0..energies.len()).collect();
        idx.sort_by(|a, b| energies[*a].total_cmp(&energies[*b]));
        Ok(Self::Atoms {
            energies: idx.iter().map(|&i| energies[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
        })
    }

    /// Spectral weights of `psi` with respect to `h`.
    pub fn of_state(psi: &GridState, h: &HermitianOperator) -> Result<Self> {
        let (e, w) = spectral_weights(h, psi)?;
        Self::atoms(&e, &w)
    }

    /// Overall width `W(alpha)`; unbounded grid distributions have
    /// `W(1) = inf`.
    pub fn overall_width(&self, alpha: f64) -> Result<f64> {
        match self {
            EnergyDistribution::Atoms { energies, weights } => {
                overall_width_atoms(energies, weights, alpha)
            }
            EnergyDistribution::Grid { axis, density } => {
                overall_width_with(density, axis, alpha, Tails::Open)
            }
        }
    }
}

/// Autocorrelation `<psi|psi_t> = sum_k w_k e^{-i E_k t / hbar}`, energies
/// measured from their mean.
#[derive(Debug, Clone)]
struct Overlap {
    energies: Vec<f64>,
    weights: Vec<f64>,
    hbar: f64,
}

impl Overlap {
    fn new(energies: &[f64], weights: &[f64], hbar: f64) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(TempusError::Validation("zero spectral weight".into()));
        }
        let mean = energies
            .iter()
            .zip(weights)
            .map(|(e, w)| e * w)
            .sum::<f64>()
            / total;
        Ok(Self {
            energies: energies.iter().map(|e| e - mean).collect(),
            weights: weights.iter().map(|w| w / total).collect(),
            hbar,
        })
    }

    fn amplitude(&self, t: f64) -> f64 {
        let k = -t / self.hbar;
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(e, w)| C64::from_polar(*w, k * e))
            .sum::<C64>()
            .norm()
    }

    fn delta_h(&self) -> f64 {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(e, w)| w * e * e)
            .sum::<f64>()
            .sqrt()
    }

    fn spread(&self) -> f64 {
        let peak = self.weights.iter().cloned().fold(0.0, f64::max);
        let (lo, hi) = self
            .energies
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > SPREAD_FLOOR * peak)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (e, _)| {
                (lo.min(*e), hi.max(*e))
            });
        hi - lo
    }
}

/// Golden-section minimum of `f` on `[a, b]`, stopping at bracket width `tol`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for the crossing of `f` through `level`, `f(a) > level >= f(b)`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, level: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > level {
            a = m;
        } else {
            b = m;
        }
    }
    b
}

/// Smallest `t > 0` with `|<psi|psi_t>|^2 <= eps`, from spectral data.
///
/// The autocorrelation is scanned with step `0.02 hbar / spread`; dips
/// between samples are caught by refining every local minimum of `|<psi|psi_t>|`.
pub fn orthogonalization_time_spectral(
    energies: &[f64],
    weights: &[f64],
    hbar: f64,
    eps: f64,
    horizon: f64,
) -> Result<f64> {
    check_epsilon(eps)?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(TempusError::Parameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let ov = Overlap::new(energies, weights, hbar)?;
    let spread = ov.spread();
    if !(spread > 0.0) {
        return Err(TempusError::NotAttained { horizon });
    }
    let dt = 0.02 * hbar / spread;
    let steps = (horizon / dt).ceil();
    if steps > 1e8 {
        return Err(TempusError::Parameter(format!(
            "horizon {horizon} needs {steps:.1e} scan steps"
        )));
    }
    let steps = steps as usize;
    let target = eps.sqrt();
    let f = |t: f64| ov.amplitude(t);
    let accept = target.max(ZERO_AMPLITUDE);
    let (mut t2, mut a2) = (0.0, 1.0);
    let (mut t1, mut a1) = (0.0, 1.0);
    for k in 1..=steps {
        let t = (k as f64 * dt).min(horizon);
        let a = f(t);
        if a <= target && eps > 0.0 {
            return Ok(bisect(f, t1, t, target));
        }
        if k >= 2 && a1 < a2 && a1 <= a {
            let (tm, am) = golden_min(f, t2, t, 1e-15 * t);
            if am <= accept {
                return Ok(if eps > 0.0 {
                    bisect(f, t2, tm, target)
                } else {
                    tm
                });
            }
        }
        if a == 0.0 {
            return Ok(t);
        }
        (t2, a2) = (t1, a1);
        (t1, a1) = (t, a);
    }
    Err(TempusError::NotAttained { horizon })
}

/// [`orthogonalization_time_spectral`] for a state and Hamiltonian.
pub fn orthogonalization_time(
    psi: &GridState,
    h: &HermitianOperator,
    eps: f64,
    horizon: f64,
) -> Result<f64> {
    let (e, w) = spectral_weights(h, psi)?;
    orthogonalization_time_spectral(&e, &w, psi.hbar, eps, horizon)
}

/// `C(alpha) = 2 arccos((1 - alpha + sqrt eps) / alpha) / W(alpha)`; zero
/// where the arccos argument reaches 1 or `W` is infinite.
pub fn clock_constant(dist: &EnergyDistribution, alpha: f64, eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TempusError::Parameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    let arg = (1.0 - alpha + eps.sqrt()) / alpha;
    if arg >= 1.0 {
        return Ok(0.0);
    }
    let w = dist.overall_width(alpha)?;
    if w.is_infinite() {
        return Ok(0.0);
    }
    if !(w > 0.0) {
        return Err(TempusError::Degenerate(format!(
            "an energy value carries at least a fraction {alpha} of the weight"
        )));
    }
    Ok(2.0 * arg.max(-1.0).acos() / w)
}

/// Maximiser of `C(alpha)` over `[(1 + sqrt eps)/2, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HuClockBound {
    pub alpha0: f64,
    pub c: f64,
    /// `hbar C(alpha0)`.
    pub bound: f64,
    /// Lower end of the search interval.
    pub alpha_floor: f64,
    /// The coarse scan showed a single peak; otherwise a dense scan was used.
    pub unimodal: bool,
}

const COARSE_POINTS: usize = 65;
const DENSE_POINTS: usize = 4097;
const ALPHA_TOLERANCE: f64 = 1e-6;

/// `(alpha, C(alpha))` on `points` equally spaced values over the search
/// interval.
pub fn clock_constant_curve(
    dist: &EnergyDistribution,
    eps: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    check_epsilon(eps)?;
    let lo = 0.5 * (1.0 + eps.sqrt());
    let n = points.max(2);
    let alphas: Vec<f64> = (0..n)
        .map(|i| lo + (1.0 - lo) * i as f64 / (n - 1) as f64)
        .collect();
    crate::par::map(&alphas, |&a| clock_constant(dist, a, eps).map(|c| (a, c)))
        .into_iter()
        .collect()
}

pub fn hu_clock_bound(dist: &EnergyDistribution, hbar: f64, eps: f64) -> Result<HuClockBound> {
    let coarse = clock_constant_curve(dist, eps, COARSE_POINTS)?;
    let lo = coarse[0].0;
    let diffs: Vec<f64> = coarse
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .filter(|d| *d != 0.0)
        .collect();
    let turns = diffs
        .windows(2)
        .filter(|d| d[0].signum() != d[1].signum())
        .count();
    let unimodal = turns <= 1;
    let c_at = |a: f64| clock_constant(dist, a.clamp(lo, 1.0), eps).unwrap_or(0.0);
    let (mut a_best, mut c_best) = if unimodal {
        let (a, neg) = golden_min(|a| -c_at(a), lo, 1.0, ALPHA_TOLERANCE);
        (a, -neg)
    } else {
        let dense = clock_constant_curve(dist, eps, DENSE_POINTS)?;
        let i = dense
            .iter()
            .enumerate()
            .fold(0, |b, (i, p)| if p.1 > dense[b].1 { i } else { b });
        let a = dense[i.saturating_sub(1)].0;
        let b = dense[(i + 1).min(dense.len() - 1)].0;
        let (x, neg) = golden_min(|a| -c_at(a), a, b, ALPHA_TOLERANCE);
        if -neg >= dense[i].1 {
            (x, -neg)
        } else {
            dense[i]
        }
    };
    for &(a, c) in &coarse {
        if c > c_best {
            (a_best, c_best) = (a, c);
        }
    }
    if !(c_best > 0.0) {
        return Err(TempusError::Degenerate(
            "C(alpha) vanishes on the whole search interval".into(),
        ));
    }
    Ok(HuClockBound {
        alpha0: a_best,
        c: c_best,
        bound: hbar * c_best,
        alpha_floor: lo,
        unimodal,
    })
}

/// Resolution of one pointer step against both clock bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClockReport {
    pub delta_t: f64,
    pub epsilon: f64,
    pub delta_h: f64,
    /// `pi hbar / (2 Delta H)`.
    pub mt_bound: f64,
    /// `hbar arccos(sqrt eps) / Delta H`, implied by `p(t) >= cos^2(t Delta H/hbar)`.
    pub mt_bound_eps: f64,
    /// Absent when `C(alpha)` is degenerate for this distribution.
    pub hu: Option<HuClockBound>,
    /// `hbar C(alpha0)` at `eps = 0`, for reference.
    pub hu_bound_exact: Option<f64>,
    pub reports: Vec<BoundReport>,
}

impl ClockReport {
    /// `(MT pass, HU pass)`; HU counts as passing when it was not computable.
    pub fn pass(&self) -> (bool, bool) {
        let find = |tag: &str| self.reports.iter().find(|r| r.tag == tag).map(|r| r.pass);
        (
            find("MT-clock-ur").unwrap_or(false),
            find("HU-clock-ur").unwrap_or(true),
        )
    }
}

fn mt_part(e: &[f64], w: &[f64], hbar: f64, eps: f64, horizon: f64) -> Result<ClockReport> {
    let delta_t = orthogonalization_time_spectral(e, w, hbar, eps, horizon)?;
    let delta_h = Overlap::new(e, w, hbar)?.delta_h();
    let mt_bound = PI * hbar / (2.0 * delta_h);
    let mt_bound_eps = hbar * eps.sqrt().acos() / delta_h;
    let tol = 1e-8 * mt_bound;
    Ok(ClockReport {
        delta_t,
        epsilon: eps,
        delta_h,
        mt_bound,
        mt_bound_eps,
        hu: None,
        hu_bound_exact: None,
        reports: vec![BoundReport::new("MT-clock-ur", delta_t, mt_bound_eps, tol)],
    })
}

/// Orthogonalization time against `pi hbar / (2 Delta H)` (eps-corrected).
pub fn mt_clock_check(
    psi: &GridState,
    h: &HermitianOperator,
    eps: f64,
    horizon: f64,
) -> Result<ClockReport> {
    let (e, w) = spectral_weights(h, psi)?;
    mt_part(&e, &w, psi.hbar, eps, horizon)
}

/// Both clock bounds from spectral data.
pub fn clock_check_spectral(
    energies: &[f64],
    weights: &[f64],
    hbar: f64,
    eps: f64,
    horizon: f64,
) -> Result<ClockReport> {
    let mut r = mt_part(energies, weights, hbar, eps, horizon)?;
    let dist = EnergyDistribution::atoms(energies, weights)?;
    match hu_clock_bound(&dist, hbar, eps) {
        Ok(hu) => {
            r.reports.push(BoundReport::new(
                "HU-clock-ur",
                r.delta_t,
                hu.bound,
                1e-8 * hu.bound.max(r.mt_bound),
            ));
            r.hu = Some(hu);
            r.hu_bound_exact = hu_clock_bound(&dist, hbar, 0.0).ok().map(|b| b.bound);
        }
        Err(TempusError::Degenerate(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(r)
}

/// Both clock bounds for a state.
pub fn clock_check(
    psi: &GridState,
    h: &HermitianOperator,
    eps: f64,
    horizon: f64,
) -> Result<ClockReport> {
    let (e, w) = spectral_weights(h, psi)?;
    clock_check_spectral(&e, &w, psi.hbar, eps, horizon)
}

/// `psi_1 = sum_{k=1}^{n} phi_k / sqrt(n)` on oscillator levels `0..=n`,
/// with `H = hbar omega (N + 1/2)`.
pub fn ladder_state(n: usize, omega: f64, hbar: f64) -> Result<(GridState, HermitianOperator)> {
    if n < 2 {
        return Err(TempusError::Parameter(format!(
            "ladder needs at least 2 levels, got {n}"
        )));
    }
    let axis = Axis::fock(n + 1)?;
    let h = HermitianOperator::multiplication(axis, |k| hbar * omega * (k + 0.5))?;
    let amps = (0..=n)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(1.0 / (n as f64).sqrt(), 0.0)
            }
        })
        .collect();
    Ok((GridState::new(axis, amps, hbar)?, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::AxisKind;
    use crate::sampling::{complex_normal, rng};

    fn two_level(gap: f64) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0, gap], vec![0.5, 0.5])
    }

    #[test]
    fn two_level_saturates_mt() {
        let (e, w) = two_level(1.3);
        let r = clock_check_spectral(&e, &w, 1.0, 0.0, 20.0).unwrap();
        assert!((r.delta_t - r.mt_bound).abs() < 1e-8 * r.mt_bound, "{r:?}");
        assert_eq!(r.pass(), (true, true));
        // C(alpha) = 2 arccos((1-a)/a) / W with W = gap for a > 1/2.
        let hu = r.hu.unwrap();
        assert!((hu.alpha0 - 1.0).abs() < 1e-5);
        assert!((hu.bound - PI / 1.3).abs() < 1e-4);
    }

    #[test]
    fn eps_corrected_two_level() {
        let (e, w) = two_level(2.0);
        let eps = 1e-3;
        let r = clock_check_spectral(&e, &w, 1.0, eps, 20.0).unwrap();
        assert!((r.delta_t - r.mt_bound_eps).abs() < 1e-9);
        assert!(r.delta_t < r.mt_bound);
        assert!(r.pass().0);
    }

    #[test]
    fn ladder_orthogonalizes_at_period_over_n() {
        for n in [4usize, 8, 16] {
            let omega = 2.0;
            let (psi, h) = ladder_state(n, omega, 1.0).unwrap();
            let period = 2.0 * PI / omega;
            let r = clock_check(&psi, &h, 0.0, period).unwrap();
            assert!(
                (r.delta_t - period / n as f64).abs() < 1e-9,
                "{n}: {}",
                r.delta_t
            );
            let levels: Vec<f64> = (1..=n).map(|k| k as f64).collect();
            let m = levels.iter().sum::<f64>() / n as f64;
            let sd = (levels.iter().map(|k| (k - m).powi(2)).sum::<f64>() / n as f64).sqrt();
            assert!((r.delta_h - omega * sd).abs() < 1e-12);
            assert_eq!(r.pass(), (true, true), "{r:?}");
        }
    }

    #[test]
    fn eigenstate_never_orthogonalizes() {
        let axis = Axis::fock(4).unwrap();
        let h = HermitianOperator::multiplication(axis, |k| k).unwrap();
        let psi = GridState::basis(axis, 1.0, 2).unwrap();
        assert!(matches!(
            orthogonalization_time(&psi, &h, 1e-3, 50.0),
            Err(TempusError::NotAttained { .. })
        ));
    }

    #[test]
    fn random_ladder_states_respect_both_bounds() {
        let axis = Axis::fock(10).unwrap();
        let h = HermitianOperator::multiplication(axis, |k| k).unwrap();
        let mut r = rng(11);
        let mut attained = 0;
        for _ in 0..100 {
            let amps = (0..10).map(|_| complex_normal(&mut r)).collect();
            let psi = GridState::new(axis, amps, 1.0).unwrap();
            match clock_check(&psi, &h, MAX_EPSILON, 2.0 * PI) {
                Ok(rep) => {
                    attained += 1;
                    assert_eq!(rep.pass(), (true, true), "{rep:?}");
                }
                Err(TempusError::NotAttained { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(attained > 10, "{attained}");
    }

    #[test]
    fn endpoints_vanish_for_unbounded_support() {
        let axis = Axis::linspace(AxisKind::Energy, -8.0, 8.0, 801).unwrap();
        let density: Vec<f64> = axis.values().iter().map(|e| (-0.5 * e * e).exp()).collect();
        let d = EnergyDistribution::Grid { axis, density };
        assert_eq!(clock_constant(&d, 0.5, 0.0).unwrap(), 0.0);
        assert_eq!(clock_constant(&d, 1.0, 0.0).unwrap(), 0.0);
        let hu = hu_clock_bound(&d, 1.0, 0.0).unwrap();
        assert!(hu.alpha0 > 0.5 && hu.alpha0 < 1.0 && hu.unimodal, "{hu:?}");
        let curve = clock_constant_curve(&d, 0.0, 200).unwrap();
        assert!(curve.iter().all(|p| p.1 <= hu.c + 1e-12));
    }

    #[test]
    fn gaussian_energy_state_respects_hu_bound() {
        let axis = Axis::linspace(AxisKind::Energy, -6.0, 6.0, 401).unwrap();
        let h = HermitianOperator::multiplication(axis, |e| e).unwrap();
        let psi = GridState::gaussian(axis, 1.0, 0.0, 2f64.sqrt(), 0.0).unwrap();
        let eps = MAX_EPSILON;
        let dt = orthogonalization_time(&psi, &h, eps, 10.0).unwrap();
        // |<psi|psi_t>| = exp(-t^2/2) for unit energy spread.
        assert!((dt - (-(eps.ln())).sqrt()).abs() < 1e-6, "{dt}");
        let density = psi.density().iter().map(|p| p * axis.step).collect();
        let hu = hu_clock_bound(&EnergyDistribution::Grid { axis, density }, 1.0, eps).unwrap();
        assert!(hu.alpha0 > hu.alpha_floor && hu.alpha0 < 1.0);
        assert!(dt >= hu.bound, "{dt} {hu:?}");
    }

    #[test]
    fn energy_origin_shift_invariance() {
        let (psi, h) = ladder_state(6, 1.0, 1.0).unwrap();
        let a = clock_check(&psi, &h, 0.0, 2.0 * PI).unwrap();
        let b = clock_check(&psi, &h.shifted(37.5), 0.0, 2.0 * PI).unwrap();
        assert!((a.delta_t - b.delta_t).abs() < 1e-9);
        assert!((a.delta_h - b.delta_h).abs() < 1e-9);
        assert!((a.hu.unwrap().bound - b.hu.unwrap().bound).abs() < 1e-9);
    }

    #[test]
    fn bad_epsilon_rejected() {
        let (e, w) = two_level(1.0);
        assert!(matches!(
            orthogonalization_time_spectral(&e, &w, 1.0, 0.2, 5.0),
            Err(TempusError::Parameter(_))
        ));
    }
}
