use num_complex::Complex64 as C64;

use super::{confidence_function, AbmConfig, ConfidenceFunction};
use crate::hilbert::{Ensemble, GridState};
use crate::quad::GaussLegendre;
use crate::{Result, TempusError};

/// Post-measurement state for readings in an interval `R`.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    /// `rho_R / tr(rho_R)` as an ensemble over the quadrature nodes.
    pub ensemble: Ensemble,
    /// `tr(rho_R)`, the probability of a reading in `R`.
    pub probability: f64,
    /// Momentum diagonal of the unnormalised `rho_R`.
    pub diagonal: Vec<f64>,
    /// `(chi_R * f)(p) |phi(p)|^2`.
    pub expected_diagonal: Vec<f64>,
    /// `max |diagonal - expected| / max expected`.
    pub diagonal_defect: f64,
    /// Classical fidelity of the normalised output momentum distribution
    /// with the input one.
    pub reproducibility: f64,
    /// Whether `Delta P_x <= width(f) / 10`.
    pub near_eigenstate: bool,
}

fn nodes(cfg: &AbmConfig, cf: &ConfidenceFunction, a: f64, b: f64) -> Vec<(f64, f64)> {
    let ax = cfg.object.axis;
    let (qlo, qhi) = cf.support();
    let lo = a.max(ax.start - qhi);
    let hi = b.min(ax.end() - qlo);
    if !(hi > lo) {
        return Vec::new();
    }
    let panels = ((hi - lo) / (cf.std() / 4.0)).ceil().max(1.0) as usize;
    GaussLegendre::new(8).composite_points(lo, hi, panels)
}

/// `(A_{p'} phi)(p)` on the object grid.
fn kraus_apply(cfg: &AbmConfig, cf: &ConfidenceFunction, p_prime: f64, phi: &[C64]) -> Vec<C64> {
    let ax = cfg.object.axis;
    let (m, big_m, g0, dt, hbar) = (cfg.m, cfg.big_m, cfg.g0, cfg.dt, cfg.hbar);
    let py = -p_prime * cfg.coupling();
    (0..ax.count)
        .map(|i| {
            let p = ax.value(i);
            let gamma = p * p * g0 * dt.powi(3) / (6.0 * big_m)
                + p * py * g0 * dt * dt / (2.0 * big_m)
                + py * py * dt / (2.0 * big_m);
            let phase = -(p * p * dt / (2.0 * m) + gamma) / hbar;
            C64::from_polar(1.0, phase) * cf.amplitude(p - p_prime) * phi[i]
        })
        .collect()
}

/// Conditional state `rho_R = ∫_R A_{p'} |phi><phi| A_{p'}^† dp'`.
///
/// `R = (a, b)`; either end may be infinite. The integral is done by
/// Gauss–Legendre over the part of `R` where the Kraus operators act on the
/// object's support.
pub fn conditional_state(cfg: &AbmConfig, r: (f64, f64)) -> Result<ConditionalState> {
    let (a, b) = r;
    if !(b > a) {
        return Err(TempusError::Parameter(format!(
            "empty outcome interval [{a}, {b}]"
        )));
    }
    let cf = confidence_function(cfg)?;
    let ax = cfg.object.axis;
    let phi = &cfg.object.amplitudes;
    let pts = nodes(cfg, &cf, a, b);
    if pts.is_empty() {
        return Err(TempusError::Conditioning(format!(
            "outcome interval [{a}, {b}] has zero probability"
        )));
    }
    let members: Vec<(f64, Vec<C64>, f64)> = crate::par::map(&pts, |&(pp, w)| {
        let v = kraus_apply(cfg, &cf, pp, phi);
        let n2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * ax.step;
        (w, v, n2)
    });
    let mut diagonal = vec![0.0; ax.count];
    let mut probability = 0.0;
    let mut ensemble = Vec::new();
    for (w, v, n2) in members {
        probability += w * n2;
        for (d, z) in diagonal.iter_mut().zip(&v) {
            *d += w * z.norm_sqr();
        }
        if n2 > 1e-300 {
            ensemble.push((w * n2, GridState::new(ax, v, cfg.hbar)?));
        }
    }
    if !(probability > 1e-14) {
        return Err(TempusError::Conditioning(format!(
            "outcome interval [{a}, {b}] has probability {probability:.3e}"
        )));
    }
    let input = cfg.object.density();
    let expected_diagonal: Vec<f64> = (0..ax.count)
        .map(|i| {
            let p = ax.value(i);
            cf.mass(p - b, p - a) * input[i]
        })
        .collect();
    let scale = expected_diagonal.iter().cloned().fold(0.0, f64::max);
    let diagonal_defect = diagonal
        .iter()
        .zip(&expected_diagonal)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale;
    let overlap: f64 = diagonal
        .iter()
        .zip(&input)
        .map(|(d, p)| (d / probability * p).max(0.0).sqrt())
        .sum::<f64>()
        * ax.step;
    let (_, var) = cfg.object_momentum();
    Ok(ConditionalState {
        ensemble: Ensemble::new(ensemble)?,
        probability,
        diagonal,
        expected_diagonal,
        diagonal_defect,
        reproducibility: overlap * overlap,
        near_eigenstate: var.sqrt() <= cf.std() / 10.0,
    })
}

/// `max_p |∫ A_{p'}^† A_{p'} dp' - 1|` on the object grid.
pub fn kraus_completeness(cfg: &AbmConfig) -> Result<f64> {
    let cf = confidence_function(cfg)?;
    let ax = cfg.object.axis;
    let ones = vec![C64::new(1.0, 0.0); ax.count];
    let pts = nodes(cfg, &cf, f64::NEG_INFINITY, f64::INFINITY);
    let cols: Vec<Vec<f64>> = crate::par::map(&pts, |&(pp, w)| {
        kraus_apply(cfg, &cf, pp, &ones)
            .iter()
            .map(|z| w * z.norm_sqr())
            .collect()
    });
    let mut total = vec![0.0; ax.count];
    for c in cols {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    Ok(total.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max))
}
