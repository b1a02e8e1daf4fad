use std::f64::consts::PI;

use crate::hilbert::{AxisKind, GridState};
use crate::quad::GaussLegendre;
use crate::{Result, TempusError, C64};

/// Weight below which a packet counts as fast.
pub const SLOW_WEIGHT_TOLERANCE: f64 = 1e-6;

/// Arrival-time density at the origin for a free particle of mass `m`:
///
/// `Pi(t) = (2pi)^-1 (|∫_{p>0} sqrt(p/m hbar) e^{-itp^2/2m hbar} psi(p) dp|^2
///         + |∫_{p<0} sqrt(-p/m hbar) e^{-itp^2/2m hbar} psi(p) dp|^2)`.
///
/// The zero-momentum sample gets zero weight through the kernel itself.
#[derive(Debug, Clone)]
pub struct FreeArrival {
    pub m: f64,
    pub hbar: f64,
    /// `(p, sqrt(|p|/m hbar) psi(p) dp)` for each half line.
    positive: Vec<(f64, C64)>,
    negative: Vec<(f64, C64)>,
    energy_spread: f64,
    /// Probability in `|p| < 0.05 p_rms`.
    pub slow_weight: f64,
}

impl FreeArrival {
    pub fn new(psi: &GridState, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(TempusError::Parameter(format!(
                "mass must be positive, got {m}"
            )));
        }
        if psi.axis.kind != AxisKind::Momentum {
            return Err(TempusError::Domain(
                "free arrival needs a momentum-space state".into(),
            ));
        }
        let psi = psi.normalized()?;
        let hbar = psi.hbar;
        let dp = psi.axis.step;
        let density = psi.density();
        let peak = density.iter().cloned().fold(0.0, f64::max);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let (mut e_lo, mut e_hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        let mut p2 = 0.0;
        for (i, z) in psi.amplitudes.iter().enumerate() {
            let p = psi.axis.value(i);
            p2 += p * p * density[i] * dp;
            if p == 0.0 {
                continue;
            }
            let w = *z * ((p.abs() / (m * hbar)).sqrt() * dp);
            let side = usize::from(p < 0.0);
            if side == 0 {
                positive.push((p, w));
            } else {
                negative.push((p, w));
            }
            if density[i] > 1e-16 * peak {
                let e = p * p / (2.0 * m);
                e_lo[side] = e_lo[side].min(e);
                e_hi[side] = e_hi[side].max(e);
            }
        }
        let energy_spread = (0..2)
            .filter(|&s| e_hi[s] >= e_lo[s])
            .map(|s| e_hi[s] - e_lo[s])
            .fold(0.0, f64::max);
        let cut = 0.05 * p2.sqrt();
        let slow_weight = (0..psi.len())
            .filter(|&i| psi.axis.value(i).abs() < cut)
            .map(|i| density[i] * dp)
            .sum();
        Ok(Self {
            m,
            hbar,
            positive,
            negative,
            energy_spread,
            slow_weight,
        })
    }

    /// Significant weight near `p = 0`; such packets need a much longer
    /// window before the total probability approaches one.
    pub fn is_slow(&self) -> bool {
        self.slow_weight > SLOW_WEIGHT_TOLERANCE
    }

    fn branch(&self, samples: &[(f64, C64)], t: f64) -> C64 {
        let k = t / (2.0 * self.m * self.hbar);
        samples
            .iter()
            .map(|&(p, w)| w * C64::from_polar(1.0, -k * p * p))
            .sum()
    }

    /// Contributions of the `p > 0` and `p < 0` branches to `Pi(t)`.
    pub fn branches(&self, t: f64) -> (f64, f64) {
        (
            self.branch(&self.positive, t).norm_sqr() / (2.0 * PI),
            self.branch(&self.negative, t).norm_sqr() / (2.0 * PI),
        )
    }

    pub fn density(&self, t: f64) -> f64 {
        let (a, b) = self.branches(t);
        a + b
    }

    fn panels(&self, a: f64, b: f64) -> usize {
        if self.energy_spread == 0.0 {
            return 1;
        }
        let width = 1.5 * self.hbar / self.energy_spread;
        ((b - a) / width).ceil().clamp(1.0, 1e7) as usize
    }

    fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        GaussLegendre::new(8).composite_points(a, b, self.panels(a, b))
    }

    /// `∫_a^b Pi(t) dt`.
    pub fn probability(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let pts = self.nodes(a, b);
        crate::par::map(&pts, |&(t, w)| w * self.density(t))
            .iter()
            .sum()
    }

    /// Probabilities of consecutive bins `[edges[k], edges[k+1])`.
    pub fn distribution(&self, edges: &[f64]) -> Vec<f64> {
        let bins: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        bins.iter().map(|&(a, b)| self.probability(a, b)).collect()
    }

    /// `(P, <t>, Var t)` over `[a, b]`, moments normalised by `P`.
    pub fn window_moments(&self, a: f64, b: f64) -> Result<(f64, f64, f64)> {
        let pts = self.nodes(a, b);
        let vals = crate::par::map(&pts, |&(t, w)| {
            let d = w * self.density(t);
            [d, d * t, d * t * t]
        });
        let s = vals.iter().fold([0.0; 3], |acc, v| {
            [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
        });
        if s[0] <= super::DETECTION_FLOOR {
            return Err(TempusError::Conditioning(format!(
                "arrival probability {:.3e} in [{a}, {b}]",
                s[0]
            )));
        }
        let mean = s[1] / s[0];
        Ok((s[0], mean, (s[2] / s[0] - mean * mean).max(0.0)))
    }
}

/// Probability of arrival at the origin during `[a, b]`.
pub fn free_arrival_probability(psi: &GridState, window: (f64, f64), m: f64) -> Result<f64> {
    Ok(FreeArrival::new(psi, m)?.probability(window.0, window.1))
}

/// Free evolution `psi(p) e^{-isp^2/2m hbar}` of a momentum-space state.
pub fn free_evolve(psi: &GridState, s: f64, m: f64) -> Result<GridState> {
    let k = s / (2.0 * m * psi.hbar);
    let amps = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let p = psi.axis.value(i);
            z * C64::from_polar(1.0, -k * p * p)
        })
        .collect();
    GridState::new(psi.axis, amps, psi.hbar)
}

/// `<1/p>` over the state, the exact mean arrival time divided by `-x0 m`
/// for a packet `e^{-ipx0/hbar} |a(p)|` with `p > 0`.
pub fn inverse_momentum_mean(psi: &GridState) -> f64 {
    let d = psi.density();
    let n: f64 = d.iter().sum();
    (0..psi.len())
        .filter(|&i| psi.axis.value(i) != 0.0)
        .map(|i| d[i] / psi.axis.value(i))
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abm::gaussian_momentum_state;
    use crate::hilbert::Axis;

    fn packet(p0: f64, sigma: f64, x0: f64) -> GridState {
        let axis = gaussian_momentum_state(p0, sigma, 256, 1.0).unwrap().axis;
        GridState::gaussian(axis, 1.0, p0, sigma * std::f64::consts::SQRT_2, -x0).unwrap()
    }

    #[test]
    fn positive_support_has_no_negative_branch() {
        let f = FreeArrival::new(&packet(10.0, 0.5, -20.0), 1.0).unwrap();
        assert_eq!(f.branches(1.3).1, 0.0);
        assert!(!f.is_slow());
    }

    #[test]
    fn normalised_and_mean_matches_classical_crossing() {
        let (m, p0, x0) = (1.0, 10.0, -20.0);
        let psi = packet(p0, 0.5, x0);
        let f = FreeArrival::new(&psi, m).unwrap();
        let (p, mean, var) = f.window_moments(0.0, 4.0).unwrap();
        assert!((p - 1.0).abs() < 1e-3, "{p}");
        let exact = -x0 * m * inverse_momentum_mean(&psi);
        assert!((mean - exact).abs() < 1e-4 * exact, "{mean} {exact}");
        let classical = -x0 * m / p0;
        assert!((mean - classical).abs() < 0.02 * classical);
        assert!(var > 0.0);
    }

    #[test]
    fn time_shift_covariance() {
        let psi = packet(10.0, 0.5, -20.0);
        let s = 0.37;
        let a = FreeArrival::new(&psi, 1.0).unwrap();
        let b = FreeArrival::new(&free_evolve(&psi, s, 1.0).unwrap(), 1.0).unwrap();
        let edges: Vec<f64> = (0..=40).map(|k| 0.5 + 0.075 * k as f64).collect();
        let shifted: Vec<f64> = edges.iter().map(|t| t + s).collect();
        let da = a.distribution(&shifted);
        let db = b.distribution(&edges);
        let dist: f64 = da.iter().zip(&db).map(|(x, y)| (x - y).abs()).sum();
        assert!(dist < 1e-4, "{dist}");
    }

    #[test]
    fn slow_packet_flagged() {
        let axis = Axis::linspace(AxisKind::Momentum, -6.0, 6.0, 256).unwrap();
        let psi = GridState::gaussian(axis, 1.0, 0.3, 1.0, 5.0).unwrap();
        assert!(FreeArrival::new(&psi, 1.0).unwrap().is_slow());
    }

    #[test]
    fn position_state_rejected() {
        let axis = Axis::linspace(AxisKind::Position, -6.0, 6.0, 64).unwrap();
        let psi = GridState::gaussian(axis, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            FreeArrival::new(&psi, 1.0),
            Err(TempusError::Domain(_))
        ));
    }
}
