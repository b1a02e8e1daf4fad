use num_complex::Complex64 as C64;

use super::AbmConfig;
use crate::hilbert::{Axis, AxisKind, TrigInterpolant};
use crate::{Result, TempusError};

/// Spectral power allowed in the top tenth of the probe's band.
const SPECTRAL_TAIL: f64 = 1e-12;
/// Relative probe density allowed at the edges of its grid.
const EDGE_DENSITY: f64 = 1e-10;

/// `f(p) = g0 dt |phi(p g0 dt)|^2`, the distribution of the reading error.
#[derive(Debug, Clone)]
pub struct ConfidenceFunction {
    /// Tabulation grid: the probe grid rescaled by `1/(g0 dt)`, refined to
    /// at least 32 samples per standard deviation.
    pub axis: Axis,
    pub values: Vec<f64>,
    pub mean: f64,
    /// `Var(P_y) / (g0 dt)^2`.
    pub variance: f64,
    /// Variance by direct quadrature of the tabulated values.
    pub variance_quadrature: f64,
    pub symmetric: bool,
    scale: f64,
    probe: TrigInterpolant,
}

impl ConfidenceFunction {
    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Interval outside which `f` vanishes.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.probe.window();
        (lo / self.scale, hi / self.scale)
    }

    pub fn density(&self, p: f64) -> f64 {
        self.scale * self.probe.density(p * self.scale)
    }

    /// `sqrt(g0 dt) phi(p g0 dt)`, whose modulus squared is `f(p)`.
    pub fn amplitude(&self, p: f64) -> C64 {
        self.probe.amplitude(p * self.scale) * self.scale.sqrt()
    }

    pub fn cdf(&self, p: f64) -> f64 {
        self.probe.cdf(p * self.scale)
    }

    /// `∫_a^b f`; infinite ends are allowed.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.probe.mass(a * self.scale, b * self.scale)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.axis.step
    }
}

/// Build the confidence function of a configuration.
///
/// The sampled probe is represented by its trigonometric interpolant, so
/// the rescaled density and its interval masses are available at any point.
pub fn confidence_function(cfg: &AbmConfig) -> Result<ConfidenceFunction> {
    let probe = &cfg.probe;
    let interp = TrigInterpolant::new(probe)?;
    if interp.spectral_tail() > SPECTRAL_TAIL {
        return Err(TempusError::Resolution(format!(
            "probe is under-resolved: {:.1e} of its spectral power is near the grid cutoff",
            interp.spectral_tail()
        )));
    }
    let d = probe.density();
    let peak = d.iter().cloned().fold(0.0, f64::max);
    if d[0].max(d[d.len() - 1]) > EDGE_DENSITY * peak {
        return Err(TempusError::Resolution(
            "probe does not decay inside its grid".into(),
        ));
    }
    let h = probe.axis.step;
    let mean_y: f64 = d
        .iter()
        .enumerate()
        .map(|(i, w)| w * probe.axis.value(i))
        .sum::<f64>()
        * h;
    let var_y: f64 = d
        .iter()
        .enumerate()
        .map(|(i, w)| w * (probe.axis.value(i) - mean_y).powi(2))
        .sum::<f64>()
        * h;
    if !(var_y > 0.0) {
        return Err(TempusError::Degenerate(
            "probe has zero momentum spread".into(),
        ));
    }
    let scale = cfg.coupling();
    let variance = var_y / (scale * scale);
    let std = variance.sqrt();

    let (lo, hi) = interp.window();
    let (lo, hi) = (lo / scale, hi / scale);
    let step = (std / 32.0).min(h / scale);
    let count = ((hi - lo) / step).ceil() as usize + 1;
    let axis = Axis::new(AxisKind::Momentum, lo, step, count)?;
    let values: Vec<f64> =
        crate::par::map_range(count, |i| scale * interp.density(axis.value(i) * scale));

    let w: f64 = values.iter().sum::<f64>() * step;
    let mq: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * axis.value(i))
        .sum::<f64>()
        * step
        / w;
    let variance_quadrature = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * (axis.value(i) - mq).powi(2))
        .sum::<f64>()
        * step
        / w;

    let fmax = values.iter().cloned().fold(0.0, f64::max);
    let symmetric = (0..count).all(|i| {
        let p = axis.value(i);
        (scale * interp.density(-p * scale) - values[i]).abs() <= 1e-10 * fmax
    });

    Ok(ConfidenceFunction {
        axis,
        values,
        mean: mean_y / scale,
        variance,
        variance_quadrature,
        symmetric,
        scale,
        probe: interp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abm::{gaussian_momentum_state, gaussian_probe};

    fn config(g0: f64, sigma: f64) -> AbmConfig {
        let object = gaussian_momentum_state(2.0, 0.5, 128, 1.0).unwrap();
        AbmConfig::new(
            1.0,
            1.0,
            g0,
            0.1,
            gaussian_probe(sigma, 1.0).unwrap(),
            object,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_probe_gives_gaussian_confidence() {
        let cf = confidence_function(&config(5.0, 1.5)).unwrap();
        let s = 1.5 / 0.5;
        assert!((cf.std() - s).abs() < 1e-10 * s);
        assert!((cf.variance_quadrature - cf.variance).abs() < 1e-8 * cf.variance);
        assert!((cf.integral() - 1.0).abs() < 1e-8);
        assert!(cf.symmetric);
        let g = |p: f64| (-p * p / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
        for p in [-4.0, 0.0, 1.3, 7.0] {
            assert!((cf.density(p) - g(p)).abs() < 1e-12);
        }
        // refined to at least 32 samples per std
        assert!(cf.axis.step <= s / 32.0 + 1e-15);
    }

    #[test]
    fn doubling_coupling_halves_width() {
        let a = confidence_function(&config(4.0, 1.0)).unwrap();
        let b = confidence_function(&config(8.0, 1.0)).unwrap();
        assert!((a.std() / b.std() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_probe_is_not_symmetric() {
        let probe = gaussian_momentum_state(0.4, 1.0, 256, 1.0).unwrap();
        let object = gaussian_momentum_state(0.0, 1.0, 64, 1.0).unwrap();
        let cfg = AbmConfig::new(1.0, 1.0, 1.0, 1.0, probe, object, 1.0).unwrap();
        assert!(!confidence_function(&cfg).unwrap().symmetric);
    }

    #[test]
    fn truncated_probe_is_rejected() {
        let ax = Axis::linspace(AxisKind::Momentum, -1.0, 1.0, 64).unwrap();
        let probe = crate::hilbert::GridState::gaussian(ax, 1.0, 0.0, 2.0, 0.0).unwrap();
        let object = gaussian_momentum_state(0.0, 1.0, 64, 1.0).unwrap();
        let cfg = AbmConfig::new(1.0, 1.0, 1.0, 1.0, probe, object, 1.0).unwrap();
        assert!(matches!(
            confidence_function(&cfg),
            Err(TempusError::Resolution(_))
        ));
    }
}
