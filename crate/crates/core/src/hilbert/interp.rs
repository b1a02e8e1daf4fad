//! Trigonometric interpolation of sampled amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::GridState;
use crate::{Result, TempusError};

/// The band-limited interpolant of a sampled amplitude, restricted to one
/// period `[x0 - h/2, x0 - h/2 + N h)` and zero outside it.
///
/// `|a|^2` is itself a trigonometric polynomial, so its antiderivative has a
/// closed form and interval masses are exact for the interpolant. The total
/// mass equals the Riemann norm of the samples.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    x0: f64,
    lo: f64,
    hi: f64,
    omega: f64,
    /// Amplitude coefficients for frequencies `-k..=k`.
    coeffs: Vec<C64>,
    /// Density coefficients for frequencies `0..=2k`.
    density: Vec<C64>,
}

impl TrigInterpolant {
    pub fn new(state: &GridState) -> Result<Self> {
        let n = state.len();
        if n < 4 {
            return Err(TempusError::Resolution(
                "at least 4 samples needed to interpolate".into(),
            ));
        }
        let h = state.axis.step;
        let mut buf = state.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let k = n / 2;
        let inv = 1.0 / n as f64;
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * k + 1];
        for (j, b) in buf.iter().enumerate() {
            let freq = if j <= k {
                j as isize
            } else {
                j as isize - n as isize
            };
            let c = b * inv;
            if n.is_multiple_of(2) && j == k {
                coeffs[0] = c * 0.5;
                coeffs[2 * k] = c * 0.5;
            } else {
                coeffs[(freq + k as isize) as usize] = c;
            }
        }
        // autocorrelation of the coefficient list, via zero-padded FFT
        let len = (4 * k + 2).next_power_of_two();
        let mut a = vec![C64::new(0.0, 0.0); len];
        a[..coeffs.len()].copy_from_slice(&coeffs);
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(len).process(&mut a);
        for z in a.iter_mut() {
            *z = C64::new(z.norm_sqr(), 0.0);
        }
        planner.plan_fft_inverse(len).process(&mut a);
        // a[m] = len * sum_l c_{l+m} conj(c_l)
        let density = (0..=2 * k).map(|m| a[m] / len as f64).collect();
        let x0 = state.axis.start;
        let period = n as f64 * h;
        Ok(Self {
            x0,
            lo: x0 - 0.5 * h,
            hi: x0 - 0.5 * h + period,
            omega: 2.0 * PI / period,
            coeffs,
            density,
        })
    }

    /// Support of the interpolant.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Fraction of spectral power in the top tenth of the frequency band.
    pub fn spectral_tail(&self) -> f64 {
        let k = (self.coeffs.len() - 1) / 2;
        let cut = (9 * k) / 10;
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as isize - k as isize).unsigned_abs() > cut)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }

    pub fn amplitude(&self, x: f64) -> C64 {
        if x < self.lo || x >= self.hi {
            return C64::new(0.0, 0.0);
        }
        let k = (self.coeffs.len() - 1) / 2;
        let s = x - self.x0;
        let step = C64::from_polar(1.0, self.omega * s);
        let mut w = C64::from_polar(1.0, -(k as f64) * self.omega * s);
        let mut acc = C64::new(0.0, 0.0);
        for c in &self.coeffs {
            acc += c * w;
            w *= step;
        }
        acc
    }

    /// `|a(x)|^2` from the density series.
    pub fn density(&self, x: f64) -> f64 {
        if x < self.lo || x >= self.hi {
            return 0.0;
        }
        let s = x - self.x0;
        let step = C64::from_polar(1.0, self.omega * s);
        let mut w = step;
        let mut acc = 0.5 * self.density[0].re;
        for d in &self.density[1..] {
            acc += (d * w).re;
            w *= step;
        }
        2.0 * acc
    }

    fn antiderivative(&self, s: f64) -> f64 {
        let step = C64::from_polar(1.0, self.omega * s);
        let mut w = step;
        let mut acc = 0.0;
        for (m, d) in self.density.iter().enumerate().skip(1) {
            let om = self.omega * m as f64;
            acc += (d * (w - 1.0) / C64::new(0.0, om)).re;
            w *= step;
        }
        self.density[0].re * s + 2.0 * acc
    }

    /// `∫_{-inf}^x |a|^2`.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        self.antiderivative(x - self.x0) - self.antiderivative(self.lo - self.x0)
    }

    /// `∫_a^b |a|^2`; either end may be infinite.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        self.cdf(b) - self.cdf(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Axis, AxisKind};

    fn gaussian(n: usize, half: f64) -> GridState {
        let ax = Axis::linspace(AxisKind::Momentum, -half, half, n).unwrap();
        GridState::gaussian(ax, 1.0, 0.3, std::f64::consts::SQRT_2, 0.7).unwrap()
    }

    #[test]
    fn reproduces_samples() {
        for n in [128, 129] {
            let s = gaussian(n, 12.0);
            let t = TrigInterpolant::new(&s).unwrap();
            for i in (0..n).step_by(7) {
                let x = s.axis.value(i);
                assert!((t.amplitude(x) - s.amplitudes[i]).norm() < 1e-12);
                assert!((t.density(x) - s.amplitudes[i].norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cdf_matches_normal_distribution() {
        let s = gaussian(256, 12.0);
        let t = TrigInterpolant::new(&s).unwrap();
        let normal = statrs::distribution::Normal::new(0.3, 1.0).unwrap();
        use statrs::distribution::ContinuousCDF;
        for x in [-3.0, -0.5, 0.3, 1.7, 4.0] {
            assert!((t.cdf(x) - normal.cdf(x)).abs() < 1e-10, "{x}");
        }
        assert!((t.cdf(f64::INFINITY) - 1.0).abs() < 1e-12);
        assert!(t.spectral_tail() < 1e-20);
    }
}
