//! The one Fourier convention used across the crate:
//!
//! ```text
//! f~(E) = (2 pi)^-1  ∫ f(t) exp(+i t E / hbar) dt
//! f(t)  = hbar^-1    ∫ f~(E) exp(-i t E / hbar) dE
//! ```
//!
//! With this pair, `∫|f|^2 dt = (2 pi / hbar) ∫|f~|^2 dE`. Integrals are
//! Riemann sums over the sample points, so the FFT path and direct
//! quadrature agree to rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::{Axis, AxisKind, GridState};
use crate::{Result, TempusError};

/// Relative boundary magnitude above which a transform is flagged as
/// truncated.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;

/// A sampled Fourier pair `f(t)`, `f~(E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalAmplitude {
    pub time_axis: Axis,
    pub f: Vec<C64>,
    pub energy_axis: Axis,
    pub f_tilde: Vec<C64>,
    pub hbar: f64,
    /// `|f|` at the ends of the time grid exceeded the tail tolerance.
    pub truncated: bool,
}

impl TemporalAmplitude {
    /// Assemble a pair from independently known samples (closed forms).
    pub fn from_parts(
        time_axis: Axis,
        f: Vec<C64>,
        energy_axis: Axis,
        f_tilde: Vec<C64>,
        hbar: f64,
    ) -> Result<Self> {
        if f.len() != time_axis.count || f_tilde.len() != energy_axis.count {
            return Err(TempusError::Validation(
                "sample count does not match axis".into(),
            ));
        }
        if f.iter()
            .chain(&f_tilde)
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(TempusError::Validation("non-finite samples".into()));
        }
        Ok(Self {
            time_axis,
            f,
            energy_axis,
            f_tilde,
            hbar,
            truncated: false,
        })
    }

    /// Time-domain samples as a state (useful for moment routines).
    pub fn time_state(&self) -> Result<GridState> {
        GridState::new(self.time_axis, self.f.clone(), self.hbar)
    }

    /// Linearly interpolated `f(t)`; zero outside the grid.
    pub fn f_at(&self, t: f64) -> C64 {
        interpolate(&self.time_axis, &self.f, t)
    }

    pub fn f_tilde_at(&self, e: f64) -> C64 {
        interpolate(&self.energy_axis, &self.f_tilde, e)
    }
}

fn interpolate(axis: &Axis, v: &[C64], x: f64) -> C64 {
    let s = (x - axis.start) / axis.step;
    if s < 0.0 || s > (axis.count - 1) as f64 {
        return C64::new(0.0, 0.0);
    }
    let i = (s.floor() as usize).min(axis.count - 2);
    let w = s - i as f64;
    v[i] * (1.0 - w) + v[i + 1] * w
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = FftPlanner::new();
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Forward transform of time samples onto the conjugate energy grid centred
/// on `energy_center`.
///
/// The energy grid has `step = 2 pi hbar / (N dt)` and the same sample count
/// as the time grid.
pub fn fourier_pair_centered(
    f: &GridState,
    energy_center: f64,
    tail_tolerance: f64,
) -> Result<TemporalAmplitude> {
    let ax = f.axis;
    if ax.kind != AxisKind::Time {
        return Err(TempusError::Domain(
            "fourier_pair expects a time axis".into(),
        ));
    }
    let n = ax.count;
    let hbar = f.hbar;
    let h = n / 2;
    let de = 2.0 * PI * hbar / (n as f64 * ax.step);
    let energy_axis = Axis::new(AxisKind::Energy, energy_center - h as f64 * de, de, n)?;

    let mut buf: Vec<C64> = (0..n)
        .map(|j| {
            let t = ax.value(j);
            let shift = -2.0 * PI * ((j * h) % n) as f64 / n as f64;
            f.amplitudes[j] * C64::from_polar(1.0, t * energy_center / hbar + shift)
        })
        .collect();
    plan(n, true).process(&mut buf);
    let pref = ax.step / (2.0 * PI);
    let f_tilde = buf
        .into_iter()
        .enumerate()
        .map(|(k, g)| g * C64::from_polar(pref, ax.start * (k as f64 - h as f64) * de / hbar))
        .collect();

    let peak = f.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let edge = f.amplitudes[0].norm().max(f.amplitudes[n - 1].norm());
    Ok(TemporalAmplitude {
        time_axis: ax,
        f: f.amplitudes.clone(),
        energy_axis,
        f_tilde,
        hbar,
        truncated: peak > 0.0 && edge > tail_tolerance * peak,
    })
}

/// Forward transform with the energy grid centred on zero and the default
/// tail tolerance.
pub fn fourier_pair(f: &GridState) -> Result<TemporalAmplitude> {
    fourier_pair_centered(f, 0.0, DEFAULT_TAIL_TOLERANCE)
}

/// `f~(E)` at a single energy by direct Riemann-sum quadrature.
pub fn fourier_direct(f: &GridState, energy: f64) -> C64 {
    let ax = f.axis;
    let s: C64 = f
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, z)| z * C64::from_polar(1.0, ax.value(j) * energy / f.hbar))
        .sum();
    s * (ax.step / (2.0 * PI))
}

/// Inverse transform: given `f~` on an energy axis, produce `f(t)` on the
/// conjugate time grid centred on `t = 0`.
pub fn from_spectrum(energy_axis: Axis, f_tilde: Vec<C64>, hbar: f64) -> Result<TemporalAmplitude> {
    if energy_axis.kind != AxisKind::Energy {
        return Err(TempusError::Domain(
            "from_spectrum expects an energy axis".into(),
        ));
    }
    let n = energy_axis.count;
    if f_tilde.len() != n {
        return Err(TempusError::Validation(
            "sample count does not match axis".into(),
        ));
    }
    let h = n / 2;
    let time_axis = energy_axis.conjugate(hbar)?;
    let mut buf: Vec<C64> = f_tilde
        .iter()
        .enumerate()
        .map(|(k, z)| z * C64::from_polar(1.0, 2.0 * PI * ((h * k) % n) as f64 / n as f64))
        .collect();
    plan(n, false).process(&mut buf);
    let pref = energy_axis.step / hbar;
    let f = buf
        .into_iter()
        .enumerate()
        .map(|(j, a)| a * C64::from_polar(pref, -time_axis.value(j) * energy_axis.start / hbar))
        .collect();
    Ok(TemporalAmplitude {
        time_axis,
        f,
        energy_axis,
        f_tilde,
        hbar,
        truncated: false,
    })
}

/// Unitary DFT between a position grid and its centred momentum grid.
///
/// `forward` maps position samples to momentum samples (kernel
/// `exp(-i p x / hbar) / sqrt(2 pi hbar)`), preserving the Riemann norm.
pub(crate) struct GridDft {
    pub x_axis: Axis,
    pub p_axis: Axis,
    hbar: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl GridDft {
    pub fn new(x_axis: Axis, hbar: f64) -> Result<Self> {
        let p_axis = x_axis.conjugate(hbar)?;
        let mut p = FftPlanner::new();
        Ok(Self {
            x_axis,
            p_axis,
            hbar,
            fwd: p.plan_fft_forward(x_axis.count),
            inv: p.plan_fft_inverse(x_axis.count),
        })
    }

    pub fn forward(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.x_axis.count;
        let h = n / 2;
        let mut buf: Vec<C64> = psi
            .iter()
            .enumerate()
            .map(|(j, z)| z * C64::from_polar(1.0, 2.0 * PI * ((j * h) % n) as f64 / n as f64))
            .collect();
        self.fwd.process(&mut buf);
        let pref = self.x_axis.step / (2.0 * PI * self.hbar).sqrt();
        buf.into_iter()
            .enumerate()
            .map(|(k, z)| {
                z * C64::from_polar(pref, -self.p_axis.value(k) * self.x_axis.start / self.hbar)
            })
            .collect()
    }

    pub fn inverse(&self, phi: &[C64]) -> Vec<C64> {
        let n = self.x_axis.count;
        let h = n / 2;
        let mut buf: Vec<C64> = phi
            .iter()
            .enumerate()
            .map(|(k, z)| {
                z * C64::from_polar(1.0, self.p_axis.value(k) * self.x_axis.start / self.hbar)
            })
            .collect();
        self.inv.process(&mut buf);
        let pref = self.p_axis.step / (2.0 * PI * self.hbar).sqrt();
        buf.into_iter()
            .enumerate()
            .map(|(j, z)| z * C64::from_polar(pref, -2.0 * PI * ((j * h) % n) as f64 / n as f64))
            .collect()
    }
}
