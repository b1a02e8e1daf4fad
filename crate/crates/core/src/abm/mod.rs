//! Impulsive energy measurement in the Aharonov–Bohm model.
//!
//! An object of mass `m` (momentum `p_x`) is coupled for a time `dt` to a
//! probe of mass `M` through `g0 X P_y`-type interaction; reading the probe
//! momentum and rescaling by `g0 dt` gives an unsharp measurement of the
//! object momentum, and hence of its kinetic energy. Everything is solved in
//! the momentum representation from the closed-form evolved wave function.

mod conditional;
mod confidence;
mod measurement;
mod sweep;

pub use conditional::{conditional_state, kraus_completeness, ConditionalState};
pub use confidence::{confidence_function, ConfidenceFunction};
pub use measurement::{
    energy_povm, energy_povm_kernel, energy_statistics, momentum_povm, EnergyStatistics,
};
pub use sweep::{coupling_sweep, loglog_slope, SweepRow};

use crate::hilbert::{Axis, AxisKind, GridState};
use crate::{Result, TempusError};

/// Parameters of one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct AbmConfig {
    /// Object mass.
    pub m: f64,
    /// Probe mass.
    pub big_m: f64,
    pub g0: f64,
    pub dt: f64,
    /// Probe momentum amplitude `phi(p_y)`.
    pub probe: GridState,
    /// Object momentum amplitude `phi(p_x)`.
    pub object: GridState,
    pub hbar: f64,
}

impl AbmConfig {
    pub fn new(
        m: f64,
        big_m: f64,
        g0: f64,
        dt: f64,
        probe: GridState,
        object: GridState,
        hbar: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("m", m),
            ("M", big_m),
            ("g0", g0),
            ("dt", dt),
            ("hbar", hbar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TempusError::Parameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, s) in [("probe", &probe), ("object", &object)] {
            if s.axis.kind != AxisKind::Momentum {
                return Err(TempusError::Domain(format!(
                    "{name} must live on a momentum axis"
                )));
            }
        }
        Ok(Self {
            m,
            big_m,
            g0,
            dt,
            probe: probe.normalized()?,
            object: object.normalized()?,
            hbar,
        })
    }

    /// `g0 dt`, the factor converting probe momentum to object momentum.
    pub fn coupling(&self) -> f64 {
        self.g0 * self.dt
    }

    pub fn with_g0(&self, g0: f64) -> Result<Self> {
        Self::new(
            self.m,
            self.big_m,
            g0,
            self.dt,
            self.probe.clone(),
            self.object.clone(),
            self.hbar,
        )
    }

    /// Mean and variance of `P_x` in the object state.
    pub fn object_momentum(&self) -> (f64, f64) {
        let d = self.object.density();
        let h = self.object.axis.step;
        let mean: f64 = d
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.object.axis.value(i))
            .sum::<f64>()
            * h;
        let var: f64 = d
            .iter()
            .enumerate()
            .map(|(i, w)| w * (self.object.axis.value(i) - mean).powi(2))
            .sum::<f64>()
            * h;
        (mean, var)
    }
}

/// Gaussian momentum amplitude whose density has standard deviation
/// `sigma`, sampled on `center ± 12 sigma` with `count` points.
pub fn gaussian_momentum_state(
    center: f64,
    sigma: f64,
    count: usize,
    hbar: f64,
) -> Result<GridState> {
    if !(sigma > 0.0) {
        return Err(TempusError::Parameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let axis = Axis::linspace(
        AxisKind::Momentum,
        center - 12.0 * sigma,
        center + 12.0 * sigma,
        count,
    )?;
    GridState::gaussian(axis, hbar, center, sigma * std::f64::consts::SQRT_2, 0.0)
}

/// The default probe: a centred Gaussian of momentum spread `sigma`.
pub fn gaussian_probe(sigma: f64, hbar: f64) -> Result<GridState> {
    gaussian_momentum_state(0.0, sigma, 256, hbar)
}
