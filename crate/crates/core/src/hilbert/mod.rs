//! Grids, states, operators and the Fourier convention.

mod axis;
mod fourier;
mod interp;
mod operator;
mod state;

pub use num_complex::Complex64 as C64;

pub use axis::{Axis, AxisKind};
pub(crate) use fourier::GridDft;
pub use fourier::{
    fourier_direct, fourier_pair, fourier_pair_centered, from_spectrum, TemporalAmplitude,
    DEFAULT_TAIL_TOLERANCE,
};
pub use interp::TrigInterpolant;
pub use operator::{
    ensemble_moments, evolve, moments, spectral_weights, HermitianOperator, Representation,
};
pub(crate) use state::inner_raw;
pub use state::{Ensemble, GridState};
