//! Numerical toolkit for time–energy uncertainty relations.
//!
//! The crate is organised by physical theme:
//!
//! * [`hilbert`]: grids, states, Hermitian operators, unitary evolution and the
//!   single Fourier convention every other module routes through.
//! * [`widths`]: variance, equivalent, overall and translation widths, plus the
//!   inequalities relating them.
//! * [`dynamics`]: characteristic times, survival curves, lifetimes and the
//!   exponential-decay reference model.
//! * [`abm`]: the impulsive momentum/energy measurement model with its unsharp
//!   POVMs and Kraus-form conditional states.
//! * [`timepovm`]: covariant event-time POVMs and their first-moment operators.
//! * [`clock`]: orthogonalization times and clock-resolution bounds.
//! * [`interference`]: chopped-decay spectra and the shutter energy distribution.
//!
//! Every inequality check produces a [`BoundReport`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abm;
pub mod clock;
pub mod dynamics;
mod error;
pub mod hilbert;
pub mod interference;
pub mod io;
pub mod par;
pub mod quad;
mod report;
pub mod sampling;
pub mod suite;
pub mod timepovm;
pub mod widths;

pub use error::{Result, TempusError};
pub use hilbert::{
    evolve, fourier_pair, moments, Axis, AxisKind, Ensemble, GridState, HermitianOperator,
    Representation, TemporalAmplitude, C64,
};
pub use report::BoundReport;
