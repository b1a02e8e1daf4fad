//! Covariant event-time observables.

mod arrival;
mod bounded;
mod falling;
mod framework;
mod oscillator;
mod povm;

pub use arrival::{
    free_arrival_probability, free_evolve, inverse_momentum_mean, FreeArrival,
    SLOW_WEIGHT_TOLERANCE,
};
pub use bounded::{
    bounded_spectrum, BoundedSpectrum, BoundedSpectrumReports, ShiftReport, SpectrumReport,
    WINDOW_TOLERANCE,
};
pub use falling::{FallingParticle, TimeDrift, BOUNDARY_TOLERANCE};
pub use framework::{
    bf_povm_from_effect, check_covariance, check_covariance_with, finite_dimension_check,
    time_statistics, BfOperator, CovarianceReport, FiniteDimensionCheck, TimeOperatorReport,
    TimeStatistics, DETECTION_FLOOR,
};
pub use oscillator::OscillatorPhase;
pub use povm::{check_bins, Effect, Povm, PovmAxioms};
