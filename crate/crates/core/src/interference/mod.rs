//! Diffraction in time: chopped decay spectra, the shutter energy
//! distribution and the two-slit momentum amplitude.

mod chopper;
mod moshinsky;
mod slits;

pub use chopper::{
    chopper_analysis, hu_consistency, plancherel_check, side_peaks, spectra, spectra_at, unimodal,
    window_transform, ChopperAnalysis, ChopperConfig, ChopperSpectra, HuConsistency, SidePeak,
    Spectrum, SpectrumKind, HAUSER_E0_EV, HAUSER_TAU, HBAR_EV_S, MIN_LIFETIMES,
};
pub use moshinsky::{moshinsky_density, moshinsky_distribution, moshinsky_zeros, Moshinsky};
pub use slits::{two_slit_momentum_amplitude, two_slit_state};
