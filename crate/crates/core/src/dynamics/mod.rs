//! Intrinsic times driven by unitary evolution.

mod characteristic;
mod decay;
mod survival;

pub use characteristic::{characteristic_time, mandelstam_tamm_check, CharacteristicTime};
pub use decay::{decay_reference, wigner_moments, DecayModel, DecayReference, WignerMoments};
pub use survival::{
    grabowski_lifetime, property_lifetime, return_probability_curve, survival_curve,
    GrabowskiLifetime, SurvivalCurve,
};
