//! Hypothesis sets and the empirical side of the a priori estimates.

mod generator;
mod hypotheses;
mod lab;
mod scaling;

pub use generator::{lab_grid, random_amplitudes, FieldGenerator};
pub use hypotheses::{
    check_hypotheses, derive_exponents, Exponents, HypothesisInput, HypothesisSet, Label, Margin,
    Params,
};
pub use lab::{
    estimate_constant, lemma_ab, semigroup_pair, InequalityId, InequalityReport, LabConfig,
};
pub use scaling::{dilate, scaling_invariance_check, ScalingReport, SCALING_TOLERANCE};
