//! Locality, factorizability and hidden-variable analyses of the joint measure.

mod factorize;
mod model;
mod nosignal;
mod separability;
mod witness;

pub use factorize::{factorizability_fit, fit_product_table, product_residual, product_table, ProductFit};
pub use model::{lhv_predicted_probs, LhvModel};
pub use nosignal::{no_signaling_report, signaling_counterexample, MarginalEntry, NoSignalingReport, Party};
pub use separability::{
    born_targets, m_separability_search, m_separability_search_target, margin, DeviationEntry, OutcomeScope,
    SeparabilityOptions, SeparabilityResult,
};
pub use witness::{fourier_witness_check, p_tilde, witness_coefficient, FourierWitnessReport, MIN_GRID};
