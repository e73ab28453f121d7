//! A finite probability model of the CHSH/Bell experiment.
//!
//! The outcome space of a single run is `{−1,1}² × {a₀,a₁} × {b₀,b₁}`: both
//! detector outcomes together with the two settings that were actually
//! selected. The measure on it combines the settings distribution with the
//! Born probabilities of the singlet state ([`singlet`], [`measure`]). On top
//! of that the crate evaluates the CHSH and Bell expressions with conditional
//! and partial expectations ([`inequalities`]), checks locality and searches
//! hidden-variable approximations ([`lhv`]), and samples finite runs
//! ([`montecarlo`]).

pub mod error;
pub mod inequalities;
pub mod lhv;
pub mod measure;
pub mod montecarlo;
pub mod prob_space;
pub mod render;
pub mod singlet;

pub use error::{Error, Result};
pub use measure::{chsh_measure, ChshAngles, JointMeasure, SettingPair, SettingsDistribution};
pub use singlet::{DetectorAngle, Sign};
