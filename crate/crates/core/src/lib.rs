//! Information-theoretic approximation of empirical distributions to causal models.
//!
//! Observational and interventional samples of two discrete variables are
//! embedded into a joint distribution over the extended space
//! `(X, Y, Y_1, ..., Y_bx)`. The embedding closest in relative entropy to a
//! chosen causal model is found with a linear program ([`approx::iacm`]).
//! On top of that the crate computes probabilities of causation under
//! monotone models ([`causation`]) and decides the causal direction between
//! two variables ([`discovery`]). [`synth`] generates labeled additive and
//! multiplicative noise data for benchmarking.

pub mod approx;
pub mod causation;
pub mod discovery;
pub mod dist;
pub mod error;
pub mod lp;
pub mod models;
pub mod serde_ext;
pub mod synth;

pub use approx::{iacm, ApproximationResult, EmpiricalInputs, ErrorMode};
pub use causation::{calc_causal_probabilities, CausalProbabilities, CausationReport, Direction};
pub use discovery::{discover, Decision, DiscoveryConfig, DiscoveryData, DiscoveryVerdict, PreprocessMode};
pub use dist::{DiscreteDistribution, MarginalSelector, Shape};
pub use error::{IacmError, Result};
pub use models::{CausalModelSpec, ModelVariant, SupportSet};
