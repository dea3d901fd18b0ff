//! Learning-separation laboratory: parity concept classes, the mixture
//! distribution the learner samples, brute-force dimension-bound oracles, and
//! the experiment driver tying them together.

mod concept;
mod experiment;
mod oracles;

pub use concept::{enumerate_signs, MixtureDistribution, ParityConcept};
pub use experiment::{
    run_separation_experiment, DimensionSummary, SeparationReport, SeparationRow,
};
pub use oracles::{
    best_implicit_mse, best_linear_mse, binomial, sparsity_schedule, OracleReport,
};
