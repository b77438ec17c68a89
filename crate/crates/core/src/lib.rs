//! Separable temporal exponential-family random graph models (STERGMs).
//!
//! A transition yᵗ⁻¹ → yᵗ is split into a formation network y⁺ = yᵗ⁻¹ ∪ yᵗ
//! and a dissolution network y⁻ = yᵗ⁻¹ ∩ yᵗ, each governed by its own
//! exponential-family model conditional on yᵗ⁻¹. This crate provides the
//! network and panel types, the statistic catalog, an MCMC sampler for each
//! phase, forward simulation, and conditional maximum-likelihood fitting with
//! standard errors and bridge-sampled analysis of deviance.

pub mod covariates;
pub mod error;
pub mod estimation;
pub mod io;
pub mod network;
pub mod rng;
pub mod sampler;
pub mod series;
pub mod stats;
pub mod transition;

pub use covariates::{Covariates, DyadCovariate, NodeCovariate, NodeValues};
pub use error::{Error, Result};
pub use io::{load_series, save_series, validate_manifest, Manifest, ValidationReport};
pub use network::{Dyad, Network};
pub use sampler::{
    random_network, sample_phase, simulate_series, simulate_step, PhaseSample, PhaseSpace, Proposal, SamplerConfig,
};
pub use series::NetworkSeries;
pub use stats::{Coefficients, ModelSpec, Phase, PhaseSpec, StergmModel, TermSpec};
pub use transition::{apply_transition, decompose_transition, TransitionDecomposition};
