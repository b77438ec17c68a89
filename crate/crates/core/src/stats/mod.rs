//! Sufficient statistics for the formation and dissolution phases.
//!
//! Statistics are evaluated on the phase network itself (y⁺ for formation,
//! y⁻ for dissolution) together with the previous network. The transition
//! form g(yᵗ, yᵗ⁻¹) is recovered by composing with
//! [`decompose_transition`](crate::transition::decompose_transition); see
//! [`transition_statistics`].

mod model;
mod spec;
mod terms;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use model::{Coefficients, EtaMap, ModelSpec, ModelTerm, PhaseModel, PhaseSpec, StergmModel};
pub use spec::{TermKind, TermSpec};
pub use terms::{BoundTerm, Term};

use crate::covariates::Covariates;
use crate::error::{Error, Result};
use crate::network::{Dyad, Network};
use crate::transition::decompose_transition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Formation,
    Dissolution,
}

impl Phase {
    pub const BOTH: [Phase; 2] = [Phase::Formation, Phase::Dissolution];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Formation => "formation",
            Phase::Dissolution => "dissolution",
        }
    }

    /// Whether `d` may change in this phase given the previous network.
    #[inline]
    pub fn is_free(self, prev: &Network, d: Dyad) -> bool {
        match self {
            Phase::Formation => !prev.has(d),
            Phase::Dissolution => prev.has(d),
        }
    }

    /// The dyads this phase may toggle, in canonical order.
    pub fn free_dyads(self, prev: &Network) -> Vec<Dyad> {
        match self {
            Phase::Formation => prev.all_dyads().filter(|&d| !prev.has(d)).collect(),
            Phase::Dissolution => prev.ties().collect(),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values of every statistic a term expands to, on phase network `y`.
pub fn evaluate(
    term: &TermSpec,
    covs: &Covariates,
    phase: Phase,
    y: &Network,
    prev: &Network,
) -> Result<Vec<f64>> {
    y.check_shape(prev)?;
    Ok(term
        .bind(covs, y.is_directed(), phase)?
        .iter()
        .map(|t| t.term.evaluate(y, prev))
        .collect())
}

/// g(y ⊕ d) − g(y) for each statistic of `term`, where ⊕ toggles `d`.
pub fn change_score(
    term: &TermSpec,
    covs: &Covariates,
    phase: Phase,
    y: &Network,
    prev: &Network,
    d: Dyad,
) -> Result<Vec<f64>> {
    y.check_shape(prev)?;
    let d = prev.checked_dyad(d.tail, d.head)?;
    if !phase.is_free(prev, d) {
        return Err(Error::IllegalToggle(d.tail + 1, d.head + 1, phase.name()));
    }
    let sign = if y.has(d) { -1.0 } else { 1.0 };
    Ok(term
        .bind(covs, y.is_directed(), phase)?
        .iter()
        .map(|t| sign * t.term.delta_on(y, prev, d))
        .collect())
}

/// Transition-form statistics g(yᵗ, yᵗ⁻¹) for both phases of a model.
pub fn transition_statistics(
    model: &StergmModel,
    prev: &Network,
    next: &Network,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = decompose_transition(prev, next)?;
    Ok((
        model.formation.evaluate(&d.y_plus, prev),
        model.dissolution.evaluate(&d.y_minus, prev),
    ))
}
