//! Splitting a transition into its formation and dissolution networks, and
//! recombining them.
//!
//! Per dyad the four possible paths are
//!
//! | prev | (y⁺, y⁻) | next |
//! |------|----------|------|
//! | 0    | (0, 0)   | 0    |
//! | 0    | (1, 0)   | 1    |
//! | 1    | (1, 0)   | 0    |
//! | 1    | (1, 1)   | 1    |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;

/// The latent pair (y⁺, y⁻) behind one observed transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDecomposition {
    pub y_plus: Network,
    pub y_minus: Network,
}

/// Counts of ties formed, dissolved and preserved in one transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSummary {
    pub formed: usize,
    pub dissolved: usize,
    pub preserved: usize,
    pub prev_ties: usize,
    pub next_ties: usize,
}

/// y⁺ = prev ∪ next, y⁻ = prev ∩ next.
pub fn decompose_transition(prev: &Network, next: &Network) -> Result<TransitionDecomposition> {
    Ok(TransitionDecomposition {
        y_plus: prev.union(next)?,
        y_minus: prev.intersection(next)?,
    })
}

/// Recombines a decomposition: y⁻ ∪ (y⁺ \ prev).
pub fn apply_transition(prev: &Network, d: &TransitionDecomposition) -> Result<Network> {
    prev.check_shape(&d.y_plus)?;
    prev.check_shape(&d.y_minus)?;
    if !prev.is_subset(&d.y_plus) {
        return Err(Error::Containment(
            "formation network must contain the previous network".into(),
        ));
    }
    if !d.y_minus.is_subset(prev) {
        return Err(Error::Containment(
            "dissolution network must be contained in the previous network".into(),
        ));
    }
    let mut next = d.y_minus.clone();
    for t in d.y_plus.ties() {
        if !prev.has(t) {
            next.toggle(t);
        }
    }
    Ok(next)
}

impl TransitionDecomposition {
    pub fn summary(&self, prev: &Network) -> TransitionSummary {
        let preserved = self.y_minus.edge_count();
        let formed = self.y_plus.edge_count() - prev.edge_count();
        TransitionSummary {
            formed,
            dissolved: prev.edge_count() - preserved,
            preserved,
            prev_ties: prev.edge_count(),
            next_ties: preserved + formed,
        }
    }
}
