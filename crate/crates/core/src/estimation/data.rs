use crate::error::Result;
use crate::network::Network;
use crate::sampler::PhaseSpace;
use crate::series::NetworkSeries;
use crate::stats::{Phase, PhaseModel, StergmModel};
use crate::transition::decompose_transition;

/// One transition seen from one phase: the space of phase networks given
/// yᵗ⁻¹ and the observed phase network.
#[derive(Clone, Debug)]
pub struct PhaseObservation {
    pub space: PhaseSpace,
    pub observed: Network,
    pub observed_stats: Vec<f64>,
}

/// Everything needed to fit one phase block.
#[derive(Clone, Debug)]
pub struct PhaseData {
    pub model: PhaseModel,
    pub observations: Vec<PhaseObservation>,
}

impl PhaseData {
    pub fn new(series: &NetworkSeries, model: &StergmModel, phase: Phase) -> Result<Self> {
        let model = model.phase(phase).clone();
        let observations = series
            .transitions()
            .map(|(prev, next)| {
                let d = decompose_transition(prev, next)?;
                let observed = match phase {
                    Phase::Formation => d.y_plus,
                    Phase::Dissolution => d.y_minus,
                };
                let observed_stats = model.evaluate(&observed, prev);
                Ok(PhaseObservation {
                    space: PhaseSpace::new(phase, prev.clone()),
                    observed,
                    observed_stats,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhaseData {
            model,
            observations,
        })
    }

    pub fn phase(&self) -> Phase {
        self.model.phase
    }

    /// Free dyads summed over transitions.
    pub fn free_dyads(&self) -> usize {
        self.observations.iter().map(|o| o.space.free.len()).sum()
    }
}
