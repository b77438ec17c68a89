//! Exact likelihoods on spaces small enough to enumerate.
//!
//! Every state of a phase space is built explicitly and its statistics are
//! evaluated from their definitions, independently of the change scores the
//! sampler uses.

use crate::error::{Error, Result};
use crate::network::{Dyad, Network};
use crate::sampler::PhaseSpace;
use crate::series::NetworkSeries;
use crate::stats::{Coefficients, Phase, PhaseModel, StergmModel};

use super::data::PhaseData;
use super::layout::ParamLayout;

/// Largest free-dyad count [`PhaseEnumeration`] accepts.
pub const MAX_ENUMERABLE: usize = 20;

/// All 2^F states of a phase space with their statistics. State `mask`
/// toggles free dyad `k` away from the anchor when bit `k` is set.
#[derive(Clone, Debug)]
pub struct PhaseEnumeration {
    pub anchor: Network,
    pub free: Vec<Dyad>,
    pub stats: Vec<Vec<f64>>,
}

impl PhaseEnumeration {
    pub fn new(space: &PhaseSpace, model: &PhaseModel) -> Result<Self> {
        let f = space.free.len();
        if f > MAX_ENUMERABLE {
            return Err(Error::SpaceTooLarge {
                free: f,
                limit: MAX_ENUMERABLE,
            });
        }
        let stats = (0..1usize << f)
            .map(|mask| {
                let y = state_of(&space.anchor, &space.free, mask);
                model.evaluate(&y, &space.anchor)
            })
            .collect();
        Ok(PhaseEnumeration {
            anchor: space.anchor.clone(),
            free: space.free.clone(),
            stats,
        })
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn state(&self, mask: usize) -> Network {
        state_of(&self.anchor, &self.free, mask)
    }

    /// Index of `y` in the enumeration; `y` must lie in the space.
    pub fn mask_of(&self, y: &Network) -> usize {
        self.free
            .iter()
            .enumerate()
            .filter(|(_, &d)| y.has(d) != self.anchor.has(d))
            .map(|(k, _)| 1usize << k)
            .sum()
    }

    fn log_weights(&self, eta: &[f64]) -> Vec<f64> {
        self.stats
            .iter()
            .map(|g| g.iter().zip(eta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// log Σ_y exp(η·g(y)).
    pub fn log_normalizer(&self, eta: &[f64]) -> f64 {
        log_sum_exp(&self.log_weights(eta))
    }

    pub fn probabilities(&self, eta: &[f64]) -> Vec<f64> {
        let lw = self.log_weights(eta);
        let lz = log_sum_exp(&lw);
        lw.iter().map(|w| (w - lz).exp()).collect()
    }

    /// E_η[g].
    pub fn mean(&self, eta: &[f64]) -> Vec<f64> {
        let p = self.probabilities(eta);
        let k = eta.len();
        let mut m = vec![0.0; k];
        for (pi, g) in p.iter().zip(&self.stats) {
            for (mj, gj) in m.iter_mut().zip(g) {
                *mj += pi * gj;
            }
        }
        m
    }

    /// Cov_η[g] as a row-major k×k matrix.
    pub fn covariance(&self, eta: &[f64]) -> Vec<f64> {
        let p = self.probabilities(eta);
        let m = self.mean(eta);
        let k = eta.len();
        let mut c = vec![0.0; k * k];
        for (pi, g) in p.iter().zip(&self.stats) {
            for a in 0..k {
                for b in 0..k {
                    c[a * k + b] += pi * (g[a] - m[a]) * (g[b] - m[b]);
                }
            }
        }
        c
    }
}

fn state_of(anchor: &Network, free: &[Dyad], mask: usize) -> Network {
    let mut y = anchor.clone();
    for (k, &d) in free.iter().enumerate() {
        if mask >> k & 1 == 1 {
            y.toggle(d);
        }
    }
    y
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Exact log-likelihood of one phase block under a parameter layout, with
/// its gradient Σₜ Aₜᵀ(g_obs − E[g]).
pub struct ExactPhaseLikelihood {
    layout: ParamLayout,
    enumerations: Vec<PhaseEnumeration>,
    observed: Vec<Vec<f64>>,
}

impl ExactPhaseLikelihood {
    pub fn new(data: &PhaseData, layout: ParamLayout) -> Result<Self> {
        let enumerations = data
            .observations
            .iter()
            .map(|o| PhaseEnumeration::new(&o.space, &data.model))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactPhaseLikelihood {
            layout,
            enumerations,
            observed: data.observations.iter().map(|o| o.observed_stats.clone()).collect(),
        })
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn loglik(&self, theta: &[f64]) -> f64 {
        self.enumerations
            .iter()
            .zip(&self.observed)
            .enumerate()
            .map(|(t, (e, g))| {
                let eta = self.layout.eta(theta, t);
                let dot: f64 = eta.iter().zip(g).map(|(a, b)| a * b).sum();
                dot - e.log_normalizer(&eta)
            })
            .sum()
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.layout.dim()];
        for (t, (e, g)) in self.enumerations.iter().zip(&self.observed).enumerate() {
            let eta = self.layout.eta(theta, t);
            self.layout.project_into(t, g, 1.0, &mut grad);
            self.layout.project_into(t, &e.mean(&eta), -1.0, &mut grad);
        }
        grad
    }

    /// Fisher information Σₜ Aₜᵀ Cov[g] Aₜ, row-major.
    pub fn information(&self, theta: &[f64]) -> Vec<f64> {
        let p = self.layout.dim();
        let mut info = vec![0.0; p * p];
        for (t, e) in self.enumerations.iter().enumerate() {
            let eta = self.layout.eta(theta, t);
            let k = eta.len();
            let cov = e.covariance(&eta);
            let map = &self.layout.map[t];
            for a in 0..k {
                for b in 0..k {
                    info[map[a] * p + map[b]] += cov[a * k + b];
                }
            }
        }
        info
    }
}

/// Exact Σₜ log P(yᵗ | yᵗ⁻¹; θ) for a homogeneous model, by enumerating both
/// phase spaces of every transition.
pub fn exact_loglik(series: &NetworkSeries, model: &StergmModel, coefs: &Coefficients) -> Result<f64> {
    model.check_coefficients(coefs)?;
    let mut total = 0.0;
    for phase in Phase::BOTH {
        let data = PhaseData::new(series, model, phase)?;
        let layout = ParamLayout::new(&data.model, data.observations.len(), Default::default())?;
        total += ExactPhaseLikelihood::new(&data, layout)?.loglik(coefs.phase(phase));
    }
    Ok(total)
}

/// Exact P(yᵗ = next | yᵗ⁻¹ = prev) summed over every latent (y⁺, y⁻) pair,
/// enumerating all 2^|dyads| candidate networks. Used to check that the
/// separable product is a proper transition distribution.
pub fn exact_transition_distribution(
    prev: &Network,
    model: &StergmModel,
    coefs: &Coefficients,
) -> Result<Vec<(Network, f64)>> {
    let form = PhaseEnumeration::new(&PhaseSpace::new(Phase::Formation, prev.clone()), &model.formation)?;
    let diss = PhaseEnumeration::new(&PhaseSpace::new(Phase::Dissolution, prev.clone()), &model.dissolution)?;
    let pf = form.probabilities(&coefs.formation);
    let pd = diss.probabilities(&coefs.dissolution);
    let mut out: Vec<(Network, f64)> = Vec::new();
    for (mf, &a) in pf.iter().enumerate() {
        let y_plus = form.state(mf);
        for (md, &b) in pd.iter().enumerate() {
            let y_minus = diss.state(md);
            let next = crate::transition::apply_transition(
                prev,
                &crate::transition::TransitionDecomposition {
                    y_plus: y_plus.clone(),
                    y_minus,
                },
            )?;
            match out.iter_mut().find(|(y, _)| *y == next) {
                Some((_, p)) => *p += a * b,
                None => out.push((next, a * b)),
            }
        }
    }
    Ok(out)
}
