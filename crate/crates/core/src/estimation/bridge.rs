//! Log-likelihood ratios against the null model by bridge sampling along
//! the straight path u·θ̂, u ∈ [0, 1].
//!
//! The path is cut into `bridge_points` segments. Each segment is sampled
//! at its midpoint, and log c(end) − log c(start) is estimated by importance
//! sampling from the midpoint to both ends.

use crate::error::Result;
use crate::rng::Purpose;

use super::data::PhaseData;
use super::exact::log_sum_exp;
use super::layout::ParamLayout;
use super::mcmle::sample_transitions;
use super::FitConfig;

/// Estimates Σₜ [log cₜ(θ) − log cₜ(0)] for one phase block.
pub fn log_normalizer_ratio(data: &PhaseData, layout: &ParamLayout, theta: &[f64], cfg: &FitConfig) -> Result<f64> {
    cfg.validate()?;
    if theta.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let k = cfg.bridge_points;
    let per_chain = cfg.bridge_draws.div_ceil(cfg.chains);
    let mut total = 0.0;
    for point in 0..k {
        let mid: Vec<f64> = theta.iter().map(|x| x * (point as f64 + 0.5) / k as f64).collect();
        let half: Vec<f64> = theta.iter().map(|x| x * 0.5 / k as f64).collect();
        let purpose = Purpose::Bridge {
            phase: data.phase(),
            point: point as u32,
        };
        let draws = sample_transitions(data, layout, &mid, &cfg.sampler, cfg.chains, per_chain, purpose)?;
        for (t, d) in draws.iter().enumerate() {
            let h = layout.eta(&half, t);
            let up: Vec<f64> = d.stats.iter().map(|s| dot(&h, s)).collect();
            let down: Vec<f64> = up.iter().map(|x| -x).collect();
            total += log_sum_exp(&up) - log_sum_exp(&down);
        }
    }
    Ok(total)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// l(θ) − l(0) for one phase block.
pub fn loglik_ratio(data: &PhaseData, layout: &ParamLayout, theta: &[f64], cfg: &FitConfig) -> Result<f64> {
    let mut linear = 0.0;
    for (t, obs) in data.observations.iter().enumerate() {
        let eta = layout.eta(theta, t);
        linear += eta.iter().zip(&obs.observed_stats).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(linear - log_normalizer_ratio(data, layout, theta, cfg)?)
}
