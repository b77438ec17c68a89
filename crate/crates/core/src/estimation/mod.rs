//! Conditional maximum likelihood estimation.
//!
//! The log-likelihood of a panel splits into a formation part, depending
//! only on θ⁺ and the y⁺ networks, and a dissolution part depending only on
//! θ⁻ and the y⁻ networks. Each block is fit on its own with random streams
//! keyed by phase, so a joint fit and two single-phase fits agree exactly.

mod bridge;
mod data;
mod exact;
mod layout;
mod mcmle;
mod mple;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Purpose;
use crate::sampler::SamplerConfig;
use crate::series::NetworkSeries;
use crate::stats::{ModelSpec, Phase, PhaseModel, StergmModel};

pub use bridge::{log_normalizer_ratio, loglik_ratio};
pub use data::{PhaseData, PhaseObservation};
pub use exact::{exact_loglik, exact_transition_distribution, ExactPhaseLikelihood, PhaseEnumeration, MAX_ENUMERABLE};
pub use layout::{Heterogeneity, ParamLayout};
pub use mcmle::fit_block;
pub use mple::mple;
pub use report::{
    deviance_rows, format_coefficients, format_deviance, p_value, stars, BlockCoefficients, DevianceRow,
    FitResult, IterationTrace, PhaseFit,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// `n_draws` is the sample size per transition, split across chains.
    pub sampler: SamplerConfig,
    pub chains: usize,
    pub max_iterations: usize,
    /// Largest accepted coordinate of the final surrogate step.
    pub step_tolerance: f64,
    /// Converged once every |observed − expected| ≤ this many Monte Carlo
    /// standard errors.
    pub moment_tolerance: f64,
    /// Initial Euclidean radius of each surrogate step.
    pub trust_radius: f64,
    /// Segments along the bridge path.
    pub bridge_points: usize,
    /// Draws per transition at each bridge point.
    pub bridge_draws: usize,
    /// Compute the deviance table after fitting.
    pub deviance: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            sampler: SamplerConfig::default(),
            chains: 4,
            max_iterations: 30,
            step_tolerance: 0.05,
            moment_tolerance: 2.0,
            trust_radius: 1.0,
            bridge_points: 16,
            bridge_draws: 500,
            deviance: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        let positive = [
            ("chains", self.chains),
            ("max_iterations", self.max_iterations),
            ("bridge_points", self.bridge_points),
            ("bridge_draws", self.bridge_draws),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        for (name, v) in [
            ("step_tolerance", self.step_tolerance),
            ("moment_tolerance", self.moment_tolerance),
            ("trust_radius", self.trust_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub(crate) fn draws_per_chain(&self) -> usize {
        self.sampler.n_draws.div_ceil(self.chains)
    }
}

fn bind(series: &NetworkSeries, spec: &ModelSpec) -> Result<StergmModel> {
    spec.require_identity()?;
    spec.bind(&series.covariates, series.is_directed())
}

/// Fits one phase block of `model` under `scheme`.
pub fn fit_phase(
    series: &NetworkSeries,
    model: &StergmModel,
    phase: Phase,
    cfg: &FitConfig,
    scheme: Heterogeneity,
) -> Result<PhaseFit> {
    let data = PhaseData::new(series, model, phase)?;
    let layout = ParamLayout::new(&data.model, data.observations.len(), scheme)?;
    let mut fit = fit_block(&data, &layout, cfg)?;
    if cfg.deviance {
        let llr = if fit.dim() == 0 {
            0.0
        } else {
            loglik_ratio(&data, &layout, &fit.estimates, cfg)?
        };
        fit.loglik = Some(llr);
        fit.deviance = deviance_rows(phase, fit.free_dyads, &[(scheme_label(scheme).into(), fit.dim(), llr)]);
    }
    Ok(fit)
}

fn scheme_label(scheme: Heterogeneity) -> &'static str {
    match scheme {
        Heterogeneity::None => "Full (hom.)",
        Heterogeneity::Edges => "Full (hom. except edges)",
        Heterogeneity::Full => "Full (het.)",
    }
}

/// Homogeneous conditional MLE of both blocks.
pub fn cmle_fit(series: &NetworkSeries, spec: &ModelSpec, cfg: &FitConfig) -> Result<FitResult> {
    fit_time_heterogeneous(series, spec, cfg, Heterogeneity::None)
}

/// Conditional MLE with coefficients expanded per transition according to
/// `scheme`.
pub fn fit_time_heterogeneous(
    series: &NetworkSeries,
    spec: &ModelSpec,
    cfg: &FitConfig,
    scheme: Heterogeneity,
) -> Result<FitResult> {
    cfg.validate()?;
    let model = bind(series, spec)?;
    let (formation, dissolution) = rayon::join(
        || fit_phase(series, &model, Phase::Formation, cfg, scheme),
        || fit_phase(series, &model, Phase::Dissolution, cfg, scheme),
    );
    let (formation, dissolution) = (formation?, dissolution?);
    let blocks = if scheme == Heterogeneity::None {
        Vec::new()
    } else {
        block_coefficients(&model, series.transition_count(), scheme, &formation, &dissolution)?
    };
    let loglik = match (formation.loglik, dissolution.loglik) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let deviance_table = formation.deviance.iter().chain(&dissolution.deviance).cloned().collect();
    Ok(FitResult {
        heterogeneity: scheme,
        n: series.n(),
        directed: series.is_directed(),
        transitions: series.transition_count(),
        formation,
        dissolution,
        loglik,
        deviance_table,
        blocks,
    })
}

fn block_coefficients(
    model: &StergmModel,
    transitions: usize,
    scheme: Heterogeneity,
    formation: &PhaseFit,
    dissolution: &PhaseFit,
) -> Result<Vec<BlockCoefficients>> {
    let lf = ParamLayout::new(&model.formation, transitions, scheme)?;
    let ld = ParamLayout::new(&model.dissolution, transitions, scheme)?;
    let named = |m: &PhaseModel, eta: Vec<f64>| m.labels().into_iter().zip(eta).collect::<Vec<_>>();
    Ok((0..transitions)
        .map(|t| BlockCoefficients {
            transition: t + 1,
            formation: named(&model.formation, lf.eta(&formation.estimates, t)),
            dissolution: named(&model.dissolution, ld.eta(&dissolution.estimates, t)),
        })
        .collect())
}

/// Covariance (inverse information) and Monte Carlo standard errors at θ
/// for one block, from a fresh sample.
pub struct StandardErrors {
    pub covariance: Vec<Vec<f64>>,
    pub mcmc_se: Vec<f64>,
}

pub fn standard_errors(
    series: &NetworkSeries,
    model: &StergmModel,
    phase: Phase,
    theta: &[f64],
    cfg: &FitConfig,
    scheme: Heterogeneity,
) -> Result<StandardErrors> {
    cfg.validate()?;
    let data = PhaseData::new(series, model, phase)?;
    let layout = ParamLayout::new(&data.model, data.observations.len(), scheme)?;
    if theta.len() != layout.dim() {
        return Err(Error::InvalidModel(format!(
            "{} coefficients for {} {phase} parameters",
            theta.len(),
            layout.dim()
        )));
    }
    let purpose = Purpose::Fit {
        phase,
        iteration: u32::MAX,
    };
    let draws = mcmle::sample_transitions(&data, &layout, theta, &cfg.sampler, cfg.chains, cfg.draws_per_chain(), purpose)?;
    let moments = mcmle::SampleMoments::new(&data, &layout, &draws);
    let cov = mcmle::inverse_information(&moments.information, &layout.labels)?;
    let mc = &cov * &moments.mc_var * &cov;
    Ok(StandardErrors {
        mcmc_se: (0..layout.dim()).map(|k| mc[(k, k)].max(0.0).sqrt()).collect(),
        covariance: mcmle::to_rows(&cov),
    })
}

/// Bridge-sampled deviance rows (null and fitted model) for both phases of
/// a finished fit.
pub fn bridge_deviance(
    series: &NetworkSeries,
    spec: &ModelSpec,
    fit: &FitResult,
    cfg: &FitConfig,
) -> Result<Vec<DevianceRow>> {
    cfg.validate()?;
    let model = bind(series, spec)?;
    let mut rows = Vec::new();
    for phase in Phase::BOTH {
        let data = PhaseData::new(series, &model, phase)?;
        let layout = ParamLayout::new(&data.model, data.observations.len(), fit.heterogeneity)?;
        let pf = fit.phase(phase);
        let llr = loglik_ratio(&data, &layout, &pf.estimates, cfg)?;
        rows.extend(deviance_rows(
            phase,
            data.free_dyads(),
            &[(scheme_label(fit.heterogeneity).into(), layout.dim(), llr)],
        ));
    }
    Ok(rows)
}

/// Analysis of deviance along the nested ladder
/// Null ⊂ Edges (hom.) ⊂ Full (hom.) ⊂ Full (hom. except edges) ⊂ Full (het.),
/// stopping at `up_to`. Rungs that coincide with the previous one (an
/// edges-only model, or a block without an `edges` term) are skipped.
pub fn deviance_ladder(
    series: &NetworkSeries,
    spec: &ModelSpec,
    cfg: &FitConfig,
    up_to: Heterogeneity,
) -> Result<Vec<DevianceRow>> {
    cfg.validate()?;
    let model = bind(series, spec)?;
    let no_deviance = FitConfig {
        deviance: false,
        ..cfg.clone()
    };
    let mut rows = Vec::new();
    for phase in Phase::BOTH {
        let full = model.phase(phase);
        let edges_only = PhaseModel::new(
            phase,
            full.terms.iter().filter(|t| t.label == "edges").cloned().collect(),
        );
        let has_edges = edges_only.dim() == 1;
        let mut rungs: Vec<(&str, PhaseModel, Heterogeneity)> = Vec::new();
        if has_edges && full.dim() > 1 {
            rungs.push(("Edges (hom.)", edges_only, Heterogeneity::None));
        }
        if full.dim() > 0 {
            rungs.push((scheme_label(Heterogeneity::None), full.clone(), Heterogeneity::None));
        }
        let multi = series.transition_count() >= 2 && full.dim() > 0;
        if multi && has_edges && up_to != Heterogeneity::None {
            rungs.push((scheme_label(Heterogeneity::Edges), full.clone(), Heterogeneity::Edges));
        }
        if multi && up_to == Heterogeneity::Full && !(has_edges && full.dim() == 1) {
            rungs.push((scheme_label(Heterogeneity::Full), full.clone(), Heterogeneity::Full));
        }
        let mut summaries = Vec::new();
        let mut free = 0;
        for (label, pm, scheme) in rungs {
            let mut sub = model.clone();
            match phase {
                Phase::Formation => sub.formation = pm,
                Phase::Dissolution => sub.dissolution = pm,
            }
            let data = PhaseData::new(series, &sub, phase)?;
            let layout = ParamLayout::new(&data.model, data.observations.len(), scheme)?;
            let fit = fit_block(&data, &layout, &no_deviance)?;
            let llr = loglik_ratio(&data, &layout, &fit.estimates, cfg)?;
            free = data.free_dyads();
            summaries.push((label.to_string(), layout.dim(), llr));
        }
        if summaries.is_empty() {
            free = PhaseData::new(series, &model, phase)?.free_dyads();
        }
        rows.extend(deviance_rows(phase, free, &summaries));
    }
    Ok(rows)
}
