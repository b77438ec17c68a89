//! Monte Carlo maximum likelihood for one phase block.
//!
//! Each iteration samples every transition's phase space at the current θ,
//! then maximizes the importance-sampled log-likelihood ratio
//!
//!   f(Δ) = Σₜ [Δηₜ·gₜ − log mean_m exp(Δηₜ·sₜₘ)]
//!
//! inside a trust region. The sample also supplies the information matrix
//! and the Monte Carlo error of the moment equations.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sampler::{sample_phase_with, SamplerConfig};

use super::data::PhaseData;
use super::layout::ParamLayout;
use super::mple::mple;
use super::report::{IterationTrace, PhaseFit};
use super::FitConfig;

/// Sampled statistics of one transition's phase space, chain-major.
#[derive(Clone, Debug)]
pub(crate) struct TransitionDraws {
    pub stats: Vec<Vec<f64>>,
    pub chains: usize,
    pub acceptance: f64,
}

impl TransitionDraws {
    pub fn per_chain(&self) -> usize {
        self.stats.len() / self.chains
    }
}

/// Draws `chains` chains per transition at θ, each starting from the
/// observed phase network, on streams `(seed, purpose, t, chain)`.
pub(crate) fn sample_transitions(
    data: &PhaseData,
    layout: &ParamLayout,
    theta: &[f64],
    sampler: &SamplerConfig,
    chains: usize,
    per_chain: usize,
    purpose: Purpose,
) -> Result<Vec<TransitionDraws>> {
    let cfg = SamplerConfig {
        n_draws: per_chain,
        ..sampler.clone()
    };
    let jobs: Vec<(usize, usize)> = (0..data.observations.len())
        .flat_map(|t| (0..chains).map(move |c| (t, c)))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(t, c)| {
            let obs = &data.observations[t];
            let eta = layout.eta(theta, t);
            let stream = rng::stream(sampler.seed, purpose, t as u64, c as u64);
            sample_phase_with(&obs.space, &data.model, &eta, &cfg, stream, Some(obs.observed.clone()), |_, _| {})
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(data.observations.len());
    let mut it = samples.into_iter();
    for _ in 0..data.observations.len() {
        let mut stats = Vec::with_capacity(chains * per_chain);
        let mut acceptance = 0.0;
        for _ in 0..chains {
            let s = it.next().expect("one sample per job");
            acceptance += s.acceptance_rate / chains as f64;
            stats.extend(s.stats);
        }
        out.push(TransitionDraws {
            stats,
            chains,
            acceptance,
        });
    }
    Ok(out)
}

/// Moments of a sample, summed over transitions in parameter space.
pub(crate) struct SampleMoments {
    pub observed: DVector<f64>,
    pub expected: DVector<f64>,
    /// Σₜ Aₜᵀ Cov(sₜ) Aₜ.
    pub information: DMatrix<f64>,
    /// Batch-means estimate of Var(Σₜ Aₜᵀ mean(sₜ)).
    pub mc_var: DMatrix<f64>,
    pub summed_min: Vec<f64>,
    pub summed_max: Vec<f64>,
}

impl SampleMoments {
    pub fn new(data: &PhaseData, layout: &ParamLayout, draws: &[TransitionDraws]) -> Self {
        let p = layout.dim();
        let mut observed = DVector::zeros(p);
        let mut expected = DVector::zeros(p);
        let mut information = DMatrix::zeros(p, p);
        let mut mc_var = DMatrix::zeros(p, p);
        let m = draws.first().map_or(0, |d| d.stats.len());
        let mut summed = vec![DVector::<f64>::zeros(p); m];
        for (t, (obs, d)) in data.observations.iter().zip(draws).enumerate() {
            let proj: Vec<DVector<f64>> = d
                .stats
                .iter()
                .map(|s| DVector::from_vec(layout.project(t, s)))
                .collect();
            for (acc, x) in summed.iter_mut().zip(&proj) {
                *acc += x;
            }
            observed += DVector::from_vec(layout.project(t, &obs.observed_stats));
            let mean = mean_of(&proj);
            information += covariance_of(&proj, &mean);
            expected += &mean;
            let batches = batch_means(&proj, d.chains, d.per_chain());
            let bm = mean_of(&batches);
            mc_var += covariance_of(&batches, &bm) / batches.len() as f64;
        }
        let summed_min = (0..p)
            .map(|k| summed.iter().map(|s| s[k]).fold(f64::INFINITY, f64::min))
            .collect();
        let summed_max = (0..p)
            .map(|k| summed.iter().map(|s| s[k]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        SampleMoments {
            observed,
            expected,
            information,
            mc_var,
            summed_min,
            summed_max,
        }
    }

    /// Coordinates whose observed sum lies on or outside the sampled range.
    pub fn boundary(&self) -> Vec<usize> {
        let tol = 1e-9;
        (0..self.observed.len())
            .filter(|&k| {
                self.observed[k] <= self.summed_min[k] + tol || self.observed[k] >= self.summed_max[k] - tol
            })
            .collect()
    }

    pub fn is_constant(&self, k: usize) -> bool {
        self.summed_max[k] - self.summed_min[k] < 1e-12
    }

    pub fn moment_mcse(&self) -> Vec<f64> {
        (0..self.observed.len()).map(|k| self.mc_var[(k, k)].max(0.0).sqrt()).collect()
    }
}

/// `BATCHES` contiguous batches per chain.
const BATCHES: usize = 5;

fn batch_means(xs: &[DVector<f64>], chains: usize, per_chain: usize) -> Vec<DVector<f64>> {
    let b = BATCHES.min(per_chain).max(1);
    let mut out = Vec::with_capacity(chains * b);
    for c in 0..chains {
        let chain = &xs[c * per_chain..(c + 1) * per_chain];
        for j in 0..b {
            let lo = j * per_chain / b;
            let hi = (j + 1) * per_chain / b;
            out.push(mean_of(&chain[lo..hi]));
        }
    }
    out
}

pub(crate) fn mean_of(xs: &[DVector<f64>]) -> DVector<f64> {
    let mut m = DVector::zeros(xs.first().map_or(0, |x| x.len()));
    for x in xs {
        m += x;
    }
    if !xs.is_empty() {
        m /= xs.len() as f64;
    }
    m
}

fn covariance_of(xs: &[DVector<f64>], mean: &DVector<f64>) -> DMatrix<f64> {
    let p = mean.len();
    let mut c = DMatrix::zeros(p, p);
    if xs.len() < 2 {
        return c;
    }
    for x in xs {
        let d = x - mean;
        c.ger(1.0, &d, &d, 1.0);
    }
    c / (xs.len() - 1) as f64
}

/// The importance-sampling surrogate and its derivatives at Δ.
struct Surrogate<'a> {
    layout: &'a ParamLayout,
    /// Per transition: draws centred at the observed statistics, sₜₘ − gₜ.
    centred: Vec<Vec<Vec<f64>>>,
}

struct SurrogateEval {
    value: f64,
    grad: DVector<f64>,
    neg_hess: DMatrix<f64>,
    /// Smallest importance-weight ESS fraction over transitions.
    min_ess: f64,
}

impl<'a> Surrogate<'a> {
    fn new(data: &PhaseData, layout: &'a ParamLayout, draws: &[TransitionDraws]) -> Self {
        let centred = data
            .observations
            .iter()
            .zip(draws)
            .map(|(obs, d)| {
                d.stats
                    .iter()
                    .map(|s| s.iter().zip(&obs.observed_stats).map(|(a, b)| a - b).collect())
                    .collect()
            })
            .collect();
        Surrogate { layout, centred }
    }

    fn eval(&self, delta: &DVector<f64>) -> SurrogateEval {
        let p = self.layout.dim();
        let mut value = 0.0;
        let mut grad = DVector::zeros(p);
        let mut neg_hess = DMatrix::zeros(p, p);
        let mut min_ess = 1.0f64;
        for (t, draws) in self.centred.iter().enumerate() {
            let deta = self.layout.eta(delta.as_slice(), t);
            let lw: Vec<f64> = draws.iter().map(|s| dot(&deta, s)).collect();
            let mx = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = lw.iter().map(|x| (x - mx).exp()).collect();
            let sw: f64 = w.iter().sum();
            let m = draws.len() as f64;
            value -= mx + (sw / m).ln();
            let sw2: f64 = w.iter().map(|x| x * x).sum();
            min_ess = min_ess.min(sw * sw / sw2 / m);
            let proj: Vec<DVector<f64>> = draws
                .iter()
                .map(|s| DVector::from_vec(self.layout.project(t, s)))
                .collect();
            let mut mean = DVector::zeros(p);
            for (wi, x) in w.iter().zip(&proj) {
                mean.axpy(wi / sw, x, 1.0);
            }
            for (wi, x) in w.iter().zip(&proj) {
                let d = x - &mean;
                neg_hess.ger(wi / sw, &d, &d, 1.0);
            }
            grad -= mean;
        }
        SurrogateEval {
            value,
            grad,
            neg_hess,
            min_ess,
        }
    }

    /// Newton ascent restricted to ‖Δ‖ ≤ radius.
    fn maximize(&self, radius: f64) -> (DVector<f64>, SurrogateEval) {
        let mut delta = DVector::zeros(self.layout.dim());
        let mut cur = self.eval(&delta);
        for _ in 0..100 {
            let step = match cur.neg_hess.clone().cholesky() {
                Some(c) => c.solve(&cur.grad),
                None => cur.grad.clone() * 0.1,
            };
            let mut cand = &delta + step;
            let norm = cand.norm();
            if norm > radius {
                cand *= radius / norm;
            }
            let mut next = self.eval(&cand);
            let mut tries = 0;
            while next.value < cur.value && tries < 40 {
                cand = (&cand + &delta) * 0.5;
                next = self.eval(&cand);
                tries += 1;
            }
            if next.value < cur.value {
                break;
            }
            let moved = (&cand - &delta).amax();
            delta = cand;
            cur = next;
            if moved < 1e-10 {
                break;
            }
        }
        (delta, cur)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest importance-weight ESS fraction accepted before shrinking the
/// trust region.
const MIN_ESS_FRACTION: f64 = 0.1;
/// Consecutive boundary iterations, counted from the start, that make a
/// statistic degenerate.
const BOUNDARY_LIMIT: usize = 3;

pub(crate) fn inverse_information(info: &DMatrix<f64>, labels: &[String]) -> Result<DMatrix<f64>> {
    if info.nrows() == 0 {
        return Ok(info.clone());
    }
    let chol = info.clone().cholesky().ok_or_else(|| {
        let weakest = (0..info.nrows())
            .min_by(|&a, &b| info[(a, a)].total_cmp(&info[(b, b)]))
            .map(|k| labels[k].clone())
            .unwrap_or_default();
        Error::SingularInformation(format!("not positive definite (smallest variance: `{weakest}`)"))
    })?;
    let inv = chol.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Fits one phase block. `data` and `layout` fix the block; `cfg.sampler.seed`
/// and the phase key the random streams.
pub fn fit_block(data: &PhaseData, layout: &ParamLayout, cfg: &FitConfig) -> Result<PhaseFit> {
    cfg.validate()?;
    let phase = data.phase();
    let p = layout.dim();
    let free_dyads = data.free_dyads();
    if p == 0 {
        return Ok(PhaseFit::empty(phase, free_dyads));
    }
    let mut theta = DVector::from_vec(mple(data, layout));
    let per_chain = cfg.draws_per_chain();
    let mut boundary_run = 0usize;
    let mut trace = Vec::new();
    for iteration in 0..cfg.max_iterations {
        let purpose = Purpose::Fit {
            phase,
            iteration: iteration as u32,
        };
        let draws = sample_transitions(data, layout, theta.as_slice(), &cfg.sampler, cfg.chains, per_chain, purpose)?;
        let moments = SampleMoments::new(data, layout, &draws);

        let boundary = moments.boundary();
        if let Some(&k) = boundary.iter().find(|&&k| moments.is_constant(k)) {
            if iteration == 0 {
                return Err(Error::Degenerate {
                    label: layout.labels[k].clone(),
                    observed: moments.observed[k],
                });
            }
        }
        if boundary.is_empty() {
            boundary_run = usize::MAX;
        } else if boundary_run != usize::MAX {
            boundary_run += 1;
            if boundary_run >= BOUNDARY_LIMIT {
                let k = boundary[0];
                return Err(Error::Degenerate {
                    label: layout.labels[k].clone(),
                    observed: moments.observed[k],
                });
            }
        }

        let surrogate = Surrogate::new(data, layout, &draws);
        let mut radius = cfg.trust_radius;
        let (mut delta, mut eval) = surrogate.maximize(radius);
        while eval.min_ess < MIN_ESS_FRACTION && radius > 1e-6 {
            radius *= 0.5;
            (delta, eval) = surrogate.maximize(radius);
        }

        let mcse = moments.moment_mcse();
        let resid = &moments.observed - &moments.expected;
        let moment_ok = (0..p).all(|k| resid[k].abs() <= cfg.moment_tolerance * mcse[k]);
        let step = delta.amax();
        trace.push(IterationTrace {
            iteration,
            theta: theta.as_slice().to_vec(),
            step,
            max_moment_z: (0..p)
                .map(|k| if mcse[k] > 0.0 { resid[k].abs() / mcse[k] } else { 0.0 })
                .fold(0.0, f64::max),
            trust_radius: radius,
        });

        if moment_ok && step < cfg.step_tolerance && boundary.is_empty() {
            let information = moments.information.clone();
            let covariance = inverse_information(&information, &layout.labels)?;
            let mcmc_cov = &covariance * &moments.mc_var * &covariance;
            let mcmc_se: Vec<f64> = (0..p).map(|k| mcmc_cov[(k, k)].max(0.0).sqrt()).collect();
            let estimates = (&theta + &delta).as_slice().to_vec();
            let per_draw_var: Vec<f64> = (0..p).map(|k| information[(k, k)]).collect();
            let ess = (0..p)
                .map(|k| {
                    if moments.mc_var[(k, k)] > 0.0 {
                        per_draw_var[k] / moments.mc_var[(k, k)]
                    } else {
                        0.0
                    }
                })
                .collect();
            return Ok(PhaseFit {
                phase,
                labels: layout.labels.clone(),
                std_errors: (0..p)
                    .map(|k| (covariance[(k, k)].max(0.0) + mcmc_se[k] * mcmc_se[k]).sqrt())
                    .collect(),
                estimates,
                sampled_at: theta.as_slice().to_vec(),
                covariance: to_rows(&covariance),
                mcmc_se,
                observed: moments.observed.as_slice().to_vec(),
                expected: moments.expected.as_slice().to_vec(),
                moment_mcse: mcse,
                ess,
                acceptance: draws.iter().map(|d| d.acceptance).collect(),
                free_dyads,
                iterations: iteration + 1,
                trace,
                loglik: None,
                deviance: Vec::new(),
            });
        }
        theta += delta;
    }
    Err(Error::NotConverged(cfg.max_iterations))
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}
