//! Metropolis–Hastings sampling of formation and dissolution networks given
//! the previous network, and forward simulation of the separable process.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::covariates::Covariates;
use crate::error::{Error, Result};
use crate::network::{Dyad, Network};
use crate::rng::{self, ChainRng, Purpose};
use crate::series::NetworkSeries;
use crate::stats::{Coefficients, Phase, PhaseModel, StergmModel};
use crate::transition::{apply_transition, TransitionDecomposition, TransitionSummary};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Uniform over the phase's free dyads.
    #[default]
    UniformFreeDyad,
    /// Tie/no-tie: half the time pick among dyads whose state differs from
    /// the previous network (new ties in formation, dissolved ties in
    /// dissolution), otherwise uniform over free dyads.
    Tnt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Proposals before the first retained draw; default 10·|free dyads|.
    pub burn_in: Option<usize>,
    /// Proposals between retained draws; default |free dyads|.
    pub interval: Option<usize>,
    pub n_draws: usize,
    pub proposal: Proposal,
    pub seed: u64,
    pub max_out_degree: Option<usize>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: None,
            interval: None,
            n_draws: 1000,
            proposal: Proposal::UniformFreeDyad,
            seed: 0,
            max_out_degree: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in == Some(0) {
            return Err(Error::Config("burn_in must be positive".into()));
        }
        if self.interval == Some(0) {
            return Err(Error::Config("interval must be positive".into()));
        }
        if self.n_draws == 0 {
            return Err(Error::Config("n_draws must be positive".into()));
        }
        Ok(())
    }

    pub fn burn_in_for(&self, free: usize) -> usize {
        self.burn_in.unwrap_or(10 * free)
    }

    pub fn interval_for(&self, free: usize) -> usize {
        self.interval.unwrap_or(free).max(1)
    }
}

/// The sample space of one phase: networks reachable from `anchor` by
/// toggling free dyads only.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    pub phase: Phase,
    pub anchor: Network,
    pub free: Vec<Dyad>,
}

impl PhaseSpace {
    pub fn new(phase: Phase, anchor: Network) -> Self {
        let free = phase.free_dyads(&anchor);
        PhaseSpace { phase, anchor, free }
    }

    /// Whether `y` lies in the space.
    pub fn contains(&self, y: &Network) -> bool {
        match self.phase {
            Phase::Formation => self.anchor.is_subset(y),
            Phase::Dissolution => y.is_subset(&self.anchor),
        }
    }
}

const NOT_FREE: u32 = u32::MAX;

/// A single Metropolis–Hastings chain over a [`PhaseSpace`].
pub struct PhaseChain<'a> {
    space: &'a PhaseSpace,
    model: &'a PhaseModel,
    eta: &'a [f64],
    proposal: Proposal,
    max_out_degree: Option<usize>,
    rng: ChainRng,
    y: Network,
    stats: Vec<f64>,
    /// Dense dyad → free-dyad index lookup.
    free_index: Vec<u32>,
    /// Free-dyad indices whose state differs from the anchor.
    discordant: Vec<u32>,
    /// Position in `discordant`, or NOT_FREE.
    discordant_pos: Vec<u32>,
    delta: Vec<f64>,
    proposed: u64,
    accepted: u64,
}

impl<'a> PhaseChain<'a> {
    /// Starts at the anchor.
    pub fn new(
        space: &'a PhaseSpace,
        model: &'a PhaseModel,
        eta: &'a [f64],
        cfg: &SamplerConfig,
        rng: ChainRng,
    ) -> Result<Self> {
        Self::from_state(space, model, eta, cfg, rng, space.anchor.clone())
    }

    /// Starts at `state`, which must lie in the space.
    pub fn from_state(
        space: &'a PhaseSpace,
        model: &'a PhaseModel,
        eta: &'a [f64],
        cfg: &SamplerConfig,
        rng: ChainRng,
        state: Network,
    ) -> Result<Self> {
        cfg.validate()?;
        if model.phase != space.phase {
            return Err(Error::InvalidModel(format!(
                "{} statistics used to sample the {} phase",
                model.phase, space.phase
            )));
        }
        if eta.len() != model.dim() {
            return Err(Error::InvalidModel(format!(
                "{} coefficients for {} {} statistics",
                eta.len(),
                model.dim(),
                space.phase
            )));
        }
        if let Some(x) = eta.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidModel(format!("coefficient {x} is not finite")));
        }
        if !state.same_shape(&space.anchor) || !space.contains(&state) {
            return Err(Error::Containment(format!(
                "initial state is outside the {} sample space",
                space.phase
            )));
        }
        if let Some(c) = cfg.max_out_degree {
            for (what, net) in [("previous network", &space.anchor), ("initial state", &state)] {
                if let Some(v) = (0..net.n()).find(|&v| net.out_degree(v) > c) {
                    return Err(Error::Infeasible(format!(
                        "{what}: node {} has out-degree {} > max_out_degree {c}",
                        v + 1,
                        net.out_degree(v)
                    )));
                }
            }
        }
        let n = space.anchor.n();
        let mut free_index = vec![NOT_FREE; n * n];
        for (k, d) in space.free.iter().enumerate() {
            free_index[d.tail * n + d.head] = k as u32;
        }
        let mut chain = PhaseChain {
            space,
            model,
            eta,
            proposal: cfg.proposal,
            max_out_degree: cfg.max_out_degree,
            rng,
            stats: model.evaluate(&state, &space.anchor),
            y: state,
            free_index,
            discordant: Vec::new(),
            discordant_pos: vec![NOT_FREE; space.free.len()],
            delta: vec![0.0; model.dim()],
            proposed: 0,
            accepted: 0,
        };
        for (k, &d) in space.free.iter().enumerate() {
            if chain.y.has(d) != space.anchor.has(d) {
                chain.push_discordant(k as u32);
            }
        }
        Ok(chain)
    }

    pub fn state(&self) -> &Network {
        &self.y
    }

    /// g(current state, anchor), maintained incrementally.
    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn push_discordant(&mut self, k: u32) {
        self.discordant_pos[k as usize] = self.discordant.len() as u32;
        self.discordant.push(k);
    }

    fn remove_discordant(&mut self, k: u32) {
        let pos = self.discordant_pos[k as usize] as usize;
        let last = *self.discordant.last().expect("discordant set is non-empty");
        self.discordant.swap_remove(pos);
        if last != k {
            self.discordant_pos[last as usize] = pos as u32;
        }
        self.discordant_pos[k as usize] = NOT_FREE;
    }

    /// Probability that the TNT proposal picks free dyad `k`, given whether it
    /// is discordant and the size of the discordant set.
    fn tnt_prob(&self, is_discordant: bool, n_discordant: usize) -> f64 {
        let f = self.space.free.len() as f64;
        if n_discordant == 0 {
            1.0 / f
        } else {
            0.5 * (is_discordant as u8 as f64) / n_discordant as f64 + 0.5 / f
        }
    }

    fn violates_constraint(&self, d: Dyad) -> bool {
        match self.max_out_degree {
            Some(c) => {
                self.y.out_degree(d.tail) >= c
                    || (!self.y.is_directed() && self.y.out_degree(d.head) >= c)
            }
            None => false,
        }
    }

    /// One proposal; returns whether it was accepted.
    ///
    /// With probability 1/(F+1) the step leaves the state alone. Without
    /// this the chain is periodic when every toggle is accepted (η = 0):
    /// the parity of the number of toggled dyads would be fixed by the
    /// step count.
    pub fn step(&mut self) -> bool {
        let n_free = self.space.free.len();
        if n_free == 0 || self.rng.random_range(0..=n_free) == n_free {
            return false;
        }
        self.proposed += 1;
        let k = match self.proposal {
            Proposal::Tnt if !self.discordant.is_empty() && self.rng.random::<bool>() => {
                self.discordant[self.rng.random_range(0..self.discordant.len())]
            }
            _ => self.rng.random_range(0..n_free) as u32,
        };
        let d = self.space.free[k as usize];
        let adding = !self.y.has(d);
        let u: f64 = self.rng.random();
        if adding && self.violates_constraint(d) {
            return false;
        }
        self.model.delta_on(&self.y, &self.space.anchor, d, &mut self.delta);
        let sign = if adding { 1.0 } else { -1.0 };
        let mut log_ratio = sign * dot(self.eta, &self.delta);
        if self.proposal == Proposal::Tnt {
            let was_discordant = self.discordant_pos[k as usize] != NOT_FREE;
            let n_disc = self.discordant.len();
            let n_disc_after = if was_discordant { n_disc - 1 } else { n_disc + 1 };
            log_ratio += self.tnt_prob(!was_discordant, n_disc_after).ln()
                - self.tnt_prob(was_discordant, n_disc).ln();
        }
        if log_ratio >= 0.0 || u < log_ratio.exp() {
            self.y.toggle(d);
            for (s, x) in self.stats.iter_mut().zip(&self.delta) {
                *s += sign * x;
            }
            if self.discordant_pos[k as usize] == NOT_FREE {
                self.push_discordant(k);
            } else {
                self.remove_discordant(k);
            }
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    pub fn advance(&mut self, proposals: usize) {
        for _ in 0..proposals {
            self.step();
        }
    }

    /// Free-dyad index of `d`, if it is free.
    pub fn free_index(&self, d: Dyad) -> Option<usize> {
        let k = self.free_index[d.tail * self.y.n() + d.head];
        (k != NOT_FREE).then_some(k as usize)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Retained draws from one phase chain.
#[derive(Clone, Debug)]
pub struct PhaseSample {
    /// One statistic vector g(y, anchor) per retained draw.
    pub stats: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub last_state: Network,
}

/// Runs a chain from the anchor: burn-in, then `n_draws` draws spaced by
/// `interval` proposals. `visit` sees every retained state.
pub fn sample_phase_with<F>(
    space: &PhaseSpace,
    model: &PhaseModel,
    eta: &[f64],
    cfg: &SamplerConfig,
    rng: ChainRng,
    start: Option<Network>,
    mut visit: F,
) -> Result<PhaseSample>
where
    F: FnMut(&Network, &[f64]),
{
    let mut chain = match start {
        Some(s) => PhaseChain::from_state(space, model, eta, cfg, rng, s)?,
        None => PhaseChain::new(space, model, eta, cfg, rng)?,
    };
    let free = space.free.len();
    chain.advance(cfg.burn_in_for(free));
    let interval = cfg.interval_for(free);
    let mut stats = Vec::with_capacity(cfg.n_draws);
    for k in 0..cfg.n_draws {
        if k > 0 {
            chain.advance(interval);
        }
        debug_assert!(space.contains(chain.state()));
        visit(chain.state(), chain.stats());
        stats.push(chain.stats().to_vec());
    }
    Ok(PhaseSample {
        stats,
        acceptance_rate: chain.acceptance_rate(),
        last_state: chain.y,
    })
}

/// Statistic draws from P(Y | previous network; η) for one phase, using the
/// stream `(cfg.seed, Raw(0), 0, 0)`.
pub fn sample_phase(
    space: &PhaseSpace,
    model: &PhaseModel,
    eta: &[f64],
    cfg: &SamplerConfig,
) -> Result<PhaseSample> {
    let rng = rng::stream(cfg.seed, Purpose::Raw(0), 0, 0);
    sample_phase_with(space, model, eta, cfg, rng, None, |_, _| {})
}

/// Bernoulli(density) network on the stream `(seed, Initial, 0, 0)`.
pub fn random_network(n: usize, directed: bool, density: f64, seed: u64) -> Result<Network> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Config(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = rng::stream(seed, Purpose::Initial, 0, 0);
    let mut y = Network::empty(n, directed);
    for d in y.all_dyads().collect::<Vec<_>>() {
        if rng.random::<f64>() < density {
            y.toggle(d);
        }
    }
    Ok(y)
}

/// One simulated transition with both latent phase networks.
#[derive(Clone, Debug)]
pub struct SimulatedStep {
    pub decomposition: TransitionDecomposition,
    pub next: Network,
    pub formation_stats: Vec<f64>,
    pub dissolution_stats: Vec<f64>,
}

impl SimulatedStep {
    pub fn summary(&self, prev: &Network) -> TransitionSummary {
        self.decomposition.summary(prev)
    }
}

fn draw_phase(
    phase: Phase,
    prev: &Network,
    model: &PhaseModel,
    eta: &[f64],
    cfg: &SamplerConfig,
    time: u64,
) -> Result<(Network, Vec<f64>)> {
    let space = PhaseSpace::new(phase, prev.clone());
    let draw_cfg = SamplerConfig {
        n_draws: 1,
        ..cfg.clone()
    };
    let rng = rng::stream(cfg.seed, Purpose::Simulate(phase), time, 0);
    let sample = sample_phase_with(&space, model, eta, &draw_cfg, rng, None, |_, _| {})?;
    let stats = sample.stats.into_iter().next().expect("one draw");
    Ok((sample.last_state, stats))
}

/// Draws y⁺ and y⁻ independently given `prev` and combines them. `time`
/// selects the random streams, so step `t` of a series is reproducible on
/// its own.
pub fn simulate_step(
    prev: &Network,
    model: &StergmModel,
    coefs: &Coefficients,
    cfg: &SamplerConfig,
    time: u64,
) -> Result<SimulatedStep> {
    model.check_coefficients(coefs)?;
    let (form, diss) = rayon::join(
        || draw_phase(Phase::Formation, prev, &model.formation, &coefs.formation, cfg, time),
        || draw_phase(Phase::Dissolution, prev, &model.dissolution, &coefs.dissolution, cfg, time),
    );
    let (y_plus, formation_stats) = form?;
    let (y_minus, dissolution_stats) = diss?;
    let decomposition = TransitionDecomposition { y_plus, y_minus };
    let next = apply_transition(prev, &decomposition)?;
    Ok(SimulatedStep {
        decomposition,
        next,
        formation_stats,
        dissolution_stats,
    })
}

/// `steps` transitions starting from `y0`; the result has `steps + 1`
/// snapshots.
pub fn simulate_series(
    y0: &Network,
    model: &StergmModel,
    coefs: &Coefficients,
    steps: usize,
    cfg: &SamplerConfig,
    covariates: Covariates,
) -> Result<(NetworkSeries, Vec<SimulatedStep>)> {
    if steps == 0 {
        return Err(Error::Config("number of steps must be at least 1".into()));
    }
    let mut networks = vec![y0.clone()];
    let mut records = Vec::with_capacity(steps);
    for t in 0..steps {
        let step = simulate_step(networks.last().expect("non-empty"), model, coefs, cfg, t as u64)?;
        networks.push(step.next.clone());
        records.push(step);
    }
    Ok((NetworkSeries::new(networks, covariates)?, records))
}
