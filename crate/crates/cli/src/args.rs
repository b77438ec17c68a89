use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stergm_core::estimation::{FitConfig, Heterogeneity};
use stergm_core::{Proposal, SamplerConfig};

#[derive(Parser, Debug)]
#[command(name = "stergm", version, about = "Separable temporal ERGMs for network panels")]
pub struct Cli {
    /// Worker threads for sampling (default: all cores).
    #[arg(long, global = true, env = "STERGM_THREADS")]
    pub threads: Option<usize>,
    /// Print only errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    /// Print per-iteration estimation traces.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a panel forward from a starting network.
    Simulate(SimulateArgs),
    /// Fit a model to a panel by conditional maximum likelihood.
    Fit(FitArgs),
    /// Check a panel manifest and summarize its transitions.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProposalArg {
    Uniform,
    Tnt,
}

#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    /// Proposals before the first retained draw (default 10 × free dyads).
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Proposals between retained draws (default: number of free dyads).
    #[arg(long)]
    pub interval: Option<usize>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub proposal: ProposalArg,
    /// Reject states in which any node sends more than this many ties.
    #[arg(long)]
    pub max_out_degree: Option<usize>,
}

impl SamplerArgs {
    pub fn config(&self, seed: u64, n_draws: usize) -> SamplerConfig {
        SamplerConfig {
            burn_in: self.burn_in,
            interval: self.interval,
            n_draws,
            proposal: match self.proposal {
                ProposalArg::Uniform => Proposal::UniformFreeDyad,
                ProposalArg::Tnt => Proposal::Tnt,
            },
            seed,
            max_out_degree: self.max_out_degree,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Model file; every term needs a coefficient.
    #[arg(long)]
    pub model: PathBuf,
    /// Starting network as a `tail,head` edge list (needs --n).
    #[arg(long)]
    pub init_network: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub directed: bool,
    /// Density of a random starting network when no --init-network is given.
    #[arg(long, default_value_t = 0.0)]
    pub density: f64,
    /// Node attribute CSV (`node,<attr>...`).
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Dyad covariate as NAME=PATH to a dense n×n CSV; repeatable.
    #[arg(long = "dyad-cov", value_name = "NAME=PATH")]
    pub dyad_covs: Vec<String>,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for the manifest and snapshots.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sampler: SamplerArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    None,
    Edges,
    Full,
}

impl From<SchemeArg> for Heterogeneity {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::None => Heterogeneity::None,
            SchemeArg::Edges => Heterogeneity::Edges,
            SchemeArg::Full => Heterogeneity::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DevianceArg {
    /// Null and fitted model only.
    Model,
    /// The nested ladder up to the fitted scheme.
    Ladder,
    Off,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Panel manifest (JSON).
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    pub heterogeneous: SchemeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ladder")]
    pub deviance: DevianceArg,
    /// Sampled networks per transition and iteration.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
    #[arg(long, default_value_t = 30)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub step_tolerance: f64,
    #[arg(long, default_value_t = 2.0)]
    pub moment_tolerance: f64,
    #[arg(long, default_value_t = 1.0)]
    pub trust_radius: f64,
    #[arg(long, default_value_t = 16)]
    pub bridge_points: usize,
    /// Sampled networks per transition at each bridge point.
    #[arg(long, default_value_t = 500)]
    pub bridge_draws: usize,
    #[command(flatten)]
    pub sampler: SamplerArgs,
}

impl FitArgs {
    pub fn config(&self) -> FitConfig {
        FitConfig {
            sampler: self.sampler.config(self.seed, self.draws),
            chains: self.chains,
            max_iterations: self.max_iterations,
            step_tolerance: self.step_tolerance,
            moment_tolerance: self.moment_tolerance,
            trust_radius: self.trust_radius,
            bridge_points: self.bridge_points,
            bridge_draws: self.bridge_draws,
            deviance: self.deviance == DevianceArg::Model,
        }
    }
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Panel manifest (JSON).
    #[arg(long)]
    pub series: PathBuf,
    /// Also check that this model file binds to the panel's covariates.
    #[arg(long)]
    pub model: Option<PathBuf>,
}
