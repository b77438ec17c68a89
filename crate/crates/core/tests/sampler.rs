mod common;

use std::collections::HashMap;

use common::*;
use stergm_core::rng::{stream, Purpose};
use stergm_core::sampler::sample_phase_with;
use stergm_core::stats::{ModelSpec, PhaseModel};
use stergm_core::{
    simulate_series, simulate_step, Coefficients, Covariates, Network, Phase, PhaseSpace, PhaseSpec, Proposal,
    SamplerConfig, TermSpec,
};

fn phase_model(phase: Phase, terms: &[&str]) -> PhaseModel {
    let ps = PhaseSpec::new(terms.iter().map(|t| t.parse::<TermSpec>().unwrap()));
    let spec = match phase {
        Phase::Formation => ModelSpec::new(ps, PhaseSpec::default()),
        Phase::Dissolution => ModelSpec::new(PhaseSpec::default(), ps),
    };
    spec.bind(&Covariates::default(), true).unwrap().phase(phase).clone()
}

/// Total-variation distance between sampled states and the exact phase
/// distribution.
fn tv_distance(prev: &Network, phase: Phase, terms: &[&str], g: StatFn, eta: &[f64], proposal: Proposal, draws: usize) -> f64 {
    let exact = phase_distribution(prev, phase, g, eta);
    let model = phase_model(phase, terms);
    let space = PhaseSpace::new(phase, prev.clone());
    let cfg = SamplerConfig {
        n_draws: draws,
        proposal,
        seed: 17,
        ..Default::default()
    };
    let mut counts: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    sample_phase_with(&space, &model, eta, &cfg, stream(17, Purpose::Raw(3), 0, 0), None, |y, _| {
        *counts.entry(key(y)).or_default() += 1;
    })
    .unwrap();
    let mut tv = 0.0;
    let mut seen = 0;
    for (y, p) in &exact {
        let c = counts.get(&key(y)).copied().unwrap_or(0);
        seen += c;
        tv += (c as f64 / draws as f64 - p).abs();
    }
    assert_eq!(seen, draws, "sampler left the phase space");
    tv / 2.0
}

fn anchor() -> Network {
    // six ties: six free dyads in each phase
    Network::from_edges(4, true, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 1), (0, 3)]).unwrap()
}

#[test]
fn sampled_states_match_enumeration() {
    let models: [(&[&str], StatFn, [f64; 2]); 3] = [
        (&["edges"], edges, [-0.4, 0.0]),
        (&["edges", "reciprocity"], edges_mutual, [-0.8, 1.2]),
        (&["edges", "transitive_ties"], edges_transitive, [-0.6, 0.7]),
    ];
    for (terms, g, eta) in models {
        let eta = &eta[..terms.len()];
        for phase in Phase::BOTH {
            for proposal in [Proposal::UniformFreeDyad, Proposal::Tnt] {
                let tv = tv_distance(&anchor(), phase, terms, g, eta, proposal, 100_000);
                assert!(tv < 0.02, "{terms:?} {phase} {proposal:?}: TV {tv}");
            }
        }
    }
}

#[test]
fn formation_probability_is_inverse_logit() {
    // a single free dyad: P(form) = ilogit(log 3) = 0.75
    let prev = Network::from_edges(2, true, [(1, 0)]).unwrap();
    let model = phase_model(Phase::Formation, &["edges"]);
    let space = PhaseSpace::new(Phase::Formation, prev);
    let cfg = SamplerConfig {
        n_draws: 40_000,
        interval: Some(3),
        ..Default::default()
    };
    let mut formed = 0;
    sample_phase_with(&space, &model, &[3f64.ln()], &cfg, stream(3, Purpose::Raw(0), 0, 0), None, |y, _| {
        formed += y.has_tie(0, 1) as usize;
    })
    .unwrap();
    let p = formed as f64 / 40_000.0;
    assert!((p - 0.75).abs() < 0.01, "{p}");
}

#[test]
fn survival_probability_matches_dissolution_coefficient() {
    // every tie of a 6-node cycle survives with probability ilogit(1)
    let prev = Network::from_edges(6, true, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
    let coefs = Coefficients::new(vec![-50.0], vec![1.0]);
    let spec = ModelSpec::new(PhaseSpec::new([TermSpec::edges()]), PhaseSpec::new([TermSpec::edges()]));
    let model = spec.bind(&Covariates::default(), true).unwrap();
    let mut survived = 0;
    let reps = 4000;
    for t in 0..reps {
        let step = simulate_step(&prev, &model, &coefs, &SamplerConfig::default(), t).unwrap();
        survived += step.next.edge_count();
    }
    let p = survived as f64 / (6 * reps) as f64;
    let oracle = 1.0 / (1.0 + (-1f64).exp());
    assert!((p - oracle).abs() < 0.015, "{p} vs {oracle}");
}

#[test]
fn zero_coefficients_give_uniform_next_network() {
    // n = 3 directed: every one of the 64 networks is equally likely
    let prev = Network::from_edges(3, true, [(0, 1), (2, 0)]).unwrap();
    let spec = ModelSpec::new(PhaseSpec::new([TermSpec::edges()]), PhaseSpec::new([TermSpec::edges()]));
    let model = spec.bind(&Covariates::default(), true).unwrap();
    let coefs = Coefficients::new(vec![0.0], vec![0.0]);
    let reps = 64_000;
    let mut counts: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for t in 0..reps {
        let step = simulate_step(&prev, &model, &coefs, &SamplerConfig::default(), t).unwrap();
        *counts.entry(key(&step.next)).or_default() += 1;
    }
    assert_eq!(counts.len(), 64);
    let chi2: f64 = counts
        .values()
        .map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0)
        .sum();
    // 63 d.f.; the 0.999 quantile is about 103
    assert!(chi2 < 103.0, "chi-square {chi2}");
}

#[test]
fn spell_lengths_are_geometric() {
    // no formation, dissolution log-odds log 4: mean spell 1 + e^θ = 5
    let n = 60;
    let y0 = Network::complete(n, false);
    let spec = ModelSpec::new(PhaseSpec::new([TermSpec::edges()]), PhaseSpec::new([TermSpec::edges()]));
    let model = spec.bind(&Covariates::default(), false).unwrap();
    let coefs = Coefficients::new(vec![-50.0], vec![4f64.ln()]);
    let cfg = SamplerConfig { seed: 5, ..Default::default() };
    let (series, _) = simulate_series(&y0, &model, &coefs, 40, &cfg, Covariates::default()).unwrap();
    let spells = series.spells();
    assert!(spells.completed.len() >= 1000, "{}", spells.completed.len());
    let mean = spells.mean_completed().unwrap();
    assert!((mean - 5.0).abs() < 0.25, "mean spell {mean}");
    // constant hazard: P(end at k | lasted k−1) ≈ 0.2 for the first few k
    for k in 1..=4 {
        let at_risk = spells.completed.iter().filter(|&&l| l >= k).count();
        let ended = spells.completed.iter().filter(|&&l| l == k).count();
        let hazard = ended as f64 / at_risk as f64;
        assert!((hazard - 0.2).abs() < 0.03, "hazard at {k}: {hazard}");
    }
}

#[test]
fn simulation_is_deterministic_given_seed() {
    let y0 = Network::from_edges(10, true, [(0, 1), (2, 3), (4, 5)]).unwrap();
    let spec: ModelSpec = "[formation]\nedges = -2\nreciprocity = 1\n[dissolution]\nedges = 1\n".parse().unwrap();
    let (model, coefs) = spec.bind_with_coefs(&Covariates::default(), true).unwrap();
    let (f, d) = coefs.unwrap();
    let coefs = Coefficients::new(f, d);
    let cfg = SamplerConfig { seed: 9, ..Default::default() };
    let run = || simulate_series(&y0, &model, &coefs, 5, &cfg, Covariates::default()).unwrap().0;
    let (a, b) = (run(), run());
    assert_eq!(a.networks(), b.networks());
    let other = simulate_series(&y0, &model, &coefs, 5, &SamplerConfig { seed: 10, ..cfg.clone() }, Covariates::default())
        .unwrap()
        .0;
    assert_ne!(a.networks(), other.networks());
}
