//! Oracles shared by the integration tests. Everything here is computed by
//! brute force from first principles and does not call the library's
//! statistic or likelihood code.
#![allow(dead_code)]

use stergm_core::{Dyad, Network, NetworkSeries, Phase};

pub type StatFn = fn(&Network) -> Vec<f64>;

/// Ordered (directed) or unordered dyads of an n-node network, self-loops
/// excluded.
pub fn dyads(n: usize, directed: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn free_pairs(prev: &Network, phase: Phase) -> Vec<(usize, usize)> {
    dyads(prev.n(), prev.is_directed())
        .into_iter()
        .filter(|&(i, j)| match phase {
            Phase::Formation => !prev.has_tie(i, j),
            Phase::Dissolution => prev.has_tie(i, j),
        })
        .collect()
}

fn with_ties(n: usize, directed: bool, ties: &[(usize, usize)]) -> Network {
    Network::from_edges(n, directed, ties.iter().copied()).unwrap()
}

fn tie_list(y: &Network) -> Vec<(usize, usize)> {
    dyads(y.n(), y.is_directed())
        .into_iter()
        .filter(|&(i, j)| y.has_tie(i, j))
        .collect()
}

/// Every network of the phase space of `prev`.
pub fn phase_space(prev: &Network, phase: Phase) -> Vec<Network> {
    let free = free_pairs(prev, phase);
    let base = tie_list(prev);
    (0..1usize << free.len())
        .map(|mask| {
            let chosen: Vec<(usize, usize)> = free
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &d)| d)
                .collect();
            let ties: Vec<(usize, usize)> = match phase {
                Phase::Formation => base.iter().chain(&chosen).copied().collect(),
                Phase::Dissolution => base.iter().filter(|d| !chosen.contains(d)).copied().collect(),
            };
            with_ties(prev.n(), prev.is_directed(), &ties)
        })
        .collect()
}

/// Key identifying a network by its tie set.
pub fn key(y: &Network) -> Vec<(usize, usize)> {
    tie_list(y)
}

pub fn edges(y: &Network) -> Vec<f64> {
    vec![tie_list(y).len() as f64]
}

pub fn mutual(y: &Network) -> f64 {
    let n = y.n();
    let mut c = 0;
    for i in 0..n {
        for j in i + 1..n {
            if y.has_tie(i, j) && y.has_tie(j, i) {
                c += 1;
            }
        }
    }
    c as f64
}

/// Ties i→j with at least one two-path i→k→j.
pub fn transitive(y: &Network) -> f64 {
    let n = y.n();
    tie_list(y)
        .iter()
        .filter(|&&(i, j)| (0..n).any(|k| k != i && k != j && y.has_tie(i, k) && y.has_tie(k, j)))
        .count() as f64
}

pub fn edges_mutual(y: &Network) -> Vec<f64> {
    vec![edges(y)[0], mutual(y)]
}

pub fn edges_transitive(y: &Network) -> Vec<f64> {
    vec![edges(y)[0], transitive(y)]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact distribution over the phase space: (network, probability).
pub fn phase_distribution(prev: &Network, phase: Phase, g: StatFn, eta: &[f64]) -> Vec<(Network, f64)> {
    let space = phase_space(prev, phase);
    let w: Vec<f64> = space.iter().map(|y| dot(eta, &g(y))).collect();
    let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = w.iter().map(|x| (x - m).exp()).sum();
    space
        .into_iter()
        .zip(w)
        .map(|(y, x)| (y, (x - m).exp() / z))
        .collect()
}

/// log P(observed phase network | prev) by enumeration.
pub fn phase_loglik(prev: &Network, observed: &Network, phase: Phase, g: StatFn, eta: &[f64]) -> f64 {
    let space = phase_space(prev, phase);
    let w: Vec<f64> = space.iter().map(|y| dot(eta, &g(y))).collect();
    let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lz = m + w.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    dot(eta, &g(observed)) - lz
}

pub fn union(a: &Network, b: &Network) -> Network {
    let ties: Vec<_> = dyads(a.n(), a.is_directed())
        .into_iter()
        .filter(|&(i, j)| a.has_tie(i, j) || b.has_tie(i, j))
        .collect();
    with_ties(a.n(), a.is_directed(), &ties)
}

pub fn intersection(a: &Network, b: &Network) -> Network {
    let ties: Vec<_> = dyads(a.n(), a.is_directed())
        .into_iter()
        .filter(|&(i, j)| a.has_tie(i, j) && b.has_tie(i, j))
        .collect();
    with_ties(a.n(), a.is_directed(), &ties)
}

/// Log-likelihood of one phase over a series.
pub fn series_phase_loglik(series: &NetworkSeries, phase: Phase, g: StatFn, eta: &[f64]) -> f64 {
    series
        .transitions()
        .map(|(prev, next)| {
            let obs = match phase {
                Phase::Formation => union(prev, next),
                Phase::Dissolution => intersection(prev, next),
            };
            phase_loglik(prev, &obs, phase, g, eta)
        })
        .sum()
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// MLE of a logistic intercept from k successes in n trials, by bisection
/// on the score equation k − n·ilogit(θ) = 0.
pub fn logistic_intercept_mle(k: usize, n: usize) -> f64 {
    let score = |t: f64| k as f64 - n as f64 / (1.0 + (-t).exp());
    let (mut lo, mut hi) = (-30.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizes `f` over a box by a dense grid followed by compass search.
pub fn maximize(f: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], grid: usize) -> Vec<f64> {
    let dim = lo.len();
    let mut best = lo.to_vec();
    let mut best_val = f64::NEG_INFINITY;
    let total = grid.pow(dim as u32);
    for idx in 0..total {
        let mut rest = idx;
        let x: Vec<f64> = (0..dim)
            .map(|k| {
                let i = rest % grid;
                rest /= grid;
                lo[k] + (hi[k] - lo[k]) * i as f64 / (grid - 1) as f64
            })
            .collect();
        let v = f(&x);
        if v > best_val {
            best_val = v;
            best = x;
        }
    }
    let mut step = (0..dim).map(|k| (hi[k] - lo[k]) / (grid - 1) as f64).fold(0.0, f64::max);
    while step > 1e-9 {
        let mut improved = false;
        for k in 0..dim {
            for s in [-step, step] {
                let mut x = best.clone();
                x[k] += s;
                let v = f(&x);
                if v > best_val {
                    best_val = v;
                    best = x;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

pub fn dyad(y: &Network, i: usize, j: usize) -> Dyad {
    y.dyad(i, j)
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, name: &str, pass: bool, detail: String) -> bool {
    println!("[{}] criterion {id}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
