//! Fixtures shared by the benchmarks.

use stergm_core::{
    random_network, simulate_series, Coefficients, Covariates, ModelSpec, Network, NetworkSeries, SamplerConfig,
    StergmModel,
};

pub const DIRECTED_MODEL: &str = "[formation]
edges = -3.5
reciprocity = 1.5
transitive_ties = 0.3
cyclical_ties = -0.2
odeg_pop_sqrt = 0.1
[dissolution]
edges = 1.5
reciprocity = 0.8
";

pub fn spec(text: &str) -> ModelSpec {
    text.parse().expect("benchmark model parses")
}

pub fn bind(text: &str, directed: bool) -> (StergmModel, Coefficients) {
    let (model, coefs) = spec(text)
        .bind_with_coefs(&Covariates::default(), directed)
        .expect("benchmark model binds");
    let (f, d) = coefs.expect("benchmark model has coefficients");
    (model, Coefficients::new(f, d))
}

pub fn network(n: usize, directed: bool, density: f64) -> Network {
    random_network(n, directed, density, 17).expect("valid density")
}

/// A short simulated panel from `DIRECTED_MODEL`.
pub fn panel(n: usize, steps: usize) -> NetworkSeries {
    let (model, coefs) = bind(DIRECTED_MODEL, true);
    let cfg = SamplerConfig { seed: 9, ..Default::default() };
    simulate_series(&network(n, true, 0.05), &model, &coefs, steps, &cfg, Covariates::default())
        .expect("simulation succeeds")
        .0
}
