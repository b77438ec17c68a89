use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stergm_bench::{bind, network, panel, spec, DIRECTED_MODEL};
use stergm_core::estimation::{cmle_fit, FitConfig};
use stergm_core::rng::{stream, Purpose};
use stergm_core::sampler::PhaseChain;
use stergm_core::{PhaseSpace, Proposal, SamplerConfig};

fn mh_steps(c: &mut Criterion) {
    let (model, coefs) = bind(DIRECTED_MODEL, true);
    let mut group = c.benchmark_group("mh_steps");
    for n in [50, 200] {
        let prev = network(n, true, 0.05);
        for (name, proposal) in [("uniform", Proposal::UniformFreeDyad), ("tnt", Proposal::Tnt)] {
            let space = PhaseSpace::new(model.formation.phase, prev.clone());
            let cfg = SamplerConfig { proposal, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                let mut chain = PhaseChain::new(
                    &space,
                    &model.formation,
                    &coefs.formation,
                    &cfg,
                    stream(1, Purpose::Raw(0), 0, 0),
                )
                .unwrap();
                b.iter(|| {
                    chain.advance(1000);
                    black_box(chain.stats()[0])
                })
            });
        }
    }
    group.finish();
}

fn change_scores(c: &mut Criterion) {
    let (model, _) = bind(DIRECTED_MODEL, true);
    let prev = network(100, true, 0.05);
    let y = network(100, true, 0.08);
    let dyads = model.formation.phase.free_dyads(&prev);
    let mut group = c.benchmark_group("change_scores");
    for (k, term) in model.formation.terms.iter().enumerate() {
        group.bench_function(&term.label, |b| {
            b.iter(|| {
                let mut acc = 0.0;
                for &d in &dyads {
                    acc += term.term.delta_on(&y, &prev, d);
                }
                black_box((k, acc))
            })
        });
    }
    group.finish();
}

fn fit(c: &mut Criterion) {
    let series = panel(30, 3);
    let spec = spec("[formation]\nedges\nreciprocity\n[dissolution]\nedges\n");
    let cfg = FitConfig {
        sampler: SamplerConfig { n_draws: 500, seed: 2, ..Default::default() },
        deviance: false,
        ..Default::default()
    };
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    group.bench_function("cmle_n30_t3", |b| b.iter(|| black_box(cmle_fit(&series, &spec, &cfg).unwrap())));
    group.finish();
}

criterion_group!(benches, mh_steps, change_scores, fit);
criterion_main!(benches);
