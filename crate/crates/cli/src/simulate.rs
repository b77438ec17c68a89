use std::fmt::Write as _;
use std::path::Path;

use stergm_core::io::{read_dyad_cov, read_edge_list, read_node_attrs};
use stergm_core::stats::ModelSpec;
use stergm_core::{random_network, save_series, simulate_series, Coefficients, Covariates};

use crate::args::{Cli, SimulateArgs};
use crate::{CmdResult, Failure};

pub fn read_model(path: &Path) -> Result<ModelSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read model file {}: {e}", path.display())))?;
    text.parse::<ModelSpec>()
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

pub fn run(a: &SimulateArgs, cli: &Cli) -> CmdResult {
    let spec = read_model(&a.model)?;
    let n = a.n.ok_or_else(|| Failure::config("--n is required"))?;
    if n < 2 {
        return Err(Failure::config(format!("--n must be at least 2, got {n}")));
    }
    let y0 = match &a.init_network {
        Some(p) => read_edge_list(p, n, a.directed)?,
        None => random_network(n, a.directed, a.density, a.seed)?,
    };
    let mut covs = Covariates::default();
    if let Some(p) = &a.nodes {
        for c in read_node_attrs(p, n)? {
            covs.insert_node(c);
        }
    }
    for item in &a.dyad_covs {
        let (name, path) = item
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("--dyad-cov expects NAME=PATH, got `{item}`")))?;
        covs.insert_dyad(read_dyad_cov(Path::new(path), name, n)?);
    }
    covs.validate(n, a.directed)?;
    let (model, coefs) = spec.bind_with_coefs(&covs, a.directed)?;
    let (f, d) = coefs.ok_or_else(|| {
        Failure::config(format!(
            "{}: every term needs a coefficient (`term = value`) for simulation",
            a.model.display()
        ))
    })?;
    let coefs = Coefficients::new(f, d);
    let cfg = a.sampler.config(a.seed, 1);
    cfg.validate()?;
    let (series, steps) = simulate_series(&y0, &model, &coefs, a.steps, &cfg, covs)?;
    let manifest = save_series(&series, &a.out)?;

    if cli.quiet {
        return Ok(());
    }
    let mut out = String::new();
    let fl = model.formation.labels();
    let dl = model.dissolution.labels();
    let _ = writeln!(out, "initial network: {} ties", y0.edge_count());
    for (t, (step, prev)) in steps.iter().zip(series.networks()).enumerate() {
        let s = step.summary(prev);
        let _ = writeln!(
            out,
            "step {}: formed {} dissolved {} preserved {} ties {}",
            t + 1,
            s.formed,
            s.dissolved,
            s.preserved,
            s.next_ties
        );
        let stats = |labels: &[String], values: &[f64]| {
            labels
                .iter()
                .zip(values)
                .map(|(l, v)| format!("{l}={}", fmt_stat(*v)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if !fl.is_empty() {
            let _ = writeln!(out, "  formation: {}", stats(&fl, &step.formation_stats));
        }
        if !dl.is_empty() {
            let _ = writeln!(out, "  dissolution: {}", stats(&dl, &step.dissolution_stats));
        }
    }
    let spells = series.spells();
    match spells.mean_completed() {
        Some(m) => {
            let _ = writeln!(
                out,
                "mean spell length: {m:.3} ({} completed spells, {} censored)",
                spells.completed.len(),
                spells.censored
            );
        }
        None => {
            let _ = writeln!(out, "mean spell length: n/a (no completed spells, {} censored)", spells.censored);
        }
    }
    let _ = writeln!(out, "wrote {}", manifest.display());
    print!("{out}");
    Ok(())
}

fn fmt_stat(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}
