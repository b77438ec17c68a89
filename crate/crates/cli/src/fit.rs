use std::fmt::Write as _;

use stergm_core::estimation::{
    deviance_ladder, fit_time_heterogeneous, format_coefficients, format_deviance, FitResult, Heterogeneity,
};
use stergm_core::{load_series, Phase};

use crate::args::{Cli, DevianceArg, FitArgs};
use crate::simulate::read_model;
use crate::{CmdResult, Failure};

pub fn run(a: &FitArgs, cli: &Cli) -> CmdResult {
    let spec = read_model(&a.model)?;
    let series = load_series(&a.series)?;
    let scheme: Heterogeneity = a.heterogeneous.into();
    let cfg = a.config();
    let mut fit = fit_time_heterogeneous(&series, &spec, &cfg, scheme)?;
    if a.deviance == DevianceArg::Ladder {
        let rows = deviance_ladder(&series, &spec, &cfg, scheme)?;
        attach_ladder(&mut fit, rows);
    }
    if let Some(path) = &a.out {
        std::fs::write(path, fit.to_json() + "\n")
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
    }
    if cli.quiet {
        return Ok(());
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} nodes, {}, {} transitions, heterogeneity: {}",
        fit.n,
        if fit.directed { "directed" } else { "undirected" },
        fit.transitions,
        scheme.name()
    );
    let _ = writeln!(out);
    out.push_str(&format_coefficients(&fit));
    if !fit.blocks.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "Per-transition coefficients");
        for b in &fit.blocks {
            let fmt = |v: &[(String, f64)]| v.iter().map(|(l, x)| format!("{l}={x:.3}")).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "  t={}: formation {} | dissolution {}", b.transition, fmt(&b.formation), fmt(&b.dissolution));
        }
    }
    if !fit.deviance_table.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "Analysis of deviance");
        out.push_str(&format_deviance(&fit.deviance_table));
    }
    if cli.verbose {
        let _ = writeln!(out);
        for pf in [&fit.formation, &fit.dissolution] {
            let _ = writeln!(out, "{} iterations ({}):", pf.phase, pf.iterations);
            for it in &pf.trace {
                let _ = writeln!(
                    out,
                    "  {:>2}: step {:.4} max |moment z| {:.2} radius {:.3}",
                    it.iteration, it.step, it.max_moment_z, it.trust_radius
                );
            }
            let ess = pf.ess.iter().map(|e| format!("{e:.0}")).collect::<Vec<_>>().join(" ");
            let acc = pf.acceptance.iter().map(|e| format!("{e:.2}")).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "  ESS: {ess}\n  acceptance: {acc}");
        }
    }
    print!("{out}");
    Ok(())
}

/// Stores the ladder as the report's deviance table; the last rung of each
/// phase is the fitted model.
fn attach_ladder(fit: &mut FitResult, rows: Vec<stergm_core::estimation::DevianceRow>) {
    let mut total = 0.0;
    for phase in Phase::BOTH {
        let pr: Vec<_> = rows.iter().filter(|r| r.phase == phase).cloned().collect();
        let llr = match (pr.first(), pr.last()) {
            (Some(null), Some(last)) => (null.residual_deviance - last.residual_deviance) / 2.0,
            _ => 0.0,
        };
        total += llr;
        let pf = match phase {
            Phase::Formation => &mut fit.formation,
            Phase::Dissolution => &mut fit.dissolution,
        };
        pf.loglik = Some(llr);
        pf.deviance = pr;
    }
    fit.loglik = Some(total);
    fit.deviance_table = rows;
}
