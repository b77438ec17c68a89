use std::fmt::Write as _;

use stergm_core::{load_series, validate_manifest};

use crate::args::{Cli, ValidateArgs};
use crate::simulate::read_model;
use crate::{CmdResult, Failure};

pub fn run(a: &ValidateArgs, cli: &Cli) -> CmdResult {
    let report = validate_manifest(&a.series);
    let mut violations = report.violations.clone();
    if let (Some(path), true) = (&a.model, report.is_valid()) {
        match read_model(path) {
            Ok(spec) => {
                let series = load_series(&a.series)?;
                if let Err(e) = spec.bind(&series.covariates, series.is_directed()) {
                    violations.push(format!("{}: {e}", path.display()));
                }
            }
            Err(f) => violations.push(f.message),
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: n={} {} snapshots={}",
        a.series.display(),
        report.n,
        if report.directed { "directed" } else { "undirected" },
        report.snapshots
    );
    if !report.transitions.is_empty() {
        let _ = writeln!(out, "{:>10} {:>8} {:>9} {:>9} {:>8} {:>8}", "transition", "formed", "dissolved", "preserved", "ties", "->ties");
        for (t, s) in report.transitions.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>10} {:>8} {:>9} {:>9} {:>8} {:>8}",
                format!("{}->{}", t, t + 1),
                s.formed,
                s.dissolved,
                s.preserved,
                s.prev_ties,
                s.next_ties
            );
        }
    }
    if !cli.quiet {
        print!("{out}");
    }
    if violations.is_empty() {
        if !cli.quiet {
            println!("ok");
        }
        Ok(())
    } else {
        let mut msg = format!("{} violation(s):", violations.len());
        for v in &violations {
            let _ = write!(msg, "\n  - {v}");
        }
        Err(Failure::config(msg))
    }
}
