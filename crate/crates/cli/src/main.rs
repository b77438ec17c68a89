//! `stergm`: simulate panels, fit separable temporal ERGMs, validate inputs.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 runtime failure
//! (degenerate statistic, non-convergence, singular information, infeasible
//! constraint).

mod args;
mod fit;
mod simulate;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// An error tagged with the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Extra lines printed after the message.
    pub diagnostic: Option<String>,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
            diagnostic: None,
        }
    }
}

impl From<stergm_core::Error> for Failure {
    fn from(e: stergm_core::Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Failure {
            code,
            diagnostic: diagnose(&e),
            message: e.to_string(),
        }
    }
}

fn diagnose(e: &stergm_core::Error) -> Option<String> {
    use stergm_core::Error as E;
    match e {
        E::Degenerate { label, observed } => Some(format!(
            "diagnostic:\n  statistic: {label}\n  observed sum: {observed}\n  \
             the observed value is an extreme of what the model can produce, so the\n  \
             likelihood keeps increasing as the coefficient moves to ±infinity.\n  \
             drop or merge the term, or check the data for structural zeros."
        )),
        E::NotConverged(iterations) => Some(format!(
            "diagnostic:\n  iterations: {iterations}\n  \
             raise --max-iterations or --draws, or lower --trust-radius; rerun with\n  \
             --verbose to see the per-iteration moment residuals."
        )),
        E::SingularInformation(_) => Some(
            "diagnostic:\n  some statistics are (nearly) collinear on this panel, for example a\n  \
             mixing cell that contains every tie. remove one of the dependent terms."
                .to_string(),
        ),
        _ => None,
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match &cli.command {
        Command::Simulate(a) => simulate::run(a, &cli),
        Command::Fit(a) => fit::run(a, &cli),
        Command::Validate(a) => validate::run(a, &cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(d) = f.diagnostic {
                eprintln!("{d}");
            }
            ExitCode::from(f.code)
        }
    }
}
