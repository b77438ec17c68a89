//! Fit results, deviance tables and their text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::stats::Phase;

use super::layout::Heterogeneity;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    /// θ at which this iteration sampled.
    pub theta: Vec<f64>,
    /// Largest coordinate of the surrogate step.
    pub step: f64,
    /// max_k |observed − expected| / mcse.
    pub max_moment_z: f64,
    pub trust_radius: f64,
}

/// The fitted coefficients of one phase block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    pub phase: Phase,
    pub labels: Vec<String>,
    pub estimates: Vec<f64>,
    /// θ of the final sample, from which the covariance and moment
    /// diagnostics are computed.
    pub sampled_at: Vec<f64>,
    /// Inverse of the estimated information matrix.
    pub covariance: Vec<Vec<f64>>,
    pub mcmc_se: Vec<f64>,
    /// sqrt(covariance_kk + mcmc_se_k²).
    pub std_errors: Vec<f64>,
    /// Observed statistics summed over transitions.
    pub observed: Vec<f64>,
    /// Their simulated expectation at `sampled_at`.
    pub expected: Vec<f64>,
    /// Monte Carlo standard error of `expected`.
    pub moment_mcse: Vec<f64>,
    /// Effective sample size of each summed statistic.
    pub ess: Vec<f64>,
    /// Mean acceptance rate per transition.
    pub acceptance: Vec<f64>,
    /// Free dyads summed over transitions.
    pub free_dyads: usize,
    pub iterations: usize,
    pub trace: Vec<IterationTrace>,
    /// Estimated l(θ̂) − l(0), when computed.
    pub loglik: Option<f64>,
    pub deviance: Vec<DevianceRow>,
}

impl PhaseFit {
    pub(crate) fn empty(phase: Phase, free_dyads: usize) -> Self {
        PhaseFit {
            phase,
            labels: Vec::new(),
            estimates: Vec::new(),
            sampled_at: Vec::new(),
            covariance: Vec::new(),
            mcmc_se: Vec::new(),
            std_errors: Vec::new(),
            observed: Vec::new(),
            expected: Vec::new(),
            moment_mcse: Vec::new(),
            ess: Vec::new(),
            acceptance: Vec::new(),
            free_dyads,
            iterations: 0,
            trace: Vec::new(),
            loglik: None,
            deviance: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn estimate(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|k| self.estimates[k])
    }

    pub fn std_error(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|k| self.std_errors[k])
    }

    /// Two-sided normal p-value of θ̂_k / SE_k.
    pub fn p_value(&self, k: usize) -> f64 {
        p_value(self.estimates[k], self.std_errors[k])
    }
}

pub fn p_value(estimate: f64, se: f64) -> f64 {
    if se <= 0.0 || !se.is_finite() {
        return f64::NAN;
    }
    let z = (estimate / se).abs();
    let normal = Normal::standard();
    2.0 * (1.0 - normal.cdf(z))
}

/// `***` below 0.001, `**` below 0.01, `*` below 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Coefficients of one transition under a time-heterogeneous layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockCoefficients {
    /// 1-based transition index.
    pub transition: usize,
    pub formation: Vec<(String, f64)>,
    pub dissolution: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub heterogeneity: Heterogeneity,
    pub n: usize,
    pub directed: bool,
    pub transitions: usize,
    pub formation: PhaseFit,
    pub dissolution: PhaseFit,
    /// Σ over phases of l(θ̂) − l(0), when deviance was computed.
    pub loglik: Option<f64>,
    pub deviance_table: Vec<DevianceRow>,
    /// Per-transition coefficients; empty for homogeneous fits.
    pub blocks: Vec<BlockCoefficients>,
}

impl FitResult {
    pub fn phase(&self, phase: Phase) -> &PhaseFit {
        match phase {
            Phase::Formation => &self.formation,
            Phase::Dissolution => &self.dissolution,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit results serialize")
    }
}

/// One row of an analysis-of-deviance table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DevianceRow {
    pub phase: Phase,
    pub model: String,
    /// Free coefficients q.
    pub parameters: usize,
    pub residual_deviance: f64,
    pub residual_df: i64,
    /// Relative to the previous row; absent for the first.
    pub explained_deviance: Option<f64>,
    pub explained_df: Option<i64>,
    pub aic: f64,
}

/// Builds the rows for one phase: a null row, then one row per
/// `(label, q, l(θ̂) − l(0))`, each compared with the row before it.
pub fn deviance_rows(phase: Phase, free_dyads: usize, models: &[(String, usize, f64)]) -> Vec<DevianceRow> {
    let null = 2.0 * std::f64::consts::LN_2 * free_dyads as f64;
    let mut rows = vec![DevianceRow {
        phase,
        model: "Null".into(),
        parameters: 0,
        residual_deviance: null,
        residual_df: free_dyads as i64,
        explained_deviance: None,
        explained_df: None,
        aic: null,
    }];
    for (label, q, llr) in models {
        let prev = rows.last().expect("null row");
        let residual = null - 2.0 * llr;
        let df = free_dyads as i64 - *q as i64;
        rows.push(DevianceRow {
            phase,
            model: label.clone(),
            parameters: *q,
            residual_deviance: residual,
            residual_df: df,
            explained_deviance: Some(prev.residual_deviance - residual),
            explained_df: Some(prev.residual_df - df),
            aic: residual + 2.0 * *q as f64,
        });
    }
    rows
}

/// Estimates, standard errors and significance for both phases.
pub fn format_coefficients(fit: &FitResult) -> String {
    let mut out = String::new();
    let width = fit
        .formation
        .labels
        .iter()
        .chain(&fit.dissolution.labels)
        .map(|l| l.len())
        .max()
        .unwrap_or(4)
        .max(4);
    for pf in [&fit.formation, &fit.dissolution] {
        let title = match pf.phase {
            Phase::Formation => "Formation",
            Phase::Dissolution => "Dissolution",
        };
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "  {:<width$}  {:>9}  {:>8}", "term", "est.", "s.e.");
        if pf.labels.is_empty() {
            let _ = writeln!(out, "  (no terms)");
        }
        for k in 0..pf.dim() {
            let _ = writeln!(
                out,
                "  {:<width$}  {:>9.3}  {:>8.3} {}",
                pf.labels[k],
                pf.estimates[k],
                pf.std_errors[k],
                stars(pf.p_value(k))
            );
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "Significance levels: 0.05 *, 0.01 **, 0.001 ***");
    out
}

/// Residual and explained deviance with AIC, grouped by phase.
pub fn format_deviance(rows: &[DevianceRow]) -> String {
    let mut out = String::new();
    let width = rows.iter().map(|r| r.model.len()).max().unwrap_or(5).max(5);
    for phase in Phase::BOTH {
        let rs: Vec<_> = rows.iter().filter(|r| r.phase == phase).collect();
        if rs.is_empty() {
            continue;
        }
        let title = match phase {
            Phase::Formation => "Formation",
            Phase::Dissolution => "Dissolution",
        };
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "  {:<width$}  {:>10} {:>6}  {:>10} {:>5}  {:>10}",
            "model", "resid.dev", "(df)", "expl.dev", "(df)", "AIC"
        );
        for r in rs {
            let (ed, edf) = match (r.explained_deviance, r.explained_df) {
                (Some(d), Some(f)) => (format!("{d:.1}"), format!("({f})")),
                _ => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "  {:<width$}  {:>10.1} {:>6}  {:>10} {:>5}  {:>10.1}",
                r.model,
                r.residual_deviance,
                format!("({})", r.residual_df),
                ed,
                edf,
                r.aic
            );
        }
        let _ = writeln!(out);
    }
    out
}
