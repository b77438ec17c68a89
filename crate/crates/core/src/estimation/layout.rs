use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::PhaseModel;

/// How coefficients vary across transitions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heterogeneity {
    /// One coefficient per statistic for all transitions.
    #[default]
    None,
    /// A separate `edges` coefficient per transition; other terms shared.
    Edges,
    /// Every coefficient separate per transition.
    Full,
}

impl std::str::FromStr for Heterogeneity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Heterogeneity::None),
            "edges" => Ok(Heterogeneity::Edges),
            "full" => Ok(Heterogeneity::Full),
            _ => Err(Error::Config(format!(
                "unknown heterogeneity scheme `{s}` (expected none, edges or full)"
            ))),
        }
    }
}

impl Heterogeneity {
    pub fn name(self) -> &'static str {
        match self {
            Heterogeneity::None => "none",
            Heterogeneity::Edges => "edges",
            Heterogeneity::Full => "full",
        }
    }
}

/// Maps each transition's statistics onto the parameter vector:
/// η_t[k] = θ[map[t][k]].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    pub labels: Vec<String>,
    pub map: Vec<Vec<usize>>,
}

impl ParamLayout {
    pub fn new(model: &PhaseModel, transitions: usize, scheme: Heterogeneity) -> Result<Self> {
        if scheme != Heterogeneity::None && transitions < 2 {
            return Err(Error::InvalidSeries(format!(
                "time-heterogeneous scheme `{}` needs at least 2 transitions, got {transitions}",
                scheme.name()
            )));
        }
        let mut labels = Vec::new();
        let mut map = vec![vec![0usize; model.dim()]; transitions];
        let mut saw_edges = false;
        for (k, t) in model.terms.iter().enumerate() {
            let split = match scheme {
                Heterogeneity::None => false,
                Heterogeneity::Edges => t.label == "edges",
                Heterogeneity::Full => true,
            };
            saw_edges |= t.label == "edges";
            if split {
                for (tt, row) in map.iter_mut().enumerate() {
                    row[k] = labels.len();
                    labels.push(format!("{}@{}", t.label, tt + 1));
                }
            } else {
                for row in map.iter_mut() {
                    row[k] = labels.len();
                }
                labels.push(t.label.clone());
            }
        }
        if scheme == Heterogeneity::Edges && !saw_edges && model.dim() > 0 {
            return Err(Error::InvalidModel(format!(
                "{} block has no `edges` term to make time-heterogeneous",
                model.phase
            )));
        }
        Ok(ParamLayout { labels, map })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn transitions(&self) -> usize {
        self.map.len()
    }

    /// Natural parameters of transition `t`.
    pub fn eta(&self, theta: &[f64], t: usize) -> Vec<f64> {
        self.map[t].iter().map(|&p| theta[p]).collect()
    }

    /// Adds `weight · stats` (transition `t`) into parameter-space `out`.
    #[inline]
    pub fn project_into(&self, t: usize, stats: &[f64], weight: f64, out: &mut [f64]) {
        for (k, &p) in self.map[t].iter().enumerate() {
            out[p] += weight * stats[k];
        }
    }

    pub fn project(&self, t: usize, stats: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.project_into(t, stats, 1.0, &mut out);
        out
    }
}
