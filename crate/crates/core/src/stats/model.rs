use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::covariates::Covariates;
use crate::error::{Error, Result};
use crate::network::{Dyad, Network};

use super::spec::TermSpec;
use super::terms::{BoundTerm, Term};
use super::Phase;

/// Mapping from model parameters to natural parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMap {
    #[default]
    Identity,
    /// Placeholder for curved families; simulation and fitting reject it.
    Curved { name: String },
}

/// One line of a phase block: a term and, optionally, its coefficients
/// (one value broadcast over the expanded statistics, or one per statistic).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelTerm {
    pub term: TermSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub terms: Vec<ModelTerm>,
}

impl PhaseSpec {
    pub fn new(terms: impl IntoIterator<Item = TermSpec>) -> Self {
        PhaseSpec {
            terms: terms
                .into_iter()
                .map(|term| ModelTerm { term, coef: None })
                .collect(),
        }
    }

    pub fn with_coefs(terms: impl IntoIterator<Item = (TermSpec, f64)>) -> Self {
        PhaseSpec {
            terms: terms
                .into_iter()
                .map(|(term, c)| ModelTerm {
                    term,
                    coef: Some(vec![c]),
                })
                .collect(),
        }
    }

    fn bind(&self, covs: &Covariates, directed: bool, phase: Phase) -> Result<(PhaseModel, Option<Vec<f64>>)> {
        let mut terms = Vec::new();
        let mut coefs = Some(Vec::new());
        for mt in &self.terms {
            let bound = mt.term.bind(covs, directed, phase)?;
            match (&mt.coef, coefs.as_mut()) {
                (Some(c), Some(out)) => {
                    if c.len() == 1 {
                        out.extend(std::iter::repeat_n(c[0], bound.len()));
                    } else if c.len() == bound.len() {
                        out.extend_from_slice(c);
                    } else {
                        return Err(Error::InvalidModel(format!(
                            "{phase} term `{}` expands to {} statistics but has {} coefficients",
                            mt.term,
                            bound.len(),
                            c.len()
                        )));
                    }
                }
                _ => coefs = None,
            }
            terms.extend(bound);
        }
        let mut labels: Vec<&str> = terms.iter().map(|t| t.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(format!("{phase} statistic `{}` appears twice", w[0])));
        }
        Ok((PhaseModel { phase, terms }, coefs))
    }
}

/// Formation and dissolution term lists. The parameter space is the product
/// of the two coefficient blocks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub formation: PhaseSpec,
    pub dissolution: PhaseSpec,
    #[serde(default)]
    pub eta_map: EtaMap,
}

impl ModelSpec {
    pub fn new(formation: PhaseSpec, dissolution: PhaseSpec) -> Self {
        ModelSpec {
            formation,
            dissolution,
            eta_map: EtaMap::Identity,
        }
    }

    pub fn phase(&self, phase: Phase) -> &PhaseSpec {
        match phase {
            Phase::Formation => &self.formation,
            Phase::Dissolution => &self.dissolution,
        }
    }

    pub fn phase_mut(&mut self, phase: Phase) -> &mut PhaseSpec {
        match phase {
            Phase::Formation => &mut self.formation,
            Phase::Dissolution => &mut self.dissolution,
        }
    }

    pub fn require_identity(&self) -> Result<()> {
        match &self.eta_map {
            EtaMap::Identity => Ok(()),
            EtaMap::Curved { name } => Err(Error::Unsupported(format!(
                "curved parameter mapping `{name}`; only the identity mapping is implemented"
            ))),
        }
    }

    pub fn bind(&self, covs: &Covariates, directed: bool) -> Result<StergmModel> {
        Ok(self.bind_with_coefs(covs, directed)?.0)
    }

    /// Binds the model and returns the coefficients given in the spec, if
    /// every term has them.
    pub fn bind_with_coefs(&self, covs: &Covariates, directed: bool) -> Result<(StergmModel, Option<PhaseCoefs>)> {
        self.require_identity()?;
        let (formation, fc) = self.formation.bind(covs, directed, Phase::Formation)?;
        let (dissolution, dc) = self.dissolution.bind(covs, directed, Phase::Dissolution)?;
        let coefs = fc.zip(dc);
        if let Some((f, d)) = &coefs {
            if let Some(x) = f.iter().chain(d).find(|x| x.is_nan()) {
                return Err(Error::InvalidModel(format!("coefficient {x} is not a number")));
            }
        }
        Ok((StergmModel { formation, dissolution }, coefs))
    }

    /// Renders the model in the line-oriented model-file format.
    pub fn to_model_file(&self) -> String {
        let mut out = String::new();
        for phase in Phase::BOTH {
            let _ = writeln!(out, "[{phase}]");
            for mt in &self.phase(phase).terms {
                match &mt.coef {
                    Some(c) => {
                        let vals: Vec<String> = c.iter().map(|x| format!("{x:?}")).collect();
                        let _ = writeln!(out, "{} = {}", mt.term, vals.join(", "));
                    }
                    None => {
                        let _ = writeln!(out, "{}", mt.term);
                    }
                }
            }
        }
        out
    }
}

/// Parses the model-file format:
///
/// ```text
/// # comment
/// [formation]
/// edges = -3
/// homophily(sex) = 0.5, 0.9
/// [dissolution]
/// edges = 2
/// ```
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut model = ModelSpec::default();
        let mut current: Option<Phase> = None;
        let mut seen = [false, false];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let syntax = |reason: String| Error::ModelSyntax {
                line: line_no,
                reason,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                let phase = match line {
                    "[formation]" => Phase::Formation,
                    "[dissolution]" => Phase::Dissolution,
                    _ => return Err(syntax(format!("unknown section `{line}`"))),
                };
                let k = phase as usize;
                if seen[k] {
                    return Err(syntax(format!("section `{line}` repeated")));
                }
                seen[k] = true;
                current = Some(phase);
                continue;
            }
            let phase = current.ok_or_else(|| {
                syntax("term outside a [formation] or [dissolution] section".into())
            })?;
            let (term_text, coef) = match line.split_once('=') {
                Some((t, c)) => {
                    let vals = c
                        .split(',')
                        .map(|v| {
                            let v = v.trim();
                            parse_coef(v).ok_or_else(|| syntax(format!("bad coefficient `{v}`")))
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    (t, Some(vals))
                }
                None => (line, None),
            };
            let term = term_text.parse::<TermSpec>().map_err(|e| syntax(e.to_string()))?;
            model.phase_mut(phase).terms.push(ModelTerm { term, coef });
        }
        if !seen.iter().any(|&s| s) {
            return Err(Error::ModelSyntax {
                line: 0,
                reason: "no [formation] or [dissolution] section".into(),
            });
        }
        Ok(model)
    }
}

fn parse_coef(v: &str) -> Option<f64> {
    v.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// The bound statistics of one phase.
#[derive(Clone, Debug)]
pub struct PhaseModel {
    pub phase: Phase,
    pub terms: Vec<BoundTerm>,
}

impl PhaseModel {
    pub fn new(phase: Phase, terms: Vec<BoundTerm>) -> Self {
        PhaseModel { phase, terms }
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }

    pub fn evaluate(&self, y: &Network, prev: &Network) -> Vec<f64> {
        self.terms.iter().map(|t| t.term.evaluate(y, prev)).collect()
    }

    /// Writes g(y with d) − g(y without d) into `out`.
    #[inline]
    pub fn delta_on(&self, y: &Network, prev: &Network, d: Dyad, out: &mut [f64]) {
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.term.delta_on(y, prev, d);
        }
    }

    /// True when every statistic's change score depends only on the dyad.
    pub fn is_dyad_independent(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.term, Term::Edges | Term::Mixing { .. } | Term::EdgeCov(_)))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }
}

/// Coefficient blocks θ⁺ and θ⁻ (natural parameters under the identity map).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub formation: Vec<f64>,
    pub dissolution: Vec<f64>,
}

impl Coefficients {
    pub fn new(formation: Vec<f64>, dissolution: Vec<f64>) -> Self {
        Coefficients { formation, dissolution }
    }

    pub fn phase(&self, phase: Phase) -> &[f64] {
        match phase {
            Phase::Formation => &self.formation,
            Phase::Dissolution => &self.dissolution,
        }
    }

    pub fn phase_mut(&mut self, phase: Phase) -> &mut Vec<f64> {
        match phase {
            Phase::Formation => &mut self.formation,
            Phase::Dissolution => &mut self.dissolution,
        }
    }
}

/// (θ⁺, θ⁻) as read from a model file.
pub type PhaseCoefs = (Vec<f64>, Vec<f64>);

#[derive(Clone, Debug)]
pub struct StergmModel {
    pub formation: PhaseModel,
    pub dissolution: PhaseModel,
}

impl StergmModel {
    pub fn phase(&self, phase: Phase) -> &PhaseModel {
        match phase {
            Phase::Formation => &self.formation,
            Phase::Dissolution => &self.dissolution,
        }
    }

    /// Checks that `coefs` has one finite value per statistic in each phase.
    pub fn check_coefficients(&self, coefs: &Coefficients) -> Result<()> {
        for phase in Phase::BOTH {
            let (m, c) = (self.phase(phase), coefs.phase(phase));
            if m.dim() != c.len() {
                return Err(Error::InvalidModel(format!(
                    "{phase} block has {} statistics but {} coefficients",
                    m.dim(),
                    c.len()
                )));
            }
            if let Some(x) = c.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidModel(format!("{phase} coefficient {x} is not finite")));
            }
        }
        Ok(())
    }
}
