//! Bound statistics: each [`Term`] is one scalar statistic with its
//! covariate data resolved, evaluated on a phase network `y` (y⁺ or y⁻)
//! given the previous network.

use std::sync::Arc;

use crate::covariates::{Covariates, DyadCovariate};
use crate::error::{Error, Result};
use crate::network::{Dyad, Network};

use super::spec::{TermKind, TermSpec};
use super::Phase;

#[derive(Clone, Debug)]
pub enum Term {
    Edges,
    Mixing {
        from: Arc<Vec<bool>>,
        to: Arc<Vec<bool>>,
    },
    Degree(usize),
    Reciprocity,
    TransitiveTies,
    CyclicalTies,
    OdegPopSqrt,
    EdgeCov(Arc<DyadCovariate>),
    IsolateFromMultiple,
}

/// A scalar statistic together with its display label.
#[derive(Clone, Debug)]
pub struct BoundTerm {
    pub label: String,
    pub term: Term,
}

impl TermSpec {
    /// Resolves covariates and expands shorthand terms into scalar
    /// statistics. Fails when the term is not defined for the network type or
    /// phase, or references an unknown covariate or group.
    pub fn bind(&self, covs: &Covariates, directed: bool, phase: Phase) -> Result<Vec<BoundTerm>> {
        let invalid = |reason: &str| Error::InvalidTerm {
            term: self.to_string(),
            reason: reason.to_string(),
        };
        let single = |term: Term| Ok(vec![BoundTerm { label: self.to_string(), term }]);
        match &self.kind {
            TermKind::Edges => single(Term::Edges),
            TermKind::Mixing { attr, from, to } => {
                let cov = covs.node(attr)?;
                let groups = cov.groups();
                for g in [from, to] {
                    if !groups.contains(g) {
                        return Err(invalid(&format!("attribute `{attr}` has no group `{g}`")));
                    }
                }
                single(mixing_term(covs, attr, from, to)?)
            }
            TermKind::Degree { d } => {
                if directed {
                    return Err(invalid("degree terms are defined for undirected networks"));
                }
                single(Term::Degree(*d))
            }
            TermKind::Reciprocity | TermKind::CyclicalTies | TermKind::OdegPopSqrt if !directed => {
                Err(invalid("defined for directed networks only"))
            }
            TermKind::Reciprocity => single(Term::Reciprocity),
            TermKind::TransitiveTies => single(Term::TransitiveTies),
            TermKind::CyclicalTies => single(Term::CyclicalTies),
            TermKind::OdegPopSqrt => single(Term::OdegPopSqrt),
            TermKind::EdgeCov { name } => single(Term::EdgeCov(Arc::new(covs.dyad(name)?.clone()))),
            TermKind::IsolateFromMultiple => {
                if phase != Phase::Dissolution {
                    return Err(invalid("usable in the dissolution phase only"));
                }
                single(Term::IsolateFromMultiple)
            }
            TermKind::Homophily { attr } => {
                let groups = covs.node(attr)?.groups();
                groups
                    .iter()
                    .map(|g| {
                        Ok(BoundTerm {
                            label: TermSpec::mixing(attr, g, g).to_string(),
                            term: mixing_term(covs, attr, g, g)?,
                        })
                    })
                    .collect()
            }
            TermKind::Heterophily { attr } => {
                let groups = covs.node(attr)?.groups();
                let mut out = Vec::new();
                for (a, g) in groups.iter().enumerate() {
                    for (b, h) in groups.iter().enumerate() {
                        if a == b || (!directed && b < a) {
                            continue;
                        }
                        out.push(BoundTerm {
                            label: TermSpec::mixing(attr, g, h).to_string(),
                            term: mixing_term(covs, attr, g, h)?,
                        });
                    }
                }
                if out.is_empty() {
                    return Err(invalid("attribute has a single group"));
                }
                Ok(out)
            }
        }
    }
}

fn mixing_term(covs: &Covariates, attr: &str, from: &str, to: &str) -> Result<Term> {
    let cov = covs.node(attr)?;
    let member = |g: &str| Arc::new((0..cov.len()).map(|i| cov.label(i) == g).collect::<Vec<_>>());
    Ok(Term::Mixing {
        from: member(from),
        to: member(to),
    })
}

/// Whether some k (other than `skip`) closes a two-path a → k → b.
#[inline]
fn has_two_path(y: &Network, a: usize, b: usize, skip: usize) -> bool {
    y.out_neighbors(a)
        .iter()
        .any(|&k| k != skip && k != b && y.has_tie(k, b))
}

impl Term {
    /// True when the value can be non-integer.
    pub fn is_real_valued(&self) -> bool {
        matches!(self, Term::OdegPopSqrt | Term::EdgeCov(_))
    }

    /// g(y, prev) evaluated directly from its definition.
    pub fn evaluate(&self, y: &Network, prev: &Network) -> f64 {
        match self {
            Term::Edges => y.edge_count() as f64,
            Term::Mixing { from, to } => y
                .ties()
                .filter(|d| mixing_match(from, to, *d, y.is_directed()))
                .count() as f64,
            Term::Degree(d) => (0..y.n()).filter(|&i| y.out_degree(i) == *d).count() as f64,
            Term::Reciprocity => y
                .ties()
                .filter(|d| d.tail < d.head && y.has_tie(d.head, d.tail))
                .count() as f64,
            Term::TransitiveTies => y
                .ties()
                .filter(|d| has_two_path(y, d.tail, d.head, usize::MAX))
                .count() as f64,
            Term::CyclicalTies => y
                .ties()
                .filter(|d| has_two_path(y, d.head, d.tail, usize::MAX))
                .count() as f64,
            Term::OdegPopSqrt => y.ties().map(|d| (y.in_degree(d.head) as f64).sqrt()).sum(),
            Term::EdgeCov(x) => y.ties().map(|d| x.get(d.tail, d.head)).sum(),
            Term::IsolateFromMultiple => (0..y.n())
                .filter(|&i| prev.partner_count(i) >= 2 && y.partner_count(i) == 0)
                .count() as f64,
        }
    }

    /// g(y with `d` present) − g(y with `d` absent), whatever the current
    /// state of `d` in `y`.
    pub fn delta_on(&self, y: &Network, prev: &Network, d: Dyad) -> f64 {
        let (i, j) = (d.tail, d.head);
        let present = y.has(d);
        match self {
            Term::Edges => 1.0,
            Term::Mixing { from, to } => mixing_match(from, to, d, y.is_directed()) as u8 as f64,
            Term::EdgeCov(x) => x.get(i, j),
            Term::Reciprocity => y.has_tie(j, i) as u8 as f64,
            Term::Degree(level) => {
                let mut delta = 0.0;
                for v in [i, j] {
                    let k = y.out_degree(v) - present as usize;
                    delta += (k + 1 == *level) as u8 as f64 - (k == *level) as u8 as f64;
                }
                delta
            }
            Term::OdegPopSqrt => {
                let k = (y.in_degree(j) - present as usize) as f64;
                (k + 1.0).powf(1.5) - k.powf(1.5)
            }
            Term::TransitiveTies => {
                let mut delta = has_two_path(y, i, j, usize::MAX) as u8 as f64;
                // ties i→b that gain the two-path i→j→b
                for &b in y.out_neighbors(j) {
                    if b != i && y.has_tie(i, b) && !has_two_path(y, i, b, j) {
                        delta += 1.0;
                    }
                }
                // ties a→j that gain the two-path a→i→j
                for &a in y.in_neighbors(i) {
                    if a != j && y.has_tie(a, j) && !has_two_path(y, a, j, i) {
                        delta += 1.0;
                    }
                }
                delta
            }
            Term::CyclicalTies => {
                let mut delta = has_two_path(y, j, i, usize::MAX) as u8 as f64;
                // ties j→b closed by b→i→j
                for &b in y.in_neighbors(i) {
                    if b != j && y.has_tie(j, b) && !has_two_path(y, b, j, i) {
                        delta += 1.0;
                    }
                }
                // ties a→i closed by i→j→a
                for &a in y.out_neighbors(j) {
                    if a != i && y.has_tie(a, i) && !has_two_path(y, i, a, j) {
                        delta += 1.0;
                    }
                }
                delta
            }
            Term::IsolateFromMultiple => {
                // a reverse tie j→i keeps i and j partners either way
                if y.is_directed() && y.has_tie(j, i) {
                    return 0.0;
                }
                let mut delta = 0.0;
                for v in [i, j] {
                    if prev.partner_count(v) >= 2 && y.partner_count(v) == present as usize {
                        delta -= 1.0;
                    }
                }
                delta
            }
        }
    }
}

#[inline]
fn mixing_match(from: &[bool], to: &[bool], d: Dyad, directed: bool) -> bool {
    let forward = from[d.tail] && to[d.head];
    if directed {
        forward
    } else {
        forward || (from[d.head] && to[d.tail])
    }
}
