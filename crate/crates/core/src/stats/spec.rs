use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Term kinds as written in model files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermKind {
    Edges,
    /// Ties from group `from` to group `to` of a node attribute.
    Mixing { attr: String, from: String, to: String },
    /// Nodes with exactly `d` ties (undirected only).
    Degree { d: usize },
    Reciprocity,
    TransitiveTies,
    CyclicalTies,
    OdegPopSqrt,
    EdgeCov { name: String },
    /// Dissolution only: nodes with no partners left among those that had at
    /// least two at the previous step.
    IsolateFromMultiple,
    /// Expands to `mixing(attr, g, g)` for every group `g`.
    Homophily { attr: String },
    /// Expands to `mixing(attr, g, h)` for every ordered pair `g != h`
    /// (unordered when undirected).
    Heterophily { attr: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub kind: TermKind,
}

impl TermSpec {
    pub fn new(kind: TermKind) -> Self {
        TermSpec { kind }
    }

    pub fn edges() -> Self {
        TermSpec::new(TermKind::Edges)
    }

    pub fn mixing(attr: &str, from: &str, to: &str) -> Self {
        TermSpec::new(TermKind::Mixing {
            attr: attr.into(),
            from: from.into(),
            to: to.into(),
        })
    }

    pub fn degree(d: usize) -> Self {
        TermSpec::new(TermKind::Degree { d })
    }

    pub fn edge_cov(name: &str) -> Self {
        TermSpec::new(TermKind::EdgeCov { name: name.into() })
    }

    /// True when the statistic reads the previous network directly.
    pub fn is_explicitly_dynamic(&self) -> bool {
        matches!(self.kind, TermKind::IsolateFromMultiple)
    }
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Edges => write!(f, "edges"),
            TermKind::Mixing { attr, from, to } => write!(f, "mixing({attr}, {from}, {to})"),
            TermKind::Degree { d } => write!(f, "degree({d})"),
            TermKind::Reciprocity => write!(f, "reciprocity"),
            TermKind::TransitiveTies => write!(f, "transitive_ties"),
            TermKind::CyclicalTies => write!(f, "cyclical_ties"),
            TermKind::OdegPopSqrt => write!(f, "odeg_pop_sqrt"),
            TermKind::EdgeCov { name } => write!(f, "edge_cov({name})"),
            TermKind::IsolateFromMultiple => write!(f, "isolate_from_multiple"),
            TermKind::Homophily { attr } => write!(f, "homophily({attr})"),
            TermKind::Heterophily { attr } => write!(f, "heterophily({attr})"),
        }
    }
}

impl FromStr for TermSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason: &str| Error::InvalidTerm {
            term: s.to_string(),
            reason: reason.to_string(),
        };
        let (name, args) = match s.find('(') {
            Some(open) => {
                if !s.ends_with(')') {
                    return Err(bad("missing closing parenthesis"));
                }
                let inner = &s[open + 1..s.len() - 1];
                let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
                if args.iter().any(|a| a.is_empty()) {
                    return Err(bad("empty argument"));
                }
                (s[..open].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(bad(&format!("expected {k} argument(s), got {}", args.len())))
            }
        };
        let kind = match name {
            "edges" => {
                arity(0)?;
                TermKind::Edges
            }
            "mixing" => {
                arity(3)?;
                TermKind::Mixing {
                    attr: args[0].clone(),
                    from: args[1].clone(),
                    to: args[2].clone(),
                }
            }
            "degree" => {
                arity(1)?;
                let d = args[0]
                    .parse()
                    .map_err(|_| bad("degree level must be a non-negative integer"))?;
                TermKind::Degree { d }
            }
            "reciprocity" => {
                arity(0)?;
                TermKind::Reciprocity
            }
            "transitive_ties" => {
                arity(0)?;
                TermKind::TransitiveTies
            }
            "cyclical_ties" => {
                arity(0)?;
                TermKind::CyclicalTies
            }
            "odeg_pop_sqrt" => {
                arity(0)?;
                TermKind::OdegPopSqrt
            }
            "edge_cov" => {
                arity(1)?;
                TermKind::EdgeCov {
                    name: args[0].clone(),
                }
            }
            "isolate_from_multiple" => {
                arity(0)?;
                TermKind::IsolateFromMultiple
            }
            "homophily" => {
                arity(1)?;
                TermKind::Homophily {
                    attr: args[0].clone(),
                }
            }
            "heterophily" => {
                arity(1)?;
                TermKind::Heterophily {
                    attr: args[0].clone(),
                }
            }
            _ => return Err(bad("unknown term")),
        };
        Ok(TermSpec { kind })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_display_roundtrip() {
        for text in [
            "edges",
            "mixing(sex, F, M)",
            "degree(0)",
            "reciprocity",
            "transitive_ties",
            "cyclical_ties",
            "odeg_pop_sqrt",
            "edge_cov(primary)",
            "isolate_from_multiple",
            "homophily(sex)",
            "heterophily(sex)",
        ] {
            let t: TermSpec = text.parse().unwrap();
            assert_eq!(t.to_string(), text);
        }
        assert_eq!("mixing( sex ,1,2 )".parse::<TermSpec>().unwrap(), TermSpec::mixing("sex", "1", "2"));
    }

    #[test]
    fn parse_errors() {
        for text in ["edge", "degree(-1)", "degree(a)", "mixing(sex, F)", "edges(1)", "edge_cov(", "mixing(a,,b)"] {
            assert!(text.parse::<TermSpec>().is_err(), "{text}");
        }
    }
}
