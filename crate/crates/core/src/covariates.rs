use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum NodeValues {
    Categorical(Vec<String>),
    Numeric(Vec<f64>),
}

/// One attribute value per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeCovariate {
    pub name: String,
    pub values: NodeValues,
}

impl NodeCovariate {
    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        NodeCovariate {
            name: name.into(),
            values: NodeValues::Categorical(values),
        }
    }

    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        NodeCovariate {
            name: name.into(),
            values: NodeValues::Numeric(values),
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            NodeValues::Categorical(v) => v.len(),
            NodeValues::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Group label of node `i` as text; numeric values are formatted so that
    /// integer codes such as `1.0` read as `1`.
    pub fn label(&self, i: usize) -> String {
        match &self.values {
            NodeValues::Categorical(v) => v[i].clone(),
            NodeValues::Numeric(v) => format_number(v[i]),
        }
    }

    /// Sorted distinct group labels.
    pub fn groups(&self) -> Vec<String> {
        let mut g: Vec<String> = (0..self.len()).map(|i| self.label(i)).collect();
        g.sort();
        g.dedup();
        g
    }
}

fn format_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Dense n×n real matrix attached to dyads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadCovariate {
    pub name: String,
    n: usize,
    values: Vec<f64>,
}

impl DyadCovariate {
    /// `rows` must be n×n with finite entries.
    pub fn new(name: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCovariate {
                    name,
                    reason: format!("row {} has {} entries, expected {n}", i + 1, row.len()),
                });
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidCovariate {
                    name,
                    reason: format!("non-finite entry {x} in row {}", i + 1),
                });
            }
            values.extend(row);
        }
        Ok(DyadCovariate { name, n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n.max(1)).take(self.n)
    }

    pub fn permuted(&self, perm: &[usize]) -> DyadCovariate {
        let mut values = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                values[perm[i] * self.n + perm[j]] = self.get(i, j);
            }
        }
        DyadCovariate {
            name: self.name.clone(),
            n: self.n,
            values,
        }
    }
}

/// Named node and dyad covariates for one node set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Covariates {
    pub node: BTreeMap<String, NodeCovariate>,
    pub dyad: BTreeMap<String, DyadCovariate>,
}

impl Covariates {
    pub fn node(&self, name: &str) -> Result<&NodeCovariate> {
        self.node
            .get(name)
            .ok_or_else(|| Error::MissingCovariate(name.to_string()))
    }

    pub fn dyad(&self, name: &str) -> Result<&DyadCovariate> {
        self.dyad
            .get(name)
            .ok_or_else(|| Error::MissingCovariate(name.to_string()))
    }

    pub fn insert_node(&mut self, cov: NodeCovariate) {
        self.node.insert(cov.name.clone(), cov);
    }

    pub fn insert_dyad(&mut self, cov: DyadCovariate) {
        self.dyad.insert(cov.name.clone(), cov);
    }

    pub fn validate(&self, n: usize, directed: bool) -> Result<()> {
        for cov in self.node.values() {
            if cov.len() != n {
                return Err(Error::InvalidCovariate {
                    name: cov.name.clone(),
                    reason: format!("{} values for {n} nodes", cov.len()),
                });
            }
        }
        for cov in self.dyad.values() {
            if cov.n() != n {
                return Err(Error::InvalidCovariate {
                    name: cov.name.clone(),
                    reason: format!("{0}x{0} matrix for {n} nodes", cov.n()),
                });
            }
            if !directed && !cov.is_symmetric() {
                return Err(Error::InvalidCovariate {
                    name: cov.name.clone(),
                    reason: "matrix must be symmetric for an undirected network".into(),
                });
            }
        }
        Ok(())
    }

    /// Relabels nodes consistently with [`crate::Network::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Covariates {
        let node = self
            .node
            .iter()
            .map(|(k, c)| {
                let values = match &c.values {
                    NodeValues::Categorical(v) => {
                        let mut out = v.clone();
                        for (i, x) in v.iter().enumerate() {
                            out[perm[i]] = x.clone();
                        }
                        NodeValues::Categorical(out)
                    }
                    NodeValues::Numeric(v) => {
                        let mut out = v.clone();
                        for (i, x) in v.iter().enumerate() {
                            out[perm[i]] = *x;
                        }
                        NodeValues::Numeric(out)
                    }
                };
                (k.clone(), NodeCovariate { name: c.name.clone(), values })
            })
            .collect();
        let dyad = self
            .dyad
            .iter()
            .map(|(k, c)| (k.clone(), c.permuted(perm)))
            .collect();
        Covariates { node, dyad }
    }
}
