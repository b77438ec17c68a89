//! Binary networks over a fixed node set.
//!
//! Nodes are dense indices `0..n` inside the library; files and
//! user-facing output use `1..=n`. A [`Network`] keeps a dense membership
//! matrix for O(1) tie lookup alongside per-node adjacency lists, and the two
//! views are updated together by [`Network::toggle`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node pair. Undirected networks always hold the canonical form
/// `tail < head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dyad {
    pub tail: usize,
    pub head: usize,
}

impl Dyad {
    pub fn new(tail: usize, head: usize) -> Self {
        Dyad { tail, head }
    }

    pub fn reversed(self) -> Self {
        Dyad::new(self.head, self.tail)
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail + 1, self.head + 1)
    }
}

#[derive(Clone)]
pub struct Network {
    n: usize,
    directed: bool,
    matrix: Vec<bool>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Network {
    pub fn empty(n: usize, directed: bool) -> Self {
        Network {
            n,
            directed,
            matrix: vec![false; n * n],
            out_adj: vec![Vec::new(); n],
            in_adj: if directed { vec![Vec::new(); n] } else { Vec::new() },
            edge_count: 0,
        }
    }

    /// Complete network: every legal dyad is a tie.
    pub fn complete(n: usize, directed: bool) -> Self {
        let mut net = Network::empty(n, directed);
        for d in net.all_dyads() {
            net.insert_unchecked(d);
        }
        net
    }

    /// Builds a network from 0-based pairs. Undirected pairs may be given in
    /// either orientation; duplicates and self-loops are rejected.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut net = Network::empty(n, directed);
        for (i, j) in edges {
            let d = net.checked_dyad(i, j)?;
            if net.has(d) {
                return Err(Error::DuplicateEdge(d.tail + 1, d.head + 1));
            }
            net.insert_unchecked(d);
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of legal dyads: n(n-1) when directed, n(n-1)/2 otherwise.
    pub fn dyad_count(&self) -> usize {
        let ordered = self.n * self.n.saturating_sub(1);
        if self.directed {
            ordered
        } else {
            ordered / 2
        }
    }

    /// Canonical dyad for `(i, j)`; validates range and rejects self-loops.
    pub fn checked_dyad(&self, i: usize, j: usize) -> Result<Dyad> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: v + 1,
                    n: self.n,
                });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i + 1));
        }
        Ok(self.dyad(i, j))
    }

    /// Canonical dyad for `(i, j)` without validation.
    #[inline]
    pub fn dyad(&self, i: usize, j: usize) -> Dyad {
        if self.directed || i < j {
            Dyad::new(i, j)
        } else {
            Dyad::new(j, i)
        }
    }

    #[inline]
    pub fn has(&self, d: Dyad) -> bool {
        self.matrix[d.tail * self.n + d.head]
    }

    /// Tie lookup by node pair; for undirected networks the order is ignored.
    #[inline]
    pub fn has_tie(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.n + j]
    }

    /// Flips the dyad and returns its new state.
    pub fn toggle(&mut self, d: Dyad) -> bool {
        if self.has(d) {
            self.remove_unchecked(d);
            false
        } else {
            self.insert_unchecked(d);
            true
        }
    }

    pub fn set(&mut self, d: Dyad, present: bool) {
        if self.has(d) != present {
            self.toggle(d);
        }
    }

    fn insert_unchecked(&mut self, d: Dyad) {
        let (i, j) = (d.tail, d.head);
        self.matrix[i * self.n + j] = true;
        self.out_adj[i].push(j);
        if self.directed {
            self.in_adj[j].push(i);
        } else {
            self.matrix[j * self.n + i] = true;
            self.out_adj[j].push(i);
        }
        self.edge_count += 1;
    }

    fn remove_unchecked(&mut self, d: Dyad) {
        let (i, j) = (d.tail, d.head);
        self.matrix[i * self.n + j] = false;
        remove_value(&mut self.out_adj[i], j);
        if self.directed {
            remove_value(&mut self.in_adj[j], i);
        } else {
            self.matrix[j * self.n + i] = false;
            remove_value(&mut self.out_adj[j], i);
        }
        self.edge_count -= 1;
    }

    /// Heads of ties sent by `i` (all neighbors when undirected). Order is
    /// unspecified.
    #[inline]
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    /// Tails of ties received by `i` (all neighbors when undirected).
    #[inline]
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        if self.directed {
            &self.in_adj[i]
        } else {
            &self.out_adj[i]
        }
    }

    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    #[inline]
    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors(i).len()
    }

    /// Number of distinct alters tied to `i` in either direction.
    pub fn partner_count(&self, i: usize) -> usize {
        if !self.directed {
            return self.out_adj[i].len();
        }
        let mutual = self.out_adj[i]
            .iter()
            .filter(|&&j| self.has_tie(j, i))
            .count();
        self.out_adj[i].len() + self.in_adj[i].len() - mutual
    }

    /// Ties in canonical row-major order.
    pub fn ties(&self) -> impl Iterator<Item = Dyad> + '_ {
        self.all_dyads().filter(move |&d| self.has(d))
    }

    /// Every legal dyad in canonical row-major order.
    pub fn all_dyads(&self) -> impl Iterator<Item = Dyad> + 'static {
        let (n, directed) = (self.n, self.directed);
        (0..n).flat_map(move |i| {
            let start = if directed { 0 } else { i + 1 };
            (start..n).filter(move |&j| j != i).map(move |j| Dyad::new(i, j))
        })
    }

    pub fn same_shape(&self, other: &Network) -> bool {
        self.n == other.n && self.directed == other.directed
    }

    pub(crate) fn check_shape(&self, other: &Network) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Mismatch(format!(
                "node counts {} and {}",
                self.n, other.n
            )));
        }
        if self.directed != other.directed {
            return Err(Error::Mismatch("directedness differs".into()));
        }
        Ok(())
    }

    pub fn union(&self, other: &Network) -> Result<Network> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for d in other.ties() {
            if !out.has(d) {
                out.insert_unchecked(d);
            }
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &Network) -> Result<Network> {
        self.check_shape(other)?;
        Network::from_dyads_unchecked(self.n, self.directed, self.ties().filter(|&d| other.has(d)))
    }

    /// Ties of `self` absent from `other`.
    pub fn difference(&self, other: &Network) -> Result<Network> {
        self.check_shape(other)?;
        Network::from_dyads_unchecked(self.n, self.directed, self.ties().filter(|&d| !other.has(d)))
    }

    pub fn is_subset(&self, other: &Network) -> bool {
        self.same_shape(other) && self.ties().all(|d| other.has(d))
    }

    fn from_dyads_unchecked(
        n: usize,
        directed: bool,
        dyads: impl Iterator<Item = Dyad>,
    ) -> Result<Network> {
        let mut net = Network::empty(n, directed);
        for d in dyads {
            net.insert_unchecked(d);
        }
        Ok(net)
    }

    /// Relabels nodes: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Network {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut out = Network::empty(self.n, self.directed);
        for d in self.ties() {
            let pd = out.dyad(perm[d.tail], perm[d.head]);
            out.insert_unchecked(pd);
        }
        out
    }

    pub fn density(&self) -> f64 {
        let total = self.dyad_count();
        if total == 0 {
            0.0
        } else {
            self.edge_count as f64 / total as f64
        }
    }
}

fn remove_value(v: &mut Vec<usize>, x: usize) {
    if let Some(pos) = v.iter().position(|&y| y == x) {
        v.swap_remove(pos);
    }
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.directed == other.directed && self.matrix == other.matrix
    }
}

impl Eq for Network {}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("n", &self.n)
            .field("directed", &self.directed)
            .field("ties", &self.ties().map(|d| d.to_string()).collect::<Vec<_>>())
            .finish()
    }
}
