use crate::covariates::Covariates;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::transition::{decompose_transition, TransitionDecomposition};

/// Time-ordered panel y⁰, …, yᵀ over one node set.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSeries {
    networks: Vec<Network>,
    pub covariates: Covariates,
}

impl NetworkSeries {
    pub fn new(networks: Vec<Network>, covariates: Covariates) -> Result<Self> {
        if networks.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 snapshots, got {}",
                networks.len()
            )));
        }
        let first = &networks[0];
        for (t, net) in networks.iter().enumerate().skip(1) {
            if !net.same_shape(first) {
                return Err(Error::InvalidSeries(format!(
                    "snapshot {t} has n={} directed={}, expected n={} directed={}",
                    net.n(),
                    net.is_directed(),
                    first.n(),
                    first.is_directed()
                )));
            }
        }
        covariates.validate(first.n(), first.is_directed())?;
        Ok(NetworkSeries {
            networks,
            covariates,
        })
    }

    pub fn networks(&self) -> &[Network] {
        &self.networks
    }

    pub fn n(&self) -> usize {
        self.networks[0].n()
    }

    pub fn is_directed(&self) -> bool {
        self.networks[0].is_directed()
    }

    /// Number of snapshots (T+1).
    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn transition_count(&self) -> usize {
        self.networks.len() - 1
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&Network, &Network)> {
        self.networks.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn decompositions(&self) -> Vec<TransitionDecomposition> {
        self.transitions()
            .map(|(a, b)| decompose_transition(a, b).expect("series snapshots share shape"))
            .collect()
    }

    /// Sub-series covering snapshots `from..=to`.
    pub fn window(&self, from: usize, to: usize) -> Result<NetworkSeries> {
        if to >= self.networks.len() || from >= to {
            return Err(Error::InvalidSeries(format!(
                "window {from}..={to} outside 0..={}",
                self.networks.len() - 1
            )));
        }
        NetworkSeries::new(self.networks[from..=to].to_vec(), self.covariates.clone())
    }

    /// Tie spells: maximal runs of consecutive snapshots in which a dyad is
    /// tied. Runs still open at the last snapshot are right-censored.
    pub fn spells(&self) -> SpellSummary {
        let mut summary = SpellSummary::default();
        let first = &self.networks[0];
        for d in first.all_dyads() {
            let mut run = 0usize;
            for net in &self.networks {
                if net.has(d) {
                    run += 1;
                } else if run > 0 {
                    summary.completed.push(run);
                    run = 0;
                }
            }
            if run > 0 {
                summary.censored += 1;
            }
        }
        summary
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpellSummary {
    /// Lengths, in snapshots, of spells that ended inside the series.
    pub completed: Vec<usize>,
    pub censored: usize,
}

impl SpellSummary {
    pub fn mean_completed(&self) -> Option<f64> {
        if self.completed.is_empty() {
            None
        } else {
            Some(self.completed.iter().sum::<usize>() as f64 / self.completed.len() as f64)
        }
    }
}
