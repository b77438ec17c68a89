//! Panel files: a JSON manifest pointing at per-snapshot edge lists plus
//! optional node-attribute and dyad-covariate CSVs.
//!
//! Edge lists have header `tail,head` and 1-based node indices. Node
//! attributes use header `node,<name>...`. Dyad covariates are headerless
//! dense n×n matrices. Relative paths in the manifest resolve against the
//! manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::covariates::{Covariates, DyadCovariate, NodeCovariate, NodeValues};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::series::NetworkSeries;
use crate::transition::{decompose_transition, TransitionSummary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub directed: bool,
    pub snapshots: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_attrs: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dyad_covs: BTreeMap<String, PathBuf>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Manifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_series(manifest_path: impl AsRef<Path>) -> Result<NetworkSeries> {
    let manifest_path = manifest_path.as_ref();
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let networks = manifest
        .snapshots
        .iter()
        .map(|p| read_edge_list(&resolve(base, p), manifest.n, manifest.directed))
        .collect::<Result<Vec<_>>>()?;
    let mut covariates = Covariates::default();
    if let Some(p) = &manifest.node_attrs {
        for cov in read_node_attrs(&resolve(base, p), manifest.n)? {
            covariates.insert_node(cov);
        }
    }
    for (name, p) in &manifest.dyad_covs {
        covariates.insert_dyad(read_dyad_cov(&resolve(base, p), name, manifest.n)?);
    }
    NetworkSeries::new(networks, covariates)
}

/// Writes snapshots `t0.csv…`, covariate files and `manifest.json` into
/// `dir`; returns the manifest path.
pub fn save_series(series: &NetworkSeries, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut snapshots = Vec::new();
    for (t, net) in series.networks().iter().enumerate() {
        let name = PathBuf::from(format!("t{t}.csv"));
        write_edge_list(&dir.join(&name), net)?;
        snapshots.push(name);
    }
    let node_attrs = if series.covariates.node.is_empty() {
        None
    } else {
        let name = PathBuf::from("nodes.csv");
        write_node_attrs(&dir.join(&name), &series.covariates, series.n())?;
        Some(name)
    };
    let mut dyad_covs = BTreeMap::new();
    for (key, cov) in &series.covariates.dyad {
        let name = PathBuf::from(format!("dyadcov_{key}.csv"));
        write_dyad_cov(&dir.join(&name), cov)?;
        dyad_covs.insert(key.clone(), name);
    }
    let manifest = Manifest {
        n: series.n(),
        directed: series.is_directed(),
        snapshots,
        node_attrs,
        dyad_covs,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Everything wrong with a panel, plus the per-transition decomposition
/// summary when all snapshots load.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub directed: bool,
    pub snapshots: usize,
    pub violations: Vec<String>,
    pub transitions: Vec<TransitionSummary>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a manifest and every file it names, collecting all violations
/// instead of stopping at the first.
pub fn validate_manifest(manifest_path: impl AsRef<Path>) -> ValidationReport {
    let manifest_path = manifest_path.as_ref();
    let mut report = ValidationReport::default();
    let manifest = match Manifest::read(manifest_path) {
        Ok(m) => m,
        Err(e) => {
            report.violations.push(e.to_string());
            return report;
        }
    };
    report.n = manifest.n;
    report.directed = manifest.directed;
    report.snapshots = manifest.snapshots.len();
    if manifest.n == 0 {
        report.violations.push(format!("{}: n must be positive", manifest_path.display()));
    }
    if manifest.snapshots.len() < 2 {
        report.violations.push(format!(
            "{}: a panel needs at least 2 snapshots, found {}",
            manifest_path.display(),
            manifest.snapshots.len()
        ));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut networks = Vec::new();
    for p in &manifest.snapshots {
        match read_edge_list(&resolve(base, p), manifest.n, manifest.directed) {
            Ok(net) => networks.push(net),
            Err(e) => report.violations.push(e.to_string()),
        }
    }
    let mut covariates = Covariates::default();
    if let Some(p) = &manifest.node_attrs {
        match read_node_attrs(&resolve(base, p), manifest.n) {
            Ok(covs) => covs.into_iter().for_each(|c| covariates.insert_node(c)),
            Err(e) => report.violations.push(e.to_string()),
        }
    }
    for (name, p) in &manifest.dyad_covs {
        match read_dyad_cov(&resolve(base, p), name, manifest.n) {
            Ok(c) => covariates.insert_dyad(c),
            Err(e) => report.violations.push(e.to_string()),
        }
    }
    if let Err(e) = covariates.validate(manifest.n, manifest.directed) {
        report.violations.push(e.to_string());
    }
    if networks.len() == manifest.snapshots.len() {
        for w in networks.windows(2) {
            match decompose_transition(&w[0], &w[1]) {
                Ok(d) => report.transitions.push(d.summary(&w[0])),
                Err(e) => report.violations.push(e.to_string()),
            }
        }
    }
    report
}

fn csv_reader(path: &Path, has_headers: bool) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(path, line, e.to_string())
}

pub fn read_edge_list(path: &Path, n: usize, directed: bool) -> Result<Network> {
    let mut rdr = csv_reader(path, true)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "tail" || &headers[1] != "head" {
        return Err(Error::parse(path, 1, "expected header `tail,head`"));
    }
    let mut net = Network::empty(n, directed);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |k: usize| -> Result<usize> {
            rec[k]
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, format!("bad node index `{}`", &rec[k])))
        };
        let (tail, head) = (field(0)?, field(1)?);
        let located = |e: Error| Error::parse(path, line, e.to_string());
        if tail == 0 || head == 0 {
            return Err(located(Error::NodeOutOfRange { node: 0, n }));
        }
        if !directed && tail > head {
            return Err(Error::parse(
                path,
                line,
                format!("undirected edge ({tail},{head}) must have tail < head"),
            ));
        }
        let d = net.checked_dyad(tail - 1, head - 1).map_err(located)?;
        if net.has(d) {
            return Err(located(Error::DuplicateEdge(tail, head)));
        }
        net.toggle(d);
    }
    Ok(net)
}

pub fn write_edge_list(path: &Path, net: &Network) -> Result<()> {
    let mut out = String::from("tail,head\n");
    for d in net.ties() {
        out.push_str(&format!("{},{}\n", d.tail + 1, d.head + 1));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_node_attrs(path: &Path, n: usize) -> Result<Vec<NodeCovariate>> {
    let mut rdr = csv_reader(path, true)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.is_empty() || &headers[0] != "node" {
        return Err(Error::parse(path, 1, "expected header `node,<name>...`"));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut columns: Vec<Vec<Option<String>>> = vec![vec![None; n]; names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let node: usize = rec[0]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad node index `{}`", &rec[0])))?;
        if node == 0 || node > n {
            return Err(Error::parse(path, line, Error::NodeOutOfRange { node, n }.to_string()));
        }
        for (k, col) in columns.iter_mut().enumerate() {
            if col[node - 1].is_some() {
                return Err(Error::parse(path, line, format!("node {node} listed twice")));
            }
            col[node - 1] = Some(rec[k + 1].to_string());
        }
    }
    names
        .into_iter()
        .zip(columns)
        .map(|(name, col)| {
            let values = col
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| Error::InvalidCovariate {
                        name: name.clone(),
                        reason: format!("no value for node {}", i + 1),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let numeric: Option<Vec<f64>> = values.iter().map(|v| v.parse().ok()).collect();
            Ok(match numeric {
                Some(nums) => NodeCovariate::numeric(name, nums),
                None => NodeCovariate::categorical(name, values),
            })
        })
        .collect()
}

fn write_node_attrs(path: &Path, covs: &Covariates, n: usize) -> Result<()> {
    let mut out = String::from("node");
    for name in covs.node.keys() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&(i + 1).to_string());
        for cov in covs.node.values() {
            out.push(',');
            match &cov.values {
                NodeValues::Categorical(v) => out.push_str(&v[i]),
                NodeValues::Numeric(v) => out.push_str(&format!("{:?}", v[i])),
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_dyad_cov(path: &Path, name: &str, n: usize) -> Result<DyadCovariate> {
    let mut rdr = csv_reader(path, false)?;
    let mut rows = Vec::with_capacity(n);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(path, line, format!("bad number `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::parse(
            path,
            rows.len(),
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    DyadCovariate::new(name, rows)
}

fn write_dyad_cov(path: &Path, cov: &DyadCovariate) -> Result<()> {
    let mut out = String::new();
    for row in cov.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
