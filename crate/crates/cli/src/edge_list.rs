//! Plain-text edge lists and node alignment.
//!
//! One edge per line as `u v`, separated by spaces, tabs, or a comma. Text
//! after `#` is ignored. A line with a single ID declares a node without
//! edges, which keeps isolated nodes through a write/read round trip.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sbm_twosample::AdjacencyMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("edge list has no nodes")]
    EmptyInput,

    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("node sets differ ({}; {}); pass --align intersection to keep the common nodes", summarize("only in X", only_x), summarize("only in Y", only_y))]
    Alignment { only_x: Vec<String>, only_y: Vec<String> },

    #[error("the networks share fewer than two nodes")]
    NoCommonNodes,
}

fn summarize(what: &str, ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut s = format!("{} {what}", ids.len());
    if !ids.is_empty() {
        let head: Vec<&str> = ids.iter().take(SHOWN).map(String::as_str).collect();
        s.push_str(&format!(": {}", head.join(", ")));
        if ids.len() > SHOWN {
            s.push_str(", ...");
        }
    }
    s
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    node_ids: BTreeSet<String>,
    /// Unordered pairs stored as `(min, max)`.
    edges: BTreeSet<(String, String)>,
    self_loops: usize,
    duplicates: usize,
}

impl EdgeList {
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut list = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
            match tokens.as_slice() {
                [] => {}
                [id] => {
                    list.node_ids.insert((*id).to_string());
                }
                [u, v] => list.add_edge(u, v),
                _ => {
                    return Err(IngestError::Parse {
                        line: idx + 1,
                        reason: format!("expected 1 or 2 node IDs, found {}", tokens.len()),
                    })
                }
            }
        }
        if list.node_ids.is_empty() {
            return Err(IngestError::EmptyInput);
        }
        Ok(list)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    fn add_edge(&mut self, u: &str, v: &str) {
        self.node_ids.insert(u.to_string());
        self.node_ids.insert(v.to_string());
        if u == v {
            self.self_loops += 1;
            return;
        }
        let key = if u < v { (u.to_string(), v.to_string()) } else { (v.to_string(), u.to_string()) };
        if !self.edges.insert(key) {
            self.duplicates += 1;
        }
    }

    pub fn node_ids(&self) -> &BTreeSet<String> {
        &self.node_ids
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Self-loop lines dropped while parsing.
    pub fn self_loops(&self) -> usize {
        self.self_loops
    }

    /// Repeated unordered pairs dropped while parsing.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    /// Node sets must be identical.
    #[default]
    Strict,
    /// Keep the nodes present in both networks.
    Intersection,
}

impl fmt::Display for AlignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignMode::Strict => "strict",
            AlignMode::Intersection => "intersection",
        })
    }
}

/// Two adjacency matrices on a shared index set.
#[derive(Debug, Clone)]
pub struct AlignedPair {
    pub x: AdjacencyMatrix,
    pub y: AdjacencyMatrix,
    /// External ID of each index, in sorted order.
    pub ids: Vec<String>,
    pub dropped_x: usize,
    pub dropped_y: usize,
}

fn adjacency(list: &EdgeList, index: &HashMap<&str, usize>) -> AdjacencyMatrix {
    let edges: Vec<(usize, usize)> = list
        .edges
        .iter()
        .filter_map(|(u, v)| Some((*index.get(u.as_str())?, *index.get(v.as_str())?)))
        .collect();
    AdjacencyMatrix::from_edges(index.len(), &edges).expect("indices are in range and pairs are distinct")
}

pub fn align_networks(ex: &EdgeList, ey: &EdgeList, mode: AlignMode) -> Result<AlignedPair, IngestError> {
    let ids: Vec<String> = match mode {
        AlignMode::Strict => {
            if ex.node_ids != ey.node_ids {
                return Err(IngestError::Alignment {
                    only_x: ex.node_ids.difference(&ey.node_ids).cloned().collect(),
                    only_y: ey.node_ids.difference(&ex.node_ids).cloned().collect(),
                });
            }
            ex.node_ids.iter().cloned().collect()
        }
        AlignMode::Intersection => ex.node_ids.intersection(&ey.node_ids).cloned().collect(),
    };
    if ids.len() < 2 {
        return Err(IngestError::NoCommonNodes);
    }
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    Ok(AlignedPair {
        x: adjacency(ex, &index),
        y: adjacency(ey, &index),
        dropped_x: ex.num_nodes() - ids.len(),
        dropped_y: ey.num_nodes() - ids.len(),
        ids,
    })
}

/// Write `a` as an edge list with zero-padded numeric IDs, so that sorting
/// the IDs recovers the index order. Isolated nodes get a line of their own.
pub fn write_edge_list<W: Write>(a: &AdjacencyMatrix, mut out: W) -> io::Result<()> {
    let n = a.n();
    let width = n.saturating_sub(1).to_string().len();
    for i in 0..n {
        if a.degree(i) == 0 {
            writeln!(out, "{i:0width$}")?;
        }
    }
    for (i, j) in a.edges() {
        writeln!(out, "{i:0width$} {j:0width$}")?;
    }
    Ok(())
}
