use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Consensus function that produced a clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Locally weighted evidence accumulation.
    Lwea,
    /// Locally weighted graph partitioning.
    Lwgp,
    /// Unweighted evidence accumulation (CA matrix + average link).
    Eac,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lwea => "lwea",
            Method::Lwgp => "lwgp",
            Method::Eac => "eac",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lwea" => Ok(Method::Lwea),
            "lwgp" => Ok(Method::Lwgp),
            "eac" => Ok(Method::Eac),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Non-fatal conditions met while computing a consensus clustering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsensusWarning {
    /// The bipartite graph had more connected components than requested
    /// segments; whole components were packed into `k` groups.
    ComponentsMerged { components: usize, k: usize },
    /// Some segments ended up without object nodes.
    EmptySegments { requested: usize, effective: usize },
}

impl fmt::Display for ConsensusWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsensusWarning::ComponentsMerged { components, k } => write!(
                f,
                "graph has {components} connected components; packed into {k} segments"
            ),
            ConsensusWarning::EmptySegments {
                requested,
                effective,
            } => write!(
                f,
                "only {effective} of {requested} segments contain objects"
            ),
        }
    }
}

/// Final clustering of the objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusResult {
    /// Label of every object, in `0..k`.
    pub labels: Vec<usize>,
    /// Requested number of clusters.
    pub k: usize,
    pub method: Method,
    pub warnings: Vec<ConsensusWarning>,
}

impl ConsensusResult {
    /// Number of distinct labels actually used.
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    /// One label per line.
    pub fn write_labels<W: Write>(&self, mut out: W) -> Result<()> {
        for l in &self.labels {
            writeln!(out, "{l}")?;
        }
        Ok(())
    }
}

/// Relabels so that labels appear as `0, 1, 2, …` in order of first object index.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_round_trip() {
        for m in [Method::Lwea, Method::Lwgp, Method::Eac] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("ward".parse::<Method>().is_err());
    }

    #[test]
    fn canonical_order() {
        assert_eq!(canonical_labels(&[7, 7, 2, 9, 2]), vec![0, 0, 1, 2, 1]);
    }
}
