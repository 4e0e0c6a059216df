//! Locally weighted graph partitioning.
//!
//! Objects and clusters become the two sides of a bipartite graph; an object
//! is linked to each cluster containing it with the cluster's ECI as weight.
//! The graph is split with a transfer cut: the spectral problem is solved on
//! the small cluster side (`W = Bᵀ D⁻¹ B`), the eigenvectors are carried back
//! to the objects through `D⁻¹ B`, and the row-normalized object embedding is
//! clustered with k-means. Each k-means restart (and, for two segments, every
//! threshold on the leading nontrivial eigenvector) is a candidate; candidates
//! are polished by single-node moves that lower the normalized cut and the
//! lowest cut wins. Only object labels are returned.

use log::{debug, warn};

use crate::consensus::{canonical_labels, ConsensusResult, ConsensusWarning, Method};
use crate::ensemble::EnsembleView;
use crate::error::{Error, Result};
use crate::eval::features::FeatureMatrix;
use crate::eval::kmeans::{kmeans_fit, KMeansOptions};
use crate::eval::pool::{stream_rng, StreamDomain};
use crate::linalg::symmetric_eigen;
use crate::scalar::Scalar;
use crate::validity::{annotate_validity, ValidityReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub object: usize,
    pub cluster: usize,
    pub weight: T,
}

/// Object–cluster bipartite graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph<T> {
    n_objects: usize,
    n_clusters: usize,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> BipartiteGraph<T> {
    /// Builds a graph from explicit edges. Weights must be positive and finite,
    /// and each (object, cluster) pair may appear once.
    pub fn from_edges(n_objects: usize, n_clusters: usize, edges: Vec<Edge<T>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.object >= n_objects || e.cluster >= n_clusters {
                return Err(Error::DimensionMismatch(format!(
                    "edge ({}, {}) outside {n_objects} objects x {n_clusters} clusters",
                    e.object, e.cluster
                )));
            }
            if !(e.weight > T::zero() && e.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.object, e.cluster, e.weight
                )));
            }
            if !seen.insert((e.object, e.cluster)) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({}, {})",
                    e.object, e.cluster
                )));
            }
        }
        Ok(Self {
            n_objects,
            n_clusters,
            edges,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: e.weight * factor,
                ..*e
            })
            .collect();
        Self::from_edges(self.n_objects, self.n_clusters, edges)
    }

    /// Degree of every node: objects first, then clusters.
    pub fn degrees(&self) -> Vec<T> {
        let mut deg = vec![T::zero(); self.n_objects + self.n_clusters];
        for e in &self.edges {
            deg[e.object] += e.weight;
            deg[self.n_objects + e.cluster] += e.weight;
        }
        deg
    }

    /// Connected component of every node (objects first, then clusters),
    /// numbered in order of first appearance, and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let total = self.n_objects + self.n_clusters;
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let a = find(&mut parent, e.object);
            let b = find(&mut parent, self.n_objects + e.cluster);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let roots: Vec<usize> = (0..total).map(|x| find(&mut parent, x)).collect();
        let ids = canonical_labels(&roots);
        let count = ids.iter().max().map_or(0, |&m| m + 1);
        (ids, count)
    }
}

/// Normalized cut `Σ_s cut(V_s, V \ V_s) / vol(V_s)` of a partition of all
/// nodes. Segments without volume contribute nothing.
pub fn normalized_cut<T: Scalar>(
    graph: &BipartiteGraph<T>,
    object_labels: &[usize],
    cluster_labels: &[usize],
) -> T {
    let k = object_labels
        .iter()
        .chain(cluster_labels)
        .max()
        .map_or(0, |&m| m + 1);
    let mut cut = vec![T::zero(); k];
    let mut vol = vec![T::zero(); k];
    for e in &graph.edges {
        let (a, b) = (object_labels[e.object], cluster_labels[e.cluster]);
        vol[a] += e.weight;
        vol[b] += e.weight;
        if a != b {
            cut[a] += e.weight;
            cut[b] += e.weight;
        }
    }
    cut.iter()
        .zip(&vol)
        .filter(|(_, &v)| v > T::zero())
        .map(|(&c, &v)| c / v)
        .sum()
}

/// Locally weighted bipartite graph: object `i` links to every cluster
/// containing it, with the cluster's ECI as weight.
pub fn build_lwbg<T: Scalar>(
    view: &EnsembleView,
    report: &ValidityReport<T>,
) -> Result<BipartiteGraph<T>> {
    if report.n_clusters() != view.n_clusters() {
        return Err(Error::DimensionMismatch(format!(
            "report has {} clusters, view has {}",
            report.n_clusters(),
            view.n_clusters()
        )));
    }
    let mut edges = Vec::with_capacity(view.n_objects() * view.n_clusterings());
    for i in 0..view.n_objects() {
        for m in 0..view.n_clusterings() {
            let c = view.cluster_of(i, m);
            edges.push(Edge {
                object: i,
                cluster: c,
                weight: report.eci()[c],
            });
        }
    }
    BipartiteGraph::from_edges(view.n_objects(), view.n_clusters(), edges)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcutOptions {
    /// `replicates` is the number of independently seeded k-means runs, each
    /// kept as a separate candidate partition.
    pub kmeans: KMeansOptions,
    /// Polish candidates with normalized-cut-decreasing single-node moves.
    pub refine: bool,
}

impl Default for TcutOptions {
    fn default() -> Self {
        Self {
            kmeans: KMeansOptions {
                replicates: 10,
                ..KMeansOptions::default()
            },
            refine: true,
        }
    }
}

const MAX_REFINE_PASSES: usize = 100;
/// Nontrivial eigenvectors swept for threshold cuts when `k = 2`.
const SWEEP_VECTORS: usize = 4;

/// Spectral basis of a bipartite graph, reusable for several values of `k`.
#[derive(Debug, Clone)]
pub struct TransferCut<T> {
    n_objects: usize,
    n_clusters: usize,
    components: Vec<usize>,
    n_components: usize,
    /// Incident (cluster, weight) of every object, weights scaled to max 1.
    object_adj: Vec<Vec<(usize, T)>>,
    /// Incident (object, weight) of every cluster, same scaling.
    cluster_adj: Vec<Vec<(usize, T)>>,
    /// Object embedding for every cluster-side eigenvector, most significant
    /// first; row-major `n_objects × n_clusters`.
    embedding: Vec<T>,
}

impl<T: Scalar> TransferCut<T> {
    pub fn new(graph: &BipartiteGraph<T>) -> Result<Self> {
        let (no, nc) = (graph.n_objects, graph.n_clusters);
        let (components, n_components) = graph.components();
        let start = std::time::Instant::now();

        // Weights are divided by the largest one so that rescaling the graph
        // leaves every later quantity bit-identical.
        let top = graph.edges.iter().map(|e| e.weight).fold(T::zero(), T::max);
        let mut adjacency: Vec<Vec<(usize, T)>> = vec![Vec::new(); no];
        for e in &graph.edges {
            adjacency[e.object].push((e.cluster, e.weight / top));
        }
        adjacency
            .iter_mut()
            .for_each(|a| a.sort_by_key(|&(c, _)| c));
        let object_degree: Vec<T> = adjacency
            .iter()
            .map(|a| a.iter().fold(T::zero(), |s, &(_, w)| s + w))
            .collect();

        // cluster-side graph W = Bᵀ D⁻¹ B
        let mut w = vec![T::zero(); nc * nc];
        for (i, adj) in adjacency.iter().enumerate() {
            if object_degree[i] == T::zero() {
                continue;
            }
            for &(p, wp) in adj {
                for &(q, wq) in adj {
                    w[p * nc + q] += wp * wq / object_degree[i];
                }
            }
        }
        let cluster_degree: Vec<T> = (0..nc)
            .map(|p| w[p * nc..(p + 1) * nc].iter().copied().sum())
            .collect();
        let mut normalized = vec![T::zero(); nc * nc];
        for p in 0..nc {
            for q in 0..nc {
                let dd = cluster_degree[p] * cluster_degree[q];
                if dd > T::zero() {
                    normalized[p * nc + q] = w[p * nc + q] / dd.sqrt();
                }
            }
        }
        let eigen = symmetric_eigen(nc, &normalized)?;
        debug!(
            "tcut: {nc}x{nc} eigendecomposition in {:?}",
            start.elapsed()
        );

        // generalized eigenvectors f = D^{-1/2} u, transferred as D_o⁻¹ B f
        let mut embedding = vec![T::zero(); no * nc];
        for rank in 0..nc {
            let j = nc - 1 - rank;
            let f: Vec<T> = (0..nc)
                .map(|p| {
                    if cluster_degree[p] > T::zero() {
                        eigen.vector(j, p) / cluster_degree[p].sqrt()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            for (i, adj) in adjacency.iter().enumerate() {
                if object_degree[i] > T::zero() {
                    let s = adj.iter().fold(T::zero(), |s, &(p, wp)| s + wp * f[p]);
                    embedding[i * nc + rank] = s / object_degree[i];
                }
            }
        }
        let mut cluster_adj = vec![Vec::new(); nc];
        for (i, adj) in adjacency.iter().enumerate() {
            for &(p, wp) in adj {
                cluster_adj[p].push((i, wp));
            }
        }
        Ok(Self {
            n_objects: no,
            n_clusters: nc,
            components,
            n_components,
            object_adj: adjacency,
            cluster_adj,
            embedding,
        })
    }

    /// Partitions the objects into `k` segments.
    pub fn partition(&self, k: usize, seed: u64, options: &TcutOptions) -> Result<ConsensusResult> {
        let n = self.n_objects;
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, min: 1, max: n });
        }
        if k > self.n_clusters {
            return Err(Error::InfeasibleK {
                k,
                capacity: self.n_clusters,
            });
        }
        let mut warnings = Vec::new();
        let labels = if k == 1 {
            vec![0; n]
        } else if self.n_components == k {
            self.components[..n].to_vec()
        } else if self.n_components > k {
            warn!(
                "bipartite graph has {} components for k = {k}; packing whole components",
                self.n_components
            );
            warnings.push(ConsensusWarning::ComponentsMerged {
                components: self.n_components,
                k,
            });
            self.pack_components(k)
        } else {
            self.spectral_labels(k, seed, options)?
        };
        let labels = canonical_labels(&labels);
        let effective = labels.iter().max().map_or(0, |&m| m + 1);
        if effective < k {
            warn!("only {effective} of {k} segments contain objects");
            warnings.push(ConsensusWarning::EmptySegments {
                requested: k,
                effective,
            });
        }
        Ok(ConsensusResult {
            labels,
            k,
            method: Method::Lwgp,
            warnings,
        })
    }

    fn spectral_labels(&self, k: usize, seed: u64, options: &TcutOptions) -> Result<Vec<usize>> {
        let n = self.n_objects;
        let nc = self.n_clusters;
        let mut rows = Vec::with_capacity(n * k);
        for i in 0..n {
            let row = &self.embedding[i * nc..i * nc + k];
            let norm = row.iter().map(|&x| x * x).sum::<T>().sqrt();
            if norm > T::zero() {
                rows.extend(row.iter().map(|&x| x / norm));
            } else {
                rows.extend_from_slice(row);
            }
        }
        let points = FeatureMatrix::new(n, k, rows)?;
        let mut rng = stream_rng(seed, StreamDomain::Partition, k as u64);
        let single = KMeansOptions {
            replicates: 1,
            ..options.kmeans
        };
        let mut candidates = Vec::new();
        for _ in 0..options.kmeans.replicates.max(1) {
            candidates.push(kmeans_fit(&points, k, &mut rng, &single)?.labels);
        }
        if k == 2 {
            for rank in 1..nc.min(1 + SWEEP_VECTORS) {
                candidates.push(self.sweep_cut(rank));
            }
        }

        let mut best: Option<(T, Vec<usize>)> = None;
        for objects in candidates {
            let mut nodes = self.complete(&objects, k);
            if options.refine {
                self.refine(&mut nodes, k);
            }
            let value = self.ncut(&nodes, k);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, nodes));
            }
        }
        let (value, mut nodes) = best.expect("at least one candidate");
        debug!("tcut: k = {k}, normalized cut {value}");
        nodes.truncate(n);
        Ok(nodes)
    }

    /// Best threshold split of the objects ordered by the eigenvector of the
    /// given rank (0 is the trivial one).
    fn sweep_cut(&self, rank: usize) -> Vec<usize> {
        let n = self.n_objects;
        let nc = self.n_clusters;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.embedding[a * nc + rank]
                .partial_cmp(&self.embedding[b * nc + rank])
                .expect("finite embedding")
                .then(a.cmp(&b))
        });
        let mut objects = vec![1usize; n];
        let mut best: Option<(T, Vec<usize>)> = None;
        for &i in &order[..n - 1] {
            objects[i] = 0;
            let value = self.ncut(&self.complete(&objects, 2), 2);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, objects.clone()));
            }
        }
        best.expect("at least two objects").1
    }

    /// Extends an object labelling to all nodes: each cluster joins the
    /// segment holding most of its edge weight.
    fn complete(&self, objects: &[usize], k: usize) -> Vec<usize> {
        let mut nodes = objects.to_vec();
        let mut pull = vec![T::zero(); k];
        for adj in &self.cluster_adj {
            pull.iter_mut().for_each(|x| *x = T::zero());
            adj.iter().for_each(|&(i, w)| pull[objects[i]] += w);
            nodes.push((1..k).fold(0, |b, s| if pull[s] > pull[b] { s } else { b }));
        }
        nodes
    }

    /// Per-segment cut and volume of a labelling of all nodes.
    fn cut_and_volume(&self, nodes: &[usize], k: usize) -> (Vec<T>, Vec<T>) {
        let n = self.n_objects;
        let mut cut = vec![T::zero(); k];
        let mut vol = vec![T::zero(); k];
        for (i, adj) in self.object_adj.iter().enumerate() {
            for &(p, w) in adj {
                let (a, b) = (nodes[i], nodes[n + p]);
                vol[a] += w;
                vol[b] += w;
                if a != b {
                    cut[a] += w;
                    cut[b] += w;
                }
            }
        }
        (cut, vol)
    }

    fn ncut(&self, nodes: &[usize], k: usize) -> T {
        let (cut, vol) = self.cut_and_volume(nodes, k);
        cut.iter()
            .zip(&vol)
            .filter(|(_, &v)| v > T::zero())
            .map(|(&c, &v)| c / v)
            .sum()
    }

    /// Moves single nodes between segments while that lowers the normalized
    /// cut. A segment never loses its last object.
    fn refine(&self, nodes: &mut [usize], k: usize) {
        let n = self.n_objects;
        let ratio = |c: T, v: T| if v > T::zero() { c / v } else { T::zero() };
        let tolerance = T::epsilon() * T::lit(64.0);
        let mut objects_in = vec![0usize; k];
        nodes[..n].iter().for_each(|&s| objects_in[s] += 1);
        let (mut cut, mut vol) = self.cut_and_volume(nodes, k);
        let mut pull = vec![T::zero(); k];
        for _ in 0..MAX_REFINE_PASSES {
            let mut moved = false;
            for v in 0..nodes.len() {
                let a = nodes[v];
                if v < n && objects_in[a] == 1 {
                    continue;
                }
                pull.iter_mut().for_each(|x| *x = T::zero());
                let mut degree = T::zero();
                if v < n {
                    for &(p, w) in &self.object_adj[v] {
                        pull[nodes[n + p]] += w;
                        degree += w;
                    }
                } else {
                    for &(i, w) in &self.cluster_adj[v - n] {
                        pull[nodes[i]] += w;
                        degree += w;
                    }
                }
                let two = T::lit(2.0);
                let mut best: Option<(T, usize)> = None;
                for b in (0..k).filter(|&b| b != a) {
                    let before = ratio(cut[a], vol[a]) + ratio(cut[b], vol[b]);
                    let after = ratio(cut[a] - degree + two * pull[a], vol[a] - degree)
                        + ratio(cut[b] + degree - two * pull[b], vol[b] + degree);
                    let delta = after - before;
                    if delta < -tolerance && best.is_none_or(|(d, _)| delta < d) {
                        best = Some((delta, b));
                    }
                }
                if let Some((_, b)) = best {
                    nodes[v] = b;
                    if v < n {
                        objects_in[a] -= 1;
                        objects_in[b] += 1;
                    }
                    // recompute rather than update so rounding cannot accumulate
                    (cut, vol) = self.cut_and_volume(nodes, k);
                    moved = true;
                }
            }
            if !moved && !self.group_move(nodes, k, &mut objects_in) {
                break;
            }
            if moved {
                continue;
            }
            (cut, vol) = self.cut_and_volume(nodes, k);
        }
    }

    /// Moves one cluster together with all its member objects to the segment
    /// where the normalized cut drops the most, for the first cluster where
    /// such a move helps. Returns whether anything moved.
    fn group_move(&self, nodes: &mut [usize], k: usize, objects_in: &mut [usize]) -> bool {
        let n = self.n_objects;
        let tolerance = T::epsilon() * T::lit(64.0);
        let current = self.ncut(nodes, k);
        let mut trial = nodes.to_vec();
        for (c, adj) in self.cluster_adj.iter().enumerate() {
            let mut best: Option<(T, usize)> = None;
            for b in 0..k {
                trial.copy_from_slice(nodes);
                trial[n + c] = b;
                adj.iter().for_each(|&(i, _)| trial[i] = b);
                if (0..k).any(|s| objects_in[s] > 0 && !trial[..n].contains(&s)) {
                    continue;
                }
                let value = self.ncut(&trial, k);
                if value < current - tolerance && best.is_none_or(|(v, _)| value < v) {
                    best = Some((value, b));
                }
            }
            if let Some((_, b)) = best {
                nodes[n + c] = b;
                adj.iter().for_each(|&(i, _)| nodes[i] = b);
                objects_in.iter_mut().for_each(|x| *x = 0);
                nodes[..n].iter().for_each(|&s| objects_in[s] += 1);
                return true;
            }
        }
        false
    }

    /// Largest components first, each into the bin holding the fewest objects.
    fn pack_components(&self, k: usize) -> Vec<usize> {
        let n = self.n_objects;
        let mut sizes = vec![0usize; self.n_components];
        self.components[..n].iter().for_each(|&c| sizes[c] += 1);
        let mut order: Vec<usize> = (0..self.n_components).collect();
        order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
        let mut load = vec![0usize; k];
        let mut bin = vec![0usize; self.n_components];
        for c in order {
            let target = (0..k).min_by_key(|&b| (load[b], b)).expect("k >= 1");
            load[target] += sizes[c];
            bin[c] = target;
        }
        self.components[..n].iter().map(|&c| bin[c]).collect()
    }
}

/// Partitions the objects of `graph` into `k` segments by transfer cut.
pub fn tcut_partition<T: Scalar>(
    graph: &BipartiteGraph<T>,
    k: usize,
    seed: u64,
) -> Result<ConsensusResult> {
    tcut_partition_with(graph, k, seed, &TcutOptions::default())
}

pub fn tcut_partition_with<T: Scalar>(
    graph: &BipartiteGraph<T>,
    k: usize,
    seed: u64,
    options: &TcutOptions,
) -> Result<ConsensusResult> {
    if k == 0 || k > graph.n_objects() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: graph.n_objects(),
        });
    }
    if k > graph.n_clusters() {
        return Err(Error::InfeasibleK {
            k,
            capacity: graph.n_clusters(),
        });
    }
    TransferCut::new(graph)?.partition(k, seed, options)
}

/// LWGP with a precomputed validity report.
pub fn lwgp_with_report<T: Scalar>(
    view: &EnsembleView,
    report: &ValidityReport<T>,
    k: usize,
    seed: u64,
) -> Result<ConsensusResult> {
    let graph = build_lwbg(view, report)?;
    tcut_partition(&graph, k, seed)
}

/// Locally weighted graph partitioning.
pub fn lwgp<T: Scalar>(
    view: &EnsembleView,
    theta: T,
    k: usize,
    seed: u64,
) -> Result<ConsensusResult> {
    let report = annotate_validity(view, theta)?;
    lwgp_with_report(view, &report, k, seed)
}
