//! Independent reference implementations used as test oracles. None of these
//! call into the optimized code paths they check.

#![allow(dead_code)]

use lwcluster::{BipartiteGraph, Scalar};
use rand::Rng;

/// Random label matrix columns: `m` clusterings of `n` objects, each with a
/// cluster count drawn from `k_range`.
pub fn random_columns<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    k_range: std::ops::RangeInclusive<usize>,
) -> Vec<Vec<u64>> {
    (0..m)
        .map(|_| {
            let k = rng.random_range(k_range.clone());
            (0..n).map(|_| rng.random_range(0..k) as u64).collect()
        })
        .collect()
}

/// Entropy in bits straight from the definition, from an explicit contingency table.
pub fn naive_uncertainty(columns: &[Vec<u64>], source: usize, label: u64, target: usize) -> f64 {
    let members: Vec<usize> = (0..columns[source].len())
        .filter(|&i| columns[source][i] == label)
        .collect();
    let mut targets: Vec<u64> = columns[target].clone();
    targets.sort_unstable();
    targets.dedup();
    let size = members.len() as f64;
    let mut h = 0.0;
    for t in targets {
        let inter = members.iter().filter(|&&i| columns[target][i] == t).count() as f64;
        let p = inter / size;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Triple loop over (i, j, m): `(1/M) Σ_m w_i^m δ_ij^m`.
pub fn naive_coassoc(columns: &[Vec<u64>], weight: impl Fn(usize, u64) -> f64) -> Vec<f64> {
    let n = columns[0].len();
    let m = columns.len() as f64;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for (c, col) in columns.iter().enumerate() {
                if col[i] == col[j] {
                    s += weight(c, col[i]);
                }
            }
            out[i * n + j] = s / m;
        }
    }
    out
}

/// Average link by rescanning every region pair each step and averaging the
/// original matrix over all cross pairs. Returns the merge sequence as
/// (sorted member list of the merged region, similarity).
pub fn naive_average_link(n: usize, sim: &[f64]) -> Vec<(Vec<usize>, f64)> {
    let mut regions: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while regions.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..regions.len() {
            for b in a + 1..regions.len() {
                let mut s = 0.0;
                for &i in &regions[a] {
                    for &j in &regions[b] {
                        s += sim[i * n + j];
                    }
                }
                s /= (regions[a].len() * regions[b].len()) as f64;
                let key = (
                    regions[a][0].min(regions[b][0]),
                    regions[a][0].max(regions[b][0]),
                );
                let better = match best {
                    None => true,
                    Some((ba, bb, bs)) => {
                        let bkey = (
                            regions[ba][0].min(regions[bb][0]),
                            regions[ba][0].max(regions[bb][0]),
                        );
                        s > bs || (s == bs && key < bkey)
                    }
                };
                if better {
                    best = Some((a, b, s));
                }
            }
        }
        let (a, b, s) = best.unwrap();
        let mut merged = regions[a].clone();
        merged.extend_from_slice(&regions[b]);
        merged.sort_unstable();
        regions.remove(b);
        regions[a] = merged.clone();
        regions.sort_by_key(|r| r[0]);
        merges.push((merged, s));
    }
    merges
}

/// Normalized cut of a labelling of all nodes, straight from the definition.
pub fn ncut_reference<T: Scalar>(
    graph: &BipartiteGraph<T>,
    objects: &[usize],
    clusters: &[usize],
    k: usize,
) -> f64 {
    let mut cut = vec![0.0; k];
    let mut vol = vec![0.0; k];
    for e in graph.edges() {
        let w = e.weight.to_f64().unwrap();
        let (a, b) = (objects[e.object], clusters[e.cluster]);
        vol[a] += w;
        vol[b] += w;
        if a != b {
            cut[a] += w;
            cut[b] += w;
        }
    }
    (0..k)
        .filter(|&s| vol[s] > 0.0)
        .map(|s| cut[s] / vol[s])
        .sum()
}

/// Calls `f` with every labelling of `len` items into `k` labels.
pub fn for_each_labelling(len: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; len];
    loop {
        f(&labels);
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

/// Best normalized cut of a fixed object labelling over all cluster-node labellings.
pub fn ncut_completed<T: Scalar>(graph: &BipartiteGraph<T>, objects: &[usize], k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for_each_labelling(graph.n_clusters(), k, |clusters| {
        best = best.min(ncut_reference(graph, objects, clusters, k));
    });
    best
}

/// Exhaustive minimum normalized cut over all `k`-partitions of the full node
/// set in which every segment holds at least one object.
pub fn ncut_optimum<T: Scalar>(graph: &BipartiteGraph<T>, k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for_each_labelling(graph.n_objects(), k, |objects| {
        // object 0 always in segment 0 to skip mirrored labellings when k = 2
        if k == 2 && objects[0] != 0 {
            return;
        }
        let mut used = vec![false; k];
        objects.iter().for_each(|&s| used[s] = true);
        if used.iter().all(|&u| u) {
            best = best.min(ncut_completed(graph, objects, k));
        }
    });
    best
}

/// Upper bound on the optimum for larger graphs: every cluster-node labelling,
/// each object placed with the segment holding most of its edge weight.
pub fn ncut_induced_optimum<T: Scalar>(graph: &BipartiteGraph<T>, k: usize) -> f64 {
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.n_objects()];
    for e in graph.edges() {
        adjacency[e.object].push((e.cluster, e.weight.to_f64().unwrap()));
    }
    let mut best = f64::INFINITY;
    for_each_labelling(graph.n_clusters(), k, |clusters| {
        let objects: Vec<usize> = adjacency
            .iter()
            .map(|adj| {
                let mut w = vec![0.0; k];
                adj.iter().for_each(|&(c, x)| w[clusters[c]] += x);
                (0..k).fold(0, |b, s| if w[s] > w[b] { s } else { b })
            })
            .collect();
        let mut used = vec![false; k];
        objects.iter().for_each(|&s| used[s] = true);
        if used.iter().all(|&u| u) {
            best = best.min(ncut_reference(graph, &objects, clusters, k));
        }
    });
    best
}

/// Double-double helpers: a value is the unevaluated sum of the pair.
fn dd_add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let s = a.0 + b.0;
    let v = s - a.0;
    let e = (a.0 - (s - v)) + (b.0 - v) + a.1 + b.1;
    let hi = s + e;
    (hi, e - (hi - s))
}

fn dd_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let p = a.0 * b.0;
    let e = a.0.mul_add(b.0, -p) + a.0 * b.1 + a.1 * b.0;
    let hi = p + e;
    (hi, e - (hi - p))
}

fn dd_div(a: (f64, f64), b: f64) -> (f64, f64) {
    let q = a.0 / b;
    let r = dd_add(a, dd_mul((q, 0.0), (-b, 0.0)));
    dd_add((q, 0.0), (r.0 / b, 0.0))
}

/// `exp(-h / (theta * m))` in double-double arithmetic: Taylor series after
/// halving the argument until small, then repeated squaring.
pub fn eci_reference(h: f64, theta: f64, m: usize) -> f64 {
    let x = dd_div(dd_div((-h, 0.0), theta), m as f64);
    let mut halvings = 0;
    let mut y = x;
    while y.0.abs() > 1e-3 {
        y = (y.0 / 2.0, y.1 / 2.0);
        halvings += 1;
    }
    let mut term = (1.0, 0.0);
    let mut sum = (1.0, 0.0);
    for i in 1..30 {
        term = dd_div(dd_mul(term, y), i as f64);
        sum = dd_add(sum, term);
    }
    for _ in 0..halvings {
        sum = dd_mul(sum, sum);
    }
    sum.0 + sum.1
}
