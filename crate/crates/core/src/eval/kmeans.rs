//! Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FeatureMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub max_iterations: usize,
    /// Stop once no centroid moves farther than this (Euclidean).
    pub tolerance: f64,
    /// Independent seedings; the fit with the lowest inertia wins.
    pub replicates: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-6,
            replicates: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit<T> {
    pub labels: Vec<usize>,
    /// Row-major `k × d`.
    pub centroids: Vec<T>,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia_trace: Vec<T>,
}

impl<T: Scalar> KMeansFit<T> {
    pub fn inertia(&self) -> T {
        *self
            .inertia_trace
            .last()
            .expect("at least one assignment step")
    }
}

#[inline]
fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Cluster labels of `features` into `k` groups; deterministic for a fixed seed.
pub fn kmeans<T: Scalar>(features: &FeatureMatrix<T>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(kmeans_fit(features, k, &mut rng, &KMeansOptions::default())?.labels)
}

/// Runs k-means with the given options, drawing all randomness from `rng`.
pub fn kmeans_fit<T: Scalar, R: Rng>(
    features: &FeatureMatrix<T>,
    k: usize,
    rng: &mut R,
    options: &KMeansOptions,
) -> Result<KMeansFit<T>> {
    let n = features.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, min: 1, max: n });
    }
    let mut best: Option<KMeansFit<T>> = None;
    for _ in 0..options.replicates.max(1) {
        let fit = lloyd(features, k, rng, options);
        if best.as_ref().is_none_or(|b| fit.inertia() < b.inertia()) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one replicate"))
}

fn plus_plus<T: Scalar, R: Rng>(features: &FeatureMatrix<T>, k: usize, rng: &mut R) -> Vec<usize> {
    let n = features.n();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<T> = (0..n)
        .map(|i| sq_dist(features.row(i), features.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: T = dist.iter().copied().sum();
        let next = if total > T::zero() {
            let target = T::lit(rng.random::<f64>()) * total;
            let mut acc = T::zero();
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if d > T::zero() && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave the target just past the accumulated sum
            pick.unwrap_or_else(|| {
                dist.iter()
                    .rposition(|&d| d > T::zero())
                    .expect("positive total")
            })
        } else {
            // every remaining point coincides with a chosen center
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, d) in dist.iter_mut().enumerate() {
            let nd = sq_dist(features.row(i), features.row(next));
            if nd < *d {
                *d = nd;
            }
        }
        dist[next] = T::zero();
    }
    chosen
}

fn lloyd<T: Scalar, R: Rng>(
    features: &FeatureMatrix<T>,
    k: usize,
    rng: &mut R,
    options: &KMeansOptions,
) -> KMeansFit<T> {
    let n = features.n();
    let d = features.dim();
    let mut centroids: Vec<T> = plus_plus(features, k, rng)
        .into_iter()
        .flat_map(|i| features.row(i).to_vec())
        .collect();
    let mut labels = vec![0usize; n];
    let mut dist = vec![T::zero(); n];
    let mut inertia_trace = Vec::new();
    let tolerance = T::lit(options.tolerance);

    for _ in 0..options.max_iterations.max(1) {
        for i in 0..n {
            let x = features.row(i);
            let mut best = (0, sq_dist(x, &centroids[..d]));
            for c in 1..k {
                let dc = sq_dist(x, &centroids[c * d..(c + 1) * d]);
                if dc < best.1 {
                    best = (c, dc);
                }
            }
            labels[i] = best.0;
            dist[i] = best.1;
        }

        // re-seed empty clusters from the point farthest from its centroid
        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far =
                (0..n)
                    .filter(|&i| counts[labels[i]] > 1)
                    .fold(None, |acc: Option<usize>, i| match acc {
                        Some(j) if dist[j] >= dist[i] => Some(j),
                        _ => Some(i),
                    });
            if let Some(i) = far {
                counts[labels[i]] -= 1;
                counts[c] = 1;
                labels[i] = c;
                dist[i] = T::zero();
                centroids[c * d..(c + 1) * d].copy_from_slice(features.row(i));
            }
        }
        inertia_trace.push(dist.iter().copied().sum());

        let mut sums = vec![T::zero(); k * d];
        for (i, &c) in labels.iter().enumerate() {
            for (s, &x) in sums[c * d..(c + 1) * d].iter_mut().zip(features.row(i)) {
                *s += x;
            }
        }
        let mut shift = T::zero();
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let size = T::of(counts[c]);
            let mut moved = T::zero();
            for j in 0..d {
                let updated = sums[c * d + j] / size;
                let delta = updated - centroids[c * d + j];
                moved += delta * delta;
                centroids[c * d + j] = updated;
            }
            shift = shift.max(moved.sqrt());
        }
        if shift < tolerance {
            break;
        }
    }
    KMeansFit {
        labels,
        centroids,
        inertia_trace,
    }
}
