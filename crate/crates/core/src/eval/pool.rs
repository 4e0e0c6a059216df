//! Base-clustering pools and random ensembles drawn from them.
//!
//! All randomness comes from ChaCha8 streams: the generator is seeded with
//! the master seed and each consumer gets its own stream number, so pools
//! and draws are reproducible across platforms and independent of thread
//! scheduling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::features::FeatureMatrix;
use super::kmeans::{kmeans_fit, KMeansOptions};
use crate::ensemble::LabelMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Stream families carved out of one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamDomain {
    Pool = 1,
    Draw = 2,
    Partition = 3,
}

/// Generator for item `index` of `domain` under `seed`.
pub fn stream_rng(seed: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 48) | (index & 0xFFFF_FFFF_FFFF));
    rng
}

/// Smallest integer `r` with `r * r >= n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Range of cluster counts used for pool members: `2..=ceil(sqrt(N))`.
pub fn pool_k_range(n: usize) -> Result<std::ops::RangeInclusive<usize>> {
    if n < 4 {
        return Err(Error::TooFewObjects { min: 4, found: n });
    }
    Ok(2..=ceil_sqrt(n))
}

/// Generates `pool_size` k-means clusterings, each with `k` drawn uniformly
/// from `2..=ceil(sqrt(N))`.
pub fn generate_pool<T: Scalar>(
    features: &FeatureMatrix<T>,
    pool_size: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if pool_size == 0 {
        return Err(Error::InvalidParameter(
            "pool size must be at least 1".into(),
        ));
    }
    let ks = pool_k_range(features.n())?;
    let options = KMeansOptions::default();
    (0..pool_size)
        .into_par_iter()
        .map(|member| {
            let mut rng = stream_rng(seed, StreamDomain::Pool, member as u64);
            let k = rng.random_range(ks.clone());
            Ok(kmeans_fit(features, k, &mut rng, &options)?.labels)
        })
        .collect()
}

/// Assembles pool members into a label matrix, one column per member.
pub fn pool_matrix(pool: &[Vec<usize>]) -> Result<LabelMatrix> {
    LabelMatrix::from_label_vectors(pool)
}

/// Draws `m` distinct pool members uniformly at random.
pub fn draw_members(pool_size: usize, m: usize, seed: u64, run: u64) -> Result<Vec<usize>> {
    if m == 0 || m > pool_size {
        return Err(Error::InvalidParameter(format!(
            "ensemble size {m} must be in [1, {pool_size}]"
        )));
    }
    let mut rng = stream_rng(seed, StreamDomain::Draw, run);
    Ok(sample(&mut rng, pool_size, m).into_vec())
}

/// Draws an ensemble of `m` distinct pool members.
pub fn draw_ensemble(pool: &[Vec<usize>], m: usize, seed: u64) -> Result<LabelMatrix> {
    let members = draw_members(pool.len(), m, seed, 0)?;
    let columns: Vec<&Vec<usize>> = members.iter().map(|&i| &pool[i]).collect();
    LabelMatrix::from_label_vectors(&columns)
}
