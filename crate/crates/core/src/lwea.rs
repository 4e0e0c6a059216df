//! Locally weighted evidence accumulation: average-link agglomeration over
//! the LWCA matrix, cut at a requested number of clusters.

use log::debug;

use crate::coassoc::{build_ca, build_lwca, CoassocMatrix};
use crate::consensus::{ConsensusResult, Method};
use crate::ensemble::EnsembleView;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::validity::{annotate_validity, ValidityReport};

/// One agglomeration step. Leaves are regions `0..N`; the region created by
/// step `t` gets id `N + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<T> {
    pub left: usize,
    pub right: usize,
    pub new_region: usize,
    /// Average-link similarity of the two regions when they were merged.
    pub similarity: T,
    /// Number of objects in the new region.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram<T> {
    n_leaves: usize,
    merges: Vec<Merge<T>>,
}

impl<T: Scalar> Dendrogram<T> {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge<T>] {
        &self.merges
    }

    /// Labels of the clustering with `k` regions: the state after the first
    /// `N - k` merges. Labels are numbered in order of smallest member index.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, min: 1, max: n });
        }
        let mut parent: Vec<usize> = (0..n).collect();
        // representative leaf of every region id
        let mut rep: Vec<usize> = (0..n).collect();
        for merge in &self.merges[..n - k] {
            let a = find(&mut parent, rep[merge.left]);
            let b = find(&mut parent, rep[merge.right]);
            parent[b] = a;
            rep.push(a);
        }
        let mut label_of_root = vec![usize::MAX; n];
        let mut next = 0;
        let labels = (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                if label_of_root[r] == usize::MAX {
                    label_of_root[r] = next;
                    next += 1;
                }
                label_of_root[r]
            })
            .collect();
        Ok(labels)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

const NONE: usize = usize::MAX;

/// Average-link agglomerative clustering of a similarity matrix.
///
/// Each step merges the most similar pair of regions. Ties go to the pair
/// with the smallest `(min member index, max member index)`, comparing the
/// smallest member of each region. Similarities are updated with the
/// size-weighted Lance–Williams recurrence.
pub fn build_dendrogram<T: Scalar>(matrix: &CoassocMatrix<T>) -> Result<Dendrogram<T>> {
    let n = matrix.n();
    if n < 2 {
        return Err(Error::TooFewObjects { min: 2, found: n });
    }
    let mut sim = matrix.to_dense();
    if sim.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(
            "similarity matrix contains NaN".into(),
        ));
    }

    // A region lives in the slot of its smallest member.
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut region = (0..n).collect::<Vec<_>>();
    let mut nn = vec![NONE; n];
    let mut nn_sim = vec![T::neg_infinity(); n];

    let nearest = |sim: &[T], active: &[bool], i: usize| -> (usize, T) {
        let mut best = (NONE, T::neg_infinity());
        for j in i + 1..n {
            if active[j] {
                let s = sim[i * n + j];
                if best.0 == NONE || s > best.1 {
                    best = (j, s);
                }
            }
        }
        best
    };

    for i in 0..n {
        (nn[i], nn_sim[i]) = nearest(&sim, &active, i);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut a = NONE;
        for i in 0..n {
            if active[i] && nn[i] != NONE && (a == NONE || nn_sim[i] > nn_sim[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let similarity = nn_sim[a];
        let (sa, sb) = (size[a], size[b]);
        merges.push(Merge {
            left: region[a],
            right: region[b],
            new_region: n + step,
            similarity,
            size: sa + sb,
        });

        let (wa, wb, wt) = (T::of(sa), T::of(sb), T::of(sa + sb));
        for k in 0..n {
            if active[k] && k != a && k != b {
                let s = (wa * sim[k * n + a] + wb * sim[k * n + b]) / wt;
                sim[k * n + a] = s;
                sim[a * n + k] = s;
            }
        }
        active[b] = false;
        size[a] = sa + sb;
        region[a] = n + step;
        nn[b] = NONE;

        (nn[a], nn_sim[a]) = nearest(&sim, &active, a);
        for i in 0..b {
            if !active[i] || i == a {
                continue;
            }
            if nn[i] == a || nn[i] == b {
                (nn[i], nn_sim[i]) = nearest(&sim, &active, i);
            } else if i < a {
                let s = sim[i * n + a];
                if s > nn_sim[i] || (s == nn_sim[i] && a < nn[i]) {
                    nn[i] = a;
                    nn_sim[i] = s;
                }
            }
        }
    }
    Ok(Dendrogram {
        n_leaves: n,
        merges,
    })
}

/// Cuts `dendrogram` into `k` clusters.
pub fn cut_dendrogram<T: Scalar>(
    dendrogram: &Dendrogram<T>,
    k: usize,
    method: Method,
) -> Result<ConsensusResult> {
    Ok(ConsensusResult {
        labels: dendrogram.cut(k)?,
        k,
        method,
        warnings: Vec::new(),
    })
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, min: 1, max: n });
    }
    Ok(())
}

/// LWEA with a precomputed validity report.
pub fn lwea_with_report<T: Scalar>(
    view: &EnsembleView,
    report: &ValidityReport<T>,
    k: usize,
) -> Result<ConsensusResult> {
    check_k(k, view.n_objects())?;
    let lwca = build_lwca(view, report)?;
    let dendrogram = build_dendrogram(&lwca)?;
    cut_dendrogram(&dendrogram, k, Method::Lwea)
}

/// Locally weighted evidence accumulation.
pub fn lwea<T: Scalar>(view: &EnsembleView, theta: T, k: usize) -> Result<ConsensusResult> {
    check_k(k, view.n_objects())?;
    let start = std::time::Instant::now();
    let report = annotate_validity(view, theta)?;
    debug!("lwea: validity in {:?}", start.elapsed());
    let result = lwea_with_report(view, &report, k)?;
    debug!("lwea: total {:?}", start.elapsed());
    Ok(result)
}

/// Classic evidence accumulation: average link over the unweighted CA matrix.
pub fn eac<T: Scalar>(view: &EnsembleView, k: usize) -> Result<ConsensusResult> {
    check_k(k, view.n_objects())?;
    let ca = build_ca::<T>(view);
    let dendrogram = build_dendrogram(&ca)?;
    cut_dendrogram(&dendrogram, k, Method::Eac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coassoc::CoassocKind;
    use crate::ensemble::LabelMatrix;

    fn matrix(n: usize, v: &[f64]) -> CoassocMatrix<f64> {
        CoassocMatrix::from_dense(n, CoassocKind::Ca, v).unwrap()
    }

    #[test]
    fn three_point_example() {
        let m = matrix(3, &[1.0, 0.9, 0.1, 0.9, 1.0, 0.2, 0.1, 0.2, 1.0]);
        let d = build_dendrogram(&m).unwrap();
        assert_eq!(d.merges().len(), 2);
        let first = d.merges()[0];
        assert_eq!((first.left, first.right, first.new_region), (0, 1, 3));
        assert_eq!(first.similarity, 0.9);
        let second = d.merges()[1];
        assert_eq!((second.left, second.right, second.size), (3, 2, 3));
        assert!((second.similarity - 0.15).abs() < 1e-15);
        assert_eq!(d.cut(2).unwrap(), vec![0, 0, 1]);
        assert_eq!(d.cut(3).unwrap(), vec![0, 1, 2]);
        assert_eq!(d.cut(1).unwrap(), vec![0, 0, 0]);
        assert!(d.cut(0).is_err());
        assert!(d.cut(4).is_err());
    }

    #[test]
    fn zero_matrix_ties_are_lexicographic() {
        let n = 4;
        let m = matrix(n, &vec![0.0; n * n]);
        let d = build_dendrogram(&m).unwrap();
        let pairs: Vec<_> = d.merges().iter().map(|m| (m.left, m.right)).collect();
        // (0,1) -> 4, then {0,1} with 2 -> 5, then with 3
        assert_eq!(pairs, vec![(0, 1), (4, 2), (5, 3)]);
        assert!(d.merges().iter().all(|m| m.similarity == 0.0));
    }

    #[test]
    fn rejects_tiny_input() {
        let m = matrix(1, &[1.0]);
        assert!(matches!(
            build_dendrogram(&m),
            Err(Error::TooFewObjects { .. })
        ));
    }

    #[test]
    fn copies_of_one_clustering_are_recovered() {
        let col = vec![2u64, 0, 0, 1, 2, 1, 1, 0];
        let view =
            EnsembleView::new(LabelMatrix::from_columns(&[col.clone(), col.clone(), col]).unwrap());
        let result = lwea(&view, 0.4f64, 3).unwrap();
        assert_eq!(result.labels, vec![0, 1, 1, 2, 0, 2, 2, 1]);
        assert_eq!(result.method, Method::Lwea);
        let eac_result = eac::<f64>(&view, 3).unwrap();
        assert_eq!(eac_result.labels, result.labels);
    }

    #[test]
    fn k_out_of_range() {
        let view = EnsembleView::new(LabelMatrix::from_columns(&[vec![0u64, 1, 1]]).unwrap());
        assert!(lwea(&view, 0.4f64, 0).is_err());
        assert!(lwea(&view, 0.4f64, 4).is_err());
        assert!(eac::<f64>(&view, 4).is_err());
    }
}
