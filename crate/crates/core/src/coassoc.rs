//! Co-association (CA) and locally weighted co-association (LWCA) matrices.
//!
//! Both are built cluster by cluster: every pair of members of a cluster
//! receives the cluster's weight (1 for CA, its ECI for LWCA), and the
//! accumulated sums are divided by the ensemble size at the end. Since the
//! same routine builds both kinds, an LWCA matrix built from unit weights is
//! bit-identical to the CA matrix.

use std::io::Write;

use crate::ensemble::{ClusterRecord, EnsembleView};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::validity::ValidityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoassocKind {
    Ca,
    Lwca,
}

/// Dense symmetric `N × N` matrix stored as its packed upper triangle
/// (diagonal included).
#[derive(Debug, Clone, PartialEq)]
pub struct CoassocMatrix<T> {
    n: usize,
    kind: CoassocKind,
    data: Vec<T>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl<T: Scalar> CoassocMatrix<T> {
    /// Builds a matrix from a full row-major `n × n` buffer, which must be symmetric.
    pub fn from_dense(n: usize, kind: CoassocKind, values: &[T]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        let mut data = vec![T::zero(); n * (n + 1) / 2];
        for i in 0..n {
            for j in i..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
                data[packed_index(n, i, j)] = values[i * n + j];
            }
        }
        Ok(Self { n, kind, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> CoassocKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[packed_index(self.n, i, j)]
    }

    /// Full row-major copy of the matrix.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// Writes the lower triangle (diagonal included), one row per line.
    pub fn write_lower_triangle_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..=i {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:.6}", self.get(i, j)));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn build_weighted<T: Scalar>(
    view: &EnsembleView,
    weights: &[T],
    kind: CoassocKind,
) -> CoassocMatrix<T> {
    let n = view.n_objects();
    let mut data = vec![T::zero(); n * (n + 1) / 2];
    // Accumulate in an order fixed by member sets and weights alone, so
    // permuting or relabelling base clusterings cannot change the rounding.
    let mut order: Vec<&ClusterRecord> = view.clusters().iter().collect();
    order.sort_by(|a, b| {
        a.members.cmp(&b.members).then(
            weights[a.id]
                .partial_cmp(&weights[b.id])
                .expect("finite weights"),
        )
    });
    for cluster in order {
        let w = weights[cluster.id];
        let members = &cluster.members;
        for (a, &i) in members.iter().enumerate() {
            // members are ascending, so (i, j) with j >= i lands in the upper triangle
            let row = i * n - i * (i + 1) / 2;
            for &j in &members[a..] {
                data[row + j] += w;
            }
        }
    }
    let m = T::of(view.n_clusterings());
    data.iter_mut().for_each(|v| *v /= m);
    CoassocMatrix { n, kind, data }
}

/// Classic co-association matrix: fraction of base clusterings that put `i` and `j` together.
pub fn build_ca<T: Scalar>(view: &EnsembleView) -> CoassocMatrix<T> {
    let ones = vec![T::one(); view.n_clusters()];
    build_weighted(view, &ones, CoassocKind::Ca)
}

/// Locally weighted co-association matrix: each co-occurrence counts with the
/// ECI of the shared cluster.
pub fn build_lwca<T: Scalar>(
    view: &EnsembleView,
    report: &ValidityReport<T>,
) -> Result<CoassocMatrix<T>> {
    if report.n_clusters() != view.n_clusters() || report.ensemble_size() != view.n_clusterings() {
        return Err(Error::DimensionMismatch(format!(
            "report covers {} clusters over {} clusterings, view has {} over {}",
            report.n_clusters(),
            report.ensemble_size(),
            view.n_clusters(),
            view.n_clusterings()
        )));
    }
    Ok(build_weighted(view, report.eci(), CoassocKind::Lwca))
}
