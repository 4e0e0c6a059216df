//! Ensemble-driven cluster uncertainty and the ECI validity index.
//!
//! The uncertainty of a cluster with respect to a base clustering is the
//! Shannon entropy (in bits) of how its members are spread over that
//! clustering's clusters. Summing over all base clusterings gives the
//! uncertainty with respect to the ensemble, and the ECI maps it into
//! `(0, 1]` through `exp(-H / (theta * M))`.

use std::io::Write;

use rayon::prelude::*;

use crate::ensemble::EnsembleView;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default ECI parameter.
pub const DEFAULT_THETA: f64 = 0.4;

/// Range of `theta` that works well in practice. Any positive value is accepted.
pub const RECOMMENDED_THETA: (f64, f64) = (0.2, 1.0);

/// Entropy in bits of the distribution given by `counts`. Zero counts
/// contribute nothing. Terms are summed in ascending count order, so the
/// result does not depend on how the counts are arranged.
pub fn entropy_bits<T: Scalar>(counts: &[usize]) -> T {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let total = T::of(total);
    let mut h = T::zero();
    for c in sorted {
        if c > 0 {
            let p = T::of(c) / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Uncertainty `H^m(C)` of cluster `cluster_id` with respect to base clustering `column`.
pub fn uncertainty_wrt_clustering<T: Scalar>(
    view: &EnsembleView,
    cluster_id: usize,
    column: usize,
) -> T {
    let labels = view.labels();
    let mut counts = vec![0usize; labels.cluster_count(column)];
    let target = labels.column(column);
    for &i in &view.cluster(cluster_id).members {
        counts[target[i]] += 1;
    }
    entropy_bits(&counts)
}

/// Uncertainty `H^Π(C)` of a cluster with respect to the whole ensemble.
/// The per-clustering terms are added in ascending order so that permuting
/// the base clusterings gives a bit-identical sum.
pub fn uncertainty_wrt_ensemble<T: Scalar>(view: &EnsembleView, cluster_id: usize) -> T {
    let mut terms: Vec<T> = (0..view.n_clusterings())
        .map(|m| uncertainty_wrt_clustering::<T>(view, cluster_id, m))
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).expect("finite entropy"));
    terms.into_iter().fold(T::zero(), |acc, h| acc + h)
}

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta.is_nan() || theta <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    Ok(())
}

/// Ensemble-driven cluster index `exp(-uncertainty / (theta * ensemble_size))`.
pub fn eci<T: Scalar>(uncertainty: T, theta: T, ensemble_size: usize) -> Result<T> {
    check_theta(theta)?;
    if ensemble_size == 0 {
        return Err(Error::InvalidParameter(
            "ensemble size must be at least 1".into(),
        ));
    }
    if uncertainty.is_nan() || uncertainty < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "uncertainty must be non-negative, got {uncertainty}"
        )));
    }
    Ok((-uncertainty / (theta * T::of(ensemble_size))).exp())
}

/// Per-cluster uncertainty and ECI for an ensemble, indexed by pooled cluster id.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    uncertainty: Vec<T>,
    eci: Vec<T>,
    theta: T,
    ensemble_size: usize,
}

impl<T: Scalar> ValidityReport<T> {
    pub fn uncertainty(&self) -> &[T] {
        &self.uncertainty
    }

    pub fn eci(&self) -> &[T] {
        &self.eci
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn ensemble_size(&self) -> usize {
        self.ensemble_size
    }

    pub fn n_clusters(&self) -> usize {
        self.eci.len()
    }

    /// Same report with every ECI weight overridden to 1. Weighting with it
    /// degrades the locally weighted methods to their unweighted forms.
    pub fn with_unit_weights(mut self) -> Self {
        self.eci.iter_mut().for_each(|w| *w = T::one());
        self
    }

    /// Writes `cluster,source,size,uncertainty,eci` rows.
    pub fn write_csv<W: Write>(&self, view: &EnsembleView, mut out: W) -> Result<()> {
        if view.n_clusters() != self.n_clusters() {
            return Err(Error::DimensionMismatch(format!(
                "report has {} clusters, view has {}",
                self.n_clusters(),
                view.n_clusters()
            )));
        }
        writeln!(out, "cluster,source,size,uncertainty,eci")?;
        for c in view.clusters() {
            writeln!(
                out,
                "{},{},{},{:.12},{:.12}",
                c.id,
                c.source,
                c.size(),
                self.uncertainty[c.id],
                self.eci[c.id]
            )?;
        }
        Ok(())
    }
}

/// Computes uncertainty and ECI of every cluster of the ensemble.
pub fn annotate_validity<T: Scalar>(view: &EnsembleView, theta: T) -> Result<ValidityReport<T>> {
    check_theta(theta)?;
    let ensemble_size = view.n_clusterings();
    let uncertainty: Vec<T> = (0..view.n_clusters())
        .into_par_iter()
        .map(|id| uncertainty_wrt_ensemble::<T>(view, id))
        .collect();
    let eci = uncertainty
        .iter()
        .map(|&h| eci(h, theta, ensemble_size))
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidityReport {
        uncertainty,
        eci,
        theta,
        ensemble_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{EnsembleView, LabelMatrix};
    use crate::fixtures::worked_example;

    #[test]
    fn split_two_three_three() {
        let view = EnsembleView::new(worked_example());
        let h: f64 = uncertainty_wrt_clustering(&view, 0, 1);
        assert!((h - 1.56).abs() < 0.01, "{h}");
        let h3: f64 = uncertainty_wrt_clustering(&view, 0, 2);
        assert_eq!(h3, 1.0);
        let own: f64 = uncertainty_wrt_clustering(&view, 0, 0);
        assert_eq!(own, 0.0);
    }

    #[test]
    fn uniform_split_over_four() {
        let view = EnsembleView::new(
            LabelMatrix::from_columns(&[vec![0u64, 0, 0, 0], vec![0, 1, 2, 3]]).unwrap(),
        );
        assert_eq!(uncertainty_wrt_clustering::<f64>(&view, 0, 1), 2.0);
    }

    #[test]
    fn ensemble_uncertainty_of_worked_example() {
        let view = EnsembleView::new(worked_example());
        let h: f64 = uncertainty_wrt_ensemble(&view, 0);
        assert!((h - 2.56).abs() < 0.01);
        assert_eq!(uncertainty_wrt_ensemble::<f64>(&view, 1), 0.0);
    }

    #[test]
    fn identical_clusterings_have_zero_uncertainty() {
        let col = vec![0u64, 2, 1, 1, 0, 2, 2];
        let view =
            EnsembleView::new(LabelMatrix::from_columns(&[col.clone(), col.clone(), col]).unwrap());
        let report = annotate_validity(&view, 0.4f64).unwrap();
        assert!(report.uncertainty().iter().all(|&h| h == 0.0));
        assert!(report.eci().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn eci_values() {
        assert_eq!(eci(0.0f64, 0.3, 7).unwrap(), 1.0);
        assert!((eci(2.56f64, 0.5, 3).unwrap() - 0.181_47).abs() < 1e-4);
        assert!((eci(0.72f64, 0.5, 3).unwrap() - 0.618_78).abs() < 1e-4);
    }

    #[test]
    fn eci_rejects_bad_parameters() {
        assert!(eci(1.0f64, 0.0, 3).is_err());
        assert!(eci(1.0f64, -1.0, 3).is_err());
        assert!(eci(1.0f64, f64::NAN, 3).is_err());
        assert!(eci(1.0f64, 0.5, 0).is_err());
        assert!(eci(-1.0f64, 0.5, 2).is_err());
        let view = EnsembleView::new(worked_example());
        assert!(annotate_validity(&view, 0.0f64).is_err());
    }

    #[test]
    fn single_clustering_ensemble() {
        let view = EnsembleView::new(LabelMatrix::from_columns(&[vec![0u64, 1, 1, 2]]).unwrap());
        let report = annotate_validity(&view, 0.4f32).unwrap();
        assert!(report.uncertainty().iter().all(|&h| h == 0.0));
        assert!(report.eci().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn report_csv_has_one_row_per_cluster() {
        let view = EnsembleView::new(worked_example());
        let report = annotate_validity(&view, 0.5f64).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&view, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("1,0,3,0.000000000000,1.000000000000"));
    }
}
