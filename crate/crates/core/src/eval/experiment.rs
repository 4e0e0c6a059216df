//! Repeated-run experiments: draw ensembles from a pool, run every consensus
//! function, score against ground truth with NMI.

use std::io::Write;

use rayon::prelude::*;

use super::features::FeatureMatrix;
use super::nmi::nmi;
use super::pool::{ceil_sqrt, draw_members, generate_pool};
use crate::coassoc::{build_ca, build_lwca};
use crate::consensus::Method;
use crate::ensemble::{EnsembleView, LabelMatrix};
use crate::error::{Error, Result};
use crate::lwea::build_dendrogram;
use crate::lwgp::{build_lwbg, TcutOptions, TransferCut};
use crate::scalar::Scalar;
use crate::validity::annotate_validity;

/// How the number of consensus clusters is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// Number of distinct ground-truth classes.
    TrueK,
    /// Every `k` in `2..=ceil(sqrt(N))` is tried; each method is reported at
    /// the `k` with the best mean NMI.
    BestK,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub pool_size: usize,
    pub ensemble_size: usize,
    pub theta: T,
    pub runs: usize,
    pub k_policy: KPolicy,
    pub seed: u64,
}

impl<T: Scalar> Default for ExperimentConfig<T> {
    fn default() -> Self {
        Self {
            pool_size: 100,
            ensemble_size: 10,
            theta: T::lit(crate::validity::DEFAULT_THETA),
            runs: 20,
            k_policy: KPolicy::TrueK,
            seed: 0,
        }
    }
}

impl<T: Scalar> ExperimentConfig<T> {
    fn validate(&self) -> Result<()> {
        if self.pool_size == 0 || self.ensemble_size == 0 || self.runs == 0 {
            return Err(Error::InvalidParameter(
                "pool size, ensemble size and runs must be positive".into(),
            ));
        }
        if self.ensemble_size > self.pool_size {
            return Err(Error::InvalidParameter(format!(
                "ensemble size {} exceeds pool size {}",
                self.ensemble_size, self.pool_size
            )));
        }
        Ok(())
    }
}

/// NMI scores of one run. Consensus scores are indexed like [`ExperimentReport::ks`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<T> {
    pub run: usize,
    /// Pool indices of the ensemble members.
    pub members: Vec<usize>,
    pub lwea: Vec<T>,
    pub lwgp: Vec<T>,
    pub eac: Vec<T>,
    /// NMI of each base clustering in the ensemble.
    pub base: Vec<T>,
}

impl<T: Scalar> RunRecord<T> {
    pub fn base_mean(&self) -> T {
        mean(&self.base)
    }

    pub fn method_scores(&self, method: Method) -> &[T] {
        match method {
            Method::Lwea => &self.lwea,
            Method::Lwgp => &self.lwgp,
            Method::Eac => &self.eac,
        }
    }
}

/// Mean and standard deviation of one method at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow<T> {
    pub method: String,
    pub parameter: String,
    pub value: String,
    pub k: Option<usize>,
    pub mean: T,
    pub std: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport<T> {
    /// Candidate cluster counts for the consensus functions.
    pub ks: Vec<usize>,
    pub runs: Vec<RunRecord<T>>,
}

impl<T: Scalar> ExperimentReport<T> {
    /// Index into `ks` with the best mean score for `method`.
    pub fn best_k_index(&self, method: Method) -> usize {
        let means: Vec<T> = (0..self.ks.len())
            .map(|j| {
                mean(
                    &self
                        .runs
                        .iter()
                        .map(|r| r.method_scores(method)[j])
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let mut best = 0;
        for (j, &m) in means.iter().enumerate() {
            if m > means[best] {
                best = j;
            }
        }
        best
    }

    /// Per-run scores of `method` at its selected `k`.
    pub fn method_scores(&self, method: Method) -> Vec<T> {
        let j = self.best_k_index(method);
        self.runs
            .iter()
            .map(|r| r.method_scores(method)[j])
            .collect()
    }

    pub fn base_scores(&self) -> Vec<T> {
        self.runs.iter().map(RunRecord::base_mean).collect()
    }

    /// One row per method (and the base clusterings) under `parameter = value`.
    pub fn summary(&self, parameter: &str, value: &str) -> Vec<SummaryRow<T>> {
        let mut rows: Vec<SummaryRow<T>> = [Method::Lwea, Method::Lwgp, Method::Eac]
            .into_iter()
            .map(|m| {
                let scores = self.method_scores(m);
                SummaryRow {
                    method: m.name().to_string(),
                    parameter: parameter.to_string(),
                    value: value.to_string(),
                    k: Some(self.ks[self.best_k_index(m)]),
                    mean: mean(&scores),
                    std: std_dev(&scores),
                }
            })
            .collect();
        let all_base: Vec<T> = self
            .runs
            .iter()
            .flat_map(|r| r.base.iter().copied())
            .collect();
        rows.push(SummaryRow {
            method: "base".to_string(),
            parameter: parameter.to_string(),
            value: value.to_string(),
            k: None,
            mean: mean(&all_base),
            std: std_dev(&all_base),
        });
        rows
    }
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    xs.iter().copied().sum::<T>() / T::of(xs.len())
}

/// Sample standard deviation (`n - 1` denominator); zero for fewer than two values.
pub fn std_dev<T: Scalar>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs);
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / T::of(xs.len() - 1)).sqrt()
}

fn candidate_ks(policy: KPolicy, truth: &[usize]) -> Result<Vec<usize>> {
    let n = truth.len();
    let ks = match policy {
        KPolicy::TrueK => {
            let mut distinct = truth.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            vec![distinct.len()]
        }
        KPolicy::BestK => (2..=ceil_sqrt(n).min(n)).collect(),
        KPolicy::Fixed(k) => vec![k],
    };
    if ks.is_empty() || ks.iter().any(|&k| k == 0 || k > n) {
        return Err(Error::InvalidParameter(format!(
            "no valid consensus cluster count for {n} objects"
        )));
    }
    Ok(ks)
}

fn run_once<T: Scalar>(
    pool: &[Vec<usize>],
    truth: &[usize],
    ks: &[usize],
    theta: T,
    ensemble_size: usize,
    seed: u64,
    run: usize,
) -> Result<RunRecord<T>> {
    let members = draw_members(pool.len(), ensemble_size, seed, run as u64)?;
    let columns: Vec<&Vec<usize>> = members.iter().map(|&i| &pool[i]).collect();
    let view = EnsembleView::new(LabelMatrix::from_label_vectors(&columns)?);
    let report = annotate_validity(&view, theta)?;

    let lwea_tree = build_dendrogram(&build_lwca(&view, &report)?)?;
    let eac_tree = build_dendrogram(&build_ca::<T>(&view))?;
    let tcut = TransferCut::new(&build_lwbg(&view, &report)?)?;
    let options = TcutOptions::default();

    let mut record = RunRecord {
        run,
        members,
        lwea: Vec::with_capacity(ks.len()),
        lwgp: Vec::with_capacity(ks.len()),
        eac: Vec::with_capacity(ks.len()),
        base: Vec::with_capacity(ensemble_size),
    };
    for &k in ks {
        record.lwea.push(nmi(&lwea_tree.cut(k)?, truth)?);
        record.eac.push(nmi(&eac_tree.cut(k)?, truth)?);
        let lwgp_score = if k <= view.n_clusters() {
            nmi(
                &tcut.partition(k, seed ^ run as u64, &options)?.labels,
                truth,
            )?
        } else {
            T::zero()
        };
        record.lwgp.push(lwgp_score);
    }
    for column in &columns {
        record.base.push(nmi(column, truth)?);
    }
    Ok(record)
}

/// Runs `config.runs` independent ensembles drawn from an existing pool.
/// Runs execute in parallel; results are ordered by run index.
pub fn run_on_pool<T: Scalar>(
    pool: &[Vec<usize>],
    truth: &[usize],
    config: &ExperimentConfig<T>,
) -> Result<ExperimentReport<T>> {
    config.validate()?;
    if pool.len() < config.ensemble_size {
        return Err(Error::InvalidParameter(format!(
            "pool has {} members, ensemble size is {}",
            pool.len(),
            config.ensemble_size
        )));
    }
    if pool.iter().any(|p| p.len() != truth.len()) {
        return Err(Error::DimensionMismatch(
            "pool members and ground truth differ in length".into(),
        ));
    }
    let ks = candidate_ks(config.k_policy, truth)?;
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            run_once(
                pool,
                truth,
                &ks,
                config.theta,
                config.ensemble_size,
                config.seed,
                run,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { ks, runs })
}

/// Generates a pool from `features` and runs the experiment on it.
pub fn run_experiment<T: Scalar>(
    features: &FeatureMatrix<T>,
    truth: &[usize],
    config: &ExperimentConfig<T>,
) -> Result<ExperimentReport<T>> {
    if truth.len() != features.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} ground-truth labels for {} objects",
            truth.len(),
            features.n()
        )));
    }
    config.validate()?;
    let pool = generate_pool(features, config.pool_size, config.seed)?;
    run_on_pool(&pool, truth, config)
}

/// Repeats the experiment for every `theta` in `grid`. Runs reuse the same
/// ensembles across grid points.
pub fn theta_sweep<T: Scalar>(
    pool: &[Vec<usize>],
    truth: &[usize],
    config: &ExperimentConfig<T>,
    grid: &[T],
) -> Result<Vec<SummaryRow<T>>> {
    let mut rows = Vec::new();
    for &theta in grid {
        let cfg = ExperimentConfig {
            theta,
            ..config.clone()
        };
        let report = run_on_pool(pool, truth, &cfg)?;
        rows.extend(
            report
                .summary("theta", &format!("{theta}"))
                .into_iter()
                .filter(|r| r.method == "lwea" || r.method == "lwgp"),
        );
    }
    Ok(rows)
}

/// Repeats the experiment for every ensemble size in `grid`.
pub fn ensemble_size_sweep<T: Scalar>(
    pool: &[Vec<usize>],
    truth: &[usize],
    config: &ExperimentConfig<T>,
    grid: &[usize],
) -> Result<Vec<SummaryRow<T>>> {
    let mut rows = Vec::new();
    for &m in grid {
        let cfg = ExperimentConfig {
            ensemble_size: m,
            ..config.clone()
        };
        let report = run_on_pool(pool, truth, &cfg)?;
        rows.extend(report.summary("M", &m.to_string()));
    }
    Ok(rows)
}

/// Writes `method,parameter,value,k,mean_nmi,std_nmi` rows.
pub fn write_summary_csv<T: Scalar, W: Write>(rows: &[SummaryRow<T>], mut out: W) -> Result<()> {
    writeln!(out, "method,parameter,value,k,mean_nmi,std_nmi")?;
    for r in rows {
        let k = r.k.map(|k| k.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.method, r.parameter, r.value, k, r.mean, r.std
        )?;
    }
    Ok(())
}
