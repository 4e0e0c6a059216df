//! Consensus clustering with clusters weighted by their ensemble uncertainty.
//!
//! Combines several base clusterings of the same objects into one consensus
//! clustering. Each cluster of the ensemble is scored by how consistently
//! the other base clusterings keep its members together (an entropy in
//! bits), the score is turned into a weight in `(0, 1]` (the ECI), and the
//! weights drive two consensus functions:
//!
//! * [`lwea`]: average-link agglomeration over the locally weighted
//!   co-association matrix;
//! * [`lwgp`]: transfer-cut partitioning of the weighted object–cluster
//!   bipartite graph.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases fix the common double-precision case.
//!
//! ```
//! use lwcluster::{fixtures::worked_example, lwea, EnsembleView};
//!
//! let view = EnsembleView::new(worked_example());
//! let result = lwea(&view, 0.4f64, 3).unwrap();
//! assert_eq!(result.labels.len(), 16);
//! ```

pub mod coassoc;
pub mod consensus;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod linalg;
pub mod lwea;
pub mod lwgp;
pub mod scalar;
pub mod validity;

pub use coassoc::{build_ca, build_lwca, CoassocKind, CoassocMatrix};
pub use consensus::{ConsensusResult, ConsensusWarning, Method};
pub use ensemble::{
    build_ensemble_view, parse_label_matrix, parse_label_matrix_str, ClusterRecord, EnsembleView,
    LabelMatrix,
};
pub use error::{Error, Result};
pub use lwea::{build_dendrogram, cut_dendrogram, eac, lwea, lwea_with_report, Dendrogram, Merge};
pub use lwgp::{
    build_lwbg, lwgp, lwgp_with_report, normalized_cut, tcut_partition, BipartiteGraph, Edge,
    TransferCut,
};
pub use scalar::Scalar;
pub use validity::{
    annotate_validity, eci, uncertainty_wrt_clustering, uncertainty_wrt_ensemble, ValidityReport,
    DEFAULT_THETA,
};

pub type CoassocMatrix64 = CoassocMatrix<f64>;
pub type CoassocMatrix32 = CoassocMatrix<f32>;
pub type ValidityReport64 = ValidityReport<f64>;
pub type ValidityReport32 = ValidityReport<f32>;
pub type Dendrogram64 = Dendrogram<f64>;
pub type Dendrogram32 = Dendrogram<f32>;
pub type BipartiteGraph64 = BipartiteGraph<f64>;
pub type BipartiteGraph32 = BipartiteGraph<f32>;
pub type FeatureMatrix64 = eval::FeatureMatrix<f64>;
pub type FeatureMatrix32 = eval::FeatureMatrix<f32>;
pub type ExperimentConfig64 = eval::ExperimentConfig<f64>;
