//! Evaluation harness: k-means pools, ensemble draws, NMI and experiment drivers.

pub mod experiment;
pub mod features;
pub mod kmeans;
pub mod nmi;
pub mod pool;

pub use experiment::{
    ensemble_size_sweep, run_experiment, run_on_pool, theta_sweep, write_summary_csv,
    ExperimentConfig, ExperimentReport, KPolicy, RunRecord, SummaryRow,
};
pub use features::{parse_features, parse_label_vector, FeatureMatrix};
pub use kmeans::{kmeans, kmeans_fit, KMeansFit, KMeansOptions};
pub use nmi::nmi;
pub use pool::{draw_ensemble, generate_pool, pool_matrix};
