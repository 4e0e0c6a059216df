//! Small hand-built ensembles shared by tests and docs.

use crate::ensemble::LabelMatrix;

/// 16 objects, three base clusterings of three clusters each.
///
/// Cluster sizes of the first clustering are 8, 3 and 5. The first cluster
/// splits 2/3/3 over the second clustering and 4/4 over the third; the second
/// cluster is co-clustered in every base clustering. The ensemble
/// uncertainties of the nine clusters, in column order, round to
/// `2.56, 0.00, 0.72, 0.97, 0.92, 1.95, 1.85, 1.44, 0.00`.
pub fn worked_example() -> LabelMatrix {
    const ROWS: [[u64; 3]; 16] = [
        [0, 0, 0],
        [0, 0, 0],
        [0, 1, 0],
        [0, 1, 0],
        [0, 1, 1],
        [0, 2, 1],
        [0, 2, 1],
        [0, 2, 1],
        [1, 0, 0],
        [1, 0, 0],
        [1, 0, 0],
        [2, 2, 1],
        [2, 2, 2],
        [2, 2, 2],
        [2, 2, 2],
        [2, 2, 2],
    ];
    LabelMatrix::from_rows(&ROWS).expect("fixture is a valid label matrix")
}
