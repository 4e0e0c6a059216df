//! Base clusterings, ensembles and the pooled cluster set.
//!
//! A [`LabelMatrix`] holds `M` base clusterings of `N` objects, one column
//! per clustering. Labels are remapped on ingest to dense 0-based ids per
//! column (in ascending order of the original label), so that cluster `j` of
//! column `m` can be addressed directly. An [`EnsembleView`] pools the
//! clusters of every column into a single indexed list.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use log::warn;

use crate::error::{Error, Result};

/// `N × M` matrix of cluster labels, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    n_objects: usize,
    columns: Vec<Vec<usize>>,
    /// Dense label -> original label, per column.
    original: Vec<Vec<u64>>,
}

impl LabelMatrix {
    /// Builds a matrix from one label vector per base clustering.
    pub fn from_columns<C: AsRef<[u64]>>(columns: &[C]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n_objects = columns[0].as_ref().len();
        if n_objects < 2 {
            return Err(Error::TooFewObjects {
                min: 2,
                found: n_objects,
            });
        }
        let mut dense = Vec::with_capacity(columns.len());
        let mut original = Vec::with_capacity(columns.len());
        for (m, column) in columns.iter().enumerate() {
            let column = column.as_ref();
            if column.len() != n_objects {
                return Err(Error::DimensionMismatch(format!(
                    "column {m} has {} labels, expected {n_objects}",
                    column.len()
                )));
            }
            let (d, o) = densify(column);
            dense.push(d);
            original.push(o);
        }
        Ok(Self {
            n_objects,
            columns: dense,
            original,
        })
    }

    /// Builds a matrix from dense-or-not `usize` label vectors.
    pub fn from_label_vectors<C: AsRef<[usize]>>(columns: &[C]) -> Result<Self> {
        let widened: Vec<Vec<u64>> = columns
            .iter()
            .map(|c| c.as_ref().iter().map(|&l| l as u64).collect())
            .collect();
        Self::from_columns(&widened)
    }

    /// Builds a matrix from object rows (row `i` holds the `M` labels of object `i`).
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput)?.as_ref().len();
        if first == 0 {
            return Err(Error::EmptyInput);
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); first];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: first,
                    found: row.len(),
                });
            }
            for (m, &label) in row.iter().enumerate() {
                columns[m].push(label);
            }
        }
        Self::from_columns(&columns)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_clusterings(&self) -> usize {
        self.columns.len()
    }

    /// Dense labels of base clustering `m`.
    pub fn column(&self, m: usize) -> &[usize] {
        &self.columns[m]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    /// Dense label of object `i` in base clustering `m`.
    #[inline]
    pub fn label(&self, i: usize, m: usize) -> usize {
        self.columns[m][i]
    }

    /// Number of clusters `n^m` in base clustering `m`.
    pub fn cluster_count(&self, m: usize) -> usize {
        self.original[m].len()
    }

    /// Total number of clusters `n_c` over all base clusterings.
    pub fn total_clusters(&self) -> usize {
        self.original.iter().map(Vec::len).sum()
    }

    /// Label that appeared in the input for dense label `dense` of column `m`.
    pub fn original_label(&self, m: usize, dense: usize) -> u64 {
        self.original[m][dense]
    }

    /// Columns holding a single cluster.
    pub fn degenerate_columns(&self) -> Vec<usize> {
        (0..self.n_clusterings())
            .filter(|&m| self.cluster_count(m) == 1)
            .collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut out = Self {
            n_objects: self.n_objects,
            columns: Vec::with_capacity(columns.len()),
            original: Vec::with_capacity(columns.len()),
        };
        for &m in columns {
            if m >= self.n_clusterings() {
                return Err(Error::DimensionMismatch(format!(
                    "column {m} out of range for {} clusterings",
                    self.n_clusterings()
                )));
            }
            out.columns.push(self.columns[m].clone());
            out.original.push(self.original[m].clone());
        }
        Ok(out)
    }

    /// Writes the dense labels in the CSV wire format, with a `#` header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.n_clusterings()).map(|m| format!("c{m}")).collect();
        writeln!(out, "#{}", header.join(","))?;
        let mut line = String::new();
        for i in 0..self.n_objects {
            line.clear();
            for m in 0..self.n_clusterings() {
                if m > 0 {
                    line.push(',');
                }
                line.push_str(&self.columns[m][i].to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Remaps labels to `0..n` in ascending order of the original value.
fn densify(column: &[u64]) -> (Vec<usize>, Vec<u64>) {
    let mut ids = BTreeMap::new();
    for &label in column {
        ids.entry(label).or_insert(0usize);
    }
    let original: Vec<u64> = ids.keys().copied().collect();
    for (dense, id) in ids.values_mut().enumerate() {
        *id = dense;
    }
    (column.iter().map(|l| ids[l]).collect(), original)
}

/// Parses the label-matrix CSV format: comma separated, one row per object,
/// one integer column per base clustering, lines starting with `#` ignored.
///
/// A column with a single distinct label is accepted and logged as a warning.
pub fn parse_label_matrix<R: Read>(input: R) -> Result<LabelMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if let Some(first) = rows.first() {
            if record.len() != first.len() {
                return Err(Error::RaggedRow {
                    row,
                    expected: first.len(),
                    found: record.len(),
                });
            }
        }
        let parsed = record
            .iter()
            .enumerate()
            .map(|(column, cell)| {
                cell.parse::<u64>().map_err(|_| Error::InvalidCell {
                    row,
                    column,
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }

    let labels = LabelMatrix::from_rows(&rows)?;
    for m in labels.degenerate_columns() {
        warn!("base clustering {m} has a single cluster (degenerate clustering)");
    }
    Ok(labels)
}

pub fn parse_label_matrix_str(text: &str) -> Result<LabelMatrix> {
    parse_label_matrix(text.as_bytes())
}

/// One cluster of the pooled cluster set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterRecord {
    /// Index into the pooled cluster list.
    pub id: usize,
    /// Base clustering the cluster belongs to.
    pub source: usize,
    /// Dense label of the cluster within its source clustering.
    pub label: usize,
    /// Member object indices, ascending.
    pub members: Vec<usize>,
}

impl ClusterRecord {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A label matrix together with its pooled cluster set.
///
/// Cluster ids are assigned column by column: the clusters of column `m`
/// occupy ids `offset(m)..offset(m) + n^m`, ordered by dense label.
#[derive(Debug, Clone)]
pub struct EnsembleView {
    labels: LabelMatrix,
    clusters: Vec<ClusterRecord>,
    offsets: Vec<usize>,
}

impl EnsembleView {
    pub fn new(labels: LabelMatrix) -> Self {
        let mut clusters = Vec::with_capacity(labels.total_clusters());
        let mut offsets = Vec::with_capacity(labels.n_clusterings());
        for m in 0..labels.n_clusterings() {
            let offset = clusters.len();
            offsets.push(offset);
            let mut members = vec![Vec::new(); labels.cluster_count(m)];
            for (i, &l) in labels.column(m).iter().enumerate() {
                members[l].push(i);
            }
            clusters.extend(members.into_iter().enumerate().map(|(label, members)| {
                ClusterRecord {
                    id: offset + label,
                    source: m,
                    label,
                    members,
                }
            }));
        }
        debug_assert_eq!(clusters.len(), labels.total_clusters());
        Self {
            labels,
            clusters,
            offsets,
        }
    }

    pub fn labels(&self) -> &LabelMatrix {
        &self.labels
    }

    pub fn clusters(&self) -> &[ClusterRecord] {
        &self.clusters
    }

    pub fn cluster(&self, id: usize) -> &ClusterRecord {
        &self.clusters[id]
    }

    pub fn n_objects(&self) -> usize {
        self.labels.n_objects()
    }

    pub fn n_clusterings(&self) -> usize {
        self.labels.n_clusterings()
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// First pooled id of the clusters of column `m`.
    pub fn offset(&self, m: usize) -> usize {
        self.offsets[m]
    }

    /// Clusters of base clustering `m`.
    pub fn column_clusters(&self, m: usize) -> &[ClusterRecord] {
        let start = self.offsets[m];
        &self.clusters[start..start + self.labels.cluster_count(m)]
    }

    /// Pooled id of the cluster containing object `i` in base clustering `m`.
    #[inline]
    pub fn cluster_of(&self, i: usize, m: usize) -> usize {
        self.offsets[m] + self.labels.label(i, m)
    }
}

pub fn build_ensemble_view(labels: LabelMatrix) -> EnsembleView {
    EnsembleView::new(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_matrix() {
        let m = parse_label_matrix_str("0,0\n0,1\n1,1").unwrap();
        assert_eq!(m.n_objects(), 3);
        assert_eq!(m.n_clusterings(), 2);
        assert_eq!(m.total_clusters(), 4);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = parse_label_matrix_str("0,1\n0,1,2\n").unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRow {
                row: 1,
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn rejects_bad_cells_and_empty_input() {
        assert!(matches!(
            parse_label_matrix_str("0,1\n0,x\n"),
            Err(Error::InvalidCell {
                row: 1,
                column: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_label_matrix_str("0,1\n0,-1\n"),
            Err(Error::InvalidCell { .. })
        ));
        assert!(matches!(
            parse_label_matrix_str("0,1\n0,1.5\n"),
            Err(Error::InvalidCell { .. })
        ));
        assert!(matches!(parse_label_matrix_str(""), Err(Error::EmptyInput)));
        assert!(matches!(
            parse_label_matrix_str("# only a header\n"),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            parse_label_matrix_str("3,4\n"),
            Err(Error::TooFewObjects { .. })
        ));
    }

    #[test]
    fn header_and_whitespace_are_accepted() {
        let m = parse_label_matrix_str("#a,b\n 7, 3\n7 ,9\n\n2,3\n").unwrap();
        assert_eq!(m.n_objects(), 3);
        // dense ids follow ascending original labels
        assert_eq!(m.column(0), &[1, 1, 0]);
        assert_eq!(m.column(1), &[0, 1, 0]);
        assert_eq!(m.original_label(0, 1), 7);
        assert_eq!(m.original_label(1, 1), 9);
    }

    #[test]
    fn degenerate_column_is_flagged_not_rejected() {
        let m = parse_label_matrix_str("4,0\n4,1\n4,1\n").unwrap();
        assert_eq!(m.degenerate_columns(), vec![0]);
    }

    #[test]
    fn single_column_single_label_view() {
        let m = LabelMatrix::from_columns(&[vec![5u64; 6]]).unwrap();
        let view = EnsembleView::new(m);
        assert_eq!(view.n_clusters(), 1);
        assert_eq!(view.cluster(0).members, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn identical_columns_duplicate_clusters() {
        let col = vec![0u64, 1, 1, 2, 0];
        let view = EnsembleView::new(LabelMatrix::from_columns(&[col.clone(), col]).unwrap());
        assert_eq!(view.n_clusters(), 6);
        for j in 0..3 {
            assert_eq!(
                view.column_clusters(0)[j].members,
                view.column_clusters(1)[j].members
            );
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = parse_label_matrix_str("10,3\n10,1\n2,1\n").unwrap();
        let again = parse_label_matrix_str(&m.to_csv_string()).unwrap();
        assert_eq!(m.columns(), again.columns());
    }

    #[test]
    fn cluster_of_matches_membership() {
        let m = parse_label_matrix_str("0,0\n0,1\n1,1\n2,0").unwrap();
        let view = EnsembleView::new(m);
        for i in 0..view.n_objects() {
            for c in 0..view.n_clusterings() {
                let id = view.cluster_of(i, c);
                assert_eq!(view.cluster(id).source, c);
                assert!(view.cluster(id).members.contains(&i));
            }
        }
    }
}
