//! Sparse structures for neighborhood aggregation.
//!
//! Graph layers reduce over small per-vertex index sets. Two forms cover
//! everything needed here:
//!
//! * [`SparseMatrix`] — CSR with fixed coefficients, for aggregations whose
//!   weights depend only on the graph (`out = S · x`).
//! * [`SparsePattern`] — CSR structure without values, for aggregations
//!   whose weights are computed (and differentiated) per edge, together
//!   with the segment operations [`gather_add_pairs`], [`segment_softmax`]
//!   and [`weighted_gather_sum`].

use crate::error::NnError;
use crate::matrix::Matrix;
use crate::ops::softmax_slice;

/// A sparse `rows×cols` matrix in compressed-sparse-row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(column, value)` entry lists. Panics if a
    /// column index is out of range (construction is programmer-driven,
    /// not data-driven).
    pub fn from_row_entries(cols: usize, rows: &[Vec<(usize, f64)>]) -> SparseMatrix {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for row in rows {
            for &(col, value) in row {
                assert!(col < cols, "column {col} out of range ({cols} columns)");
                indices.push(col);
                values.push(value);
            }
            offsets.push(indices.len());
        }
        SparseMatrix {
            rows: rows.len(),
            cols,
            offsets,
            indices,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry_count(&self) -> usize {
        self.indices.len()
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[r]..self.offsets[r + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Dense product `self · x`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix, NnError> {
        if x.rows() != self.cols {
            return Err(NnError::ShapeMismatch {
                op: "sparse apply".to_string(),
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", x.rows()),
            });
        }
        let mut out = Matrix::zeros(self.rows, x.cols());
        for r in 0..self.rows {
            let out_row = out.row_mut(r);
            for idx in self.offsets[r]..self.offsets[r + 1] {
                let src = x.row(self.indices[idx]);
                let w = self.values[idx];
                for c in 0..src.len() {
                    out_row[c] += w * src[c];
                }
            }
        }
        Ok(out)
    }

    /// Dense product `selfᵀ · x` — the adjoint of [`SparseMatrix::apply`],
    /// used by the backward pass.
    pub fn apply_transpose(&self, x: &Matrix) -> Result<Matrix, NnError> {
        if x.rows() != self.rows {
            return Err(NnError::ShapeMismatch {
                op: "sparse apply_transpose".to_string(),
                expected: format!("{} rows", self.rows),
                got: format!("{} rows", x.rows()),
            });
        }
        let mut out = Matrix::zeros(self.cols, x.cols());
        for r in 0..self.rows {
            let src = x.row(r);
            for idx in self.offsets[r]..self.offsets[r + 1] {
                let dst = out.row_mut(self.indices[idx]);
                let w = self.values[idx];
                for c in 0..src.len() {
                    dst[c] += w * src[c];
                }
            }
        }
        Ok(out)
    }
}

/// The structure of a segmented reduction: `segment_count` segments, each
/// listing member indices into `0..node_count`. Edge `e` of segment `s`
/// contributes node `members[e]` to segment `s`'s reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePattern {
    segment_count: usize,
    node_count: usize,
    offsets: Vec<usize>,
    members: Vec<usize>,
}

impl SparsePattern {
    /// Builds from per-segment member lists. Panics on out-of-range members.
    pub fn from_segments(node_count: usize, segments: &[Vec<usize>]) -> SparsePattern {
        let mut offsets = Vec::with_capacity(segments.len() + 1);
        let mut members = Vec::new();
        offsets.push(0);
        for segment in segments {
            for &m in segment {
                assert!(
                    m < node_count,
                    "member {m} out of range ({node_count} nodes)"
                );
                members.push(m);
            }
            offsets.push(members.len());
        }
        SparsePattern {
            segment_count: segments.len(),
            node_count,
            offsets,
            members,
        }
    }

    pub fn segment_count(&self) -> usize {
        self.segment_count
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Total number of (segment, member) edges.
    pub fn edge_count(&self) -> usize {
        self.members.len()
    }

    pub fn segment(&self, s: usize) -> &[usize] {
        &self.members[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn edge_range(&self, s: usize) -> std::ops::Range<usize> {
        self.offsets[s]..self.offsets[s + 1]
    }

    fn check_nodes(&self, op: &str, x: &Matrix) -> Result<(), NnError> {
        if x.rows() != self.node_count {
            return Err(NnError::ShapeMismatch {
                op: op.to_string(),
                expected: format!("{} node rows", self.node_count),
                got: format!("{} rows", x.rows()),
            });
        }
        Ok(())
    }

    fn check_edges(&self, op: &str, x: &Matrix) -> Result<(), NnError> {
        if x.shape() != (self.edge_count(), 1) {
            return Err(NnError::ShapeMismatch {
                op: op.to_string(),
                expected: format!("({}, 1) edge column", self.edge_count()),
                got: format!("{:?}", x.shape()),
            });
        }
        Ok(())
    }
}

/// Per-edge sums `z[e] = segment_scores[s(e)] + member_scores[m(e)]`, where
/// `s(e)` is the segment owning edge `e` and `m(e)` its member node. Both
/// score inputs are `node_count×1` columns; the result is `edges×1`.
pub fn gather_add_pairs(
    segment_scores: &Matrix,
    member_scores: &Matrix,
    pattern: &SparsePattern,
) -> Result<Matrix, NnError> {
    pattern.check_nodes("gather_add_pairs segment scores", segment_scores)?;
    pattern.check_nodes("gather_add_pairs member scores", member_scores)?;
    if segment_scores.cols() != 1 || member_scores.cols() != 1 {
        return Err(NnError::ShapeMismatch {
            op: "gather_add_pairs".to_string(),
            expected: "single-column score vectors".to_string(),
            got: format!(
                "{:?} and {:?}",
                segment_scores.shape(),
                member_scores.shape()
            ),
        });
    }
    let mut out = Matrix::zeros(pattern.edge_count(), 1);
    for s in 0..pattern.segment_count() {
        let base = segment_scores.get(s, 0);
        for e in pattern.edge_range(s) {
            out.set(e, 0, base + member_scores.get(pattern.members[e], 0));
        }
    }
    Ok(out)
}

/// Softmax over each segment's edge scores (stabilized per segment).
/// Segments with no edges contribute nothing.
pub fn segment_softmax(edge_scores: &Matrix, pattern: &SparsePattern) -> Result<Matrix, NnError> {
    pattern.check_edges("segment_softmax", edge_scores)?;
    let mut out = edge_scores.clone();
    for s in 0..pattern.segment_count() {
        let range = pattern.edge_range(s);
        softmax_slice(&mut out.data_mut()[range]);
    }
    Ok(out)
}

/// Weighted segment reduction `out[s] = Σ_{e ∈ segment s} weights[e] · x[m(e)]`.
pub fn weighted_gather_sum(
    weights: &Matrix,
    x: &Matrix,
    pattern: &SparsePattern,
) -> Result<Matrix, NnError> {
    pattern.check_edges("weighted_gather_sum weights", weights)?;
    pattern.check_nodes("weighted_gather_sum features", x)?;
    let mut out = Matrix::zeros(pattern.segment_count(), x.cols());
    for s in 0..pattern.segment_count() {
        let out_row = out.row_mut(s);
        for e in pattern.edge_range(s) {
            let w = weights.get(e, 0);
            let src = x.row(pattern.members[e]);
            for c in 0..src.len() {
                out_row[c] += w * src[c];
            }
        }
    }
    Ok(out)
}
