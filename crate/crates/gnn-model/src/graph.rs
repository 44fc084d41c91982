//! Attributed graphs and the parity game encoding.

use nn_core::{Matrix, SparseMatrix, SparsePattern};
use parity_core::{ParityGame, Player, VertexId};
use std::rc::Rc;

/// Number of input attributes per vertex: `(color, owned-by-0, owned-by-1)`.
pub const INPUT_WIDTH: usize = 3;

/// A directed graph whose vertices carry real-valued attribute vectors —
/// the representation message-passing layers read and write.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    attributes: Matrix,
    successors: Vec<Vec<VertexId>>,
}

impl AttributedGraph {
    /// # Panics
    ///
    /// Panics if the attribute row count differs from the successor list
    /// count or an edge points outside the graph.
    pub fn new(attributes: Matrix, successors: Vec<Vec<VertexId>>) -> Self {
        assert_eq!(
            attributes.rows(),
            successors.len(),
            "one attribute row per vertex"
        );
        let n = successors.len();
        for (v, outgoing) in successors.iter().enumerate() {
            for &s in outgoing {
                assert!(s < n, "edge {v} -> {s} leaves the graph of {n} vertices");
            }
        }
        AttributedGraph {
            attributes,
            successors,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn attributes(&self) -> &Matrix {
        &self.attributes
    }

    /// Replaces the attribute matrix (same vertex set, new features).
    pub fn with_attributes(&self, attributes: Matrix) -> Self {
        AttributedGraph::new(attributes, self.successors.clone())
    }

    /// The successor set `N(v)`; its length is `deg(v)`.
    pub fn neighborhood(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.successors[v].len()
    }

    pub fn successor_lists(&self) -> &[Vec<VertexId>] {
        &self.successors
    }
}

/// Encodes a parity game as the model's input graph: row `v` of the
/// attribute matrix is `(color(v), [owner = 0], [owner = 1])` and the edges
/// are exactly the arena's successor relation.
pub fn encode_game(game: &ParityGame) -> AttributedGraph {
    let arena = game.arena();
    let n = arena.vertex_count();
    let attributes = Matrix::from_fn(n, INPUT_WIDTH, |v, c| match c {
        0 => f64::from(game.color(v)),
        1 => {
            if arena.owner(v) == Player::Even {
                1.0
            } else {
                0.0
            }
        }
        _ => {
            if arena.owner(v) == Player::Odd {
                1.0
            } else {
                0.0
            }
        }
    });
    let successors = arena
        .vertices()
        .map(|v| arena.successors(v).to_vec())
        .collect();
    AttributedGraph::new(attributes, successors)
}

/// Aggregation structure shared by every message-passing layer of one graph:
/// per-vertex aggregation sets `{v} ∪ N(v)`, the degree-normalized sparse
/// matrix used by convolutional aggregation, and the segment pattern used by
/// attention. Built once per graph, reused across layers.
#[derive(Debug, Clone)]
pub struct Neighborhoods {
    conv_coefficients: Rc<SparseMatrix>,
    attention_pattern: Rc<SparsePattern>,
}

impl Neighborhoods {
    /// # Panics
    ///
    /// Panics if any vertex has no successor: degree-normalization divides
    /// by `deg(v)`, and the upstream arena invariant guarantees totality.
    pub fn new(graph: &AttributedGraph) -> Self {
        let n = graph.vertex_count();
        let mut segments = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for v in 0..n {
            let deg_v = graph.degree(v);
            assert!(deg_v >= 1, "vertex {v} has no successor; arenas are total");
            // {v} ∪ N(v), ascending and duplicate-free: successor lists are
            // sorted sets, so only the self-member needs merging in.
            let succ = graph.neighborhood(v);
            let mut members = Vec::with_capacity(succ.len() + 1);
            let mut inserted_self = false;
            for &u in succ {
                if !inserted_self && u >= v {
                    if u != v {
                        members.push(v);
                    }
                    inserted_self = true;
                }
                members.push(u);
            }
            if !inserted_self {
                members.push(v);
            }
            let entries = members
                .iter()
                .map(|&u| {
                    let deg_u = graph.degree(u);
                    (u, 1.0 / ((deg_v * deg_u) as f64).sqrt())
                })
                .collect();
            rows.push(entries);
            segments.push(members);
        }
        Neighborhoods {
            conv_coefficients: Rc::new(SparseMatrix::from_row_entries(n, &rows)),
            attention_pattern: Rc::new(SparsePattern::from_segments(n, &segments)),
        }
    }

    /// Sparse matrix `S` with `S[v][u] = 1/sqrt(deg(v)·deg(u))` for
    /// `u ∈ {v} ∪ N(v)`; convolutional aggregation is `S · X`.
    pub fn conv_coefficients(&self) -> &Rc<SparseMatrix> {
        &self.conv_coefficients
    }

    /// Segment pattern whose segment `v` lists `{v} ∪ N(v)` ascending;
    /// attention scores and weighted sums are computed per segment.
    pub fn attention_pattern(&self) -> &Rc<SparsePattern> {
        &self.attention_pattern
    }

    /// Members of the aggregation set `{v} ∪ N(v)`, ascending.
    pub fn aggregation_set(&self, v: VertexId) -> &[VertexId] {
        self.attention_pattern.segment(v)
    }
}
