//! Prediction-quality metrics aggregated over a collection of games.

use parity_core::WinningRegions;

/// Outcome of evaluating the model on one game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameOutcome {
    /// Number of vertices in the game.
    pub vertex_count: usize,
    /// Number of vertices whose predicted winner differs from the exact winner.
    pub misclassified: usize,
}

/// Aggregate metrics over a set of games.
///
/// `games_err0 + games_err1 + games_err2plus` always equals the number of
/// games, and the total misclassified count equals
/// `(1 - vertex_accuracy) * total_vertices`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Fraction of vertices across all games whose winner was predicted
    /// correctly. An empty collection counts as accuracy 1.0 (no vertex was
    /// misclassified).
    pub vertex_accuracy: f64,
    /// Number of games predicted perfectly.
    pub games_err0: usize,
    /// Number of games with exactly one misclassified vertex.
    pub games_err1: usize,
    /// Number of games with two or more misclassified vertices.
    pub games_err2plus: usize,
    /// Per-game outcomes, in evaluation order.
    pub per_game: Vec<GameOutcome>,
}

impl Metrics {
    /// Number of games covered by these metrics.
    pub fn game_count(&self) -> usize {
        self.per_game.len()
    }

    /// Total number of vertices across all games.
    pub fn total_vertices(&self) -> usize {
        self.per_game.iter().map(|g| g.vertex_count).sum()
    }

    /// Total number of misclassified vertices across all games.
    pub fn total_misclassified(&self) -> usize {
        self.per_game.iter().map(|g| g.misclassified).sum()
    }
}

/// Aggregates per-game outcomes into [`Metrics`].
///
/// # Panics
///
/// Panics if any outcome reports more misclassified vertices than vertices.
pub fn compute_metrics(outcomes: &[GameOutcome]) -> Metrics {
    let mut total_vertices = 0usize;
    let mut total_wrong = 0usize;
    let mut err0 = 0usize;
    let mut err1 = 0usize;
    let mut err2plus = 0usize;
    for outcome in outcomes {
        assert!(
            outcome.misclassified <= outcome.vertex_count,
            "game reports {} misclassified vertices out of {}",
            outcome.misclassified,
            outcome.vertex_count
        );
        total_vertices += outcome.vertex_count;
        total_wrong += outcome.misclassified;
        match outcome.misclassified {
            0 => err0 += 1,
            1 => err1 += 1,
            _ => err2plus += 1,
        }
    }
    let vertex_accuracy = if total_vertices == 0 {
        1.0
    } else {
        (total_vertices - total_wrong) as f64 / total_vertices as f64
    };
    Metrics {
        vertex_accuracy,
        games_err0: err0,
        games_err1: err1,
        games_err2plus: err2plus,
        per_game: outcomes.to_vec(),
    }
}

/// Counts the vertices where two winning-region partitions disagree.
///
/// # Panics
///
/// Panics if the two partitions cover different vertex counts.
pub fn misclassified_vertices(predicted: &WinningRegions, exact: &WinningRegions) -> usize {
    assert_eq!(
        predicted.w0.universe(),
        exact.w0.universe(),
        "predictions and exact regions cover different vertex counts"
    );
    (0..exact.w0.universe())
        .filter(|&v| predicted.winner_of(v) != exact.winner_of(v))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use parity_core::{Player, VertexSet};

    fn regions_from(bits0: &[usize], n: usize) -> WinningRegions {
        let mut w0 = VertexSet::empty(n);
        for &v in bits0 {
            w0.insert(v);
        }
        let mut w1 = VertexSet::empty(n);
        for v in 0..n {
            if !w0.contains(v) {
                w1.insert(v);
            }
        }
        WinningRegions { w0, w1 }
    }

    #[test]
    fn buckets_partition_the_games() {
        let outcomes = vec![
            GameOutcome {
                vertex_count: 5,
                misclassified: 0,
            },
            GameOutcome {
                vertex_count: 7,
                misclassified: 1,
            },
            GameOutcome {
                vertex_count: 4,
                misclassified: 4,
            },
            GameOutcome {
                vertex_count: 9,
                misclassified: 2,
            },
            GameOutcome {
                vertex_count: 3,
                misclassified: 0,
            },
        ];
        let metrics = compute_metrics(&outcomes);
        assert_eq!(metrics.games_err0, 2);
        assert_eq!(metrics.games_err1, 1);
        assert_eq!(metrics.games_err2plus, 2);
        assert_eq!(
            metrics.games_err0 + metrics.games_err1 + metrics.games_err2plus,
            outcomes.len()
        );
    }

    #[test]
    fn accuracy_matches_total_misclassified_identity() {
        let outcomes = vec![
            GameOutcome {
                vertex_count: 10,
                misclassified: 3,
            },
            GameOutcome {
                vertex_count: 20,
                misclassified: 0,
            },
            GameOutcome {
                vertex_count: 15,
                misclassified: 5,
            },
        ];
        let metrics = compute_metrics(&outcomes);
        let total = metrics.total_vertices() as f64;
        let wrong = metrics.total_misclassified() as f64;
        assert!(((1.0 - metrics.vertex_accuracy) * total - wrong).abs() < 1e-9);
        assert_eq!(metrics.total_vertices(), 45);
        assert_eq!(metrics.total_misclassified(), 8);
    }

    #[test]
    fn empty_collection_counts_as_perfect() {
        let metrics = compute_metrics(&[]);
        assert_eq!(metrics.vertex_accuracy, 1.0);
        assert_eq!(metrics.game_count(), 0);
        assert_eq!(
            metrics.games_err0 + metrics.games_err1 + metrics.games_err2plus,
            0
        );
    }

    #[test]
    fn disagreement_count_is_per_vertex() {
        let exact = regions_from(&[0, 1, 2], 5);
        let same = regions_from(&[0, 1, 2], 5);
        let off_by_two = regions_from(&[0, 3], 5);
        assert_eq!(misclassified_vertices(&same, &exact), 0);
        // Differs at 1, 2 (dropped) and 3 (added).
        assert_eq!(misclassified_vertices(&off_by_two, &exact), 3);
        assert_eq!(exact.winner_of(0), Player::Even);
        assert_eq!(exact.winner_of(4), Player::Odd);
    }

    #[test]
    #[should_panic(expected = "different vertex counts")]
    fn mismatched_universes_are_rejected() {
        let a = regions_from(&[0], 3);
        let b = regions_from(&[0], 4);
        misclassified_vertices(&a, &b);
    }
}
