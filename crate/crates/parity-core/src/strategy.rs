use crate::game::{Player, VertexId};

/// A positional (memoryless) strategy for one player: at each vertex owned
/// by that player, the successor the player commits to.
///
/// Entries are `None` for vertices where the strategy is undefined — either
/// the vertex belongs to the opponent, or it lies outside the player's
/// winning region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    player: Player,
    choice: Vec<Option<VertexId>>,
}

impl Strategy {
    /// An everywhere-undefined strategy for `player` over `n` vertices.
    pub fn new(player: Player, n: usize) -> Strategy {
        Strategy {
            player,
            choice: vec![None; n],
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn vertex_count(&self) -> usize {
        self.choice.len()
    }

    /// The committed successor at `v`, if the strategy defines one.
    pub fn choice(&self, v: VertexId) -> Option<VertexId> {
        self.choice[v]
    }

    pub fn set_choice(&mut self, v: VertexId, successor: VertexId) {
        self.choice[v] = Some(successor);
    }

    pub fn clear_choice(&mut self, v: VertexId) {
        self.choice[v] = None;
    }

    /// All `(vertex, successor)` pairs the strategy defines, ascending by
    /// vertex.
    pub fn defined_choices(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|succ| (v, succ)))
    }
}
