use crate::vertex_set::VertexSet;

/// Index of a vertex in an arena. Vertices are always `0..vertex_count`.
pub type VertexId = usize;

/// One of the two players of a parity game.
///
/// Player 0 ([`Player::Even`]) wins a play iff the maximum color occurring
/// infinitely often is even; player 1 ([`Player::Odd`]) wins otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    /// Numeric index: 0 for [`Player::Even`], 1 for [`Player::Odd`].
    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Player> {
        match index {
            0 => Some(Player::Even),
            1 => Some(Player::Odd),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player whose parity matches `color`: even colors favor player 0.
    pub fn from_color(color: u32) -> Player {
        if color.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// The graph structure of a parity game: vertex ownership plus directed
/// edges given as per-vertex successor lists.
///
/// Successor lists are sorted and deduplicated on construction so that all
/// downstream iteration is deterministic. An `Arena` value may still be
/// structurally invalid (empty successor lists, dangling edges); call
/// [`Arena::validate`] to check totality and edge closure before solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    owners: Vec<Player>,
    successors: Vec<Vec<VertexId>>,
}

/// A structural defect found by [`Arena::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArenaViolation {
    /// The vertex has no outgoing edge, so plays could get stuck there.
    NoSuccessor(VertexId),
    /// An edge points outside the vertex range.
    DanglingEdge { from: VertexId, to: VertexId },
}

impl std::fmt::Display for ArenaViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArenaViolation::NoSuccessor(v) => {
                write!(f, "vertex {v} has no successor")
            }
            ArenaViolation::DanglingEdge { from, to } => {
                write!(f, "edge {from} -> {to} leaves the vertex range")
            }
        }
    }
}

impl Arena {
    /// Builds an arena. `owners` and `successors` must have equal length.
    /// Successor lists are sorted and deduplicated.
    pub fn new(owners: Vec<Player>, mut successors: Vec<Vec<VertexId>>) -> Arena {
        assert_eq!(
            owners.len(),
            successors.len(),
            "owners and successor lists must cover the same vertices"
        );
        for list in successors.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Arena { owners, successors }
    }

    pub fn vertex_count(&self) -> usize {
        self.owners.len()
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owners[v]
    }

    /// Successors of `v`, in ascending id order.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v]
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// All vertices owned by `player`.
    pub fn vertices_of(&self, player: Player) -> VertexSet {
        VertexSet::from_ids(
            self.vertex_count(),
            self.vertices().filter(|&v| self.owners[v] == player),
        )
    }

    /// Checks totality (every vertex has a successor) and edge closure
    /// (every edge stays inside the vertex range). Returns all defects;
    /// an empty vector means the arena is a well-formed game graph.
    pub fn validate(&self) -> Vec<ArenaViolation> {
        let n = self.vertex_count();
        let mut violations = Vec::new();
        for v in self.vertices() {
            if self.successors[v].is_empty() {
                violations.push(ArenaViolation::NoSuccessor(v));
            }
            for &to in &self.successors[v] {
                if to >= n {
                    violations.push(ArenaViolation::DanglingEdge { from: v, to });
                }
            }
        }
        violations
    }
}

/// A parity game: an [`Arena`] plus a color for every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    arena: Arena,
    colors: Vec<u32>,
}

impl ParityGame {
    /// Builds a game. `colors` must cover exactly the arena's vertices.
    pub fn new(arena: Arena, colors: Vec<u32>) -> ParityGame {
        assert_eq!(
            arena.vertex_count(),
            colors.len(),
            "one color per vertex required"
        );
        ParityGame { arena, colors }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn color(&self, v: VertexId) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn vertex_count(&self) -> usize {
        self.arena.vertex_count()
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.arena.owner(v)
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        self.arena.successors(v)
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        self.arena.vertices()
    }
}

/// The partition of a game's vertices into the two winning regions.
///
/// By positional determinacy every vertex is won by exactly one player, so
/// for a valid game `w0` and `w1` are disjoint and cover all vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegions {
    pub w0: VertexSet,
    pub w1: VertexSet,
}

impl WinningRegions {
    /// Classifies each vertex by a winner assignment.
    pub fn from_winners(winners: &[Player]) -> WinningRegions {
        let n = winners.len();
        let mut w0 = VertexSet::empty(n);
        let mut w1 = VertexSet::empty(n);
        for (v, &p) in winners.iter().enumerate() {
            match p {
                Player::Even => w0.insert(v),
                Player::Odd => w1.insert(v),
            }
        }
        WinningRegions { w0, w1 }
    }

    /// The winner of vertex `v`. Panics if `v` is in neither region.
    pub fn winner_of(&self, v: VertexId) -> Player {
        if self.w0.contains(v) {
            Player::Even
        } else if self.w1.contains(v) {
            Player::Odd
        } else {
            panic!("vertex {v} is in neither winning region");
        }
    }

    /// The region of `player`.
    pub fn region(&self, player: Player) -> &VertexSet {
        match player {
            Player::Even => &self.w0,
            Player::Odd => &self.w1,
        }
    }

    /// True iff the two regions are disjoint and cover the whole universe.
    pub fn is_partition(&self) -> bool {
        if !self.w0.is_disjoint(&self.w1) {
            return false;
        }
        self.w0.len() + self.w1.len() == self.w0.universe()
    }
}
