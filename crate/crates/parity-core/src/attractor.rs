use crate::game::{Arena, Player, VertexId};
use crate::strategy::Strategy;
use crate::vertex_set::VertexSet;

/// Per-vertex predecessor lists, precomputed once so repeated attractor
/// computations are linear in the number of edges.
///
/// Lists are in ascending order because they are built by one ascending
/// sweep over already-sorted successor lists.
pub(crate) struct Predecessors {
    lists: Vec<Vec<VertexId>>,
}

impl Predecessors {
    pub(crate) fn of(arena: &Arena) -> Predecessors {
        let mut lists = vec![Vec::new(); arena.vertex_count()];
        for v in arena.vertices() {
            for &succ in arena.successors(v) {
                lists[succ].push(v);
            }
        }
        Predecessors { lists }
    }

    fn of_vertex(&self, v: VertexId) -> &[VertexId] {
        &self.lists[v]
    }
}

/// The `player`-attractor of `target` within the whole arena: the least set
/// containing `target` and closed under "the player can force entry in one
/// step".
///
/// A vertex joins the attractor `A` iff it is owned by `player` and has some
/// successor in `A`, or is owned by the opponent and has all its successors
/// in `A`.
///
/// The arena must be structurally valid (see [`Arena::validate`]);
/// otherwise opponent vertices without successors would vacuously join.
pub fn attractor(arena: &Arena, player: Player, target: &VertexSet) -> VertexSet {
    debug_assert!(arena.validate().is_empty(), "attractor needs a valid arena");
    let preds = Predecessors::of(arena);
    let region = VertexSet::full(arena.vertex_count());
    attractor_within(arena, &preds, player, target, &region, None)
}

/// The `player`-attractor of `target ∩ region` computed inside the subgame
/// induced by `region`: only edges between region vertices count.
///
/// When `strategy` is given, an attracting move is recorded for every
/// `player`-owned vertex that joins the attractor (its smallest successor
/// already attracted at the time it joins); vertices of the seed set keep
/// whatever choice they already have.
pub(crate) fn attractor_within(
    arena: &Arena,
    preds: &Predecessors,
    player: Player,
    target: &VertexSet,
    region: &VertexSet,
    mut strategy: Option<&mut Strategy>,
) -> VertexSet {
    let mut attracted = target.clone();
    attracted.intersect_with(region);

    // For opponent vertices: successors inside the region not yet attracted.
    // When the count hits zero the opponent can no longer escape.
    let mut escape_routes: Vec<usize> = vec![0; arena.vertex_count()];
    for v in region.iter() {
        if arena.owner(v) != player {
            escape_routes[v] = arena
                .successors(v)
                .iter()
                .filter(|&&s| region.contains(s))
                .count();
        }
    }

    let mut queue: std::collections::VecDeque<VertexId> = attracted.iter().collect();
    while let Some(u) = queue.pop_front() {
        for &p in preds.of_vertex(u) {
            if !region.contains(p) || attracted.contains(p) {
                continue;
            }
            if arena.owner(p) == player {
                // The committed move must point at a vertex attracted
                // strictly earlier, so plays make progress toward the
                // target instead of orbiting inside the newly added layer.
                if let Some(strat) = strategy.as_deref_mut() {
                    let pick = arena
                        .successors(p)
                        .iter()
                        .copied()
                        .find(|&s| attracted.contains(s))
                        .expect("attracted player vertex has a successor in the attractor");
                    strat.set_choice(p, pick);
                }
                attracted.insert(p);
                queue.push_back(p);
            } else {
                escape_routes[p] -= 1;
                if escape_routes[p] == 0 {
                    attracted.insert(p);
                    queue.push_back(p);
                }
            }
        }
    }
    attracted
}
