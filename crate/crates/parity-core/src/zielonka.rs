use crate::attractor::{Predecessors, attractor_within};
use crate::game::{ArenaViolation, ParityGame, Player, WinningRegions};
use crate::strategy::Strategy;
use crate::vertex_set::VertexSet;

/// Why a solver refused to solve a game.
#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("arena is not a valid game graph: {}", format_violations(.0))]
    InvalidArena(Vec<ArenaViolation>),
    /// Only raised by the brute-force reference solver, whose cost grows
    /// with the number of positional strategy pairs.
    #[error("{pairs} strategy pairs exceed the brute-force limit of {limit}")]
    TooManyStrategyPairs { pairs: u128, limit: u64 },
}

fn format_violations(violations: &[ArenaViolation]) -> String {
    violations
        .iter()
        .map(ArenaViolation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Solves a parity game exactly with Zielonka's recursive algorithm.
///
/// Returns the winning-region partition. The arena must be a valid game
/// graph (total, no dangling edges), otherwise [`SolveError::InvalidArena`]
/// is returned.
pub fn solve_zielonka(game: &ParityGame) -> Result<WinningRegions, SolveError> {
    let (regions, _) = solve_impl(game, false)?;
    Ok(regions)
}

/// Like [`solve_zielonka`], additionally extracting a positional winning
/// strategy for each player on that player's winning region.
///
/// The returned strategies are defined exactly on `w0 ∩ V0` and `w1 ∩ V1`
/// respectively, and every committed move stays inside the owner's winning
/// region.
pub fn solve_zielonka_with_strategies(
    game: &ParityGame,
) -> Result<(WinningRegions, [Strategy; 2]), SolveError> {
    let (regions, strategies) = solve_impl(game, true)?;
    Ok((regions, strategies.expect("strategies were requested")))
}

fn solve_impl(
    game: &ParityGame,
    want_strategies: bool,
) -> Result<(WinningRegions, Option<[Strategy; 2]>), SolveError> {
    let violations = game.arena().validate();
    if !violations.is_empty() {
        return Err(SolveError::InvalidArena(violations));
    }

    let n = game.vertex_count();
    let mut solver = Solver {
        game,
        preds: Predecessors::of(game.arena()),
        strategies: want_strategies.then(|| {
            [
                Strategy::new(Player::Even, n),
                Strategy::new(Player::Odd, n),
            ]
        }),
    };
    let (w0, w1) = solver.solve(VertexSet::full(n));
    let regions = WinningRegions { w0, w1 };
    debug_assert!(regions.is_partition(), "solver must partition the vertices");

    // Intermediate recursion levels leave stale choices behind on vertices
    // that were later re-solved or captured by the opponent; a winning
    // strategy is only meaningful on the owner's winning region.
    let strategies = solver.strategies.map(|mut strats| {
        for v in game.vertices() {
            let owner = game.owner(v);
            if !regions.region(owner).contains(v) {
                strats[owner.index()].clear_choice(v);
            }
        }
        strats
    });

    Ok((regions, strategies))
}

struct Solver<'g> {
    game: &'g ParityGame,
    preds: Predecessors,
    strategies: Option<[Strategy; 2]>,
}

impl Solver<'_> {
    /// Solves the subgame induced by `region`, returning the partition of
    /// `region` into the two winning regions.
    ///
    /// Precondition (Zielonka's invariant): the subgame is total, i.e. every
    /// vertex of `region` keeps at least one successor inside `region`.
    fn solve(&mut self, region: VertexSet) -> (VertexSet, VertexSet) {
        let universe = region.universe();
        if region.is_empty() {
            return (VertexSet::empty(universe), VertexSet::empty(universe));
        }

        let top_color = region
            .iter()
            .map(|v| self.game.color(v))
            .max()
            .expect("region is non-empty");
        let favored = Player::from_color(top_color);

        // Vertices carrying the top color, plus the favored player's moves
        // on them: any successor that stays in the region keeps the play
        // inside the subgame, re-visiting the top color.
        let mut top_vertices = VertexSet::empty(universe);
        for v in region.iter() {
            if self.game.color(v) == top_color {
                top_vertices.insert(v);
                if self.game.owner(v) == favored
                    && let Some(strats) = self.strategies.as_mut()
                {
                    let pick = self
                        .game
                        .successors(v)
                        .iter()
                        .copied()
                        .find(|&s| region.contains(s))
                        .expect("subgame is total");
                    strats[favored.index()].set_choice(v, pick);
                }
            }
        }

        let lure = self.attract(favored, &top_vertices, &region);

        let mut rest = region.clone();
        rest.subtract(&lure);
        let sub = self.solve(rest);
        let opponent_part = match favored {
            Player::Even => sub.1,
            Player::Odd => sub.0,
        };

        if opponent_part.is_empty() {
            // The favored player wins everywhere: plays either stay in the
            // sub-solution (won by induction) or are dragged through the
            // top color infinitely often.
            return match favored {
                Player::Even => (region, VertexSet::empty(universe)),
                Player::Odd => (VertexSet::empty(universe), region),
            };
        }

        // The opponent wins part of the subgame — and with it everything
        // attracted to that part; re-solve the remainder.
        let opponent = favored.opponent();
        let escape = self.attract(opponent, &opponent_part, &region);

        let mut remainder = region;
        remainder.subtract(&escape);
        let (mut w0, mut w1) = self.solve(remainder);
        match opponent {
            Player::Even => w0.union_with(&escape),
            Player::Odd => w1.union_with(&escape),
        }
        (w0, w1)
    }

    fn attract(&mut self, player: Player, target: &VertexSet, region: &VertexSet) -> VertexSet {
        let strategy = self
            .strategies
            .as_mut()
            .map(|strats| &mut strats[player.index()]);
        attractor_within(
            self.game.arena(),
            &self.preds,
            player,
            target,
            region,
            strategy,
        )
    }
}
