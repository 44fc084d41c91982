use crate::game::{ParityGame, Player, VertexId, WinningRegions};
use crate::strategy::Strategy;
use crate::vertex_set::VertexSet;
use crate::zielonka::SolveError;

/// Upper bound on `(# player-0 strategies) × (# player-1 strategies)` the
/// brute-force solver is willing to enumerate.
pub const MAX_STRATEGY_PAIRS: u64 = 10_000_000;

/// The winner of the unique play from `start` when both players follow the
/// given positional strategies.
///
/// Once both strategies are fixed the play is a deterministic walk: it
/// reaches a cycle after at most `|V|` steps, and the winner is decided by
/// the parity of the maximum color on that cycle (colors on the finite
/// prefix before the cycle never repeat, so they do not count).
///
/// Panics if the strategy of a visited vertex's owner commits to no move
/// there — both strategies must cover every vertex their player owns along
/// the play.
pub fn play_winner(
    game: &ParityGame,
    strategy0: &Strategy,
    strategy1: &Strategy,
    start: VertexId,
) -> Player {
    let n = game.vertex_count();
    let mut visited_at: Vec<Option<usize>> = vec![None; n];
    let mut path: Vec<VertexId> = Vec::new();
    let mut current = start;

    loop {
        if let Some(cycle_start) = visited_at[current] {
            let cycle_max = path[cycle_start..]
                .iter()
                .map(|&v| game.color(v))
                .max()
                .expect("cycle is non-empty");
            return Player::from_color(cycle_max);
        }
        visited_at[current] = Some(path.len());
        path.push(current);
        let strategy = match game.owner(current) {
            Player::Even => strategy0,
            Player::Odd => strategy1,
        };
        current = strategy.choice(current).unwrap_or_else(|| {
            panic!(
                "strategy of player {} undefined at vertex {current}",
                strategy.player()
            )
        });
    }
}

/// Solves a parity game by exhaustively enumerating positional strategy
/// pairs — the definition of winning made executable.
///
/// A vertex is in `w0` iff some player-0 strategy wins from it against
/// every player-1 strategy, and symmetrically for `w1`. Both quantifier
/// orders are evaluated independently; positional determinacy says the two
/// regions must partition the vertices, and this is asserted. The
/// exhaustive search makes this solver a trustworthy (if exponential)
/// reference for cross-checking faster solvers.
///
/// Refuses games whose strategy-pair count exceeds [`MAX_STRATEGY_PAIRS`].
pub fn solve_brute_force(game: &ParityGame) -> Result<WinningRegions, SolveError> {
    let violations = game.arena().validate();
    if !violations.is_empty() {
        return Err(SolveError::InvalidArena(violations));
    }

    let pairs: u128 = game
        .vertices()
        .map(|v| game.successors(v).len() as u128)
        .product();
    if pairs > MAX_STRATEGY_PAIRS as u128 {
        return Err(SolveError::TooManyStrategyPairs {
            pairs,
            limit: MAX_STRATEGY_PAIRS,
        });
    }

    let w0 = forced_wins(game, Player::Even);
    let w1 = forced_wins(game, Player::Odd);

    assert!(
        w0.is_disjoint(&w1) && w0.len() + w1.len() == game.vertex_count(),
        "positional determinacy violated: regions {w0:?} and {w1:?} do not partition the arena"
    );
    Ok(WinningRegions { w0, w1 })
}

/// Vertices from which `player` has a positional strategy that wins against
/// every positional opponent strategy.
fn forced_wins(game: &ParityGame, player: Player) -> VertexSet {
    let n = game.vertex_count();
    let mut wins = VertexSet::empty(n);
    let mut choices: Vec<VertexId> = vec![0; n];
    let mut eval = PlayEvaluator::new(n);

    let mut mine = StrategyCounter::new(game, player);
    loop {
        mine.apply(game, &mut choices);

        // Vertices where this strategy beats every opponent strategy.
        let mut won_everywhere = VertexSet::full(n);
        let mut theirs = StrategyCounter::new(game, player.opponent());
        loop {
            theirs.apply(game, &mut choices);
            eval.reset();
            for v in game.vertices() {
                if won_everywhere.contains(v) && eval.winner(game, &choices, v) != player {
                    won_everywhere.remove(v);
                }
            }
            if won_everywhere.is_empty() || !theirs.advance() {
                break;
            }
        }

        wins.union_with(&won_everywhere);
        if !mine.advance() {
            break;
        }
    }
    wins
}

/// Mixed-radix counter over the positional strategies of one player: each
/// owned vertex contributes one digit ranging over its successor list.
struct StrategyCounter {
    owned: Vec<VertexId>,
    radices: Vec<usize>,
    digits: Vec<usize>,
}

impl StrategyCounter {
    fn new(game: &ParityGame, player: Player) -> StrategyCounter {
        let owned: Vec<VertexId> = game
            .vertices()
            .filter(|&v| game.owner(v) == player)
            .collect();
        let radices = owned.iter().map(|&v| game.successors(v).len()).collect();
        StrategyCounter {
            digits: vec![0; owned.len()],
            owned,
            radices,
        }
    }

    /// Writes this strategy's moves into the combined choice function.
    fn apply(&self, game: &ParityGame, choices: &mut [VertexId]) {
        for (i, &v) in self.owned.iter().enumerate() {
            choices[v] = game.successors(v)[self.digits[i]];
        }
    }

    /// Steps to the next strategy; false when all have been enumerated.
    fn advance(&mut self) -> bool {
        for i in 0..self.digits.len() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }
}

/// Memoized winner evaluation for one fixed choice function. With all moves
/// fixed the game is a functional graph, so one walk decides every vertex
/// on its path; `reset` must be called whenever the choice function changes.
struct PlayEvaluator {
    winner: Vec<Option<Player>>,
    position_in_path: Vec<Option<usize>>,
}

impl PlayEvaluator {
    fn new(n: usize) -> PlayEvaluator {
        PlayEvaluator {
            winner: vec![None; n],
            position_in_path: vec![None; n],
        }
    }

    fn reset(&mut self) {
        self.winner.fill(None);
    }

    fn winner(&mut self, game: &ParityGame, choices: &[VertexId], start: VertexId) -> Player {
        if let Some(w) = self.winner[start] {
            return w;
        }
        let mut path: Vec<VertexId> = Vec::new();
        let mut current = start;
        let decided = loop {
            if let Some(w) = self.winner[current] {
                break w;
            }
            if let Some(at) = self.position_in_path[current] {
                // Walked into our own path: the tail from there is the cycle.
                let cycle_max = path[at..]
                    .iter()
                    .map(|&v| game.color(v))
                    .max()
                    .expect("cycle is non-empty");
                break Player::from_color(cycle_max);
            }
            self.position_in_path[current] = Some(path.len());
            path.push(current);
            current = choices[current];
        };
        for &v in &path {
            self.winner[v] = Some(decided);
            self.position_in_path[v] = None;
        }
        decided
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Arena, Player::Even, Player::Odd};

    fn game(owners: Vec<Player>, succs: Vec<Vec<usize>>, colors: Vec<u32>) -> ParityGame {
        ParityGame::new(Arena::new(owners, succs), colors)
    }

    #[test]
    fn play_reaches_the_terminal_loop() {
        // v0 (color 5) -> v1 (color 2) -> v1: the prefix color 5 never
        // repeats, the loop color 2 is even, so player 0 wins.
        let g = game(vec![Even, Even], vec![vec![1], vec![1]], vec![5, 2]);
        let mut s0 = Strategy::new(Even, 2);
        s0.set_choice(0, 1);
        s0.set_choice(1, 1);
        let s1 = Strategy::new(Odd, 2);
        assert_eq!(play_winner(&g, &s0, &s1, 0), Even);
    }

    #[test]
    fn immediate_self_loop_is_decided_by_its_own_color() {
        let g = game(vec![Odd], vec![vec![0]], vec![3]);
        let s0 = Strategy::new(Even, 1);
        let mut s1 = Strategy::new(Odd, 1);
        s1.set_choice(0, 0);
        assert_eq!(play_winner(&g, &s0, &s1, 0), Odd);
    }

    #[test]
    fn cycle_winner_is_max_color_on_cycle_only() {
        // v0 (color 9) -> v1 (color 1) -> v2 (color 2) -> v1: cycle {v1,v2}
        // has max color 2 even though the prefix saw 9.
        let g = game(
            vec![Even, Even, Even],
            vec![vec![1], vec![2], vec![1]],
            vec![9, 1, 2],
        );
        let mut s0 = Strategy::new(Even, 3);
        s0.set_choice(0, 1);
        s0.set_choice(1, 2);
        s0.set_choice(2, 1);
        let s1 = Strategy::new(Odd, 3);
        assert_eq!(play_winner(&g, &s0, &s1, 0), Even);
    }

    #[test]
    #[should_panic(expected = "undefined at vertex")]
    fn undefined_choice_on_the_play_panics() {
        let g = game(vec![Even], vec![vec![0]], vec![0]);
        let s0 = Strategy::new(Even, 1);
        let s1 = Strategy::new(Odd, 1);
        play_winner(&g, &s0, &s1, 0);
    }

    #[test]
    fn brute_force_solves_the_two_loop_game() {
        let g = game(vec![Even, Odd], vec![vec![0], vec![1]], vec![2, 3]);
        let regions = solve_brute_force(&g).unwrap();
        assert_eq!(regions.w0.iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(regions.w1.iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn brute_force_finds_the_escape_move() {
        let g = game(vec![Even, Odd], vec![vec![0, 1], vec![1]], vec![1, 2]);
        let regions = solve_brute_force(&g).unwrap();
        assert_eq!(regions.w0.iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn oversized_games_are_refused() {
        // 24 vertices with 2 successors each: 2^24 pairs > the limit.
        let n = 24;
        let owners = vec![Even; n];
        let succs = (0..n).map(|v| vec![v, (v + 1) % n]).collect();
        let g = game(owners, succs, vec![0; n]);
        match solve_brute_force(&g) {
            Err(SolveError::TooManyStrategyPairs { pairs, .. }) => {
                assert_eq!(pairs, 1 << 24);
            }
            other => panic!("expected TooManyStrategyPairs, got {other:?}"),
        }
    }
}
