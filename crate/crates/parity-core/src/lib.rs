//! Parity games and exact solvers.
//!
//! A parity game is played on a finite directed graph by two players, 0 and 1.
//! Every vertex belongs to exactly one player and carries a natural-number
//! color. A play is an infinite walk; the owner of the current vertex picks
//! the next one. Player 0 wins a play iff the maximum color occurring
//! infinitely often along it is even. Since every vertex has at least one
//! successor (totality), plays never get stuck.
//!
//! This crate provides:
//!
//! * [`ParityGame`] / [`Arena`] — the game representation, plus structural
//!   validation ([`Arena::validate`]).
//! * [`attractor`] — the classic least-fixpoint attractor construction.
//! * [`solve_zielonka`] — Zielonka's recursive algorithm, the production
//!   solver; [`solve_zielonka_with_strategies`] additionally extracts
//!   positional winning strategies.
//! * [`solve_brute_force`] — an independent, obviously-correct reference
//!   solver that enumerates positional strategy pairs. Exponential; guarded
//!   by [`MAX_STRATEGY_PAIRS`]. Exists to cross-check the production solver.
//!
//! Both solvers return a [`WinningRegions`] partition of the vertices. By
//! positional determinacy the partition is total: every vertex is won by
//! exactly one player, and positional strategies suffice.

mod attractor;
mod brute_force;
mod game;
mod strategy;
mod vertex_set;
mod zielonka;

pub use attractor::attractor;
pub use brute_force::{MAX_STRATEGY_PAIRS, play_winner, solve_brute_force};
pub use game::{Arena, ArenaViolation, ParityGame, Player, VertexId, WinningRegions};
pub use strategy::Strategy;
pub use vertex_set::VertexSet;
pub use zielonka::{SolveError, solve_zielonka, solve_zielonka_with_strategies};
