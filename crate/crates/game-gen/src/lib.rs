//! Seeded random parity game generation and dataset construction.
//!
//! Games are sampled by a fixed, documented procedure so that a `(seed,
//! params)` pair identifies one game forever, on every platform:
//!
//! 1. The vertex count `n` is drawn uniformly from
//!    `min_vertices..=max_vertices`.
//! 2. For each vertex in ascending order: its owner is drawn uniformly from
//!    the two players, its color uniformly from `1..=n`, its out-degree `d`
//!    uniformly from `max(1, n/100)..=max(lo, n/2)` (integer division; the
//!    lower clamp keeps arenas total, the upper clamp keeps the range
//!    non-empty for tiny `n`), and then `d` distinct successors are drawn
//!    uniformly without replacement. Self-loops are allowed.
//!
//! All randomness comes from one [`SplitMix64`] stream seeded with the game
//! seed; dataset generation derives an independent stream per game from a
//! master seed, so game `i` of a dataset is reproducible without generating
//! games `0..i` and records can be produced in parallel.

use std::path::Path;

use nn_core::SplitMix64;
use parity_core::{Arena, ParityGame, Player, solve_zielonka_with_strategies};
use pg_io::{DatasetError, DatasetManifest, DatasetMeta, SolutionData, save_dataset};
use rayon::prelude::*;

/// Bounds for the sampled vertex count. Degree, color and owner rules are
/// fixed functions of the drawn vertex count (see the crate documentation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
}

impl GeneratorParams {
    /// # Panics
    ///
    /// Panics unless `1 <= min_vertices <= max_vertices`.
    pub fn new(min_vertices: usize, max_vertices: usize) -> Self {
        assert!(min_vertices >= 1, "games need at least one vertex");
        assert!(
            min_vertices <= max_vertices,
            "vertex bounds are inverted: {min_vertices} > {max_vertices}"
        );
        GeneratorParams {
            min_vertices,
            max_vertices,
        }
    }
}

/// Inclusive out-degree bounds used for a game with `n` vertices.
pub fn degree_bounds(n: usize) -> (usize, usize) {
    let lo = (n / 100).max(1);
    let hi = (n / 2).max(lo);
    (lo, hi)
}

/// Draws `degree` distinct vertices from `0..n` uniformly without
/// replacement via a partial Fisher-Yates shuffle of `pool` (which must
/// contain `0..n` in any order and is left permuted).
fn draw_successors(rng: &mut SplitMix64, pool: &mut [usize], degree: usize) -> Vec<usize> {
    let n = pool.len();
    debug_assert!(degree <= n);
    for slot in 0..degree {
        let pick = slot + rng.below((n - slot) as u64) as usize;
        pool.swap(slot, pick);
    }
    pool[..degree].to_vec()
}

fn sample_game(rng: &mut SplitMix64, params: GeneratorParams) -> ParityGame {
    let n = rng.range_inclusive(params.min_vertices as u64, params.max_vertices as u64) as usize;
    let (lo, hi) = degree_bounds(n);
    sample_arena(rng, n, lo, hi)
}

fn sample_arena(rng: &mut SplitMix64, n: usize, lo: usize, hi: usize) -> ParityGame {
    let mut owners = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    let mut pool: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        owners.push(if rng.below(2) == 0 {
            Player::Even
        } else {
            Player::Odd
        });
        colors.push(rng.range_inclusive(1, n as u64) as u32);
        let degree = rng.range_inclusive(lo as u64, hi as u64) as usize;
        successors.push(draw_successors(rng, &mut pool, degree));
    }
    ParityGame::new(Arena::new(owners, successors), colors)
}

/// Generates one game from a seed. Pure: same `(params, seed)` twice gives
/// identical games.
pub fn generate_game(params: GeneratorParams, seed: u64) -> ParityGame {
    sample_game(&mut SplitMix64::new(seed), params)
}

/// Generates game `index` of the dataset stream rooted at `master_seed`.
/// Pure function of `(params, master_seed, index)`; different indices use
/// statistically independent streams.
pub fn generate_indexed_game(params: GeneratorParams, master_seed: u64, index: u64) -> ParityGame {
    sample_game(&mut SplitMix64::derive(master_seed, index), params)
}

/// Generates a game with exactly `vertex_count` vertices and out-degrees in
/// `degree_lo..=degree_hi`, overriding the default degree rule. Colors and
/// owners follow the usual rules. Useful for scaling experiments where edge
/// counts must grow proportionally with vertex counts.
///
/// # Panics
///
/// Panics unless `1 <= degree_lo <= degree_hi <= vertex_count`.
pub fn generate_game_with_degrees(
    vertex_count: usize,
    degree_lo: usize,
    degree_hi: usize,
    seed: u64,
) -> ParityGame {
    assert!(vertex_count >= 1, "games need at least one vertex");
    assert!(
        1 <= degree_lo && degree_lo <= degree_hi && degree_hi <= vertex_count,
        "degree bounds {degree_lo}..={degree_hi} are invalid for {vertex_count} vertices"
    );
    sample_arena(
        &mut SplitMix64::new(seed),
        vertex_count,
        degree_lo,
        degree_hi,
    )
}

/// Generates `count` games, solves each with the exact solver, and persists
/// games, solutions and the manifest into `root`. Generation and solving run
/// in parallel per record; output is deterministic in `(count, params,
/// master_seed, split_fraction)` — the same call produces byte-identical
/// directories every time.
///
/// # Panics
///
/// Panics if `count == 0` or `split_fraction` is outside `(0, 1)`.
pub fn generate_dataset(
    root: &Path,
    count: usize,
    params: GeneratorParams,
    master_seed: u64,
    split_fraction: f64,
) -> Result<DatasetManifest, DatasetError> {
    assert!(count >= 1, "datasets need at least one record");
    assert!(
        split_fraction > 0.0 && split_fraction < 1.0,
        "split fraction must lie strictly between 0 and 1, got {split_fraction}"
    );
    let entries: Vec<(ParityGame, SolutionData)> = (0..count as u64)
        .into_par_iter()
        .map(|index| {
            let game = generate_indexed_game(params, master_seed, index);
            let (regions, strategies) =
                solve_zielonka_with_strategies(&game).expect("generated games are always valid");
            let solution = SolutionData::from_solution(&game, &regions, &strategies);
            (game, solution)
        })
        .collect();
    let meta = DatasetMeta {
        seed: master_seed,
        min_vertices: params.min_vertices,
        max_vertices: params.max_vertices,
        split_fraction,
    };
    save_dataset(root, meta, &entries)
}
