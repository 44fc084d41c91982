//! Property tests: serialization is lossless and byte-stable for arbitrary
//! games, and solved games survive the full dataset pipeline.

use parity_core::{Arena, ParityGame, Player, solve_zielonka_with_strategies};
use pg_io::{SolutionData, parse_game, parse_solution, serialize_game, serialize_solution};
use proptest::collection::{btree_set, vec as pvec};
use proptest::prelude::*;

/// Arbitrary total parity games: every vertex gets at least one successor.
fn arb_game(max_vertices: usize) -> impl Strategy<Value = ParityGame> {
    (1..=max_vertices).prop_flat_map(|n| {
        let owners = pvec(prop_oneof![Just(Player::Even), Just(Player::Odd)], n);
        let colors = pvec(0u32..10, n);
        let successors = pvec(btree_set(0..n, 1..=n.min(4)), n);
        (owners, colors, successors).prop_map(|(owners, colors, successors)| {
            let successors = successors
                .into_iter()
                .map(|set| set.into_iter().collect())
                .collect();
            ParityGame::new(Arena::new(owners, successors), colors)
        })
    })
}

proptest! {
    #[test]
    fn game_serialization_round_trips(game in arb_game(25)) {
        let text = serialize_game(&game);
        let parsed = parse_game(&text).expect("canonical output must parse");
        prop_assert_eq!(&parsed, &game);
        prop_assert_eq!(serialize_game(&parsed), text);
    }

    #[test]
    fn solution_serialization_round_trips(game in arb_game(15)) {
        let (regions, strategies) = solve_zielonka_with_strategies(&game).unwrap();
        let solution = SolutionData::from_solution(&game, &regions, &strategies);
        solution.check_against(&game).unwrap();

        let text = serialize_solution(&solution);
        let parsed = parse_solution(&text).expect("canonical output must parse");
        prop_assert_eq!(&parsed, &solution);
        prop_assert_eq!(serialize_solution(&parsed), text);

        // The reconstructed regions match the solver's answer.
        let regions_back = parsed.regions();
        for v in game.arena().vertices() {
            prop_assert_eq!(regions_back.winner_of(v), regions.winner_of(v));
        }
    }

    #[test]
    fn shuffled_vertex_order_parses_to_the_same_game_modulo_renaming(
        game in arb_game(12),
        seed in any::<u64>(),
    ) {
        // Emit vertex lines in a shuffled order with sparse identifiers
        // (id * 3 + 1) and check the parser compacts back to an isomorphic
        // game: file order defines the new numbering.
        let n = game.arena().vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        // Cheap deterministic shuffle driven by the seed.
        for i in (1..n).rev() {
            let j = ((seed.rotate_left(i as u32)) % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        let sparse = |v: usize| v * 3 + 1;
        let mut text = format!("parity {};\n", sparse(n - 1));
        for &v in &order {
            let succs: Vec<String> = game
                .arena()
                .successors(v)
                .iter()
                .map(|&s| sparse(s).to_string())
                .collect();
            text.push_str(&format!(
                "{} {} {} {};\n",
                sparse(v),
                game.color(v),
                game.arena().owner(v).index(),
                succs.join(",")
            ));
        }
        let parsed = parse_game(&text).expect("shuffled text must parse");

        // position of original vertex v in the file = its new identifier
        let mut new_id = vec![0usize; n];
        for (pos, &v) in order.iter().enumerate() {
            new_id[v] = pos;
        }
        prop_assert_eq!(parsed.arena().vertex_count(), n);
        for v in 0..n {
            let w = new_id[v];
            prop_assert_eq!(parsed.color(w), game.color(v));
            prop_assert_eq!(parsed.arena().owner(w), game.arena().owner(v));
            let mut expected: Vec<usize> = game
                .arena()
                .successors(v)
                .iter()
                .map(|&s| new_id[s])
                .collect();
            expected.sort_unstable();
            prop_assert_eq!(parsed.arena().successors(w), &expected[..]);
        }
    }
}

#[test]
fn dataset_pipeline_round_trips_on_solved_random_games() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;

    // Draw a fixed batch of arbitrary games deterministically.
    let mut runner = TestRunner::deterministic();
    let mut entries = Vec::new();
    for _ in 0..40 {
        let game = arb_game(20).new_tree(&mut runner).unwrap().current();
        let (regions, strategies) = solve_zielonka_with_strategies(&game).unwrap();
        let solution = SolutionData::from_solution(&game, &regions, &strategies);
        entries.push((game, solution));
    }

    let dir = tempfile::tempdir().unwrap();
    let meta = pg_io::DatasetMeta {
        seed: 99,
        min_vertices: 1,
        max_vertices: 20,
        split_fraction: 0.75,
    };
    let manifest = pg_io::save_dataset(dir.path(), meta, &entries).unwrap();
    assert_eq!(
        manifest
            .records
            .iter()
            .filter(|r| r.split == pg_io::Split::Train)
            .count(),
        30,
        "40 records at fraction 0.75 must give exactly 30 train records"
    );

    let loaded = pg_io::load_dataset(dir.path()).unwrap();
    assert_eq!(loaded.entries.len(), 40);
    for (entry, (game, solution)) in loaded.entries.iter().zip(&entries) {
        assert_eq!(&entry.game, game);
        assert_eq!(&entry.solution, solution);
    }
}
