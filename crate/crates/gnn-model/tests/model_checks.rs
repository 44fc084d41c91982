//! Whole-model validation: finite-difference gradient checks for both layer
//! families, permutation equivariance, message-locality, and a first
//! optimizer step that must reduce the loss.

use gnn_model::{
    AttributedGraph, ForwardMode, ModelConfig, ModelParams, Variant, encode_game, evaluation_loss,
    model_backward, model_forward, targets_from_regions,
};
use nn_core::{AdamParams, AdamState, GradCheckConfig, Matrix, SplitMix64, grad_check};
use parity_core::{Arena, ParityGame, Player, solve_zielonka};

fn toy_config(variant: Variant) -> ModelConfig {
    ModelConfig {
        variant,
        message_layers: 2,
        hidden_width: 8,
        head_hidden: 8,
        dropout: 0.0,
        attention_heads: 1,
        normalize_colors: false,
        inter_layer_relu: true,
    }
}

fn five_vertex_game() -> ParityGame {
    ParityGame::new(
        Arena::new(
            vec![
                Player::Even,
                Player::Odd,
                Player::Even,
                Player::Odd,
                Player::Even,
            ],
            vec![vec![1, 2], vec![2], vec![3, 4], vec![0], vec![1, 4]],
        ),
        vec![3, 1, 4, 2, 5],
    )
}

#[test]
fn gradients_match_finite_differences_on_both_variants() {
    for variant in [Variant::Gcn, Variant::Gat] {
        let config = toy_config(variant);
        let params = ModelParams::init(config, &mut SplitMix64::new(0xACE)).unwrap();
        let game = five_vertex_game();
        let graph = encode_game(&game);
        let targets = targets_from_regions(&solve_zielonka(&game).unwrap());

        // Analytic gradients from the tape (dropout is 0, so the unused rng
        // draws nothing and the loss is a pure function of the tensors).
        let (_, analytic) =
            model_backward(&graph, &params, &targets, &mut SplitMix64::new(0)).unwrap();

        let names = params.tensor_names();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let check = GradCheckConfig::default();
        let report = grad_check(
            |tensors| {
                let p = ModelParams::from_tensors(config, tensors.to_vec()).unwrap();
                evaluation_loss(&graph, &p, &targets).unwrap()
            },
            &name_refs,
            params.tensors(),
            &analytic,
            &check,
        );
        for group in &report.groups {
            assert!(
                group.max_relative_error < 1e-4,
                "{variant}/{}: relative error {} (worst {:?})",
                group.name,
                group.max_relative_error,
                group.worst
            );
        }
    }
}

#[test]
fn forward_is_equivariant_under_vertex_relabeling() {
    for variant in [Variant::Gcn, Variant::Gat] {
        let params = ModelParams::init(toy_config(variant), &mut SplitMix64::new(0xBEE)).unwrap();
        let game = five_vertex_game();
        let n = game.arena().vertex_count();

        // Deterministic permutation: rotate and swap.
        let perm: Vec<usize> = vec![2, 4, 0, 1, 3];
        let mut owners = vec![Player::Even; n];
        let mut colors = vec![0u32; n];
        let mut successors = vec![Vec::new(); n];
        for v in 0..n {
            owners[perm[v]] = game.arena().owner(v);
            colors[perm[v]] = game.color(v);
            successors[perm[v]] = game
                .arena()
                .successors(v)
                .iter()
                .map(|&u| perm[u])
                .collect();
        }
        let relabeled = ParityGame::new(Arena::new(owners, successors), colors);

        let out = model_forward(&encode_game(&game), &params, ForwardMode::Infer).unwrap();
        let out_perm =
            model_forward(&encode_game(&relabeled), &params, ForwardMode::Infer).unwrap();
        for (v, &image) in perm.iter().enumerate() {
            for c in 0..2 {
                let a = out.probabilities().get(v, c);
                let b = out_perm.probabilities().get(image, c);
                assert!(
                    (a - b).abs() < 1e-9,
                    "{variant}: vertex {v} prob {c} differs after relabeling: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn output_depends_only_on_vertices_within_layer_many_hops() {
    // Chain 0 → 1 → 2 → ... → 7 → 7. With 2 message layers, vertex 0's
    // output reads vertices at directed distance ≤ 2, i.e. {0, 1, 2}.
    let n = 8;
    let successors: Vec<Vec<usize>> = (0..n)
        .map(|v| if v + 1 < n { vec![v + 1] } else { vec![n - 1] })
        .collect();
    let mut rng = SplitMix64::new(77);
    let attrs = Matrix::from_fn(n, 3, |_, _| rng.uniform(-1.0, 1.0));

    for variant in [Variant::Gcn, Variant::Gat] {
        let params = ModelParams::init(toy_config(variant), &mut SplitMix64::new(0xC0DE)).unwrap();
        let base = AttributedGraph::new(attrs.clone(), successors.clone());
        let out = model_forward(&base, &params, ForwardMode::Infer).unwrap();

        // Perturbing vertex 3 (distance 3 from vertex 0) must leave vertex
        // 0's output bit-identical: its computation reads the same values
        // through the same operations.
        let mut far = attrs.clone();
        far.set(3, 0, far.get(3, 0) + 100.0);
        let out_far =
            model_forward(&base.with_attributes(far), &params, ForwardMode::Infer).unwrap();
        assert_eq!(
            out.probabilities().row(0),
            out_far.probabilities().row(0),
            "{variant}: a vertex beyond the receptive field changed the output"
        );

        // Sanity: perturbing vertex 2 (distance 2, inside the receptive
        // field) does reach vertex 0.
        let mut near = attrs.clone();
        near.set(2, 0, near.get(2, 0) + 100.0);
        let out_near =
            model_forward(&base.with_attributes(near), &params, ForwardMode::Infer).unwrap();
        assert_ne!(
            out.probabilities().row(0),
            out_near.probabilities().row(0),
            "{variant}: a vertex inside the receptive field should matter"
        );
    }
}

#[test]
fn one_optimizer_step_decreases_the_loss() {
    for variant in [Variant::Gcn, Variant::Gat] {
        let config = toy_config(variant);
        let mut params = ModelParams::init(config, &mut SplitMix64::new(0xF00D)).unwrap();
        let game = five_vertex_game();
        let graph = encode_game(&game);
        let targets = targets_from_regions(&solve_zielonka(&game).unwrap());

        let before = evaluation_loss(&graph, &params, &targets).unwrap();
        let (tape_loss, grads) =
            model_backward(&graph, &params, &targets, &mut SplitMix64::new(0)).unwrap();
        assert!((tape_loss - before).abs() < 1e-12);

        let mut adam = AdamState::new(AdamParams::default(), &params.shapes());
        adam.step(params.tensors_mut(), &grads).unwrap();
        let after = evaluation_loss(&graph, &params, &targets).unwrap();
        assert!(
            after < before,
            "{variant}: loss should drop after one step ({before} -> {after})"
        );
    }
}
