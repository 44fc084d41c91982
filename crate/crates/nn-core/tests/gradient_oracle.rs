//! Every backward rule on the tape, validated against central finite
//! differences — an oracle that shares no code with the tape.
//!
//! Each test builds a scalar loss from one or more ops, reads the analytic
//! gradients, and re-evaluates the same computation as a pure function of
//! perturbed parameters. Relative errors must stay below 1e-4 near the
//! finite-difference optimum (most land far below).

use std::rc::Rc;

use nn_core::sparse::{SparseMatrix, SparsePattern};
use nn_core::{GradCheckConfig, Matrix, SplitMix64, Tape, ValueId, grad_check, relative_error};

const TOLERANCE: f64 = 1e-4;

/// Random matrix with entries in (-1, 1), offset away from zero where relu
/// kinks would poison finite differences.
fn random_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let v = rng.uniform(-1.0, 1.0);
        // Keep values off the relu kink: h=1e-5 probes x±h, so |x| > 1e-3
        // guarantees no sign change during probing.
        if v.abs() < 1e-3 { v + 2e-3 } else { v }
    })
}

/// Random row-stochastic-ish target: one-hot rows.
fn one_hot_rows(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    let mut t = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let hot = rng.below(cols as u64) as usize;
        t.set(r, hot, 1.0);
    }
    t
}

/// Runs grad_check against a tape-building closure: `build` receives the
/// tape plus the parameter values and returns the loss id.
fn check(
    names: &[&str],
    params: &[Matrix],
    build: impl Fn(&mut Tape, &[Matrix]) -> ValueId,
) -> f64 {
    // Analytic gradients at the base point. Builders register parameters
    // in the same order as `params`, so param_ids lines up with it.
    let mut tape = Tape::new();
    let loss = build(&mut tape, params);
    let grads = tape.backward(loss).unwrap();
    let analytic: Vec<Matrix> = tape
        .param_ids()
        .map(|id| grads.param_grad(&tape, id).unwrap())
        .collect();
    assert_eq!(
        analytic.len(),
        params.len(),
        "builder must register every parameter"
    );

    let report = grad_check(
        |values| {
            let mut t = Tape::new();
            let l = build(&mut t, values);
            t.value(l).get(0, 0)
        },
        names,
        params,
        &analytic,
        &GradCheckConfig::default(),
    );
    let worst = report.max_relative_error();
    assert!(worst < TOLERANCE, "gradient check failed: {report:?}");
    worst
}

#[test]
fn linear_relu_softmax_cross_entropy_chain() {
    let mut rng = SplitMix64::new(101);
    let x = random_matrix(5, 4, &mut rng);
    let w1 = random_matrix(6, 4, &mut rng);
    let b1 = random_matrix(1, 6, &mut rng);
    let w2 = random_matrix(3, 6, &mut rng);
    let b2 = random_matrix(1, 3, &mut rng);
    let target = one_hot_rows(5, 3, &mut rng);

    check(
        &["x", "w1", "b1", "w2", "b2"],
        &[x, w1, b1, w2, b2],
        move |tape, p| {
            let x = tape.param(p[0].clone());
            let w1 = tape.param(p[1].clone());
            let b1 = tape.param(p[2].clone());
            let w2 = tape.param(p[3].clone());
            let b2 = tape.param(p[4].clone());
            let h = tape.linear(x, w1, b1).unwrap();
            let h = tape.relu(h);
            let logits = tape.linear(h, w2, b2).unwrap();
            let probs = tape.softmax_rows(logits);
            tape.cross_entropy(probs, target.clone()).unwrap()
        },
    );
}

#[test]
fn leaky_relu_and_no_bias_linear() {
    let mut rng = SplitMix64::new(202);
    let x = random_matrix(4, 3, &mut rng);
    let w = random_matrix(2, 3, &mut rng);
    let target = one_hot_rows(4, 2, &mut rng);

    check(&["x", "w"], &[x, w], move |tape, p| {
        let x = tape.param(p[0].clone());
        let w = tape.param(p[1].clone());
        let h = tape.linear_no_bias(x, w).unwrap();
        let h = tape.leaky_relu(h, 0.2);
        let probs = tape.softmax_rows(h);
        tape.cross_entropy(probs, target.clone()).unwrap()
    });
}

#[test]
fn sparse_aggregation_backward() {
    let mut rng = SplitMix64::new(303);
    // A 4-node graph aggregation: S is 4×4 with normalization-style weights.
    let s = Rc::new(SparseMatrix::from_row_entries(
        4,
        &[
            vec![(0, 0.5), (1, 0.5)],
            vec![(1, 1.0)],
            vec![(0, 0.3), (2, 0.3), (3, 0.3)],
            vec![(3, 0.7), (0, 0.7)],
        ],
    ));
    let x = random_matrix(4, 5, &mut rng);
    let w = random_matrix(2, 5, &mut rng);
    let target = one_hot_rows(4, 2, &mut rng);

    check(&["x", "w"], &[x, w], move |tape, p| {
        let x = tape.param(p[0].clone());
        let w = tape.param(p[1].clone());
        let agg = tape.spmm(Rc::clone(&s), x).unwrap();
        let h = tape.linear_no_bias(agg, w).unwrap();
        let probs = tape.softmax_rows(h);
        tape.cross_entropy(probs, target.clone()).unwrap()
    });
}

#[test]
fn attention_style_segment_pipeline() {
    // The full attention computation: per-node scores, per-edge sums,
    // leaky relu, segment softmax, weighted aggregation.
    let mut rng = SplitMix64::new(404);
    let pattern = Rc::new(SparsePattern::from_segments(
        4,
        &[vec![0, 1, 2], vec![1], vec![2, 3], vec![0, 3]],
    ));
    let h = random_matrix(4, 3, &mut rng);
    let a_src = random_matrix(1, 3, &mut rng);
    let a_dst = random_matrix(1, 3, &mut rng);
    let w = random_matrix(2, 3, &mut rng);
    let target = one_hot_rows(4, 2, &mut rng);

    check(
        &["h", "a_src", "a_dst", "w"],
        &[h, a_src, a_dst, w],
        move |tape, p| {
            let h = tape.param(p[0].clone());
            let a_src = tape.param(p[1].clone());
            let a_dst = tape.param(p[2].clone());
            let w = tape.param(p[3].clone());
            let s = tape.linear_no_bias(h, a_src).unwrap();
            let t = tape.linear_no_bias(h, a_dst).unwrap();
            let z = tape.gather_add_pairs(s, t, Rc::clone(&pattern)).unwrap();
            let e = tape.leaky_relu(z, 0.2);
            let alpha = tape.segment_softmax(e, Rc::clone(&pattern)).unwrap();
            let mixed = tape
                .weighted_gather_sum(alpha, h, Rc::clone(&pattern))
                .unwrap();
            let logits = tape.linear_no_bias(mixed, w).unwrap();
            let probs = tape.softmax_rows(logits);
            tape.cross_entropy(probs, target.clone()).unwrap()
        },
    );
}

#[test]
fn slice_cols_backward() {
    // Splits a 1×6 vector into two 1×3 halves used as separate score
    // weights; the gradient must scatter back into the right columns.
    let mut rng = SplitMix64::new(505);
    let a = random_matrix(1, 6, &mut rng);
    let h = random_matrix(3, 3, &mut rng);
    let target = one_hot_rows(1, 3, &mut rng);

    check(&["a", "h"], &[a, h], move |tape, p| {
        let a = tape.param(p[0].clone());
        let h = tape.param(p[1].clone());
        let left = tape.slice_cols(a, 0, 3).unwrap();
        let right = tape.slice_cols(a, 3, 3).unwrap();
        let s = tape.linear_no_bias(h, left).unwrap();
        let t = tape.linear_no_bias(h, right).unwrap();
        let per_node = Rc::new(SparsePattern::from_segments(
            3,
            &[vec![0], vec![1], vec![2]],
        ));
        let z = tape.gather_add_pairs(s, t, per_node).unwrap();
        let e = tape.leaky_relu(z, 0.2);
        // Mix the rows of h with the per-node scores into a single row.
        let all_nodes = Rc::new(SparsePattern::from_segments(3, &[vec![0, 1, 2]]));
        let mixed = tape.weighted_gather_sum(e, h, all_nodes).unwrap();
        let probs = tape.softmax_rows(mixed);
        tape.cross_entropy(probs, target.clone()).unwrap()
    });
}

#[test]
fn dropout_backward_with_frozen_mask() {
    // Dropout draws from an RNG; freezing the seed makes the loss a pure
    // function of the parameters, so finite differences remain valid.
    let mut rng = SplitMix64::new(606);
    let x = random_matrix(4, 8, &mut rng);
    let w = random_matrix(2, 8, &mut rng);
    let target = one_hot_rows(4, 2, &mut rng);

    check(&["x", "w"], &[x, w], move |tape, p| {
        let x = tape.param(p[0].clone());
        let w = tape.param(p[1].clone());
        let mut dropout_rng = SplitMix64::new(777);
        let dropped = tape.dropout(x, 0.5, &mut dropout_rng).unwrap();
        let h = tape.linear_no_bias(dropped, w).unwrap();
        let probs = tape.softmax_rows(h);
        tape.cross_entropy(probs, target.clone()).unwrap()
    });
}

#[test]
fn relative_error_tolerance_is_meaningful() {
    // Sanity-check the oracle itself: a deliberately corrupted gradient
    // must push the relative error far above the tolerance.
    assert!(relative_error(1.0, 1.0001) < TOLERANCE);
    assert!(relative_error(1.0, 1.1) > TOLERANCE);
}
