//! Finite-difference gradient checking.
//!
//! The one tool that validates the entire autodiff stack against something
//! it does not share code with: central differences
//! `(f(θ+h) − f(θ−h)) / 2h` probed coordinate by coordinate.

use crate::matrix::Matrix;
use crate::rng::SplitMix64;

/// Configuration for [`grad_check`].
#[derive(Clone, Copy, Debug)]
pub struct GradCheckConfig {
    /// Central-difference step `h`.
    pub step: f64,
    /// Coordinates sampled per parameter group (all coordinates are checked
    /// when a group is smaller than this).
    pub samples_per_group: usize,
    /// Seed for choosing which coordinates to probe.
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> GradCheckConfig {
        GradCheckConfig {
            step: 1e-5,
            samples_per_group: 50,
            seed: 0x5eed,
        }
    }
}

/// Result for one parameter group.
#[derive(Clone, Debug)]
pub struct GroupReport {
    pub name: String,
    pub coordinates_checked: usize,
    pub max_relative_error: f64,
    /// The coordinate attaining the maximum, as (row, col, analytic, numeric).
    pub worst: Option<(usize, usize, f64, f64)>,
}

/// Result of a full gradient check.
#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub groups: Vec<GroupReport>,
}

impl GradCheckReport {
    /// The largest relative error over all groups.
    pub fn max_relative_error(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| g.max_relative_error)
            .fold(0.0, f64::max)
    }
}

/// Relative disagreement between an analytic and a numeric derivative:
/// `|a − n| / max(|a|, |n|)`, with agreement declared outright when both
/// are tiny (below `1e-10`) since the ratio is meaningless at that scale.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    if analytic.abs() < 1e-10 && numeric.abs() < 1e-10 {
        return 0.0;
    }
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs())
}

/// Verifies `analytic` gradients of `loss_fn` at `params` by central
/// finite differences.
///
/// `loss_fn` is re-evaluated with single coordinates perturbed by `±step`;
/// it must be a pure function of the parameter values (any internal
/// randomness must be frozen). `names`, `params` and `analytic` are
/// parallel slices; panics if their lengths or shapes disagree, since that
/// is a harness bug rather than a data condition.
pub fn grad_check(
    mut loss_fn: impl FnMut(&[Matrix]) -> f64,
    names: &[&str],
    params: &[Matrix],
    analytic: &[Matrix],
    config: &GradCheckConfig,
) -> GradCheckReport {
    assert_eq!(params.len(), analytic.len(), "one gradient per group");
    assert_eq!(params.len(), names.len(), "one name per group");
    let mut work: Vec<Matrix> = params.to_vec();
    let mut rng = SplitMix64::new(config.seed);
    let mut groups = Vec::with_capacity(params.len());

    for g in 0..params.len() {
        assert_eq!(
            params[g].shape(),
            analytic[g].shape(),
            "gradient shape mismatch in group {}",
            names[g]
        );
        let (rows, cols) = params[g].shape();
        let total = rows * cols;
        let coordinates: Vec<usize> = if total <= config.samples_per_group {
            (0..total).collect()
        } else {
            // Sample distinct coordinates by partial Fisher-Yates.
            let mut pool: Vec<usize> = (0..total).collect();
            for i in 0..config.samples_per_group {
                let j = i + rng.below((total - i) as u64) as usize;
                pool.swap(i, j);
            }
            pool.truncate(config.samples_per_group);
            pool
        };

        let mut report = GroupReport {
            name: names[g].to_string(),
            coordinates_checked: coordinates.len(),
            max_relative_error: 0.0,
            worst: None,
        };
        for flat in coordinates {
            let (r, c) = (flat / cols, flat % cols);
            let original = work[g].get(r, c);

            work[g].set(r, c, original + config.step);
            let plus = loss_fn(&work);
            work[g].set(r, c, original - config.step);
            let minus = loss_fn(&work);
            work[g].set(r, c, original);

            let numeric = (plus - minus) / (2.0 * config.step);
            let a = analytic[g].get(r, c);
            let err = relative_error(a, numeric);
            if err >= report.max_relative_error {
                report.max_relative_error = err;
                report.worst = Some((r, c, a, numeric));
            }
        }
        groups.push(report);
    }
    GradCheckReport { groups }
}
