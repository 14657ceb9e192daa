//! Per-component score permutations that reconcile weight ranking with
//! elastic-distance ranking.
//!
//! For one archetype `u`, the reconciliation scatters the sorted weights of
//! `W` column `u` against the sample order of decreasing elastic distance:
//! the sample farthest from archetype `u` receives the smallest weight on
//! `u`, the closest sample the largest. A sweep applies this to every
//! component in ascending order, recomputing distances after each column
//! (permuting one column moves the rows, so every other component's
//! distances shift too). Sweeps repeat until a full pass changes nothing or
//! a cap is reached — the per-component permutations can cycle, so the cap
//! is the termination guarantee.
//!
//! Packaged as a solver hook, the stabilized permutation runs after every
//! outer iteration and indirectly drives down the volume of the score
//! matrix.

use crate::elastic::elastic_distances;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::ScalingScheme;
use crate::solver::{self, FitReport, SolverConfig};

/// Controls the stabilization loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermuteConfig {
    /// Upper bound on full sweeps per stabilization.
    pub max_sweeps: usize,
    /// Apply the stabilized permutation after every solver iteration (the
    /// default). When false, it runs once on the fitted model instead.
    pub applied_per_solver_iteration: bool,
}

impl Default for PermuteConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 50,
            applied_per_solver_iteration: true,
        }
    }
}

/// Result of [`stabilize`].
#[derive(Debug, Clone)]
pub struct StabilizedScores {
    pub w: DenseMatrix,
    /// Sweeps executed, including the final no-change sweep when stable.
    pub sweeps_run: usize,
    /// True iff a full sweep left every entry in place.
    pub stabilized: bool,
}

/// Scatters the sorted `weights` against the descending order of
/// `distances`: the position with the r-th largest distance receives the
/// r-th smallest weight. Equal distances keep their existing weight
/// arrangement, so a column that is already weakly anti-aligned (strictly
/// larger distance never paired with a strictly larger weight) comes back
/// unchanged. The output is always a permutation of the input.
pub fn reconcile_column(weights: &[f64], distances: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != distances.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights vs {} distances",
            weights.len(),
            distances.len()
        )));
    }
    let n = weights.len();

    let mut ascending = weights.to_vec();
    ascending.sort_by(|a, b| a.partial_cmp(b).expect("weights are finite"));

    // Positions ordered by distance descending; ties ordered by the weight
    // they currently hold (ascending, then original index). The tie rule is
    // what makes tied-distance groups fixed points instead of getting an
    // arbitrary re-sort.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        distances[b]
            .partial_cmp(&distances[a])
            .expect("distances are finite")
            .then(weights[a].partial_cmp(&weights[b]).expect("weights are finite"))
            .then(a.cmp(&b))
    });

    let mut out = vec![0.0; n];
    for (r, &pos) in order.iter().enumerate() {
        out[pos] = ascending[r];
    }
    Ok(out)
}

/// Reconciles column `u` of `w` against the elastic distances to archetype
/// `u`, leaving every other column untouched.
pub fn permute_component(w: &DenseMatrix, u: usize) -> Result<DenseMatrix> {
    if u >= w.cols() {
        return Err(Error::InvalidArgument(format!(
            "archetype index {u} out of range for {} components",
            w.cols()
        )));
    }
    let distances = elastic_distances(w);
    let col: Vec<f64> = w.column(u).to_vec();
    let dist: Vec<f64> = (0..w.rows()).map(|i| distances.get(i, u)).collect();
    let new_col = reconcile_column(&col, &dist)?;

    let mut array = w.as_array().clone();
    for (i, v) in new_col.into_iter().enumerate() {
        array[(i, u)] = v;
    }
    Ok(DenseMatrix::from_array_unchecked(array))
}

/// One pass over all components in ascending order. Distances are implicitly
/// recomputed for each component because every [`permute_component`] call
/// starts from the current matrix.
pub fn permutation_sweep(w: &DenseMatrix) -> (DenseMatrix, bool) {
    let mut current = w.clone();
    let mut changed = false;
    for u in 0..w.cols() {
        let next = permute_component(&current, u).expect("component index in range");
        if !changed && next != current {
            changed = true;
        }
        current = next;
    }
    (current, changed)
}

/// Repeats sweeps until one changes nothing or `max_sweeps` is reached.
pub fn stabilize(w: &DenseMatrix, config: &PermuteConfig) -> StabilizedScores {
    let max_sweeps = config.max_sweeps.max(1);
    let mut current = w.clone();
    let mut sweeps_run = 0;
    let mut stabilized = false;
    while sweeps_run < max_sweeps {
        let (next, changed) = permutation_sweep(&current);
        sweeps_run += 1;
        current = next;
        if !changed {
            stabilized = true;
            break;
        }
    }
    StabilizedScores {
        w: current,
        sweeps_run,
        stabilized,
    }
}

/// Fits `x` with the baseline solver while stabilizing the score matrix
/// after each outer iteration (or once after the fit, per the config). Only
/// `W` is permuted; `H` and the data are never reordered.
pub fn permuted_fit(
    x: &DenseMatrix,
    rank: usize,
    solver_config: &SolverConfig,
    permute_config: &PermuteConfig,
) -> Result<FitReport> {
    if permute_config.applied_per_solver_iteration {
        solver::fit_with_hook(x, rank, solver_config, |model| {
            let outcome = stabilize(model.w(), permute_config);
            model
                .replace_w(outcome.w)
                .expect("stabilize preserves the matrix shape");
        })
    } else {
        let mut report = solver::fit(x, rank, solver_config)?;
        let outcome = stabilize(report.model.w(), permute_config);
        report
            .model
            .replace_w(outcome.w)
            .expect("stabilize preserves the matrix shape");
        report.model = report.model.rescale(ScalingScheme::MaxWeight);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn reconcile_hand_trace() {
        // Weights [0.2, 0.5, 0.1] against distances [3, 1, 2]: the sorted
        // weights [0.1, 0.2, 0.5] land on positions [0, 2, 1].
        let out = reconcile_column(&[0.2, 0.5, 0.1], &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(out, vec![0.1, 0.5, 0.2]);
    }

    #[test]
    fn reconcile_rejects_length_mismatch() {
        assert!(reconcile_column(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn anti_sorted_column_is_a_fixed_point() {
        let out = reconcile_column(&[0.1, 0.5, 0.2], &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(out, vec![0.1, 0.5, 0.2]);
    }

    #[test]
    fn equal_distances_leave_column_unchanged() {
        let out = reconcile_column(&[0.5, 0.2, 0.5, 0.1], &[1.0; 4]).unwrap();
        assert_eq!(out, vec![0.5, 0.2, 0.5, 0.1]);
    }

    #[test]
    fn permute_component_reproduces_hand_trace_ordering() {
        // Column 0 holds [0.2, 0.5, 0.1]; the second column is chosen so the
        // elastic distances to archetype 0 rank the samples as [3, 1, 2].
        let m = w(&[vec![0.2, 0.9], vec![0.5, 0.1], vec![0.1, 0.5]]);
        let d = elastic_distances(&m);
        assert!(d.get(0, 0) > d.get(2, 0) && d.get(2, 0) > d.get(1, 0));
        let out = permute_component(&m, 0).unwrap();
        assert_eq!(out.column(0).to_vec(), vec![0.1, 0.5, 0.2]);
        assert_eq!(out.column(1).to_vec(), m.column(1).to_vec()); // untouched
    }

    #[test]
    fn permute_component_rejects_out_of_range_index() {
        let m = w(&[vec![0.2, 0.9], vec![0.5, 0.1]]);
        assert!(permute_component(&m, 2).is_err());
    }

    #[test]
    fn identical_rows_are_a_sweep_fixed_point() {
        let m = w(&[vec![0.3, 0.7], vec![0.3, 0.7], vec![0.3, 0.7]]);
        let (out, changed) = permutation_sweep(&m);
        assert!(!changed);
        assert_eq!(out, m);
    }

    #[test]
    fn corner_configuration_is_a_sweep_fixed_point() {
        let m = w(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let (out, changed) = permutation_sweep(&m);
        assert!(!changed);
        assert_eq!(out, m);
    }

    #[test]
    fn single_component_columns_never_move() {
        // For k = 1 the distance ranking is exactly the reversed weight
        // ranking, so every column is already reconciled.
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..100 {
            let n = rng.gen_range(1..20);
            let col: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..1.0)]).collect();
            let m = w(&col);
            let (out, changed) = permutation_sweep(&m);
            assert!(!changed);
            assert_eq!(out, m);
            let (_, changed_again) = permutation_sweep(&out);
            assert!(!changed_again);
        }
    }

    #[test]
    fn stabilize_reports_immediate_stability() {
        let m = w(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let outcome = stabilize(&m, &PermuteConfig::default());
        assert_eq!(outcome.sweeps_run, 1);
        assert!(outcome.stabilized);
        assert_eq!(outcome.w, m);
    }

    #[test]
    fn sweep_cap_is_respected_on_unstable_input() {
        // Column 0 pairs the larger distance with the larger weight, so the
        // first sweep must move entries.
        let m = w(&[vec![0.9, 0.85], vec![0.3, 0.1]]);
        let (_, changed) = permutation_sweep(&m);
        assert!(changed);
        let outcome = stabilize(
            &m,
            &PermuteConfig {
                max_sweeps: 1,
                ..PermuteConfig::default()
            },
        );
        assert_eq!(outcome.sweeps_run, 1);
        assert!(!outcome.stabilized);
    }

    #[test]
    fn stabilize_preserves_column_multisets() {
        // Property over 100 seeded random matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..100 {
            let n = rng.gen_range(2..20);
            let k = rng.gen_range(1..5);
            let m = DenseMatrix::from_shape_vec(
                n,
                k,
                (0..n * k).map(|_| rng.gen_range(0.0..1.0)).collect(),
            )
            .unwrap();
            let outcome = stabilize(&m, &PermuteConfig::default());
            for u in 0..k {
                assert_eq!(
                    sorted(outcome.w.column(u).to_vec()),
                    sorted(m.column(u).to_vec()),
                    "trial {trial}, column {u}"
                );
            }
        }
    }

    #[test]
    fn stabilized_columns_are_anti_aligned_with_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let mut stabilized_seen = 0;
        for _ in 0..50 {
            let n = rng.gen_range(2..15);
            let k = rng.gen_range(1..4);
            let m = DenseMatrix::from_shape_vec(
                n,
                k,
                (0..n * k).map(|_| rng.gen_range(0.0..1.0)).collect(),
            )
            .unwrap();
            let outcome = stabilize(&m, &PermuteConfig::default());
            if !outcome.stabilized {
                continue;
            }
            stabilized_seen += 1;
            let d = elastic_distances(&outcome.w);
            for u in 0..k {
                for i in 0..n {
                    for j in 0..n {
                        if d.get(i, u) > d.get(j, u) {
                            assert!(
                                outcome.w.get(i, u) <= outcome.w.get(j, u),
                                "strictly farther sample holds a larger weight"
                            );
                        }
                    }
                }
            }
        }
        assert!(stabilized_seen > 0, "no random case stabilized within the cap");
    }

    #[test]
    fn permuted_fit_rank_one_is_anti_aligned() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let x = DenseMatrix::from_shape_vec(
            8,
            5,
            (0..40).map(|_| rng.gen_range(0.1..1.0)).collect(),
        )
        .unwrap();
        let report = permuted_fit(
            &x,
            1,
            &SolverConfig::default(),
            &PermuteConfig::default(),
        )
        .unwrap();
        let w = report.model.w();
        let d = elastic_distances(w);
        for i in 0..w.rows() {
            for j in 0..w.rows() {
                if d.get(i, 0) > d.get(j, 0) {
                    assert!(w.get(i, 0) <= w.get(j, 0));
                }
            }
        }
    }

    #[test]
    fn hooked_and_plain_fits_both_produce_valid_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let x = DenseMatrix::from_shape_vec(
            10,
            6,
            (0..60).map(|_| rng.gen_range(0.1..1.0)).collect(),
        )
        .unwrap();
        let config = SolverConfig {
            max_outer_iterations: 60,
            ..SolverConfig::default()
        };
        let plain = solver::fit(&x, 2, &config).unwrap();
        let permuted = permuted_fit(&x, 2, &config, &PermuteConfig::default()).unwrap();
        for report in [&plain, &permuted] {
            assert_eq!(report.error_trace.len(), report.iterations_run);
            assert!(report.model.w().as_array().iter().all(|v| *v >= 0.0));
            assert!(report.model.h().as_array().iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn post_fit_stabilization_mode_runs_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let x = DenseMatrix::from_shape_vec(
            9,
            5,
            (0..45).map(|_| rng.gen_range(0.1..1.0)).collect(),
        )
        .unwrap();
        let config = PermuteConfig {
            applied_per_solver_iteration: false,
            ..PermuteConfig::default()
        };
        let report = permuted_fit(&x, 2, &SolverConfig::default(), &config).unwrap();
        assert_eq!(report.model.scaling(), ScalingScheme::MaxWeight);
        // Column multisets of the fitted W are preserved by the final
        // stabilization, so every weight is still in [0, max].
        assert!(report.model.w().as_array().iter().all(|v| *v >= 0.0));
    }
}
