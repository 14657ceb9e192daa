//! Volume-based rank estimation.
//!
//! For a fitted rank-`k` model, build `Z` whose column `u` is the rank-one
//! part `w_u h_u^T` reshaped to a single n*p vector and normalized to unit
//! length. The volume of the factorization is `det(Z^T Z)`: 1 when the parts
//! are mutually orthogonal, 0 when any two are collinear. Scanning candidate
//! ranks, the volume stays high while every archetype captures distinct
//! structure and collapses as soon as the rank exceeds the true number of
//! archetypes — the scree's sharp drop marks the first over-fit rank.
//!
//! The Gram matrix is computed without materializing `Z`: the Frobenius
//! inner product of two rank-one parts factors into
//! `(w_u . w_v)(h_u . h_v)`.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::DenseMatrix;
use crate::model::FactorModel;
use crate::permute::{self, PermuteConfig};
use crate::solver::{self, SolverConfig};

/// Ratio below which a rank-to-rank volume drop flags over-fitting.
pub const DEFAULT_DROP_THRESHOLD: f64 = 0.1;

/// Determinants smaller than this are numerical zero.
const VOLUME_FLOOR: f64 = 1e-14;

/// Scan tuning knobs.
///
/// A single solver run at an over-fit rank lands in an arbitrary local
/// optimum: sometimes the redundant component duplicates an archetype
/// (volume collapses), sometimes it soaks up noise in a direction of its
/// own (volume stays high). The scree is about the *minimum achievable*
/// volume per rank, so each rank runs a small deterministic ensemble of
/// restarts and keeps the smallest volume among the fits whose residual is
/// within `error_slack` of the ensemble's best — the slack keeps volume
/// selection from favoring badly under-fitted models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Drop ratio below which a rank is flagged as over-fit.
    pub drop_threshold: f64,
    /// Restarts per rank; seeds derive deterministically from the solver
    /// config seed. 1 reproduces a plain single fit per rank.
    pub restarts: usize,
    /// Relative residual slack for volume eligibility.
    pub error_slack: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            drop_threshold: DEFAULT_DROP_THRESHOLD,
            restarts: 12,
            error_slack: 0.1,
        }
    }
}

/// Scree data for a range of candidate ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeReport {
    /// Candidate ranks, ascending.
    pub ranks: Vec<usize>,
    /// `det(Z^T Z)` of the model fitted at each rank.
    pub volumes: Vec<f64>,
    /// `volumes[i+1] / volumes[i]`; entry `i` belongs to `ranks[i+1]`.
    pub drop_ratios: Vec<f64>,
    /// Largest rank not yet flagged by a sub-threshold drop.
    pub suggested_rank: usize,
}

/// Volume `det(Z^T Z)` of the model's normalized rank-one parts, in [0, 1].
///
/// Errors with [`Error::DegenerateComponent`] when a rank-one part is
/// identically zero — a zero vector has no direction to compare.
pub fn component_volume(model: &FactorModel) -> Result<f64> {
    let k = model.rank();
    let w = model.w();
    let h = model.h();

    let w_norms: Vec<f64> = (0..k).map(|u| w.column_norm(u)).collect();
    let h_norms: Vec<f64> = (0..k)
        .map(|u| h.as_array().row(u).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for u in 0..k {
        if w_norms[u] * h_norms[u] <= 0.0 {
            return Err(Error::DegenerateComponent { index: u });
        }
    }

    // Gram matrix of the unit-normalized vectorized parts. The diagonal is 1
    // by construction; off-diagonals use the factored inner product.
    let mut gram = Array2::<f64>::eye(k);
    for u in 0..k {
        for v in u + 1..k {
            let ww = w.column(u).dot(&w.column(v));
            let hh = h.as_array().row(u).dot(&h.as_array().row(v));
            let c = (ww / (w_norms[u] * w_norms[v])) * (hh / (h_norms[u] * h_norms[v]));
            gram[(u, v)] = c;
            gram[(v, u)] = c;
        }
    }

    let det = linalg::determinant(&gram);
    if det < VOLUME_FLOOR {
        Ok(0.0)
    } else {
        Ok(det.min(1.0))
    }
}

/// Scans ranks in `[rank_min, rank_max]` with [`ScanOptions::default`] and
/// assembles the volume scree. Each rank uses the same seed policy, derived
/// from the solver config. Ranks where the selected fit degenerates to a
/// zero component record volume 0 and the scan continues.
pub fn scan(
    x: &DenseMatrix,
    rank_min: usize,
    rank_max: usize,
    solver_config: &SolverConfig,
    permute_config: Option<&PermuteConfig>,
) -> Result<VolumeReport> {
    scan_with_options(
        x,
        rank_min,
        rank_max,
        solver_config,
        permute_config,
        &ScanOptions::default(),
    )
}

/// [`scan`] with explicit tuning knobs.
pub fn scan_with_options(
    x: &DenseMatrix,
    rank_min: usize,
    rank_max: usize,
    solver_config: &SolverConfig,
    permute_config: Option<&PermuteConfig>,
    options: &ScanOptions,
) -> Result<VolumeReport> {
    let limit = x.rows().min(x.cols());
    if rank_min < 1 || rank_min > rank_max || rank_max > limit {
        return Err(Error::InvalidArgument(format!(
            "rank range [{rank_min}, {rank_max}] invalid for a {}x{} matrix (limit {limit})",
            x.rows(),
            x.cols()
        )));
    }
    if options.restarts < 1 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if options.error_slack < 0.0 {
        return Err(Error::InvalidArgument("error_slack must be non-negative".into()));
    }

    let ranks: Vec<usize> = (rank_min..=rank_max).collect();
    // Fits at distinct ranks (and restarts) are independent; results
    // assemble in rank order regardless of scheduling.
    let volumes: Vec<f64> = ranks
        .par_iter()
        .map(|&rank| rank_volume(x, rank, solver_config, permute_config, options))
        .collect::<Result<Vec<f64>>>()?;

    let drop_ratios: Vec<f64> = volumes
        .windows(2)
        .map(|pair| if pair[0] > 0.0 { pair[1] / pair[0] } else { 0.0 })
        .collect();

    let suggested_rank = match drop_ratios.iter().position(|r| *r < options.drop_threshold) {
        Some(i) => ranks[i + 1] - 1,
        None => rank_max,
    };

    Ok(VolumeReport {
        ranks,
        volumes,
        drop_ratios,
        suggested_rank,
    })
}

/// Minimum volume among the near-best fits of the restart ensemble at one
/// rank. A degenerate (zero) component counts as volume 0 when its fit is
/// residual-eligible: the extra component contributed nothing.
fn rank_volume(
    x: &DenseMatrix,
    rank: usize,
    solver_config: &SolverConfig,
    permute_config: Option<&PermuteConfig>,
    options: &ScanOptions,
) -> Result<f64> {
    let fits = (0..options.restarts)
        .into_par_iter()
        .map(|restart| -> Result<(f64, f64)> {
            let config = SolverConfig {
                seed: restart_seed(solver_config.seed, restart),
                ..*solver_config
            };
            let report = match permute_config {
                Some(pc) => permute::permuted_fit(x, rank, &config, pc)?,
                None => solver::fit(x, rank, &config)?,
            };
            let error = report.model.frobenius_error(x)?;
            let volume = match component_volume(&report.model) {
                Ok(v) => v,
                Err(Error::DegenerateComponent { .. }) => 0.0,
                Err(e) => return Err(e),
            };
            Ok((error, volume))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let best_error = fits.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
    let cutoff = best_error * (1.0 + options.error_slack);
    Ok(fits
        .iter()
        .filter(|f| f.0 <= cutoff)
        .map(|f| f.1)
        .fold(f64::INFINITY, f64::min))
}

fn restart_seed(base: u64, restart: usize) -> u64 {
    // Golden-ratio stride; restart 0 is the configured seed itself.
    base.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FactorModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model_from(w: &[Vec<f64>], h: &[Vec<f64>]) -> FactorModel {
        FactorModel::new(
            DenseMatrix::from_rows(w).unwrap(),
            DenseMatrix::from_rows(h).unwrap(),
        )
        .unwrap()
    }

    fn random_model(rng: &mut ChaCha8Rng, n: usize, k: usize, p: usize) -> FactorModel {
        let w = DenseMatrix::from_shape_vec(n, k, (0..n * k).map(|_| rng.gen_range(0.01..1.0)).collect()).unwrap();
        let h = DenseMatrix::from_shape_vec(k, p, (0..k * p).map(|_| rng.gen_range(0.01..1.0)).collect()).unwrap();
        FactorModel::new(w, h).unwrap()
    }

    /// Independent route: materialize Z explicitly, form the Gram matrix by
    /// direct dot products over all n*p entries, expand the determinant by
    /// cofactors.
    fn volume_oracle(model: &FactorModel) -> f64 {
        let (n, p, k) = (model.w().rows(), model.h().cols(), model.rank());
        let mut z = vec![vec![0.0; n * p]; k];
        for u in 0..k {
            for i in 0..n {
                for j in 0..p {
                    z[u][i * p + j] = model.w().get(i, u) * model.h().get(u, j);
                }
            }
            let norm = z[u].iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in z[u].iter_mut() {
                *v /= norm;
            }
        }
        let mut gram = Array2::zeros((k, k));
        for u in 0..k {
            for v in 0..k {
                gram[(u, v)] = z[u].iter().zip(&z[v]).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        cofactor_det(&gram)
    }

    fn cofactor_det(a: &Array2<f64>) -> f64 {
        let n = a.nrows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut det = 0.0;
        for j in 0..n {
            let mut minor = Array2::zeros((n - 1, n - 1));
            for i in 1..n {
                let mut c = 0;
                for col in 0..n {
                    if col != j {
                        minor[(i - 1, c)] = a[(i, col)];
                        c += 1;
                    }
                }
            }
            det += if j % 2 == 0 { 1.0 } else { -1.0 } * a[(0, j)] * cofactor_det(&minor);
        }
        det
    }

    #[test]
    fn single_component_volume_is_exactly_one() {
        let m = model_from(&[vec![0.3], vec![0.7]], &[vec![2.0, 1.0, 0.5]]);
        assert_eq!(component_volume(&m).unwrap(), 1.0);
    }

    #[test]
    fn duplicated_archetype_collapses_volume() {
        let m = model_from(
            &[vec![0.3, 0.3], vec![0.7, 0.7]],
            &[vec![2.0, 1.0], vec![2.0, 1.0]],
        );
        assert!(component_volume(&m).unwrap() < 1e-10);
    }

    #[test]
    fn two_component_volume_matches_closed_form_and_explicit_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..30 {
            let m = random_model(&mut rng, 6, 2, 5);
            let volume = component_volume(&m).unwrap();

            // Closed form for a 2x2 unit-diagonal Gram matrix: 1 - c^2.
            let w = m.w();
            let h = m.h();
            let ww = w.column(0).dot(&w.column(1)) / (w.column_norm(0) * w.column_norm(1));
            let h0 = h.as_array().row(0);
            let h1 = h.as_array().row(1);
            let hh = h0.dot(&h1)
                / (h0.dot(&h0).sqrt() * h1.dot(&h1).sqrt());
            let c = ww * hh;
            assert!((volume - (1.0 - c * c)).abs() < 1e-10);
            assert!((volume - volume_oracle(&m)).abs() < 1e-10);
        }
    }

    #[test]
    fn volume_matches_explicit_oracle_at_higher_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..20 {
            let m = random_model(&mut rng, 7, 3, 6);
            let volume = component_volume(&m).unwrap();
            let expected = volume_oracle(&m).clamp(0.0, 1.0);
            assert!((volume - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn volume_is_always_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..100 {
            let n = rng.gen_range(2..10);
            let p = rng.gen_range(2..10);
            let k = rng.gen_range(1..=n.min(p));
            let m = random_model(&mut rng, n, k, p);
            let v = component_volume(&m).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn zero_component_is_degenerate() {
        let m = model_from(
            &[vec![0.0, 0.3], vec![0.0, 0.7]],
            &[vec![2.0, 1.0], vec![1.0, 2.0]],
        );
        match component_volume(&m) {
            Err(Error::DegenerateComponent { index }) => assert_eq!(index, 0),
            other => panic!("expected degenerate component, got {other:?}"),
        }
    }

    #[test]
    fn trivial_scan_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let x = DenseMatrix::from_shape_vec(
            6,
            5,
            (0..30).map(|_| rng.gen_range(0.1..1.0)).collect(),
        )
        .unwrap();
        let report = scan(&x, 1, 1, &SolverConfig::default(), None).unwrap();
        assert_eq!(report.ranks, vec![1]);
        assert_eq!(report.volumes, vec![1.0]);
        assert!(report.drop_ratios.is_empty());
        assert_eq!(report.suggested_rank, 1);
    }

    #[test]
    fn invalid_rank_range_is_rejected() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let config = SolverConfig::default();
        assert!(scan(&x, 0, 1, &config, None).is_err());
        assert!(scan(&x, 2, 1, &config, None).is_err());
        assert!(scan(&x, 1, 3, &config, None).is_err());
    }

    #[test]
    fn invalid_options_are_rejected() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let config = SolverConfig::default();
        let bad_restarts = ScanOptions { restarts: 0, ..ScanOptions::default() };
        assert!(scan_with_options(&x, 1, 2, &config, None, &bad_restarts).is_err());
        let bad_slack = ScanOptions { error_slack: -0.5, ..ScanOptions::default() };
        assert!(scan_with_options(&x, 1, 2, &config, None, &bad_slack).is_err());
    }

    #[test]
    fn scan_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let x = DenseMatrix::from_shape_vec(
            8,
            6,
            (0..48).map(|_| rng.gen_range(0.1..1.0)).collect(),
        )
        .unwrap();
        let config = SolverConfig { max_outer_iterations: 60, ..SolverConfig::default() };
        let options = ScanOptions { restarts: 3, ..ScanOptions::default() };
        let a = scan_with_options(&x, 1, 3, &config, None, &options).unwrap();
        let b = scan_with_options(&x, 1, 3, &config, None, &options).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scan_recovers_the_true_rank_of_separable_data() {
        let spec = crate::synth::SynthSpec {
            archetypes: vec![crate::synth::ArchetypeSpec { num_specific_vars: 8, shift: 1.0 }; 4],
            samples_per_group: 15,
            mixing: None,
            noise_sigma: 0.01,
            seed: 0,
        };
        let data = crate::synth::generate(&spec).unwrap();
        let config = SolverConfig { seed: 0, ..SolverConfig::default() };
        let report = scan(&data.x, 1, 7, &config, None).unwrap();
        assert_eq!(report.suggested_rank, 4);
        assert!(report.drop_ratios[3] < DEFAULT_DROP_THRESHOLD);
        for r in 0..3 {
            assert!(report.drop_ratios[r] > 0.5);
        }
    }
}
