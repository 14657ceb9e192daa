//! Baseline alternating NMF solver.
//!
//! One outer iteration is a `W` update followed by an `H` update. After each
//! outer iteration an optional hook may transform the model in place; the
//! permutation step plugs in there. Convergence is declared on the relative
//! change of the Frobenius residual between consecutive outer iterations,
//! with an unconditional cap on the iteration count (hooks are allowed to
//! increase the residual, so the cap is the only universal guarantee of
//! termination).

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::DenseMatrix;
use crate::model::{FactorModel, ScalingScheme};

/// Factor initialization strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    /// Entries drawn uniformly from (0, 1], scaled by the mean of the data.
    RandomUniform,
    /// Deterministic SVD sign-splitting; zeros filled with the data mean so
    /// multiplicative updates cannot lock them at zero.
    Nndsvd,
}

/// Update rule applied each outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Classic multiplicative updates for the Frobenius objective.
    /// Monotone: the residual never increases.
    MultiplicativeUpdates,
    /// Alternating least squares via the normal equations, projected onto
    /// the non-negative orthant. Faster per digit on easy problems, but with
    /// no monotonicity guarantee.
    ProjectedGradientAls,
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_outer_iterations: usize,
    /// Relative change of the residual below which the fit stops.
    pub tolerance: f64,
    pub seed: u64,
    pub init: InitMethod,
    pub algorithm: Algorithm,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iterations: 500,
            tolerance: 1e-6,
            seed: 42,
            init: InitMethod::RandomUniform,
            algorithm: Algorithm::MultiplicativeUpdates,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_outer_iterations < 1 {
            return Err(Error::InvalidArgument(
                "max_outer_iterations must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a fit: final model (rescaled to [`ScalingScheme::MaxWeight`]),
/// residual per outer iteration, and whether the tolerance was reached.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: FactorModel,
    pub iterations_run: usize,
    pub error_trace: Vec<f64>,
    pub converged: bool,
}

fn check_rank(x: &DenseMatrix, rank: usize) -> Result<()> {
    let limit = x.rows().min(x.cols());
    if rank < 1 || rank > limit {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} out of range [1, {limit}] for a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Draws initial factors for `x`. Deterministic given the config seed.
pub fn init_factors(x: &DenseMatrix, rank: usize, config: &SolverConfig) -> Result<FactorModel> {
    check_rank(x, rank)?;
    config.validate()?;
    let (n, p) = (x.rows(), x.cols());
    match config.init {
        InitMethod::RandomUniform => {
            let mean = x.as_array().iter().sum::<f64>() / (n * p) as f64;
            let scale = if mean > 0.0 { mean } else { 1.0 };
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            // 1 - gen() maps [0,1) onto (0,1]: entries stay strictly positive.
            let w = Array2::from_shape_fn((n, rank), |_| (1.0 - rng.gen::<f64>()) * scale);
            let h = Array2::from_shape_fn((rank, p), |_| (1.0 - rng.gen::<f64>()) * scale);
            FactorModel::new(
                DenseMatrix::from_array_unchecked(w),
                DenseMatrix::from_array_unchecked(h),
            )
        }
        InitMethod::Nndsvd => {
            let (w, h) = nndsvd(x.as_array(), rank);
            FactorModel::new(
                DenseMatrix::from_array_unchecked(w),
                DenseMatrix::from_array_unchecked(h),
            )
        }
    }
}

/// SVD-based non-negative initialization: each singular triplet is split
/// into its positive and negative parts and the dominant pair is kept.
fn nndsvd(x: &Array2<f64>, rank: usize) -> (Array2<f64>, Array2<f64>) {
    let (n, p) = x.dim();
    let (u, sigma, vt) = linalg::truncated_svd(x, rank);
    let mut w = Array2::zeros((n, rank));
    let mut h = Array2::zeros((rank, p));

    for j in 0..rank {
        let uj = u.column(j);
        let vj = vt.row(j);
        if j == 0 {
            // The leading pair is non-negative up to a global sign.
            let flip = if uj.sum() < 0.0 { -1.0 } else { 1.0 };
            let s = sigma[0].sqrt();
            for i in 0..n {
                w[(i, 0)] = s * (flip * uj[i]).max(0.0);
            }
            for l in 0..p {
                h[(0, l)] = s * (flip * vj[l]).max(0.0);
            }
            continue;
        }
        let up: Vec<f64> = uj.iter().map(|v| v.max(0.0)).collect();
        let un: Vec<f64> = uj.iter().map(|v| (-v).max(0.0)).collect();
        let vp: Vec<f64> = vj.iter().map(|v| v.max(0.0)).collect();
        let vn: Vec<f64> = vj.iter().map(|v| (-v).max(0.0)).collect();
        let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (nup, nun, nvp, nvn) = (norm(&up), norm(&un), norm(&vp), norm(&vn));
        let (uu, vv, mu) = if nup * nvp >= nun * nvn {
            (up, vp, nup * nvp)
        } else {
            (un, vn, nun * nvn)
        };
        if mu <= 0.0 {
            continue; // degenerate triplet; the zero fill below revives it
        }
        let (nu, nv) = (norm(&uu), norm(&vv));
        let scale = (sigma[j] * mu).sqrt();
        for i in 0..n {
            w[(i, j)] = scale * uu[i] / nu;
        }
        for l in 0..p {
            h[(j, l)] = scale * vv[l] / nv;
        }
    }

    // Fill zeros with the data mean (the "a" variant of the scheme).
    let mean = x.iter().sum::<f64>() / (n * p) as f64;
    let fill = if mean > 0.0 { mean } else { 1.0 };
    w.mapv_inplace(|v| if v > 0.0 { v } else { fill });
    h.mapv_inplace(|v| if v > 0.0 { v } else { fill });
    (w, h)
}

/// One outer iteration: a `W` update then an `H` update.
pub fn update_step(
    x: &DenseMatrix,
    model: &FactorModel,
    config: &SolverConfig,
) -> Result<FactorModel> {
    if x.rows() != model.w().rows() || x.cols() != model.h().cols() {
        return Err(Error::DimensionMismatch(format!(
            "data is {}x{} but model reconstructs {}x{}",
            x.rows(),
            x.cols(),
            model.w().rows(),
            model.h().cols()
        )));
    }
    let xa = x.as_array();
    let w = model.w().as_array().clone();
    let h = model.h().as_array().clone();
    let (w, h) = match config.algorithm {
        Algorithm::MultiplicativeUpdates => multiplicative_step(xa, w, h),
        Algorithm::ProjectedGradientAls => projected_als_step(xa, w, h),
    };
    FactorModel::new(
        DenseMatrix::from_array_unchecked(w),
        DenseMatrix::from_array_unchecked(h),
    )
}

fn multiplicative_step(
    x: &Array2<f64>,
    mut w: Array2<f64>,
    mut h: Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    // W <- W .* (X H^T) ./ (W (H H^T)); entries with a zero denominator are
    // left unchanged (their component contributes nothing to the residual,
    // and the exact ratio would be 0/0).
    let num_w = x.dot(&h.t());
    let den_w = w.dot(&h.dot(&h.t()));
    ndarray::Zip::from(&mut w).and(&num_w).and(&den_w).for_each(|w, &n, &d| {
        if d > 0.0 {
            *w *= n / d;
        }
    });

    // H <- H .* (W^T X) ./ ((W^T W) H) with the updated W.
    let num_h = w.t().dot(x);
    let den_h = w.t().dot(&w).dot(&h);
    ndarray::Zip::from(&mut h).and(&num_h).and(&den_h).for_each(|h, &n, &d| {
        if d > 0.0 {
            *h *= n / d;
        }
    });
    (w, h)
}

fn projected_als_step(
    x: &Array2<f64>,
    w: Array2<f64>,
    h: Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    // W solves (H H^T) W^T = H X^T, clamped to the non-negative orthant.
    let wt = linalg::solve(&h.dot(&h.t()), &h.dot(&x.t()));
    let w_new = wt.t().mapv(|v| v.max(0.0));
    drop(w);
    // H solves (W^T W) H = W^T X with the updated W.
    let h_new = linalg::solve(&w_new.t().dot(&w_new), &w_new.t().dot(x)).mapv(|v| v.max(0.0));
    drop(h);
    (w_new, h_new)
}

/// Runs the solver to convergence or the iteration cap.
pub fn fit(x: &DenseMatrix, rank: usize, config: &SolverConfig) -> Result<FitReport> {
    fit_with_hook(x, rank, config, |_| {})
}

/// Like [`fit`], applying `hook` to the model after every outer iteration.
/// The residual trace records the error *after* the hook, so the convergence
/// test sees exactly what the caller will receive.
pub fn fit_with_hook(
    x: &DenseMatrix,
    rank: usize,
    config: &SolverConfig,
    mut hook: impl FnMut(&mut FactorModel),
) -> Result<FitReport> {
    let mut model = init_factors(x, rank, config)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev_err: Option<f64> = None;
    // Once the residual is at rounding level the relative-change test only
    // measures float jitter; treat the fit as exact.
    let exact_floor = 1e-14 * x.frobenius_norm();

    for _ in 0..config.max_outer_iterations {
        model = update_step(x, &model, config)?;
        hook(&mut model);
        let err = model.frobenius_error(x)?;
        trace.push(err);
        if err <= exact_floor {
            converged = true;
            break;
        }
        if let Some(prev) = prev_err {
            if (prev - err).abs() <= config.tolerance * prev.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        prev_err = Some(err);
    }

    Ok(FitReport {
        model: model.rescale(ScalingScheme::MaxWeight),
        iterations_run: trace.len(),
        error_trace: trace,
        converged,
    })
}
