//! Separable synthetic data with known ground truth.
//!
//! Each archetype shifts its own disjoint block of variables by a constant
//! and leaves every other variable at zero, so the generated data admits an
//! exact non-negative factorization whose sample coordinates have a closed
//! form: coordinate `u` of a sample is the sum of archetype `u`'s variables
//! divided by `count * shift`. Pure group members land exactly on the unit
//! corners. That closed form is what the rest of the crate is tested
//! against.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// One archetype of the generator: how many variables it owns and the
/// constant shift it applies to them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchetypeSpec {
    pub num_specific_vars: usize,
    pub shift: f64,
}

/// Parameters of the separable generator. Distinct archetypes always occupy
/// disjoint variable blocks, laid out consecutively in archetype order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub archetypes: Vec<ArchetypeSpec>,
    /// Samples per archetype when `mixing` is absent.
    pub samples_per_group: usize,
    /// Optional explicit weight row per sample; overrides the pure group
    /// layout entirely (one generated sample per row).
    #[serde(default)]
    pub mixing: Option<Vec<Vec<f64>>>,
    /// Standard deviation of the additive Gaussian noise (clamped at zero
    /// afterwards to stay in the non-negative domain).
    #[serde(default)]
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Total number of variables across all archetype blocks.
    pub fn total_vars(&self) -> usize {
        self.archetypes.iter().map(|a| a.num_specific_vars).sum()
    }

    pub fn rank(&self) -> usize {
        self.archetypes.len()
    }

    fn validate(&self) -> Result<()> {
        if self.archetypes.is_empty() {
            return Err(Error::InvalidArgument("at least one archetype required".into()));
        }
        for (u, a) in self.archetypes.iter().enumerate() {
            if a.num_specific_vars == 0 {
                return Err(Error::InvalidArgument(format!(
                    "archetype {u} owns no variables; disjoint non-empty blocks required"
                )));
            }
            if !(a.shift > 0.0) || !a.shift.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "archetype {u} shift must be positive and finite, got {}",
                    a.shift
                )));
            }
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise_sigma must be non-negative and finite, got {}",
                self.noise_sigma
            )));
        }
        match &self.mixing {
            None => {
                if self.samples_per_group == 0 {
                    return Err(Error::InvalidArgument(
                        "samples_per_group must be at least 1".into(),
                    ));
                }
            }
            Some(rows) => {
                if rows.is_empty() {
                    return Err(Error::InvalidArgument("mixing must have at least one row".into()));
                }
                let k = self.archetypes.len();
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != k {
                        return Err(Error::InvalidArgument(format!(
                            "mixing row {i} has {} weights, expected {k}",
                            row.len()
                        )));
                    }
                    if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "mixing row {i} has a negative or non-finite weight"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Generated data plus the ground truth it came from.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub x: DenseMatrix,
    /// Per-sample group: argmax of the true weight row, lowest index on ties.
    pub true_labels: Vec<usize>,
    pub true_w: DenseMatrix,
    pub true_h: DenseMatrix,
}

/// Generates a dataset from `spec`. Deterministic given the seed; with
/// `noise_sigma` zero the result is exactly `true_w * true_h`.
pub fn generate(spec: &SynthSpec) -> Result<SynthDataset> {
    spec.validate()?;
    let k = spec.rank();
    let p = spec.total_vars();

    let mut h = Array2::zeros((k, p));
    let mut offset = 0;
    for (u, a) in spec.archetypes.iter().enumerate() {
        for j in offset..offset + a.num_specific_vars {
            h[(u, j)] = a.shift;
        }
        offset += a.num_specific_vars;
    }

    let w = match &spec.mixing {
        None => {
            let n = k * spec.samples_per_group;
            let mut w = Array2::zeros((n, k));
            for i in 0..n {
                w[(i, i / spec.samples_per_group)] = 1.0;
            }
            w
        }
        Some(rows) => {
            let mut w = Array2::zeros((rows.len(), k));
            for (i, row) in rows.iter().enumerate() {
                for (u, v) in row.iter().enumerate() {
                    w[(i, u)] = *v;
                }
            }
            w
        }
    };

    let true_labels: Vec<usize> = w
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (u, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = u;
                }
            }
            best
        })
        .collect();

    let mut x = w.dot(&h);
    if spec.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        x.mapv_inplace(|v| (v + normal.sample(&mut rng)).max(0.0));
    }

    Ok(SynthDataset {
        x: DenseMatrix::from_array_unchecked(x),
        true_labels,
        true_w: DenseMatrix::from_array_unchecked(w),
        true_h: DenseMatrix::from_array_unchecked(h),
    })
}

/// Closed-form sample coordinates for data laid out by `spec`: coordinate
/// `u` is the sum over archetype `u`'s variable block divided by
/// `block size * shift`.
pub fn oracle_coordinates(x: &DenseMatrix, spec: &SynthSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let p = spec.total_vars();
    if x.cols() != p {
        return Err(Error::DimensionMismatch(format!(
            "data has {} columns but the layout defines {p} variables",
            x.cols()
        )));
    }
    let n = x.rows();
    let k = spec.rank();
    let mut coords = Array2::zeros((n, k));
    for i in 0..n {
        let mut offset = 0;
        for (u, a) in spec.archetypes.iter().enumerate() {
            let mut sum = 0.0;
            for j in offset..offset + a.num_specific_vars {
                sum += x.get(i, j);
            }
            coords[(i, u)] = sum / (a.num_specific_vars as f64 * a.shift);
            offset += a.num_specific_vars;
        }
    }
    Ok(DenseMatrix::from_array_unchecked(coords))
}
