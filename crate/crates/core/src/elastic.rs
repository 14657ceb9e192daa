//! Elastic distances in weight space and the two clustering rules.
//!
//! Archetype `u`'s corner sits at the observed top of its own axis (the
//! maximum of `W` column `u` over samples) and at 0 on every other axis. The
//! elastic distance of sample `i` to archetype `u` is the Euclidean distance
//! from the sample's weight row to that corner:
//!
//! ```text
//! d_iu^2 = (w_iu - max_j w_ju)^2 + sum_{v != u} w_iv^2
//! ```
//!
//! Because the corner moves with the axis scale, clustering by smallest
//! elastic distance is far less sensitive to the factorization's scaling
//! convention than clustering by largest weight.

use crate::matrix::DenseMatrix;

/// Per-sample distances to each archetype corner, with the column maxima the
/// corners were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticDistances {
    values: DenseMatrix,
    column_maxima: Vec<f64>,
}

impl ElasticDistances {
    /// n x k matrix of distances.
    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    /// Observed maximum of each `W` column (the corner heights).
    pub fn column_maxima(&self) -> &[f64] {
        &self.column_maxima
    }

    pub fn get(&self, sample: usize, archetype: usize) -> f64 {
        self.values.get(sample, archetype)
    }
}

/// Which rule produced a [`ClusterAssignment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterRule {
    /// Assign each sample to its largest weight.
    ArgmaxWeight,
    /// Assign each sample to its smallest elastic distance.
    MinElastic,
}

/// Per-sample archetype labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub rule: ClusterRule,
}

/// Computes elastic distances for every sample/archetype pair of `w`.
/// `w` is non-empty by construction, so the column maxima always exist.
pub fn elastic_distances(w: &DenseMatrix) -> ElasticDistances {
    let (n, k) = (w.rows(), w.cols());
    let maxima: Vec<f64> = (0..k).map(|u| w.column_max(u)).collect();
    let mut values = Vec::with_capacity(n * k);
    for i in 0..n {
        for u in 0..k {
            let mut sq = (w.get(i, u) - maxima[u]).powi(2);
            for v in 0..k {
                if v != u {
                    sq += w.get(i, v).powi(2);
                }
            }
            values.push(sq.sqrt());
        }
    }
    ElasticDistances {
        values: DenseMatrix::from_shape_vec(n, k, values).expect("distances are finite and >= 0"),
        column_maxima: maxima,
    }
}

/// Clusters the samples of `w` under `rule`. Ties go to the lowest archetype
/// index, so assignments are deterministic.
pub fn cluster(w: &DenseMatrix, rule: ClusterRule) -> ClusterAssignment {
    let labels = match rule {
        ClusterRule::ArgmaxWeight => per_row_extremum(w, |candidate, best| candidate > best),
        ClusterRule::MinElastic => {
            let d = elastic_distances(w);
            per_row_extremum(&d.values, |candidate, best| candidate < best)
        }
    };
    ClusterAssignment { labels, rule }
}

fn per_row_extremum(m: &DenseMatrix, better: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    (0..m.rows())
        .map(|i| {
            let mut best = 0;
            for u in 1..m.cols() {
                if better(m.get(i, u), m.get(i, best)) {
                    best = u;
                }
            }
            best
        })
        .collect()
}
