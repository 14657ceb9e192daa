//! Small dense linear-algebra kernels.
//!
//! Everything here operates on k x k systems where k is the factorization
//! rank (single digits in practice), or computes a few leading singular
//! triplets for initialization. Hand-rolled LU with partial pivoting and
//! orthogonal subspace iteration are plenty at these sizes and keep the
//! crate free of a BLAS/LAPACK system dependency.

use ndarray::{Array1, Array2};

/// Determinant via LU decomposition with partial pivoting.
pub fn determinant(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant requires a square matrix");
    let mut lu = a.clone();
    let mut sign = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[(col, col)].abs();
        for row in col + 1..n {
            let v = lu[(row, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap((col, j), (pivot_row, j));
            }
            sign = -sign;
        }
        let pivot = lu[(col, col)];
        for row in col + 1..n {
            let factor = lu[(row, col)] / pivot;
            lu[(row, col)] = factor;
            for j in col + 1..n {
                lu[(row, j)] -= factor * lu[(col, j)];
            }
        }
    }
    let mut det = sign;
    for i in 0..n {
        det *= lu[(i, i)];
    }
    det
}

/// Solves `A X = B` for square `A` by Gaussian elimination with partial
/// pivoting. `b` holds one right-hand side per column. Singular systems get
/// a tiny ridge on the diagonal instead of failing: callers use this for
/// regularized least-squares normal equations where exact singularity only
/// occurs for dead components.
pub fn solve(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "solve requires a square system");
    assert_eq!(n, b.nrows(), "right-hand side height must match");
    let mut lhs = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lhs[(col, col)].abs();
        for row in col + 1..n {
            let v = lhs[(row, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_row != col {
            for j in 0..n {
                lhs.swap((col, j), (pivot_row, j));
            }
            for j in 0..rhs.ncols() {
                rhs.swap((col, j), (pivot_row, j));
            }
        }
        if lhs[(col, col)].abs() < 1e-300 {
            lhs[(col, col)] += 1e-12;
        }
        let pivot = lhs[(col, col)];
        for row in col + 1..n {
            let factor = lhs[(row, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                lhs[(row, j)] -= factor * lhs[(col, j)];
            }
            for j in 0..rhs.ncols() {
                rhs[(row, j)] -= factor * rhs[(col, j)];
            }
        }
    }
    // Back substitution.
    let mut x = Array2::zeros((n, b.ncols()));
    for j in 0..rhs.ncols() {
        for i in (0..n).rev() {
            let mut acc = rhs[(i, j)];
            for l in i + 1..n {
                acc -= lhs[(i, l)] * x[(l, j)];
            }
            x[(i, j)] = acc / lhs[(i, i)];
        }
    }
    x
}

/// Leading singular triplets of `a`, via orthogonal iteration on the Gram
/// matrix of the smaller side. Deterministic: the start basis is fixed, the
/// iteration count is driven by eigenvalue stagnation with a hard cap.
///
/// Returns `(u, sigma, vt)` with `u`: n x r, `sigma`: r, `vt`: r x p. Ordered
/// by decreasing singular value. Intended for initialization, where a few
/// correct digits are enough.
pub fn truncated_svd(a: &Array2<f64>, r: usize) -> (Array2<f64>, Array1<f64>, Array2<f64>) {
    let (n, p) = a.dim();
    let r = r.min(n).min(p);
    let tall = n >= p; // iterate on the smaller Gram matrix
    let gram = if tall { a.t().dot(a) } else { a.dot(&a.t()) };
    let m = gram.nrows();

    // Fixed, full-column-rank start basis.
    let mut q = Array2::zeros((m, r));
    for j in 0..r {
        for i in 0..m {
            q[(i, j)] = 1.0 + ((i * (j + 1) + j) as f64 * 0.7391).sin();
        }
    }
    orthonormalize(&mut q);

    let mut eigs = Array1::<f64>::zeros(r);
    for _ in 0..500 {
        let z = gram.dot(&q);
        let new_eigs: Array1<f64> = (0..r)
            .map(|j| q.column(j).dot(&z.column(j)))
            .collect::<Vec<_>>()
            .into();
        q = z;
        orthonormalize(&mut q);
        let stalled = eigs
            .iter()
            .zip(new_eigs.iter())
            .all(|(old, new)| (old - new).abs() <= 1e-13 * new.abs().max(1.0));
        eigs = new_eigs;
        if stalled {
            break;
        }
    }

    let sigma: Array1<f64> = eigs.mapv(|v| v.max(0.0).sqrt());
    // Recover the other side's vectors: A v = sigma u and A^T u = sigma v.
    let (u, vt) = if tall {
        let v = q; // p x r
        let mut u = a.dot(&v); // n x r, columns sigma_j * u_j
        for j in 0..r {
            let s = sigma[j];
            if s > 1e-300 {
                u.column_mut(j).mapv_inplace(|x| x / s);
            }
        }
        (u, v.t().to_owned())
    } else {
        let u = q; // n x r
        let mut vt = u.t().dot(a); // r x p, rows sigma_j * v_j^T
        for j in 0..r {
            let s = sigma[j];
            if s > 1e-300 {
                vt.row_mut(j).mapv_inplace(|x| x / s);
            }
        }
        (u, vt)
    };
    (u, sigma, vt)
}

/// In-place modified Gram-Schmidt. Columns that collapse to zero are
/// replaced with a deterministic fallback direction and re-orthogonalized.
fn orthonormalize(q: &mut Array2<f64>) {
    let (m, r) = q.dim();
    for j in 0..r {
        for prev in 0..j {
            let proj = q.column(prev).dot(&q.column(j));
            for i in 0..m {
                q[(i, j)] -= proj * q[(i, prev)];
            }
        }
        let norm = q.column(j).dot(&q.column(j)).sqrt();
        if norm > 1e-150 {
            q.column_mut(j).mapv_inplace(|x| x / norm);
        } else {
            for i in 0..m {
                q[(i, j)] = if i % r == j { 1.0 } else { 0.0 };
            }
            for prev in 0..j {
                let proj = q.column(prev).dot(&q.column(j));
                for i in 0..m {
                    q[(i, j)] -= proj * q[(i, prev)];
                }
            }
            let n2 = q.column(j).dot(&q.column(j)).sqrt().max(1e-150);
            q.column_mut(j).mapv_inplace(|x| x / n2);
        }
    }
}
