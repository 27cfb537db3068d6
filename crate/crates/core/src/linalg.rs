//! Internal dense linear algebra: a cyclic Jacobi eigensolver for real
//! symmetric matrices.
//!
//! The largest matrices in this crate are 256 x 256 (full 8-qubit space) and
//! 36 x 36 (the N = 4, S_z = 0 sector), so an O(n^3)-per-sweep Jacobi solver
//! is plenty and keeps the numerical core free of external solver
//! dependencies.

use ndarray::Array2;

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are ascending; `vectors` holds the matching eigenvectors as
/// columns and is orthogonal.
pub(crate) struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Panics if the matrix is not square; symmetry is the caller's contract
/// (enforced upstream to 1e-12, asserted here in debug builds).
pub(crate) fn jacobi_eigh(a: &Array2<f64>) -> SymEig {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigh needs a square matrix");
    debug_assert!(
        (0..n).all(|i| (0..n).all(|j| (a[[i, j]] - a[[j, i]]).abs() < 1e-10)),
        "jacobi_eigh input must be symmetric"
    );
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);

    let scale: f64 = m.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 100;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[[p, q]].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                // Rotation angle from the standard stable formulation.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, new_col]] = v[[r, old_col]];
        }
    }
    SymEig { values, vectors }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` if a pivot falls below 1e-14 (singular system); used by the
/// DIIS extrapolation, which falls back to plain mixing in that case.
pub(crate) fn solve_linear(a: &Array2<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[[r, col]].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if pivot < 1e-14 {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = m[[col, c]];
                m[[col, c]] = m[[pivot_row, c]];
                m[[pivot_row, c]] = tmp;
            }
            x.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let f = m[[r, col]] / m[[col, col]];
            for c in col..n {
                m[[r, c]] -= f * m[[col, c]];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[[col, col]];
        for r in 0..col {
            x[r] -= m[[r, col]] * x[col];
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(a: &Array2<f64>) -> f64 {
        a.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Deterministic pseudo-random stream for test matrices (splitmix64).
    struct Mix(u64);
    impl Mix {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            (z as f64 / u64::MAX as f64) * 2.0 - 1.0
        }
    }

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = Mix(seed);
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let x = rng.next_f64();
                a[[i, j]] = x;
                a[[j, i]] = x;
            }
        }
        a
    }

    #[test]
    fn reconstructs_matrix_and_orthonormal_vectors() {
        for &(n, seed) in &[(4usize, 1u64), (36, 2), (64, 3)] {
            let a = random_symmetric(n, seed);
            let eig = jacobi_eigh(&a);
            // A V = V diag(lambda)
            let av = a.dot(&eig.vectors);
            let mut vl = eig.vectors.clone();
            for j in 0..n {
                for i in 0..n {
                    vl[[i, j]] *= eig.values[j];
                }
            }
            assert!(max_abs(&(&av - &vl)) < 1e-9, "n={n} residual too large");
            // V^T V = I
            let vtv = eig.vectors.t().dot(&eig.vectors);
            let eye = Array2::<f64>::eye(n);
            assert!(max_abs(&(&vtv - &eye)) < 1e-10);
            // ascending
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn recovers_known_spectrum() {
        // Build A = Q diag(d) Q^T from a product of Givens rotations, then
        // check the recovered eigenvalues against the planted ones.
        let n = 12;
        let d: Vec<f64> = (0..n).map(|i| -2.0 + 0.37 * i as f64).collect();
        let mut q = Array2::<f64>::eye(n);
        let mut rng = Mix(7);
        for p in 0..n {
            for r in (p + 1)..n {
                let ang = rng.next_f64();
                let (c, s) = (ang.cos(), ang.sin());
                for k in 0..n {
                    let qkp = q[[k, p]];
                    let qkr = q[[k, r]];
                    q[[k, p]] = c * qkp - s * qkr;
                    q[[k, r]] = s * qkp + c * qkr;
                }
            }
        }
        let mut lam = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            lam[[i, i]] = d[i];
        }
        let a = q.dot(&lam).dot(&q.t());
        let eig = jacobi_eigh(&a);
        for (got, want) in eig.values.iter().zip(d.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn linear_solver_inverts_small_systems() {
        let mut a = Array2::<f64>::zeros((3, 3));
        let rows = [[2.0, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[[i, j]] = rows[i][j];
            }
        }
        let x = solve_linear(&a, &[8.0, -11.0, -3.0]).unwrap();
        for (got, want) in x.iter().zip([2.0, 3.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // singular matrix -> None
        let mut s = Array2::<f64>::zeros((2, 2));
        s[[0, 0]] = 1.0;
        s[[0, 1]] = 2.0;
        s[[1, 0]] = 2.0;
        s[[1, 1]] = 4.0;
        assert!(solve_linear(&s, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn handles_diagonal_and_degenerate_matrices() {
        let mut a = Array2::<f64>::zeros((3, 3));
        a[[0, 0]] = 2.0;
        a[[1, 1]] = 2.0;
        a[[2, 2]] = -1.0;
        let eig = jacobi_eigh(&a);
        assert_eq!(eig.values.len(), 3);
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 2.0).abs() < 1e-14);
        assert!((eig.values[2] - 2.0).abs() < 1e-14);
    }
}
