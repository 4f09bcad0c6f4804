//! Sparse LU factorization of shifted matrices `A - σB`.
//!
//! Left-looking (Gilbert–Peierls) elimination with threshold-free partial
//! pivoting in natural column order. Each column's nonzero pattern is found by
//! a depth-first reach through the columns of `L` computed so far.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::pencil::Pencil;
use crate::sparse::SparseMatrix;

/// Pivots below this fraction of the largest entry magnitude mark the shifted
/// matrix as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Reusable factorization `P (A - σB) = L U`.
#[derive(Debug, Clone)]
pub struct ShiftedFactorization {
    sigma: C64,
    n: usize,
    /// Strictly lower part of `L` by column, row indices in pivot order.
    l_cols: Vec<Vec<(usize, C64)>>,
    /// Strictly upper part of `U` by column, row indices in pivot order.
    u_cols: Vec<Vec<(usize, C64)>>,
    u_diag: Vec<C64>,
    /// Original row index -> pivot step.
    row_to_step: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

struct Csc {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<C64>,
}

fn to_csc(m: &SparseMatrix) -> Csc {
    let n = m.ncols();
    let mut counts = vec![0usize; n + 1];
    for &j in m.col_indices() {
        counts[j + 1] += 1;
    }
    for j in 0..n {
        counts[j + 1] += counts[j];
    }
    let mut next = counts.clone();
    let mut row_idx = vec![0; m.nnz()];
    let mut vals = vec![ZERO; m.nnz()];
    for (i, j, v) in m.triplets() {
        let slot = next[j];
        row_idx[slot] = i;
        vals[slot] = v;
        next[j] += 1;
    }
    Csc {
        col_ptr: counts,
        row_idx,
        vals,
    }
}

impl ShiftedFactorization {
    /// Factorizes an arbitrary square matrix; `sigma` is carried along as the
    /// shift the matrix was built from.
    pub fn from_matrix(m: &SparseMatrix, sigma: C64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim("LU of a non-square matrix".to_string()));
        }
        let n = m.nrows();
        let csc = to_csc(m);
        let tol = PIVOT_THRESHOLD * m.max_abs();

        const UNPIVOTED: usize = usize::MAX;
        let mut row_to_step = vec![UNPIVOTED; n];
        // L columns with original row indices during factorization
        let mut l_cols: Vec<Vec<(usize, C64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, C64)>> = Vec::with_capacity(n);
        let mut u_diag = Vec::with_capacity(n);

        let mut work = vec![ZERO; n];
        let mut marked = vec![false; n];
        let mut postorder: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let (mut min_pivot, mut max_pivot) = (f64::INFINITY, 0.0f64);

        for k in 0..n {
            let col = csc.col_ptr[k]..csc.col_ptr[k + 1];

            // symbolic: rows reachable from the pattern of column k
            postorder.clear();
            for &start in &csc.row_idx[col.clone()] {
                if marked[start] {
                    continue;
                }
                marked[start] = true;
                stack.push((start, 0));
                while let Some(&(node, pos)) = stack.last() {
                    let step = row_to_step[node];
                    let next = if step == UNPIVOTED {
                        None
                    } else {
                        l_cols[step].get(pos).map(|&(r, _)| r)
                    };
                    match next {
                        Some(next) => {
                            stack.last_mut().unwrap().1 += 1;
                            if !marked[next] {
                                marked[next] = true;
                                stack.push((next, 0));
                            }
                        }
                        None => {
                            postorder.push(node);
                            stack.pop();
                        }
                    }
                }
            }

            // numeric: sparse triangular solve in topological order
            for (&i, &v) in csc.row_idx[col.clone()].iter().zip(&csc.vals[col]) {
                work[i] = v;
            }
            for &row in postorder.iter().rev() {
                let step = row_to_step[row];
                if step == UNPIVOTED {
                    continue;
                }
                let xr = work[row];
                if xr != ZERO {
                    for &(i, l) in &l_cols[step] {
                        work[i] -= l * xr;
                    }
                }
            }

            // pivot choice among rows not yet pivoted
            let mut pivot_row = UNPIVOTED;
            let mut pivot_abs = -1.0f64;
            let mut u_col = Vec::new();
            for &row in postorder.iter().rev() {
                let step = row_to_step[row];
                if step != UNPIVOTED {
                    if work[row] != ZERO {
                        u_col.push((step, work[row]));
                    }
                } else {
                    let a = work[row].norm();
                    // ties go to the smallest row index for determinism
                    if a > pivot_abs || (a == pivot_abs && row < pivot_row) {
                        pivot_abs = a;
                        pivot_row = row;
                    }
                }
            }
            if pivot_row == UNPIVOTED || !(pivot_abs > tol) || !pivot_abs.is_finite() {
                return Err(Error::ShiftIsEigenvalue { sigma });
            }
            let pivot = work[pivot_row];
            min_pivot = min_pivot.min(pivot_abs);
            max_pivot = max_pivot.max(pivot_abs);
            row_to_step[pivot_row] = k;

            let mut l_col = Vec::new();
            for &row in postorder.iter().rev() {
                if row_to_step[row] == UNPIVOTED && work[row] != ZERO {
                    l_col.push((row, work[row] / pivot));
                }
            }
            u_col.sort_by_key(|&(s, _)| s);
            l_cols.push(l_col);
            u_cols.push(u_col);
            u_diag.push(pivot);

            for &row in &postorder {
                work[row] = ZERO;
                marked[row] = false;
            }
        }

        for col in &mut l_cols {
            for entry in col.iter_mut() {
                entry.0 = row_to_step[entry.0];
            }
        }

        Ok(Self {
            sigma,
            n,
            l_cols,
            u_cols,
            u_diag,
            row_to_step,
            min_pivot,
            max_pivot,
        })
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of largest to smallest pivot magnitude, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        if self.n == 0 {
            1.0
        } else {
            self.max_pivot / self.min_pivot
        }
    }

    pub fn factor_nnz(&self) -> usize {
        self.n
            + self.l_cols.iter().map(Vec::len).sum::<usize>()
            + self.u_cols.iter().map(Vec::len).sum::<usize>()
    }

    /// Solves `(A - σB) x = v`.
    pub fn solve(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.n {
            return Err(Error::dim(format!(
                "right-hand side of length {} for dimension {}",
                v.len(),
                self.n
            )));
        }
        let mut y = vec![ZERO; self.n];
        for (i, &vi) in v.iter().enumerate() {
            y[self.row_to_step[i]] = vi;
        }
        for (j, col) in self.l_cols.iter().enumerate() {
            let yj = y[j];
            if yj != ZERO {
                for &(s, l) in col {
                    y[s] -= l * yj;
                }
            }
        }
        for k in (0..self.n).rev() {
            y[k] /= self.u_diag[k];
            let xk = y[k];
            if xk != ZERO {
                for &(s, u) in &self.u_cols[k] {
                    y[s] -= u * xk;
                }
            }
        }
        Ok(y)
    }
}

/// Factorizes `A - σB`. Fails with [`Error::ShiftIsEigenvalue`] when a pivot
/// falls below `1e-14` times the largest entry magnitude of the shifted matrix.
pub fn factorize_shift(p: &Pencil, sigma: Complex64) -> Result<ShiftedFactorization> {
    ShiftedFactorization::from_matrix(&p.shifted(sigma), sigma)
}

pub fn apply_resolvent(f: &ShiftedFactorization, v: &[C64]) -> Result<Vec<C64>> {
    f.solve(v)
}

/// `(A - zB)⁻¹ f` through a fresh factorization at `z`.
pub fn solve_node_direct(p: &Pencil, z: C64, f: &[C64]) -> Result<Vec<C64>> {
    factorize_shift(p, z)?.solve(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, sub};
    use crate::pencil::make_pencil;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_pencil(d: &[f64]) -> Pencil {
        let vals: Vec<C64> = d.iter().map(|&x| c(x, 0.0)).collect();
        make_pencil(SparseMatrix::from_diagonal(&vals), None).unwrap()
    }

    fn random_sparse(n: usize, per_row: usize, seed: u64) -> SparseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))));
            for _ in 0..per_row {
                let j = rng.random_range(0..n);
                t.push((i, j, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            }
        }
        SparseMatrix::from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn diagonal_inverse() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        let f = factorize_shift(&p, c(0.0, 0.0)).unwrap();
        let x = apply_resolvent(&f, &[c(1.0, 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), ZERO, ZERO]);
    }

    #[test]
    fn shift_on_eigenvalue_is_reported() {
        let p = diag_pencil(&[1.0, 2.0, 3.0]);
        match factorize_shift(&p, c(2.0, 0.0)) {
            Err(Error::ShiftIsEigenvalue { sigma }) => assert_eq!(sigma, c(2.0, 0.0)),
            other => panic!("expected ShiftIsEigenvalue, got {other:?}"),
        }
        assert!(matches!(
            solve_node_direct(&p, c(2.0, 0.0), &[c(1.0, 0.0); 3]),
            Err(Error::ShiftIsEigenvalue { .. })
        ));
    }

    #[test]
    fn structurally_singular_matrix() {
        // empty second column
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
            .unwrap();
        assert!(matches!(
            ShiftedFactorization::from_matrix(&m, ZERO),
            Err(Error::ShiftIsEigenvalue { .. })
        ));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let p = make_pencil(random_sparse(12, 3, 5), None).unwrap();
        let f = factorize_shift(&p, c(0.3, 0.1)).unwrap();
        assert!(apply_resolvent(&f, &[ZERO; 12]).unwrap().iter().all(|v| *v == ZERO));
    }

    #[test]
    fn diagonal_solve_and_node_solve() {
        let p = diag_pencil(&[2.0, 5.0]);
        let f = factorize_shift(&p, ZERO).unwrap();
        let x = apply_resolvent(&f, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(0.5, 0.0), c(0.2, 0.0)]);
        let x = solve_node_direct(&p, c(1.0, 0.0), &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(0.25, 0.0)]);
    }

    #[test]
    fn dimension_mismatch() {
        let f = factorize_shift(&diag_pencil(&[2.0, 5.0]), ZERO).unwrap();
        assert!(matches!(f.solve(&[ZERO; 3]), Err(Error::Dimension(_))));
    }

    #[test]
    fn resolvent_identity_on_diagonal_pencils() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d: Vec<C64> = (0..40).map(|_| c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect();
        let p = make_pencil(SparseMatrix::from_diagonal(&d), None).unwrap();
        let sigma = c(0.123, -0.456);
        let f = factorize_shift(&p, sigma).unwrap();
        let v: Vec<C64> = (0..40).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let x = f.solve(&v).unwrap();
        for i in 0..40 {
            let expected = v[i] / (d[i] - sigma);
            assert!((x[i] - expected).norm() <= 1e-14 * expected.norm());
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
            .unwrap();
        let f = ShiftedFactorization::from_matrix(&m, ZERO).unwrap();
        let x = f.solve(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(4.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn round_trip_on_random_sparse() {
        for (n, seed) in [(20, 1), (60, 2), (100, 3)] {
            let a = random_sparse(n, 4, seed);
            let p = make_pencil(a, None).unwrap();
            let sigma = c(5.0, 1.0);
            let f = factorize_shift(&p, sigma).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let v: Vec<C64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let x = f.solve(&v).unwrap();
            let back = p.shifted(sigma).matvec(&x).unwrap();
            assert!(norm2(&sub(&back, &v)) / norm2(&v) < 1e-9);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        use nalgebra::DMatrix;
        let n = 20;
        let a = random_sparse(n, 3, 9);
        let sigma = c(5.0, 1.0);
        let p = make_pencil(a, None).unwrap();
        let shifted = p.shifted(sigma).to_dense();
        let dense = DMatrix::from_fn(n, n, |i, j| shifted[i][j]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<C64> = (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let expected = dense.lu().solve(&nalgebra::DVector::from_vec(v.clone())).unwrap();
        let x = solve_node_direct(&p, sigma, &v).unwrap();
        let err: f64 = x.iter().zip(expected.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / expected.norm() < 1e-10);
    }

    #[test]
    fn factorization_is_deterministic() {
        let p = make_pencil(random_sparse(50, 4, 21), None).unwrap();
        let v = vec![c(1.0, -1.0); 50];
        let x1 = factorize_shift(&p, c(0.5, 0.5)).unwrap().solve(&v).unwrap();
        let x2 = factorize_shift(&p, c(0.5, 0.5)).unwrap().solve(&v).unwrap();
        assert_eq!(x1, x2);
    }
}
