//! Arnoldi factorizations of the Cayley operator `M = (A - σB)⁻¹ B`.
//!
//! One basis of `K_m(M; b)` with `b = (A - σB)⁻¹ f` serves every shifted
//! system `(I + (σ - z) M) x = b`, which is `(A - zB) x = f` premultiplied by
//! `(A - σB)⁻¹`. Only an `m × m` Hessenberg solve is needed per `z`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, C64, ONE, ZERO};
use crate::lu::{factorize_shift, ShiftedFactorization};
use crate::pencil::{Pencil, ProbeVector};

/// Relative size of `h_{j+1,j}` (against `‖M v_j‖`) below which the Krylov
/// space is treated as invariant.
pub const BREAKDOWN_THRESHOLD: f64 = 1e-14;

/// Arnoldi factorization `M V = V H + h_next v_next e_mᵀ` at shift `sigma`.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    sigma: C64,
    factorization: Arc<ShiftedFactorization>,
    /// Orthonormal columns `v_1..v_m`.
    v: Vec<Vec<C64>>,
    /// Upper Hessenberg, row-major `m × m`.
    h: Vec<Vec<C64>>,
    h_next: f64,
    v_next: Option<Vec<C64>>,
    beta: f64,
    b: Vec<C64>,
}

/// Reduced solution of one shifted system.
#[derive(Debug, Clone)]
pub struct ShiftedSolve {
    pub z: C64,
    pub y: Vec<C64>,
    /// `|σ - z| · h_next · |e_mᵀ y|`
    pub residual: f64,
}

/// `M v = (A - σB)⁻¹ B v`
pub fn apply_cayley(p: &Pencil, fact: &ShiftedFactorization, v: &[C64]) -> Result<Vec<C64>> {
    fact.solve(&p.b().matvec(v)?)
}

/// Factorizes `A - σB` and runs `m` Arnoldi steps from `(A - σB)⁻¹ f`.
pub fn build_basis(p: &Pencil, sigma: C64, f: &ProbeVector, m: usize) -> Result<KrylovBasis> {
    let fact = Arc::new(factorize_shift(p, sigma)?);
    build_basis_with(p, fact, f.values(), m)
}

/// Arnoldi with modified Gram–Schmidt and one full reorthogonalization pass,
/// reusing an existing factorization.
pub fn build_basis_with(
    p: &Pencil,
    fact: Arc<ShiftedFactorization>,
    rhs: &[C64],
    m: usize,
) -> Result<KrylovBasis> {
    if m == 0 {
        return Err(Error::Config("Krylov dimension must be at least 1".to_string()));
    }
    let sigma = fact.sigma();
    let b = fact.solve(rhs)?;
    let beta = norm2(&b);
    let mut basis = KrylovBasis {
        sigma,
        factorization: fact,
        v: Vec::with_capacity(m),
        h: Vec::new(),
        h_next: 0.0,
        v_next: None,
        beta,
        b,
    };
    if beta == 0.0 {
        // zero right-hand side: the empty basis is exact
        return Ok(basis);
    }
    basis.v.push(basis.b.iter().map(|x| x / beta).collect());
    let mut h = vec![vec![ZERO; m]; m];

    for j in 0..m {
        let mut w = apply_cayley(p, &basis.factorization, &basis.v[j])?;
        let w_norm = norm2(&w);
        for _pass in 0..2 {
            for (i, vi) in basis.v.iter().enumerate() {
                let hij = dot(vi, &w);
                h[i][j] += hij;
                axpy(-hij, vi, &mut w);
            }
        }
        let h_sub = norm2(&w);
        if h_sub <= BREAKDOWN_THRESHOLD * w_norm {
            h.truncate(j + 1);
            h.iter_mut().for_each(|row| row.truncate(j + 1));
            basis.h = h;
            return Ok(basis);
        }
        let next: Vec<C64> = w.iter().map(|x| x / h_sub).collect();
        if j + 1 == m {
            basis.h_next = h_sub;
            basis.v_next = Some(next);
        } else {
            h[j + 1][j] = C64::new(h_sub, 0.0);
            basis.v.push(next);
        }
    }
    basis.h = h;
    Ok(basis)
}

impl KrylovBasis {
    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    /// Number of basis vectors actually built.
    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn h_next(&self) -> f64 {
        self.h_next
    }

    pub fn v_next(&self) -> Option<&[C64]> {
        self.v_next.as_deref()
    }

    pub fn hessenberg(&self) -> &[Vec<C64>] {
        &self.h
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.v[j]
    }

    pub fn factorization(&self) -> &Arc<ShiftedFactorization> {
        &self.factorization
    }

    pub fn is_invariant(&self) -> bool {
        self.v_next.is_none()
    }

    /// Solves `(I + (σ - z) H) y = β e_1` by Hessenberg elimination with
    /// adjacent-row pivoting.
    pub fn solve_shifted(&self, z: C64) -> Result<ShiftedSolve> {
        let m = self.m();
        if m == 0 {
            return Ok(ShiftedSolve {
                z,
                y: Vec::new(),
                residual: 0.0,
            });
        }
        let shift = self.sigma - z;
        // Row k of T = I + (σ - z) H, nonzero from column k - 1 on.
        let t_row = |k: usize, out: &mut [C64]| {
            for (j, o) in out.iter_mut().enumerate().skip(k.saturating_sub(1)) {
                let v = shift * self.h[k][j];
                *o = if j == k { ONE + v } else { v };
            }
        };
        // Gaussian elimination with adjacent-row pivoting; `cur` carries the
        // partially reduced row that competes with the next fresh row.
        let mut u = vec![ZERO; m * m];
        let mut cur = vec![ZERO; m];
        let mut next = vec![ZERO; m];
        let mut y = vec![ZERO; m];
        let mut carry = C64::new(self.beta, 0.0);
        t_row(0, &mut cur);
        for k in 0..m {
            if k + 1 < m {
                next[k..].fill(ZERO);
                t_row(k + 1, &mut next);
                let mut rhs_next = ZERO;
                if next[k].norm_sqr() > cur[k].norm_sqr() {
                    std::mem::swap(&mut cur, &mut next);
                    std::mem::swap(&mut carry, &mut rhs_next);
                }
                let pivot = cur[k];
                if pivot == ZERO || !pivot.is_finite() {
                    return Err(Error::ReducedSingular { z });
                }
                let factor = next[k] / pivot;
                for j in k + 1..m {
                    next[j] -= factor * cur[j];
                }
                rhs_next -= factor * carry;
                u[k * m + k..(k + 1) * m].copy_from_slice(&cur[k..]);
                y[k] = carry;
                std::mem::swap(&mut cur, &mut next);
                carry = rhs_next;
            } else {
                if cur[k] == ZERO || !cur[k].is_finite() {
                    return Err(Error::ReducedSingular { z });
                }
                u[k * m + k] = cur[k];
                y[k] = carry;
            }
        }
        for k in (0..m).rev() {
            let row = &u[k * m..(k + 1) * m];
            let mut acc = y[k];
            for j in k + 1..m {
                acc -= row[j] * y[j];
            }
            y[k] = acc / row[k];
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::ReducedSingular { z });
        }
        let residual = shift.norm() * self.h_next * y[m - 1].norm();
        Ok(ShiftedSolve { z, y, residual })
    }

    /// `V y`
    pub fn reconstruct(&self, y: &[C64]) -> Result<Vec<C64>> {
        if y.len() != self.m() {
            return Err(Error::dim(format!(
                "reduced vector of length {} for basis of size {}",
                y.len(),
                self.m()
            )));
        }
        let mut x = vec![ZERO; self.n()];
        for (vj, &yj) in self.v.iter().zip(y) {
            axpy(yj, vj, &mut x);
        }
        Ok(x)
    }

    /// `V (Σ w_j y_j)` with a single `n × m` product.
    pub fn accumulate_reduced<'a>(
        &self,
        weighted: impl IntoIterator<Item = (C64, &'a [C64])>,
    ) -> Result<Vec<C64>> {
        let mut sum = vec![ZERO; self.m()];
        for (w, y) in weighted {
            if y.len() != self.m() {
                return Err(Error::dim(format!(
                    "reduced vector of length {} for basis of size {}",
                    y.len(),
                    self.m()
                )));
            }
            axpy(w, y, &mut sum);
        }
        self.reconstruct(&sum)
    }

    /// Explicit `‖b - (I + (σ - z) M) V y‖₂`.
    pub fn explicit_residual(&self, p: &Pencil, z: C64, y: &[C64]) -> Result<f64> {
        let x = self.reconstruct(y)?;
        let mx = apply_cayley(p, &self.factorization, &x)?;
        let shift = self.sigma - z;
        let r: Vec<C64> = self
            .b
            .iter()
            .zip(x.iter().zip(&mx))
            .map(|(bi, (xi, mxi))| bi - xi - shift * mxi)
            .collect();
        Ok(norm2(&r))
    }

    /// `‖M V - V H - v_next h_next e_mᵀ‖_F`
    pub fn arnoldi_relation_residual(&self, p: &Pencil) -> Result<f64> {
        let m = self.m();
        let mut total = 0.0;
        for j in 0..m {
            let mut r = apply_cayley(p, &self.factorization, &self.v[j])?;
            for (i, vi) in self.v.iter().enumerate() {
                axpy(-self.h[i][j], vi, &mut r);
            }
            if j + 1 == m {
                if let Some(vn) = &self.v_next {
                    axpy(C64::new(-self.h_next, 0.0), vn, &mut r);
                }
            }
            total += norm2(&r).powi(2);
        }
        Ok(total.sqrt())
    }

    pub fn hessenberg_norm(&self) -> f64 {
        self.h
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖Vᴴ V - I‖_F`
    pub fn orthonormality_error(&self) -> f64 {
        let m = self.m();
        let mut total = 0.0;
        for i in 0..m {
            for j in 0..m {
                let g = dot(&self.v[i], &self.v[j]);
                let target = if i == j { ONE } else { ZERO };
                total += (g - target).norm_sqr();
            }
        }
        total.sqrt()
    }
}
