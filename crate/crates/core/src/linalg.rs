//! Small dense symmetric-matrix routines shared by the kernel and entropy code.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest asymmetry tolerated by [`check_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn check_symmetric(n: usize, a: &[f64]) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (a[i * n + j] - a[j * n + i]).abs();
            if !(gap <= SYMMETRY_TOL) {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    gap,
                });
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub(crate) fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn min_eigenvalue(n: usize, a: &[f64]) -> f64 {
    symmetric_eigenvalues(n, a)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// In-place Cholesky factorization of the `n x n` row-major buffer `a`
/// (lower triangle used), returning `ln det(a)`.
///
/// Fails on the first non-positive pivot.
pub(crate) fn cholesky_logdet(a: &mut [f64], n: usize) -> Result<f64> {
    let mut logdet = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        logdet += d.ln();
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
    }
    Ok(logdet)
}

/// Incrementally grown Cholesky factor of a principal submatrix.
///
/// Each [`push`](Self::push) appends one dimension and returns its
/// conditional variance given the dimensions already present.
pub(crate) struct GrowingCholesky<'a> {
    n: usize,
    a: &'a [f64],
    order: Vec<usize>,
    // Row-major lower factor, `cap x cap`.
    l: Vec<f64>,
    y: Vec<f64>,
}

impl<'a> GrowingCholesky<'a> {
    pub(crate) fn new(n: usize, a: &'a [f64]) -> Self {
        Self {
            n,
            a,
            order: Vec::with_capacity(n),
            l: vec![0.0; n * n],
            y: vec![0.0; n],
        }
    }

    pub(crate) fn clear(&mut self) {
        self.order.clear();
    }

    pub(crate) fn push(&mut self, idx: usize) -> Result<f64> {
        let t = self.order.len();
        let n = self.n;
        // Forward-solve L y = a[prefix, idx].
        for r in 0..t {
            let mut s = self.a[self.order[r] * n + idx];
            for c in 0..r {
                s -= self.l[r * n + c] * self.y[c];
            }
            self.y[r] = s / self.l[r * n + r];
        }
        let mut d = self.a[idx * n + idx];
        for c in 0..t {
            d -= self.y[c] * self.y[c];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: t });
        }
        self.l[t * n..t * n + t].copy_from_slice(&self.y[..t]);
        self.l[t * n + t] = d.sqrt();
        self.order.push(idx);
        Ok(d)
    }
}
