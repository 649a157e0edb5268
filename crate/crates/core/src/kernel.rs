//! Correlation matrices from directed entailment, and the kernel transform
//! that makes them usable as Gaussian covariances.
//!
//! The pipeline is `symmetrize -> safe_beta -> kernelize`. `symmetrize`
//! averages the two entailment directions into a correlation `c in [0, 1]`.
//! `kernelize` maps every off-diagonal entry to `beta * exp(-(1 - c)^2 / 2)`
//! and keeps a unit diagonal, which equals `I + beta * (R - I)` where `R`
//! is the `beta = 1` matrix. Every eigenvalue of `R` lies in `[-n, n]`
//! (Gershgorin), so `beta <= 1 / (n + 1)` always yields a positive definite
//! result; larger `beta` values are certified by an explicit eigen-solve.

use crate::data::{check_beta, EntailmentMatrix, KernelKind};
use crate::error::{Error, Result};
use crate::linalg;

/// Symmetric matrix with unit diagonal and entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    c: Vec<f64>,
}

impl CorrelationMatrix {
    /// Validates and wraps explicit rows. Asymmetry up to
    /// [`linalg::SYMMETRY_TOL`] is averaged away.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid(
                "correlation matrix must be non-empty".into(),
            ));
        }
        let mut c = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            c.extend_from_slice(row);
        }
        linalg::check_symmetric(n, &c)?;
        for i in 0..n {
            if c[i * n + i] != 1.0 {
                return Err(Error::Invalid(format!("diagonal entry {i} must be 1")));
            }
        }
        if let Some(v) = c.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Invalid(format!("correlation {v} outside [0, 1]")));
        }
        let mut m = Self { n, c };
        m.average_transpose();
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            c[i * n + i] = 1.0;
        }
        Self { n, c }
    }

    fn average_transpose(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.c[i * n + j] + self.c[j * n + i]);
                self.c[i * n + j] = v;
                self.c[j * n + i] = v;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    /// Sets the symmetric pair `(i, j)` and `(j, i)`. Off-diagonal only.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "diagonal of a correlation matrix is fixed at 1");
        assert!(
            (0.0..=1.0).contains(&value),
            "correlation {value} outside [0, 1]"
        );
        self.c[i * self.n + j] = value;
        self.c[j * self.n + i] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.c.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    /// Smallest eigenvalue of the raw (unkernelized) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(self.n, &self.c)
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut c = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                c.push(self.get(i, j));
            }
        }
        Self { n: m, c }
    }
}

/// `c[i][j] = (P(i => j) + P(j => i)) / 2`, unit diagonal.
pub fn symmetrize(e: &EntailmentMatrix) -> CorrelationMatrix {
    let n = e.n();
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        c[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = 0.5 * e.get(i, j) + 0.5 * e.get(j, i);
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    CorrelationMatrix { n, c }
}

/// Symmetric unit-diagonal matrix used as a Gaussian covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    k: Vec<f64>,
    beta: Option<f64>,
    psd_certified: bool,
    min_eigenvalue: f64,
}

impl KernelMatrix {
    /// Wraps an externally supplied symmetric matrix with unit diagonal and
    /// certifies it against `tol`. `beta()` is `None` for such matrices.
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(
                "kernel matrix must be square and non-empty".into(),
            ));
        }
        let k: Vec<f64> = rows.concat();
        linalg::check_symmetric(n, &k)?;
        if (0..n).any(|i| k[i * n + i] != 1.0) {
            return Err(Error::Invalid(
                "kernel matrix must have a unit diagonal".into(),
            ));
        }
        Ok(Self::certify(n, k, None, tol))
    }

    pub fn identity(n: usize) -> Self {
        let c = CorrelationMatrix::identity(n);
        Self::certify(n, c.c, None, 0.0)
    }

    fn certify(n: usize, k: Vec<f64>, beta: Option<f64>, tol: f64) -> Self {
        let min_eigenvalue = linalg::min_eigenvalue(n, &k);
        Self {
            n,
            k,
            beta,
            psd_certified: min_eigenvalue >= -tol,
            min_eigenvalue,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn psd_certified(&self) -> bool {
        self.psd_certified
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.k
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.k.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Principal submatrix on `idx`, re-certified with the same outcome
    /// (principal submatrices of a PSD matrix are PSD).
    pub fn principal(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut k = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                k.push(self.get(i, j));
            }
        }
        let min_eigenvalue = linalg::min_eigenvalue(m, &k);
        Self {
            n: m,
            k,
            beta: self.beta,
            psd_certified: self.psd_certified,
            min_eigenvalue,
        }
    }
}

#[inline]
pub fn kernel_value(kind: KernelKind, distance: f64) -> f64 {
    match kind {
        KernelKind::Gaussian => (-0.5 * distance * distance).exp(),
    }
}

/// Applies the unit-diagonal kernel transform and certifies the result.
pub fn kernelize(
    c: &CorrelationMatrix,
    beta: f64,
    kind: KernelKind,
    tol: f64,
) -> Result<KernelMatrix> {
    check_beta(beta)?;
    let n = c.n;
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = beta * kernel_value(kind, 1.0 - c.get(i, j));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(KernelMatrix::certify(n, k, Some(beta), tol))
}

/// Returns `(psd, min_eigenvalue)`: `psd` iff the smallest eigenvalue is
/// at least `-tol`.
pub fn is_psd(rows: &[Vec<f64>], tol: f64) -> Result<(bool, f64)> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix must be square".into()));
    }
    let a = rows.concat();
    linalg::check_symmetric(n, &a)?;
    let min = linalg::min_eigenvalue(n, &a);
    Ok((min >= -tol, min))
}

/// Largest `beta` on the halving grid `requested, requested/2, ...` whose
/// kernel matrix is strictly positive definite beyond `tol`, falling back
/// to `1 / (n + 1)`.
///
/// Strict definiteness (rather than `min_eigenvalue >= -tol`) is required
/// because the result feeds log-determinants: `beta = 1` with two fully
/// entailing answers is PSD but singular.
pub fn safe_beta(c: &CorrelationMatrix, requested: f64, kind: KernelKind, tol: f64) -> Result<f64> {
    check_beta(requested)?;
    let floor = 1.0 / (c.n as f64 + 1.0);
    let mut beta = requested;
    while beta > floor {
        let k = kernelize(c, beta, kind, tol)?;
        if k.min_eigenvalue > tol {
            return Ok(beta);
        }
        beta *= 0.5;
    }
    Ok(floor.min(requested))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(rows: Vec<Vec<f64>>) -> EntailmentMatrix {
        EntailmentMatrix::new("t", rows).unwrap()
    }

    #[test]
    fn symmetrize_averages_directions() {
        let e = ent(vec![
            vec![1.0, 0.8, 0.9, 1.0],
            vec![0.6, 1.0, 0.3, 1.0],
            vec![0.1, 0.3, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 1.0],
        ]);
        let c = symmetrize(&e);
        assert!((c.get(0, 1) - 0.7).abs() < 1e-15);
        assert!((c.get(0, 2) - 0.5).abs() < 1e-15);
        assert_eq!(c.get(1, 3), 1.0);
        for i in 0..4 {
            assert_eq!(c.get(i, i), 1.0);
            for j in 0..4 {
                assert_eq!(c.get(i, j), c.get(j, i));
            }
        }
    }

    fn two(cv: f64) -> CorrelationMatrix {
        CorrelationMatrix::from_rows(&[vec![1.0, cv], vec![cv, 1.0]]).unwrap()
    }

    #[test]
    fn kernelize_values() {
        let g = KernelKind::Gaussian;
        let k = kernelize(&two(1.0), 0.5, g, 1e-10).unwrap();
        assert_eq!(k.get(0, 1), 0.5);
        assert_eq!(k.get(0, 0), 1.0);
        let k = kernelize(&two(0.5), 0.5, g, 1e-10).unwrap();
        assert!((k.get(0, 1) - 0.441_248_451_292_297_7).abs() < 1e-12);
        let k = kernelize(&two(0.0), 0.5, g, 1e-10).unwrap();
        assert!((k.get(1, 0) - 0.303_265_329_856_316_7).abs() < 1e-12);
        assert!(k.psd_certified());
        assert_eq!(k.beta(), Some(0.5));
    }

    #[test]
    fn kernelize_rejects_bad_beta() {
        let c = two(0.5);
        assert!(kernelize(&c, 0.0, KernelKind::Gaussian, 0.0).is_err());
        assert!(kernelize(&c, 1.5, KernelKind::Gaussian, 0.0).is_err());
    }

    #[test]
    fn is_psd_examples() {
        assert_eq!(
            is_psd(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.0).unwrap(),
            (true, 1.0)
        );
        let (ok, min) = is_psd(&[vec![1.0, 1.2], vec![1.2, 1.0]], 1e-10).unwrap();
        assert!(!ok);
        assert!((min + 0.2).abs() < 1e-12);
        let (ok, min) = is_psd(&[vec![1.0, 0.5], vec![0.5, 1.0]], 1e-10).unwrap();
        assert!(ok);
        assert!((min - 0.5).abs() < 1e-12);
        assert!(is_psd(&[vec![1.0, 0.5], vec![0.4, 1.0]], 0.0).is_err());
    }

    #[test]
    fn safe_beta_keeps_certifying_request() {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 1.0, 0.5],
            vec![1.0, 1.0, 0.5],
            vec![0.5, 0.5, 1.0],
        ])
        .unwrap();
        assert_eq!(
            safe_beta(&c, 0.5, KernelKind::Gaussian, 1e-10).unwrap(),
            0.5
        );
    }

    #[test]
    fn safe_beta_halves_on_adversarial_input() {
        // Raw eigenvalues 1 +- sqrt(2): not PSD, and still indefinite at beta = 1.
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!(c.min_eigenvalue() < 0.0);
        let g = KernelKind::Gaussian;
        assert!(!kernelize(&c, 1.0, g, 1e-10).unwrap().psd_certified());
        let b = safe_beta(&c, 1.0, g, 1e-10).unwrap();
        assert_eq!(b, 0.5);
        assert!(kernelize(&c, b, g, 1e-10).unwrap().psd_certified());
    }

    #[test]
    fn safe_beta_rejects_singular_beta_one() {
        let b = safe_beta(&two(1.0), 1.0, KernelKind::Gaussian, 1e-10).unwrap();
        assert_eq!(b, 0.5);
    }

    #[test]
    fn fallback_at_n9_certifies() {
        // Worst case for Gershgorin: every pair fully correlated.
        let n = 9;
        let rows = vec![vec![1.0; n]; n];
        let c = CorrelationMatrix::from_rows(&rows).unwrap();
        let k = kernelize(&c, 1.0 / (n as f64 + 1.0), KernelKind::Gaussian, 1e-10).unwrap();
        assert!(k.psd_certified());
        assert!((k.get(0, 1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn equals_identity_plus_scaled_offset() {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 0.2, 0.7],
            vec![0.2, 1.0, 0.4],
            vec![0.7, 0.4, 1.0],
        ])
        .unwrap();
        let g = KernelKind::Gaussian;
        let r = kernelize(&c, 1.0, g, 0.0).unwrap();
        let beta = 0.37;
        let k = kernelize(&c, beta, g, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                let expect = id + beta * (r.get(i, j) - id);
                assert!((k.get(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn from_rows_validation() {
        assert!(CorrelationMatrix::from_rows(&[vec![1.0, 1.2], vec![1.2, 1.0]]).is_err());
        assert!(CorrelationMatrix::from_rows(&[vec![0.9, 0.2], vec![0.2, 1.0]]).is_err());
        assert!(CorrelationMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
    }
}
