//! Differential entropy of a unit-variance Gaussian restricted to subsets
//! of its dimensions: `h(S) = (|S| ln(2 pi e) + ln det K[S, S]) / 2`, with
//! `h({}) = 0`.

use crate::error::{Error, Result};
use crate::kernel::{CorrelationMatrix, KernelMatrix};
use crate::linalg;

/// `ln(2 pi e)`.
pub const LN_2PI_E: f64 = 2.837_877_066_409_345_3;

/// Hard cap on exact enumeration (`2^n` cached subsets).
pub const MAX_EXACT_N: usize = 24;

fn require_certified(k: &KernelMatrix) -> Result<()> {
    if k.psd_certified() {
        Ok(())
    } else {
        Err(Error::NotCertified {
            min_eigenvalue: k.min_eigenvalue(),
        })
    }
}

fn entropy_of(k: &KernelMatrix, idx: &[usize], buf: &mut Vec<f64>) -> Result<f64> {
    let m = idx.len();
    if m == 0 {
        return Ok(0.0);
    }
    buf.clear();
    for &i in idx {
        for &j in idx {
            buf.push(k.get(i, j));
        }
    }
    let logdet = linalg::cholesky_logdet(buf, m)?;
    Ok(0.5 * (m as f64 * LN_2PI_E + logdet))
}

/// Entropy (nats) of the Gaussian marginal on `subset`.
pub fn subset_entropy(k: &KernelMatrix, subset: &[usize]) -> Result<f64> {
    require_certified(k)?;
    if let Some(&bad) = subset.iter().find(|&&i| i >= k.n()) {
        return Err(Error::Invalid(format!(
            "dimension {bad} out of range for n = {}",
            k.n()
        )));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    entropy_of(k, &sorted, &mut Vec::new())
}

pub fn full_entropy(k: &KernelMatrix) -> Result<f64> {
    let all: Vec<usize> = (0..k.n()).collect();
    subset_entropy(k, &all)
}

/// Entropy of the raw correlation matrix taken as a covariance, from its
/// eigenvalues.
///
/// Diagnostic only: returns `-inf` when the matrix is singular and `NaN`
/// when it is indefinite, which is what happens once two answers are fully
/// correlated.
pub fn raw_differential_entropy(c: &CorrelationMatrix) -> f64 {
    let n = c.n();
    let ev = linalg::symmetric_eigenvalues(n, c.as_slice());
    const ZERO: f64 = 1e-12;
    if ev.iter().any(|&v| v < -ZERO) {
        return f64::NAN;
    }
    if ev.iter().any(|&v| v <= ZERO) {
        return f64::NEG_INFINITY;
    }
    0.5 * (n as f64 * LN_2PI_E + ev.iter().map(|v| v.ln()).sum::<f64>())
}

/// All `2^n` subset entropies of one kernel matrix, indexed by bitmask.
#[derive(Debug, Clone)]
pub struct SubsetEntropyCache {
    n: usize,
    table: Vec<f64>,
}

impl SubsetEntropyCache {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entropy of the subset whose members are the set bits of `mask`.
    #[inline]
    pub fn get(&self, mask: usize) -> f64 {
        self.table[mask]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

pub fn build_cache(k: &KernelMatrix, max_n: usize) -> Result<SubsetEntropyCache> {
    require_certified(k)?;
    let n = k.n();
    let bound = max_n.min(MAX_EXACT_N);
    if n > bound {
        return Err(Error::TooLarge { n, bound });
    }
    let size = 1usize << n;
    let mut table = Vec::with_capacity(size);
    let mut idx = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(n * n);
    for mask in 0..size {
        idx.clear();
        idx.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        table.push(entropy_of(k, &idx, &mut buf)?);
    }

    // Conditioning cannot raise entropy above that of an independent dimension.
    #[cfg(debug_assertions)]
    for mask in (0..size).step_by(7) {
        for i in (0..n).filter(|&i| mask & (1 << i) == 0) {
            let gain = table[mask | (1 << i)] - table[mask];
            debug_assert!(
                gain <= 0.5 * LN_2PI_E + 1e-9,
                "mask {mask:#b} + {i}: {gain}"
            );
        }
    }

    Ok(SubsetEntropyCache { n, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::KernelKind;
    use crate::kernel::kernelize;

    const H1: f64 = 1.418_938_533_204_672_7;

    #[test]
    fn ln_2pi_e_constant() {
        let direct = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((LN_2PI_E - direct).abs() < 1e-15);
    }

    #[test]
    fn identity_entropies() {
        let k = KernelMatrix::identity(3);
        assert!((subset_entropy(&k, &[0, 1, 2]).unwrap() - 4.256_815_599_614_018_5).abs() < 1e-12);
        assert_eq!(subset_entropy(&k, &[]).unwrap(), 0.0);
        let k2 = KernelMatrix::identity(2);
        assert!((full_entropy(&k2).unwrap() - 2.837_877_066_409_345).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_matches_eigen_oracle() {
        let k = KernelMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]], 1e-10).unwrap();
        // Eigenvalues 1.5 and 0.5.
        let oracle = 0.5 * (2.0 * LN_2PI_E + 1.5f64.ln() + 0.5f64.ln());
        let got = full_entropy(&k).unwrap();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 2.694_036_030_183_455).abs() < 1e-12);
    }

    #[test]
    fn rejects_uncertified() {
        let k = KernelMatrix::from_rows(&[vec![1.0, 1.2], vec![1.2, 1.0]], 1e-10).unwrap();
        assert!(matches!(full_entropy(&k), Err(Error::NotCertified { .. })));
    }

    #[test]
    fn singular_certified_matrix_fails_factorization() {
        let k = KernelMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], 1e-10).unwrap();
        assert!(k.psd_certified());
        assert!(matches!(
            full_entropy(&k),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn cache_small_cases() {
        let c = build_cache(&KernelMatrix::identity(3), 12).unwrap();
        assert_eq!(c.len(), 8);
        for i in 0..3 {
            assert!((c.get(1 << i) - H1).abs() < 1e-12);
        }
        let c1 = build_cache(&KernelMatrix::identity(1), 12).unwrap();
        assert_eq!(c1.len(), 2);
        assert_eq!(c1.get(0), 0.0);
        assert!((c1.get(1) - H1).abs() < 1e-12);
    }

    #[test]
    fn cache_bound() {
        let k = KernelMatrix::identity(5);
        assert!(matches!(
            build_cache(&k, 4),
            Err(Error::TooLarge { n: 5, bound: 4 })
        ));
    }

    #[test]
    fn cache_n12_size() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                (0..12)
                    .map(|j| {
                        if i == j {
                            1.0
                        } else {
                            ((i * j) % 5) as f64 / 4.0
                        }
                    })
                    .collect()
            })
            .collect();
        let c = CorrelationMatrix::from_rows(&rows).unwrap();
        let k = kernelize(&c, 1.0 / 13.0, KernelKind::Gaussian, 1e-10).unwrap();
        assert_eq!(build_cache(&k, 12).unwrap().len(), 4096);
    }

    #[test]
    fn raw_entropy_degenerates_on_duplicates() {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 1.0, 0.2],
            vec![1.0, 1.0, 0.2],
            vec![0.2, 0.2, 1.0],
        ])
        .unwrap();
        assert!(!raw_differential_entropy(&c).is_finite());
        let k = kernelize(&c, 0.5, KernelKind::Gaussian, 1e-10).unwrap();
        assert!(full_entropy(&k).unwrap().is_finite());
        assert!(
            (raw_differential_entropy(&CorrelationMatrix::identity(2)) - LN_2PI_E).abs() < 1e-12
        );
    }
}
