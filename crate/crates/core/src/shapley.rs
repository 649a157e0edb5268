//! Shapley attribution of Gaussian differential entropy to individual answers.
//!
//! The game has one player per answer and value function `v(S) = h(S)`,
//! the entropy of the kernel-matrix marginal on `S`. Each answer's share is
//!
//! ```text
//! phi_i = sum_{S not containing i} |S|! (n - |S| - 1)! / n! * (h(S + i) - h(S))
//! ```
//!
//! and the Shapley uncertainty is `sum_i phi_i`, which equals `h(all)` by
//! the efficiency axiom. For `n` up to the exact bound every subset entropy
//! is cached once; above it, marginals are averaged over uniformly random
//! permutations, each evaluated with a single growing Cholesky factor.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{build_cache, SubsetEntropyCache, LN_2PI_E};
use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;
use crate::linalg::GrowingCholesky;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapleyMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleyReport {
    pub id: String,
    /// Per-answer share, nats.
    pub per_element: Vec<f64>,
    /// Sum of `per_element`, nats.
    pub total: f64,
    pub method: ShapleyMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<Vec<f64>>,
}

impl ShapleyReport {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn n(&self) -> usize {
        self.per_element.len()
    }

    /// Index of the smallest share; ties resolve to the lowest index.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.per_element.iter().enumerate() {
            if *v < self.per_element[best] {
                best = i;
            }
        }
        best
    }
}

/// `|S|! (n - |S| - 1)! / n!` for `|S| = 0..n`.
fn coalition_weights(n: usize) -> Vec<f64> {
    // 1 / (n * C(n-1, s)), built multiplicatively.
    let mut w = Vec::with_capacity(n);
    let mut binom = 1.0f64;
    for s in 0..n {
        w.push(1.0 / (n as f64 * binom));
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }
    w
}

pub fn shapley_from_cache(cache: &SubsetEntropyCache) -> ShapleyReport {
    let n = cache.n();
    let w = coalition_weights(n);
    let mut phi = vec![0.0; n];
    for mask in 0..(1usize << n) {
        let base = cache.get(mask);
        let weight = if n > 0 {
            w.get(mask.count_ones() as usize).copied().unwrap_or(0.0)
        } else {
            0.0
        };
        for (i, p) in phi.iter_mut().enumerate() {
            if mask & (1 << i) == 0 {
                *p += weight * (cache.get(mask | (1 << i)) - base);
            }
        }
    }
    let total = phi.iter().sum();
    ShapleyReport {
        id: String::new(),
        per_element: phi,
        total,
        method: ShapleyMethod::Exact,
        mc_stderr: None,
    }
}

/// Exact Shapley shares by enumerating all `2^n` coalitions.
pub fn exact_shapley(k: &KernelMatrix, max_n: usize) -> Result<ShapleyReport> {
    Ok(shapley_from_cache(&build_cache(k, max_n)?))
}

/// Permutation-sampling estimate of the Shapley shares, deterministic in `seed`.
pub fn mc_shapley(k: &KernelMatrix, permutations: usize, seed: u64) -> Result<ShapleyReport> {
    if !k.psd_certified() {
        return Err(Error::NotCertified {
            min_eigenvalue: k.min_eigenvalue(),
        });
    }
    if permutations == 0 {
        return Err(Error::Invalid(
            "at least one permutation is required".into(),
        ));
    }
    let n = k.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut chol = GrowingCholesky::new(n, k.as_slice());
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..permutations {
        order.shuffle(&mut rng);
        chol.clear();
        for &i in &order {
            let cond_var = chol.push(i)?;
            let marginal = 0.5 * (LN_2PI_E + cond_var.ln());
            sum[i] += marginal;
            sum_sq[i] += marginal * marginal;
        }
    }
    let p = permutations as f64;
    let per_element: Vec<f64> = sum.iter().map(|s| s / p).collect();
    let mc_stderr = per_element
        .iter()
        .zip(&sum_sq)
        .map(|(mean, sq)| {
            if permutations < 2 {
                return 0.0;
            }
            let var = ((sq - p * mean * mean) / (p - 1.0)).max(0.0);
            (var / p).sqrt()
        })
        .collect();
    let total = per_element.iter().sum();
    Ok(ShapleyReport {
        id: String::new(),
        per_element,
        total,
        method: ShapleyMethod::MonteCarlo,
        mc_stderr: Some(mc_stderr),
    })
}

/// Experimental likelihood-weighted variant: `n * sum_i p_i * phi_i` with
/// `p` normalized to sum to one. Uniform weights reproduce `report.total`.
pub fn likelihood_weighted_total(report: &ShapleyReport, probs: &[f64]) -> Result<f64> {
    let n = report.n();
    if probs.len() != n {
        return Err(Error::Invalid(format!(
            "expected {n} probabilities, got {}",
            probs.len()
        )));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Invalid(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let mass: f64 = probs.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::Invalid("probabilities must not all be zero".into()));
    }
    let weighted: f64 = probs
        .iter()
        .zip(&report.per_element)
        .map(|(p, phi)| p / mass * phi)
        .sum();
    Ok(n as f64 * weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::KernelKind;
    use crate::entropy::full_entropy;
    use crate::kernel::{kernelize, CorrelationMatrix};

    const H1: f64 = 1.418_938_533_204_672_7;

    fn two_plus_one() -> KernelMatrix {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 1.0, 0.5],
            vec![1.0, 1.0, 0.5],
            vec![0.5, 0.5, 1.0],
        ])
        .unwrap();
        kernelize(&c, 0.5, KernelKind::Gaussian, 1e-10).unwrap()
    }

    #[test]
    fn weights_match_factorials() {
        let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
        for n in 1..10 {
            let w = coalition_weights(n);
            for (s, ws) in w.iter().enumerate() {
                let expect = fact(s) * fact(n - s - 1) / fact(n);
                assert!((ws - expect).abs() < 1e-15 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn identity_splits_evenly() {
        let r = exact_shapley(&KernelMatrix::identity(2), 12).unwrap();
        for v in &r.per_element {
            assert!((v - H1).abs() < 1e-12);
        }
        assert!((r.total - 2.837_877_066_409_345).abs() < 1e-12);
        assert_eq!(r.method, ShapleyMethod::Exact);
    }

    #[test]
    fn symmetric_pair_splits_full_entropy() {
        let k = KernelMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]], 1e-10).unwrap();
        let r = exact_shapley(&k, 12).unwrap();
        assert!((r.per_element[0] - 1.347_018_015_091_727_5).abs() < 1e-9);
        assert_eq!(r.per_element[0], r.per_element[1]);
        assert!((r.total - 2.694_036_030_183_455).abs() < 1e-12);
    }

    #[test]
    fn two_plus_one_structure() {
        let k = two_plus_one();
        let r = exact_shapley(&k, 12).unwrap();
        assert!((r.total - full_entropy(&k).unwrap()).abs() < 1e-12);
        assert!((r.per_element[0] - r.per_element[1]).abs() < 1e-12);
        assert!(r.per_element[0] < r.per_element[2]);
    }

    #[test]
    fn exact_respects_bound() {
        assert!(matches!(
            exact_shapley(&KernelMatrix::identity(4), 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn mc_single_player() {
        let r = mc_shapley(&KernelMatrix::identity(1), 3, 9).unwrap();
        assert!((r.per_element[0] - H1).abs() < 1e-12);
        assert_eq!(r.mc_stderr.as_deref(), Some(&[0.0][..]));
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let k = two_plus_one();
        let a = mc_shapley(&k, 500, 42).unwrap();
        let b = mc_shapley(&k, 500, 42).unwrap();
        assert_eq!(a, b);
        let c = mc_shapley(&k, 500, 43).unwrap();
        assert_ne!(a.per_element, c.per_element);
    }

    #[test]
    fn mc_total_telescopes_to_full_entropy() {
        let k = two_plus_one();
        let r = mc_shapley(&k, 200, 1).unwrap();
        assert!((r.total - full_entropy(&k).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn weighted_total_cases() {
        let r = exact_shapley(&two_plus_one(), 12).unwrap();
        let uniform = likelihood_weighted_total(&r, &[1.0, 1.0, 1.0]).unwrap();
        assert!((uniform - r.total).abs() < 1e-12);
        let point = likelihood_weighted_total(&r, &[2.0, 0.0, 0.0]).unwrap();
        assert!((point - 3.0 * r.per_element[0]).abs() < 1e-12);
        // Direct evaluation of 3 * (0.5 phi_0 + 0.4 phi_1 + 0.1 phi_2).
        let direct =
            3.0 * (0.5 * r.per_element[0] + 0.4 * r.per_element[1] + 0.1 * r.per_element[2]);
        let got = likelihood_weighted_total(&r, &[0.5, 0.4, 0.1]).unwrap();
        assert!((got - direct).abs() < 1e-12);
        assert!((got - 3.950_242_287_869_477).abs() < 1e-6);
        assert!(likelihood_weighted_total(&r, &[0.0, 0.0, 0.0]).is_err());
        assert!(likelihood_weighted_total(&r, &[1.0]).is_err());
    }
}
