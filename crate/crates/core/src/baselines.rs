//! Comparison uncertainty scores computable from sampled answers alone.
//!
//! Every score here is oriented so that larger means more uncertain.

use crate::data::{EntailmentMatrix, GenerationRecord, Sample};
use crate::error::{Error, Result};
use crate::text::pairwise_mean_similarity;

/// Joint log-probability of a sample, divided by its length when `normalized`.
pub fn sequence_logprob(sample: &Sample, normalized: bool) -> Result<f64> {
    let lp = &sample.token_logprobs;
    if lp.is_empty() {
        return Err(Error::Invalid(format!(
            "sample `{}` has no token log-probabilities",
            sample.text
        )));
    }
    let sum: f64 = lp.iter().sum();
    Ok(if normalized {
        sum / lp.len() as f64
    } else {
        sum
    })
}

fn sequence_logprobs(record: &GenerationRecord, normalized: bool) -> Result<Vec<f64>> {
    record
        .samples
        .iter()
        .map(|s| sequence_logprob(s, normalized))
        .collect::<Result<_>>()
        .map_err(|e| Error::InvalidRecord {
            id: record.id.clone(),
            message: e.to_string(),
        })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeEstimator {
    /// Entropy of the sample likelihoods renormalized to a distribution.
    #[default]
    Discrete,
    /// `-(1/n) * sum_i ln p(s_i | x)`.
    MonteCarlo,
}

pub fn predictive_entropy(
    record: &GenerationRecord,
    normalized: bool,
    estimator: PeEstimator,
) -> Result<f64> {
    let lps = sequence_logprobs(record, normalized)?;
    match estimator {
        PeEstimator::MonteCarlo => Ok(-lps.iter().sum::<f64>() / lps.len() as f64),
        PeEstimator::Discrete => {
            let lse = log_sum_exp(&lps);
            if !lse.is_finite() {
                return Err(Error::InvalidRecord {
                    id: record.id.clone(),
                    message: "all sample probabilities are zero".into(),
                });
            }
            Ok(-lps
                .iter()
                .map(|lp| {
                    let log_p = lp - lse;
                    log_p.exp() * log_p
                })
                .sum::<f64>())
        }
    }
}

/// Meaning clusters over sample indices with their normalized masses.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub clusters: Vec<Vec<usize>>,
    pub probs: Vec<f64>,
}

/// Greedy bidirectional-entailment clustering in sample order.
///
/// Each sample joins the first cluster whose founding member it entails
/// and is entailed by with probability at least `t`; otherwise it founds a
/// new cluster. Cluster mass is the sum of length-normalized sample
/// likelihoods, renormalized over clusters.
pub fn semantic_clusters(
    record: &GenerationRecord,
    e: &EntailmentMatrix,
    t: f64,
) -> Result<ClusterSet> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Config(format!(
            "threshold must lie in (0, 1], got {t}"
        )));
    }
    let n = record.n();
    if e.n() != n {
        return Err(Error::ShapeMismatch {
            id: record.id.clone(),
            expected: n,
            found: format!("{0}x{0}", e.n()),
        });
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let home = clusters.iter_mut().find(|c| {
            let rep = c[0];
            e.get(i, rep) >= t && e.get(rep, i) >= t
        });
        match home {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    let lps = sequence_logprobs(record, true)?;
    let lse = log_sum_exp(&lps);
    let probs = clusters
        .iter()
        .map(|c| c.iter().map(|&i| (lps[i] - lse).exp()).sum::<f64>())
        .collect::<Vec<_>>();
    let total: f64 = probs.iter().sum();
    let probs = probs.into_iter().map(|p| p / total).collect();
    Ok(ClusterSet { clusters, probs })
}

/// `-sum_C P(C) ln P(C)`.
pub fn semantic_entropy(clusters: &ClusterSet) -> f64 {
    let h: f64 = clusters
        .probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    // A single cluster gives -0.0 otherwise.
    h + 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenStat {
    /// Mean over samples of the largest token negative log-probability.
    MaxL,
    /// Mean over samples of the mean token negative log-probability.
    AvgL,
    /// Mean over samples of the largest token entropy.
    MaxE,
    /// Mean over samples of the mean token entropy.
    AvgE,
}

pub fn token_stat(record: &GenerationRecord, mode: TokenStat) -> Result<f64> {
    let unavailable = |reason: String| Error::Unavailable {
        method: format!("{mode:?}").to_lowercase(),
        id: record.id.clone(),
        reason,
    };
    let mut acc = 0.0;
    for (i, s) in record.samples.iter().enumerate() {
        let values: Vec<f64> = match mode {
            TokenStat::MaxL | TokenStat::AvgL => s.token_logprobs.iter().map(|lp| -lp).collect(),
            TokenStat::MaxE | TokenStat::AvgE => s
                .token_entropies
                .clone()
                .ok_or_else(|| unavailable(format!("sample {i} has no token_entropies")))?,
        };
        if values.is_empty() {
            return Err(unavailable(format!("sample {i} has no tokens")));
        }
        acc += match mode {
            TokenStat::MaxL | TokenStat::MaxE => values.iter().copied().fold(f64::MIN, f64::max),
            TokenStat::AvgL | TokenStat::AvgE => values.iter().sum::<f64>() / values.len() as f64,
        };
    }
    Ok(acc / record.n() as f64)
}

/// Negated mean pairwise Rouge-L among the samples.
pub fn lexical_similarity_score(record: &GenerationRecord) -> Result<f64> {
    let texts: Vec<&str> = record.samples.iter().map(|s| s.text.as_str()).collect();
    pairwise_mean_similarity(&texts)
        .map(|m| -m)
        .map_err(|e| Error::InvalidRecord {
            id: record.id.clone(),
            message: e.to_string(),
        })
}
