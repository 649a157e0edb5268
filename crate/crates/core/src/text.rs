//! Sentence-level Rouge-L and BLEU on a single frozen tokenizer.
//!
//! Tokenization: lowercase, split on whitespace, strip leading and trailing
//! ASCII/Unicode punctuation from each token, drop tokens left empty. No
//! stemming.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || (!c.is_alphanumeric() && !c.is_whitespace())
}

pub fn tokenize(s: &str) -> TokenSeq {
    let tokens = s
        .to_lowercase()
        .split_whitespace()
        .map(|t| t.trim_matches(is_punct))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    TokenSeq { tokens }
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Rouge-L F1 from longest-common-subsequence precision and recall.
pub fn rouge_l(candidate: &str, reference: &str) -> f64 {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    if c.is_empty() || r.is_empty() {
        return 0.0;
    }
    let lcs = lcs_len(&c.tokens, &r.tokens) as f64;
    if lcs == 0.0 {
        return 0.0;
    }
    let p = lcs / c.len() as f64;
    let rec = lcs / r.len() as f64;
    2.0 * p * rec / (p + rec)
}

fn ngram_counts(tokens: &[String], order: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= order {
        for w in tokens.windows(order) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

pub const BLEU_MAX_ORDER: usize = 4;

/// Sentence BLEU with uniform weights over orders 1..=4 and a brevity
/// penalty. A zero match count at order `>= 2` is smoothed to
/// `1 / (total + 1)`; a zero unigram match yields 0.
pub fn bleu(candidate: &str, reference: &str) -> f64 {
    let c = tokenize(candidate);
    let r = tokenize(reference);
    if c.is_empty() || r.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for order in 1..=BLEU_MAX_ORDER {
        let cand = ngram_counts(&c.tokens, order);
        let refc = ngram_counts(&r.tokens, order);
        let total: usize = cand.values().sum();
        let matched: usize = cand
            .iter()
            .map(|(g, &cnt)| cnt.min(refc.get(g).copied().unwrap_or(0)))
            .sum();
        let precision = if matched > 0 {
            matched as f64 / total as f64
        } else if order == 1 {
            return 0.0;
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
    }
    let (cl, rl) = (c.len() as f64, r.len() as f64);
    let bp = if cl < rl { (1.0 - rl / cl).exp() } else { 1.0 };
    bp * (log_sum / BLEU_MAX_ORDER as f64).exp()
}

/// Mean Rouge-L over all unordered pairs.
pub fn pairwise_mean_similarity<S: AsRef<str>>(samples: &[S]) -> Result<f64> {
    pairwise_mean_by(samples, |a, b| rouge_l(a.as_ref(), b.as_ref()))
}

/// Mean of `sim` over all unordered pairs.
pub fn pairwise_mean_by<T>(samples: &[T], mut sim: impl FnMut(&T, &T) -> f64) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "pairwise similarity needs at least 2 samples, got {n}"
        )));
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += sim(&samples[i], &samples[j]);
            pairs += 1;
        }
    }
    Ok(sum / pairs as f64)
}
