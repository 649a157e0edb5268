//! Batch scoring, correctness labeling, AUROC and the `beta` sweep.
//!
//! AUROC orientation: the probability that a uniformly drawn incorrect
//! answer scores strictly higher uncertainty than a uniformly drawn correct
//! one, ties counting one half. A perfect uncertainty score gets 1.0.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    lexical_similarity_score, predictive_entropy, semantic_clusters, semantic_entropy, token_stat,
    PeEstimator, TokenStat,
};
use crate::data::{
    check_beta, Config, EntailmentMatrix, GenerationRecord, Method, ScoreRecord, Task,
};
use crate::error::{Error, Result};
use crate::kernel::{kernelize, safe_beta, symmetrize};
use crate::shapley::{exact_shapley, mc_shapley, ShapleyReport};
use crate::text::{bleu, rouge_l};

/// Rouge-L (QA) or BLEU (MT) must exceed this for an answer to count as correct.
pub const CORRECTNESS_THRESHOLD: f64 = 0.3;

pub fn is_correct_score(similarity: f64) -> bool {
    similarity > CORRECTNESS_THRESHOLD
}

pub fn label_correctness(record: &GenerationRecord, answer: &str) -> bool {
    let metric = match record.task {
        Task::Qa => rouge_l,
        Task::Mt => bleu,
    };
    let best = record
        .references
        .iter()
        .map(|r| metric(answer, r))
        .fold(f64::NEG_INFINITY, f64::max);
    is_correct_score(best)
}

/// Labels the record's designated answer, `samples[0]`.
pub fn label_record(record: &GenerationRecord) -> bool {
    label_correctness(record, &record.samples[0].text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScore {
    pub id: String,
    pub method: Method,
    pub score: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub method: Method,
    pub auroc: f64,
    pub n_correct: usize,
    pub n_incorrect: usize,
}

/// Mann-Whitney AUROC via mid-ranks.
pub fn auroc(labeled: &[LabeledScore]) -> Result<f64> {
    let n_incorrect = labeled.iter().filter(|l| !l.correct).count();
    let n_correct = labeled.len() - n_incorrect;
    if n_correct == 0 || n_incorrect == 0 {
        return Err(Error::SingleClass {
            method: labeled
                .first()
                .map_or_else(|| "?".to_string(), |l| l.method.to_string()),
            n_correct,
            n_incorrect,
        });
    }
    if let Some(l) = labeled.iter().find(|l| !l.score.is_finite()) {
        return Err(Error::NonFinite {
            id: l.id.clone(),
            method: l.method.to_string(),
        });
    }
    let mut order: Vec<&LabeledScore> = labeled.iter().collect();
    order.sort_by(|a, b| a.score.total_cmp(&b.score));
    let mut rank_sum_incorrect = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && order[end].score == order[start].score {
            end += 1;
        }
        // Ranks start+1 ..= end share their mean.
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        let k = order[start..end].iter().filter(|l| !l.correct).count();
        rank_sum_incorrect += mid_rank * k as f64;
        start = end;
    }
    let ni = n_incorrect as f64;
    let u = rank_sum_incorrect - ni * (ni + 1.0) / 2.0;
    Ok(u / (ni * n_correct as f64))
}

/// Output of the Shapley pipeline for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyOutcome {
    pub report: ShapleyReport,
    /// `beta` actually used after the PSD safeguard.
    pub beta: f64,
}

/// `symmetrize -> safe_beta -> kernelize -> exact or sampled Shapley`.
///
/// Exact enumeration is used for `n <= config.mc_threshold_n`; larger
/// records use `config.mc_permutations` permutations seeded with `seed`.
pub fn shapley_pipeline(
    e: &EntailmentMatrix,
    config: &Config,
    seed: u64,
) -> Result<ShapleyOutcome> {
    let c = symmetrize(e);
    let beta = safe_beta(&c, config.beta, config.kernel, config.psd_tolerance)?;
    let k = kernelize(&c, beta, config.kernel, config.psd_tolerance)?;
    if !k.psd_certified() {
        return Err(Error::NotCertified {
            min_eigenvalue: k.min_eigenvalue(),
        });
    }
    let report = if k.n() <= config.mc_threshold_n {
        exact_shapley(&k, config.mc_threshold_n)?
    } else {
        mc_shapley(&k, config.mc_permutations, seed)?
    };
    Ok(ShapleyOutcome {
        report: report.with_id(e.id()),
        beta,
    })
}

/// Per-record seed for sampled Shapley, so results do not depend on
/// scheduling or on which other records are present.
pub fn record_seed(base: u64, id: &str) -> u64 {
    // FNV-1a over the id, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = base ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn score_one(
    record: &GenerationRecord,
    entailment: Option<&EntailmentMatrix>,
    config: &Config,
    method: Method,
) -> Result<ScoreRecord> {
    let need_entailment = || entailment.ok_or_else(|| Error::MissingEntailment(record.id.clone()));
    let mut detail = None;
    let mut method_used = method;
    let score = match method {
        Method::Shapley | Method::ShapleyMc => {
            let out = shapley_pipeline(
                need_entailment()?,
                config,
                record_seed(config.rng_seed, &record.id),
            )?;
            method_used = match out.report.method {
                crate::shapley::ShapleyMethod::Exact => Method::Shapley,
                crate::shapley::ShapleyMethod::MonteCarlo => Method::ShapleyMc,
            };
            detail = Some(out.report.per_element);
            out.report.total
        }
        Method::Pe => predictive_entropy(record, false, PeEstimator::Discrete)?,
        Method::Lnpe => predictive_entropy(record, true, PeEstimator::Discrete)?,
        Method::Lexsim => lexical_similarity_score(record)?,
        Method::Se => {
            let clusters = semantic_clusters(record, need_entailment()?, config.se_threshold)?;
            semantic_entropy(&clusters)
        }
        Method::Maxl => token_stat(record, TokenStat::MaxL)?,
        Method::Avgl => token_stat(record, TokenStat::AvgL)?,
        Method::Maxe => token_stat(record, TokenStat::MaxE)?,
        Method::Avge => token_stat(record, TokenStat::AvgE)?,
    };
    if !score.is_finite() {
        return Err(Error::NonFinite {
            id: record.id.clone(),
            method: method_used.to_string(),
        });
    }
    Ok(ScoreRecord {
        id: record.id.clone(),
        method: method_used,
        score,
        detail,
    })
}

/// Methods computable for `records`: entailment-based methods only when
/// matrices are supplied, token-entropy statistics only when every sample
/// carries entropies.
pub fn available_methods(records: &[GenerationRecord], with_entailments: bool) -> Vec<Method> {
    let has_entropies = records
        .iter()
        .all(|r| r.samples.iter().all(|s| s.token_entropies.is_some()));
    Method::ALL
        .into_iter()
        .filter(|m| with_entailments || !m.needs_entailment())
        .filter(|m| has_entropies || !m.needs_token_entropies())
        .collect()
}

/// Scores every `(record, method)` pair. Output is record-major in input
/// order, methods in the order given. Records are processed in parallel.
pub fn score_all(
    records: &[GenerationRecord],
    entailments: &BTreeMap<String, EntailmentMatrix>,
    config: &Config,
    methods: &[Method],
) -> Result<Vec<ScoreRecord>> {
    config.validate()?;
    let per_record: Vec<Result<Vec<ScoreRecord>>> = records
        .par_iter()
        .map(|r| {
            let e = entailments.get(&r.id);
            methods
                .iter()
                .map(|&m| score_one(r, e, config, m))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(records.len() * methods.len());
    for r in per_record {
        out.extend(r?);
    }
    Ok(out)
}

/// Joins scores with correctness labels and computes one AUROC per method
/// family (`shapley_mc` rows count as `shapley`).
pub fn evaluate(
    records: &[GenerationRecord],
    scores: &[ScoreRecord],
) -> Result<Vec<EvaluationResult>> {
    let labels: HashMap<&str, bool> = records
        .iter()
        .map(|r| (r.id.as_str(), label_record(r)))
        .collect();
    let mut by_method: BTreeMap<Method, Vec<LabeledScore>> = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    for s in scores {
        let correct = *labels
            .get(s.id.as_str())
            .ok_or_else(|| Error::UnknownId(s.id.clone()))?;
        let method = s.method.family();
        if !seen.insert((s.id.as_str(), method)) {
            return Err(Error::DuplicateId(format!("{} ({method})", s.id)));
        }
        by_method.entry(method).or_default().push(LabeledScore {
            id: s.id.clone(),
            method,
            score: s.score,
            correct,
        });
    }
    by_method
        .into_iter()
        .map(|(method, labeled)| {
            let n_correct = labeled.iter().filter(|l| l.correct).count();
            Ok(EvaluationResult {
                method,
                auroc: auroc(&labeled)?,
                n_correct,
                n_incorrect: labeled.len() - n_correct,
            })
        })
        .collect()
}

/// One evaluation corpus: generations plus their entailment matrices.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub records: Vec<GenerationRecord>,
    pub entailments: BTreeMap<String, EntailmentMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub mean_auroc: f64,
}

/// Shapley AUROC for each `beta` in `grid`, averaged over `datasets`.
pub fn beta_sweep(datasets: &[Dataset], grid: &[f64], config: &Config) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("beta grid is empty".into()));
    }
    if datasets.is_empty() {
        return Err(Error::Invalid("no datasets to sweep over".into()));
    }
    for &b in grid {
        check_beta(b)?;
    }
    grid.iter()
        .map(|&beta| {
            let cfg = Config {
                beta,
                ..config.clone()
            };
            let mut sum = 0.0;
            for d in datasets {
                let scores = score_all(&d.records, &d.entailments, &cfg, &[Method::Shapley])?;
                let res = evaluate(&d.records, &scores)?;
                sum += res[0].auroc;
            }
            Ok(SweepRow {
                beta,
                mean_auroc: sum / datasets.len() as f64,
            })
        })
        .collect()
}

/// Parses `start:stop:step`, inclusive of `stop` within floating tolerance.
/// Every value must lie in `(0, 1]`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("grid must be start:stop:step, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    for &b in &grid {
        check_beta(b)?;
    }
    Ok(grid)
}
