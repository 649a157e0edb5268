//! Semantic uncertainty for sets of sampled language-model answers.
//!
//! Directed entailment probabilities between answers are averaged into a
//! correlation matrix, passed through a unit-diagonal Gaussian kernel that
//! guarantees positive semi-definiteness, and read as the covariance of a
//! multivariate Gaussian. Its differential entropy is split into per-answer
//! Shapley shares; their sum is the Shapley uncertainty of the answer set.
//!
//! ```
//! use semshap::{exact_shapley, kernelize, symmetrize, EntailmentMatrix, KernelKind};
//!
//! let e = EntailmentMatrix::new(
//!     "q",
//!     vec![vec![1.0, 1.0, 0.5], vec![1.0, 1.0, 0.5], vec![0.5, 0.5, 1.0]],
//! )
//! .unwrap();
//! let k = kernelize(&symmetrize(&e), 0.5, KernelKind::Gaussian, 1e-10).unwrap();
//! let report = exact_shapley(&k, 12).unwrap();
//! assert!((report.total - 3.962_692).abs() < 1e-6);
//! ```
//!
//! Baseline scores (predictive entropy, semantic entropy, lexical
//! similarity, token statistics) and an AUROC harness live alongside.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod data;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod kernel;
mod linalg;
pub mod properties;
pub mod shapley;
pub mod text;

pub use baselines::{
    lexical_similarity_score, predictive_entropy, semantic_clusters, semantic_entropy,
    sequence_logprob, token_stat, ClusterSet, PeEstimator, TokenStat,
};
pub use data::{
    load_entailments, load_generations, load_scores, validate_config, write_entailments,
    write_generations, write_scores, Config, EntailmentMatrix, GenerationRecord, KernelKind,
    Method, Sample, ScoreRecord, Task,
};
pub use entropy::{build_cache, full_entropy, subset_entropy, SubsetEntropyCache, LN_2PI_E};
pub use error::{Error, Result};
pub use eval::{
    auroc, available_methods, beta_sweep, evaluate, label_correctness, label_record, parse_grid,
    score_all, shapley_pipeline, Dataset, EvaluationResult, LabeledScore, ShapleyOutcome, SweepRow,
};
pub use kernel::{is_psd, kernelize, safe_beta, symmetrize, CorrelationMatrix, KernelMatrix};
pub use linalg::SYMMETRY_TOL;
pub use shapley::{
    exact_shapley, likelihood_weighted_total, mc_shapley, ShapleyMethod, ShapleyReport,
};
pub use text::{bleu, pairwise_mean_similarity, rouge_l, tokenize, TokenSeq};
