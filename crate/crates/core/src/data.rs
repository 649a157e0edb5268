//! Data model and newline-delimited JSON ingestion.
//!
//! Three wire formats are handled here, one JSON object per line:
//!
//! - generations: `{"id", "question", "references", "task", "samples"}`
//! - entailments: `{"id", "n", "p_entail"}` with `p_entail[i][j] = P(s_i => s_j | x)`
//! - scores: `{"id", "method", "score", "detail"?}`
//!
//! Blank lines are ignored. Every loader validates the full set of record
//! invariants before returning, and reports the offending line on failure.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sampled answer with its per-token statistics (natural log).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub text: String,
    pub token_logprobs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_entropies: Option<Vec<f64>>,
}

impl Sample {
    pub fn new(text: impl Into<String>, token_logprobs: Vec<f64>) -> Self {
        Self {
            text: text.into(),
            token_logprobs,
            token_entropies: None,
        }
    }

    pub fn with_entropies(mut self, token_entropies: Vec<f64>) -> Self {
        self.token_entropies = Some(token_entropies);
        self
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if let Some(lp) = self.token_logprobs.iter().find(|lp| !(**lp <= 0.0)) {
            return Err(format!(
                "token log-probability {lp} must be finite and <= 0"
            ));
        }
        if self.token_logprobs.iter().any(|lp| lp.is_infinite()) {
            return Err("token log-probability must be finite".into());
        }
        if let Some(ent) = &self.token_entropies {
            if ent.len() != self.token_logprobs.len() {
                return Err(format!(
                    "token_entropies has {} entries but token_logprobs has {}",
                    ent.len(),
                    self.token_logprobs.len()
                ));
            }
            if let Some(e) = ent.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
                return Err(format!("token entropy {e} must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Question answering, labeled with Rouge-L.
    Qa,
    /// Machine translation, labeled with BLEU.
    Mt,
}

/// A question with its `n >= 1` sampled answers.
///
/// Sample order is the canonical index order of every matrix built for
/// this record. `samples[0]` is the answer that gets labeled for
/// correctness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub id: String,
    pub question: String,
    pub references: Vec<String>,
    pub task: Task,
    pub samples: Vec<Sample>,
}

impl GenerationRecord {
    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::InvalidRecord {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(Error::Invalid("record id must be non-empty".into()));
        }
        if self.references.is_empty() {
            return Err(invalid("references must be non-empty".into()));
        }
        if self.samples.is_empty() {
            return Err(invalid("at least one sample is required".into()));
        }
        for (i, s) in self.samples.iter().enumerate() {
            s.validate()
                .map_err(|m| invalid(format!("sample {i}: {m}")))?;
        }
        Ok(())
    }
}

/// Directed entailment probabilities for one record, row-major.
///
/// Entry `(i, j)` is `P(s_i => s_j | x)`. The diagonal is always 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EntailmentMatrix {
    id: String,
    n: usize,
    p: Vec<f64>,
}

impl EntailmentMatrix {
    /// Builds a validated matrix from rows. Diagonal values are overwritten with 1.
    pub fn new(id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::from_wire(EntailmentWire {
            id: id.into(),
            n: None,
            p_entail: rows,
        })
    }

    fn from_wire(w: EntailmentWire) -> Result<Self> {
        let n = w.p_entail.len();
        let shape_err = |found: String| Error::ShapeMismatch {
            id: w.id.clone(),
            expected: w.n.unwrap_or(n),
            found,
        };
        if n == 0 {
            return Err(shape_err("an empty matrix".into()));
        }
        if let Some(declared) = w.n {
            if declared != n {
                return Err(shape_err(format!("{n} rows")));
            }
        }
        let mut p = Vec::with_capacity(n * n);
        for (i, row) in w.p_entail.iter().enumerate() {
            if row.len() != n {
                return Err(shape_err(format!("row {i} of length {}", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                if i == j {
                    p.push(1.0);
                    continue;
                }
                let v = v.ok_or_else(|| Error::OutOfRange {
                    id: w.id.clone(),
                    row: i,
                    col: j,
                    value: f64::NAN,
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRange {
                        id: w.id.clone(),
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                p.push(v);
            }
        }
        Ok(Self { id: w.id, n, p })
    }

    /// The `n x n` identity pattern: every answer entails only itself.
    pub fn identity(id: impl Into<String>, n: usize) -> Self {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0;
        }
        Self {
            id: id.into(),
            n,
            p,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn to_wire(&self) -> EntailmentWire {
        EntailmentWire {
            id: self.id.clone(),
            n: Some(self.n),
            p_entail: self
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EntailmentWire {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    // `null` is accepted on the diagonal only.
    p_entail: Vec<Vec<Option<f64>>>,
}

/// Scoring method identifiers as they appear in score and report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Shapley,
    ShapleyMc,
    Pe,
    Lnpe,
    Lexsim,
    Se,
    Maxl,
    Avgl,
    Maxe,
    Avge,
}

impl Method {
    /// Every method computable from the ingestion schema, in report order.
    /// `ShapleyMc` is not listed: it is chosen per record by `Shapley`.
    pub const ALL: [Method; 9] = [
        Method::Shapley,
        Method::Pe,
        Method::Lnpe,
        Method::Lexsim,
        Method::Se,
        Method::Maxl,
        Method::Avgl,
        Method::Maxe,
        Method::Avge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Shapley => "shapley",
            Method::ShapleyMc => "shapley_mc",
            Method::Pe => "pe",
            Method::Lnpe => "lnpe",
            Method::Lexsim => "lexsim",
            Method::Se => "se",
            Method::Maxl => "maxl",
            Method::Avgl => "avgl",
            Method::Maxe => "maxe",
            Method::Avge => "avge",
        }
    }

    /// Methods that read the entailment matrix.
    pub fn needs_entailment(self) -> bool {
        matches!(self, Method::Shapley | Method::ShapleyMc | Method::Se)
    }

    pub fn needs_token_entropies(self) -> bool {
        matches!(self, Method::Maxe | Method::Avge)
    }

    /// The reporting family: exact and sampled Shapley scores are one method.
    pub fn family(self) -> Method {
        match self {
            Method::ShapleyMc => Method::Shapley,
            m => m,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim().to_ascii_lowercase().as_str() {
            "shapley" => Method::Shapley,
            "shapley_mc" => Method::ShapleyMc,
            "pe" => Method::Pe,
            "lnpe" => Method::Lnpe,
            "lexsim" => Method::Lexsim,
            "se" => Method::Se,
            "maxl" => Method::Maxl,
            "avgl" => Method::Avgl,
            "maxe" => Method::Maxe,
            "avge" => Method::Avge,
            "ptrue" | "p_true" | "a4c" => return Err(Error::UnsupportedMethod(s.into())),
            _ => return Err(Error::UnknownMethod(s.into())),
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub id: String,
    pub method: Method,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `k(d) = exp(-d^2 / 2)` on the distance `d = 1 - c`.
    Gaussian,
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelKind::Gaussian),
            other => Err(Error::Config(format!("unknown kernel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub beta: f64,
    pub kernel: KernelKind,
    pub se_threshold: f64,
    pub psd_tolerance: f64,
    /// Largest `n` scored by exact subset enumeration.
    pub mc_threshold_n: usize,
    pub mc_permutations: usize,
    pub rng_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            beta: 0.5,
            kernel: KernelKind::Gaussian,
            se_threshold: 0.5,
            psd_tolerance: 1e-10,
            mc_threshold_n: 12,
            mc_permutations: 20_000,
            rng_seed: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if !(self.se_threshold > 0.0 && self.se_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "se_threshold must lie in (0, 1], got {}",
                self.se_threshold
            )));
        }
        if !(self.psd_tolerance >= 0.0 && self.psd_tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "psd_tolerance must be a non-negative finite number, got {}",
                self.psd_tolerance
            )));
        }
        if self.mc_threshold_n == 0 {
            return Err(Error::Config("mc_threshold_n must be positive".into()));
        }
        if self.mc_threshold_n > crate::entropy::MAX_EXACT_N {
            return Err(Error::Config(format!(
                "mc_threshold_n must be at most {}",
                crate::entropy::MAX_EXACT_N
            )));
        }
        if self.mc_permutations == 0 {
            return Err(Error::Config("mc_permutations must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "beta must lie in (0, 1], got {beta}"
        )))
    }
}

/// Builds a [`Config`] from string key-value pairs, filling defaults.
pub fn validate_config(raw: &BTreeMap<String, String>) -> Result<Config> {
    fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
        v.trim()
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse {key} = `{v}`")))
    }

    let mut cfg = Config::default();
    for (key, value) in raw {
        match key.as_str() {
            "beta" => cfg.beta = num(key, value)?,
            "kernel" => cfg.kernel = value.parse()?,
            "se_threshold" => cfg.se_threshold = num(key, value)?,
            "psd_tolerance" => cfg.psd_tolerance = num(key, value)?,
            "mc_threshold_n" => cfg.mc_threshold_n = num(key, value)?,
            "mc_permutations" => cfg.mc_permutations = num(key, value)?,
            "rng_seed" => cfg.rng_seed = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push((idx + 1, value));
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn at_line(path: &Path, line: usize, e: Error) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: e.to_string(),
    }
}

/// Loads and validates a generations file, preserving file order.
pub fn load_generations(path: impl AsRef<Path>) -> Result<Vec<GenerationRecord>> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (line, rec) in read_jsonl::<GenerationRecord>(path)? {
        rec.validate().map_err(|e| at_line(path, line, e))?;
        if !seen.insert(rec.id.clone()) {
            return Err(at_line(path, line, Error::DuplicateId(rec.id)));
        }
        records.push(rec);
    }
    Ok(records)
}

pub fn write_generations(path: impl AsRef<Path>, records: &[GenerationRecord]) -> Result<()> {
    write_jsonl(path.as_ref(), records)
}

/// Loads entailment matrices and checks each against its generation record.
pub fn load_entailments(
    path: impl AsRef<Path>,
    records: &[GenerationRecord],
) -> Result<BTreeMap<String, EntailmentMatrix>> {
    let path = path.as_ref();
    let sizes: BTreeMap<&str, usize> = records.iter().map(|r| (r.id.as_str(), r.n())).collect();
    let mut out = BTreeMap::new();
    for (line, wire) in read_jsonl::<EntailmentWire>(path)? {
        let Some(&n) = sizes.get(wire.id.as_str()) else {
            return Err(at_line(path, line, Error::UnknownId(wire.id)));
        };
        let m = EntailmentMatrix::from_wire(wire).map_err(|e| at_line(path, line, e))?;
        if m.n() != n {
            let err = Error::ShapeMismatch {
                id: m.id.clone(),
                expected: n,
                found: format!("{0}x{0}", m.n()),
            };
            return Err(at_line(path, line, err));
        }
        if out.contains_key(m.id()) {
            return Err(at_line(path, line, Error::DuplicateId(m.id)));
        }
        out.insert(m.id.clone(), m);
    }
    Ok(out)
}

pub fn write_entailments(path: impl AsRef<Path>, matrices: &[EntailmentMatrix]) -> Result<()> {
    let wire: Vec<_> = matrices.iter().map(EntailmentMatrix::to_wire).collect();
    write_jsonl(path.as_ref(), &wire)
}

/// Writes scores one per line. Non-finite scores are rejected before
/// anything is written.
pub fn write_scores(path: impl AsRef<Path>, scores: &[ScoreRecord]) -> Result<()> {
    for s in scores {
        let finite_detail = s
            .detail
            .as_ref()
            .is_none_or(|d| d.iter().all(|v| v.is_finite()));
        if !s.score.is_finite() || !finite_detail {
            return Err(Error::NonFinite {
                id: s.id.clone(),
                method: s.method.to_string(),
            });
        }
    }
    write_jsonl(path.as_ref(), scores)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>> {
    let path = path.as_ref();
    read_jsonl::<ScoreRecord>(path)?
        .into_iter()
        .map(|(line, s)| {
            if s.score.is_finite() {
                Ok(s)
            } else {
                let err = Error::NonFinite {
                    id: s.id,
                    method: s.method.to_string(),
                };
                Err(at_line(path, line, err))
            }
        })
        .collect()
}
