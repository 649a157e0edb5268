use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use semshap::entropy::raw_differential_entropy;
use semshap::{
    available_methods, beta_sweep, evaluate, kernelize, load_entailments, load_generations,
    load_scores, parse_grid, safe_beta, score_all, symmetrize, write_scores, Config, Dataset,
    EntailmentMatrix, GenerationRecord, Method,
};
use serde::Serialize;

use crate::{Cli, Command, EvalArgs, Format, KernelArgs, PsdArgs, ScoreArgs, SweepArgs};

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Score(a) => cmd_score(&a, stdout),
        Command::Eval(a) => cmd_eval(&a, stdout),
        Command::SweepBeta(a) => cmd_sweep_beta(&a, stdout),
        Command::PsdCheck(a) => cmd_psd_check(&a, stdout),
    }
}

/// Parses `--method`: a comma list, or `all` for every method the inputs
/// support. Duplicates are dropped, first occurrence wins.
pub fn parse_methods(
    spec: &str,
    records: &[GenerationRecord],
    with_entailments: bool,
) -> Result<Vec<Method>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(available_methods(records, with_entailments));
    }
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    ensure!(!out.is_empty(), "no methods given");
    Ok(out)
}

fn config_from(kernel: &KernelArgs, beta: f64, se_threshold: f64) -> Result<Config> {
    let cfg = Config {
        beta,
        kernel: kernel.kernel,
        se_threshold,
        mc_threshold_n: kernel.mc_threshold,
        mc_permutations: kernel.mc_permutations,
        rng_seed: kernel.seed,
        ..Config::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Refuses to write over any of the command's inputs.
fn check_out(out: &Path, inputs: &[&Path]) -> Result<()> {
    let Ok(target) = fs::canonicalize(out) else {
        return Ok(());
    };
    for input in inputs {
        if fs::canonicalize(input).is_ok_and(|p| p == target) {
            bail!("--out {} would overwrite an input file", out.display());
        }
    }
    Ok(())
}

fn load_dataset(
    input: &Path,
    entail: Option<&Path>,
) -> Result<(Vec<GenerationRecord>, BTreeMap<String, EntailmentMatrix>)> {
    let records = load_generations(input)?;
    let entailments = match entail {
        Some(p) => load_entailments(p, &records)?,
        None => BTreeMap::new(),
    };
    Ok((records, entailments))
}

pub fn cmd_score(args: &ScoreArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = config_from(&args.kernel, args.beta, args.se_threshold)?;
    let mut inputs = vec![args.input.as_path()];
    inputs.extend(args.entail.as_deref());
    check_out(&args.out, &inputs)?;
    let (records, entailments) = load_dataset(&args.input, args.entail.as_deref())?;
    let methods = parse_methods(&args.method, &records, args.entail.is_some())?;
    if args.entail.is_none() {
        if let Some(m) = methods.iter().find(|m| m.needs_entailment()) {
            bail!("method `{m}` needs --entail");
        }
    }

    let scores = score_all(&records, &entailments, &cfg, &methods)?;
    write_scores(&args.out, &scores)?;

    let mut counts: BTreeMap<Method, usize> = BTreeMap::new();
    for s in &scores {
        *counts.entry(s.method).or_default() += 1;
    }
    writeln!(
        stdout,
        "{} scores for {} records -> {}",
        scores.len(),
        records.len(),
        args.out.display()
    )?;
    for (m, c) in counts {
        writeln!(stdout, "  {:<12}{c}", m.as_str())?;
    }
    Ok(())
}

/// Writes rows as JSON lines or as CSV with the given header. Every field
/// is numeric or a bare identifier, so CSV needs no quoting.
fn write_table<T: Serialize>(
    path: &Path,
    format: Format,
    header: &[&str],
    rows: &[T],
    csv_row: impl Fn(&T) -> String,
) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            writeln!(w, "{}", header.join(","))?;
            for r in rows {
                writeln!(w, "{}", csv_row(r))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    check_out(&args.out, &[&args.input, &args.scores])?;
    let records = load_generations(&args.input)?;
    let scores = load_scores(&args.scores)?;
    let results = evaluate(&records, &scores)?;
    write_table(
        &args.out,
        args.format,
        &["method", "auroc", "n_correct", "n_incorrect"],
        &results,
        |r| format!("{},{},{},{}", r.method, r.auroc, r.n_correct, r.n_incorrect),
    )?;
    writeln!(
        stdout,
        "{:<12}{:>8}{:>10}{:>12}",
        "method", "auroc", "correct", "incorrect"
    )?;
    for r in &results {
        writeln!(
            stdout,
            "{:<12}{:>8.4}{:>10}{:>12}",
            r.method.as_str(),
            r.auroc,
            r.n_correct,
            r.n_incorrect
        )?;
    }
    Ok(())
}

pub fn cmd_sweep_beta(args: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    ensure!(
        args.input.len() == args.entail.len(),
        "--input given {} times but --entail {} times",
        args.input.len(),
        args.entail.len()
    );
    let grid = parse_grid(&args.grid)?;
    // Beta is overridden per grid point; any valid value passes validation here.
    let cfg = config_from(&args.kernel, grid[0], Config::default().se_threshold)?;
    let inputs: Vec<&Path> = args
        .input
        .iter()
        .chain(&args.entail)
        .map(PathBuf::as_path)
        .collect();
    check_out(&args.out, &inputs)?;
    let datasets = args
        .input
        .iter()
        .zip(&args.entail)
        .map(|(i, e)| {
            let (records, entailments) = load_dataset(i, Some(e))?;
            Ok(Dataset {
                records,
                entailments,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = beta_sweep(&datasets, &grid, &cfg)?;
    write_table(
        &args.out,
        args.format,
        &["beta", "mean_auroc"],
        &rows,
        |r| format!("{},{}", r.beta, r.mean_auroc),
    )?;
    for r in &rows {
        writeln!(stdout, "beta {:<6} mean AUROC {:.5}", r.beta, r.mean_auroc)?;
    }
    // First maximum wins, so ties resolve to the smaller beta.
    let best = rows
        .iter()
        .fold(None::<&semshap::SweepRow>, |best, r| match best {
            Some(b) if b.mean_auroc >= r.mean_auroc => Some(b),
            _ => Some(r),
        })
        .expect("grid is non-empty");
    writeln!(
        stdout,
        "best beta {} (mean AUROC {:.5})",
        best.beta, best.mean_auroc
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct PsdRow<'a> {
    id: &'a str,
    n: usize,
    raw_min_eigenvalue: f64,
    raw_entropy: Option<f64>,
    kernel_min_eigenvalue: f64,
    beta_requested: f64,
    beta_used: f64,
}

pub fn cmd_psd_check(args: &PsdArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = Config {
        beta: args.beta,
        kernel: args.kernel,
        ..Config::default()
    };
    cfg.validate()?;
    if let Some(out) = &args.out {
        check_out(out, &[&args.input, &args.entail])?;
    }
    let (records, entailments) = load_dataset(&args.input, Some(&args.entail))?;

    let mut rows = Vec::with_capacity(entailments.len());
    for r in &records {
        let Some(e) = entailments.get(&r.id) else {
            continue;
        };
        let c = symmetrize(e);
        let beta_used = safe_beta(&c, cfg.beta, cfg.kernel, cfg.psd_tolerance)?;
        let k = kernelize(&c, beta_used, cfg.kernel, cfg.psd_tolerance)?;
        let h = raw_differential_entropy(&c);
        rows.push(PsdRow {
            id: &r.id,
            n: c.n(),
            raw_min_eigenvalue: c.min_eigenvalue(),
            // JSON has no infinities or NaN; a degenerate raw entropy is null.
            raw_entropy: h.is_finite().then_some(h),
            kernel_min_eigenvalue: k.min_eigenvalue(),
            beta_requested: cfg.beta,
            beta_used,
        });
    }

    writeln!(
        stdout,
        "{:<16}{:>4}{:>14}{:>14}{:>14}{:>10}",
        "id", "n", "raw_min_eig", "raw_entropy", "kern_min_eig", "beta"
    )?;
    for p in &rows {
        let h = p
            .raw_entropy
            .map_or_else(|| "-inf/nan".to_owned(), |h| format!("{h:.6}"));
        writeln!(
            stdout,
            "{:<16}{:>4}{:>14.6e}{:>14}{:>14.6e}{:>10}",
            p.id, p.n, p.raw_min_eigenvalue, h, p.kernel_min_eigenvalue, p.beta_used
        )?;
    }
    let raw_bad = rows.iter().filter(|p| p.raw_min_eigenvalue < 0.0).count();
    let repaired = rows
        .iter()
        .filter(|p| p.beta_used < p.beta_requested)
        .count();
    writeln!(
        stdout,
        "{} records: {raw_bad} raw matrices not PSD, {repaired} needed a smaller beta",
        rows.len()
    )?;

    if let Some(out) = &args.out {
        write_table(
            out,
            args.format,
            &[
                "id",
                "n",
                "raw_min_eigenvalue",
                "raw_entropy",
                "kernel_min_eigenvalue",
                "beta_requested",
                "beta_used",
            ],
            &rows,
            |p| {
                format!(
                    "{},{},{},{},{},{},{}",
                    p.id,
                    p.n,
                    p.raw_min_eigenvalue,
                    p.raw_entropy.map_or_else(String::new, |h| h.to_string()),
                    p.kernel_min_eigenvalue,
                    p.beta_requested,
                    p.beta_used
                )
            },
        )?;
    }
    Ok(())
}
