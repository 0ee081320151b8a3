//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use lr_core::chebyshev::{
    check_dusart, check_lemma1, check_lemma2, check_mertens_sum, check_theorem2, check_theorem4,
    check_theorem6, check_theorem7, BoundReport, SieveTables, DUSART_START,
};
use lr_core::constants::{
    compute_m_constant, compute_w1, compute_w2, verify_theorem3, ConstantEstimate,
};
use lr_core::engine::{Engine, Record, RecordSink, RobinStatus, RunError};
use lr_core::exact::{brute_force_max_rho, factorization_string, ExponentMap};
use lr_core::{EULER_GAMMA, EXP_GAMMA, ROBIN_THRESHOLD};
use serde::Serialize;
use serde_json::json;

use crate::args::{
    BoundKind, BoundsArgs, Cli, Command, ConstantsArgs, Format, GenerateArgs, OracleArgs, RobinArgs,
};
use crate::checkpoint::Checkpoint;
use crate::render::{csv_row, describe_n, json_row, CSV_HEADER};

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// A bound or the Robin inequality failed; witnesses were printed.
    Fail,
}

/// Witnesses listed per failing check before the rest are only counted.
const WITNESS_LINES: usize = 20;

/// `n_m` factorizations longer than this are summarized.
const MAX_FACTORS_SHOWN: usize = 32;

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Robin(a) => robin(a, out),
        Command::Constants(a) => constants(a, out, err),
        Command::Bounds(a) => bounds(a, out, err),
        Command::Oracle(a) => oracle(a, out, err),
    }?;
    out.flush()?;
    err.flush()?;
    Ok(outcome)
}

struct RowSink<'a> {
    out: &'a mut dyn Write,
    format: Format,
    precision: usize,
    checkpoint: Option<&'a Path>,
}

impl RecordSink for RowSink<'_> {
    type Error = anyhow::Error;

    fn record(&mut self, r: &Record) -> Result<()> {
        let line = match self.format {
            Format::Csv => csv_row(r, self.precision),
            Format::Json => json_row(r, self.precision),
        };
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    fn checkpoint(&mut self, engine: &Engine) -> Result<()> {
        if let Some(path) = self.checkpoint {
            self.out.flush()?;
            Checkpoint::from_engine(engine).save(path)?;
        }
        Ok(())
    }
}

fn run_error(e: RunError<anyhow::Error>) -> anyhow::Error {
    match e {
        RunError::Engine(e) => e.into(),
        RunError::Sink(e) => e,
    }
}

pub fn generate(a: &GenerateArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let mut engine = match &a.resume {
        Some(path) => Checkpoint::load(path)?.to_engine()?,
        None => Engine::new(),
    };
    if engine.m() >= a.count {
        bail!(
            "checkpoint is already at m={}; --count must exceed it",
            engine.m()
        );
    }
    let mut file;
    let out: &mut dyn Write = match &a.out {
        Some(path) => {
            file = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            &mut file
        }
        None => stdout,
    };
    if a.format == Format::Csv {
        writeln!(out, "{CSV_HEADER}")?;
    }
    let mut sink = RowSink {
        out,
        format: a.format,
        precision: a.precision,
        checkpoint: a.checkpoint.as_deref(),
    };
    engine
        .run(a.count - engine.m(), &mut sink, a.checkpoint_every)
        .map_err(run_error)?;
    sink.out.flush()?;
    if let Some(path) = &a.checkpoint {
        Checkpoint::from_engine(&engine).save(path)?;
    }
    Ok(Outcome::Pass)
}

/// Keeps the records whose verdict is not `holds` above the threshold.
#[derive(Default)]
struct FailureSink(Vec<Record>);

impl RecordSink for FailureSink {
    type Error = std::convert::Infallible;

    fn record(&mut self, r: &Record) -> std::result::Result<(), Self::Error> {
        if r.verdict.status == RobinStatus::Fails {
            self.0.push(*r);
        }
        Ok(())
    }
}

fn engine_at(m: u64) -> Result<Engine> {
    let mut e = Engine::new();
    while e.m() < m {
        e.step()?;
    }
    Ok(e)
}

pub fn robin(a: &RobinArgs, out: &mut dyn Write) -> Result<Outcome> {
    let p = a.precision;
    let mut engine = Engine::new();
    let mut failures = FailureSink::default();
    let summary = engine
        .run(a.count, &mut failures, None)
        .map_err(|e| match e {
            RunError::Engine(e) => anyhow::Error::from(e),
            RunError::Sink(never) => match never {},
        })?;
    writeln!(out, "checked m = 1..={}", a.count)?;
    writeln!(
        out,
        "below threshold (n_m <= {ROBIN_THRESHOLD}): {}",
        summary.below_threshold
    )?;
    writeln!(out, "holds: {}", summary.holds)?;
    writeln!(out, "fails: {}", summary.failures.len())?;
    writeln!(out, "e^gamma = {EXP_GAMMA:.p$}")?;
    match summary.max_g {
        Some((g, m)) => {
            writeln!(out, "max G above threshold: {g:.p$} at m={m}")?;
            let at = engine_at(m)?;
            let s = at.state();
            writeln!(
                out,
                "n_{m} = {}",
                describe_n(s.exponents(), s.log_n(), MAX_FACTORS_SHOWN)
            )?;
            writeln!(out, "e^gamma - max G = {:.p$e}", EXP_GAMMA - g)?;
        }
        None => {
            writeln!(out, "max G above threshold: none")?;
            writeln!(
                out,
                "note: no LR numbers above threshold checked; n_m for m <= {} are all <= {ROBIN_THRESHOLD}",
                a.count
            )?;
        }
    }
    if failures.0.is_empty() {
        return Ok(Outcome::Pass);
    }
    for r in failures.0.iter().take(WITNESS_LINES) {
        let kind = if r.verdict.is_indeterminate() {
            "indeterminate"
        } else {
            "fails"
        };
        writeln!(
            out,
            "witness m={} q={} k={} z={}: G = {:.p$} margin = {:.3e} error bound = {:.3e} ({kind})",
            r.m, r.q, r.k, r.z, r.g, r.verdict.margin, r.verdict.error_bound
        )?;
    }
    if failures.0.len() > WITNESS_LINES {
        writeln!(out, "... and {} more", failures.0.len() - WITNESS_LINES)?;
    }
    Ok(Outcome::Fail)
}

#[derive(Serialize)]
struct ConstantJson {
    name: &'static str,
    value: f64,
    tail_bound: f64,
    terms_used: u64,
}

impl ConstantJson {
    fn new(name: &'static str, c: &ConstantEstimate) -> Self {
        Self {
            name,
            value: c.value,
            tail_bound: c.tail_bound,
            terms_used: c.terms_used,
        }
    }
}

pub fn constants(a: &ConstantsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let w1 = compute_w1(a.max_z)?;
    let m = compute_m_constant(a.max_z)?;
    let w2 = compute_w2(a.max_z)?;
    let t3 = verify_theorem3(&w1, &w2);
    let doc = json!({
        "max_z": a.max_z,
        "constants": [
            ConstantJson::new("W1", &w1),
            ConstantJson::new("M", &m),
            ConstantJson::new("W2", &w2),
        ],
        "theorem3": {
            "difference": t3.difference,
            "gamma": EULER_GAMMA,
            "residual": t3.residual,
            "combined_tail": t3.combined_tail,
            "pass": t3.pass,
        },
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    if !t3.pass {
        writeln!(
            err,
            "FAIL theorem3: |(W2 - W1) - gamma| = {:e} exceeds the combined tail {:e}",
            t3.residual, t3.combined_tail
        )?;
        return Ok(Outcome::Fail);
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct WitnessJson {
    at: u64,
    part: &'static str,
    slack: f64,
}

#[derive(Serialize)]
struct ReportJson {
    theorem: &'static str,
    range: [u64; 2],
    checked: u64,
    failed: u64,
    pass: bool,
    worst_slack: f64,
    worst_at: u64,
    witness: Vec<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

impl From<&BoundReport> for ReportJson {
    fn from(r: &BoundReport) -> Self {
        Self {
            theorem: r.theorem,
            range: [r.range.0, r.range.1],
            checked: r.checked,
            failed: r.failed,
            pass: r.pass(),
            worst_slack: r.worst_slack,
            worst_at: r.worst_at,
            witness: r
                .failures
                .iter()
                .map(|w| WitnessJson {
                    at: w.at,
                    part: w.part,
                    slack: w.slack,
                })
                .collect(),
            residual: r.residual,
        }
    }
}

/// Runs the selected checkers; per-`m` checkers share one pass over the
/// LR numbers `1..=m_max`.
pub fn bound_reports(a: &BoundsArgs) -> Result<Vec<BoundReport>> {
    let mut kinds = a.theorem.clone();
    if kinds.is_empty() {
        kinds = vec![
            BoundKind::Lemma1,
            BoundKind::Lemma2,
            BoundKind::Theorem2,
            BoundKind::Theorem4,
            BoundKind::Theorem6,
            BoundKind::Theorem7,
            BoundKind::Dusart,
            BoundKind::Mertens,
        ];
    }
    kinds.sort();
    kinds.dedup();
    let tables = SieveTables::new(a.sieve_limit)?;
    let w1 = if kinds.contains(&BoundKind::Theorem4) {
        Some(compute_w1(a.sieve_limit.max(30))?)
    } else {
        None
    };
    let per_m: Vec<BoundKind> = kinds.iter().copied().filter(|k| k.per_m()).collect();
    let mut merged: Vec<Option<BoundReport>> = vec![None; per_m.len()];
    if !per_m.is_empty() {
        let mut engine = Engine::new();
        for _ in 0..a.m_max {
            engine.step()?;
            let s = engine.state();
            let z = s.z_m().expect("m >= 1");
            for (slot, kind) in merged.iter_mut().zip(&per_m) {
                let r = match kind {
                    BoundKind::Lemma1 => check_lemma1(z, &tables),
                    BoundKind::Lemma2 => check_lemma2(s, &tables),
                    BoundKind::Theorem2 => check_theorem2(s, &tables),
                    BoundKind::Theorem4 => check_theorem4(s, w1.as_ref().expect("computed above")),
                    BoundKind::Theorem6 if s.m() < 2 => continue,
                    BoundKind::Theorem6 => check_theorem6(z, &tables),
                    BoundKind::Theorem7 => check_theorem7(s, &tables),
                    BoundKind::Dusart | BoundKind::Mertens => unreachable!(),
                }
                .with_context(|| format!("{kind:?} at m={}", s.m()))?;
                match slot {
                    Some(acc) => acc.merge(r),
                    None => *slot = Some(r),
                }
            }
        }
    }
    let mut reports: Vec<BoundReport> = merged.into_iter().flatten().collect();
    if kinds.contains(&BoundKind::Dusart) {
        reports.push(check_dusart(
            &tables,
            DUSART_START,
            a.sieve_limit,
            a.dusart_points,
        )?);
    }
    if kinds.contains(&BoundKind::Mertens) {
        reports.push(check_mertens_sum(&tables, a.sieve_limit)?);
    }
    Ok(reports)
}

pub fn bounds(a: &BoundsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let reports = bound_reports(a)?;
    let pass = reports.iter().all(|r| r.pass());
    let doc = json!({
        "pass": pass,
        "reports": reports.iter().map(ReportJson::from).collect::<Vec<_>>(),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    for r in reports.iter().filter(|r| !r.pass()) {
        writeln!(
            err,
            "FAIL {}: {} of {} checks failed",
            r.theorem, r.failed, r.checked
        )?;
        for w in r.failures.iter().take(WITNESS_LINES) {
            writeln!(
                err,
                "  witness at {} ({}): slack {:e}",
                w.at, w.part, w.slack
            )?;
        }
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

pub fn oracle(a: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let m = a.m as usize;
    let result = brute_force_max_rho(m)?;
    let engine = engine_at(a.m)?;
    let lr = ExponentMap::from_lr(engine.state().exponents());
    let matches = result.best == lr;
    let doc = json!({
        "m": m,
        "n": result.n.to_string(),
        "factorization": factorization_string(&result.best),
        "rho": {
            "numerator": result.rho.numerator().to_string(),
            "denominator": result.rho.denominator().to_string(),
            "value": result.rho.to_f64(),
        },
        "candidates": result.candidates,
        "maximizers": result.maximizers.iter().map(factorization_string).collect::<Vec<_>>(),
        "engine_n": factorization_string(&lr),
        "matches_engine": matches,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    if !matches {
        writeln!(
            err,
            "FAIL oracle m={m}: brute force gives {} but the engine gives {}",
            factorization_string(&result.best),
            factorization_string(&lr)
        )?;
        return Ok(Outcome::Fail);
    }
    Ok(Outcome::Pass)
}
