//! Subcommands of the `watson` operator tool. Each returns the text to print
//! and whether the run succeeded; `main` turns that into an exit code.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use watson_core::dialogue::Engine;
use watson_core::domain::{Domain, DomainDoc};
use watson_core::feature_space::check_schema;
use watson_core::precedent::PrecedentStore;
use watson_core::replay::{run_script, ReplayReport, Script};
use watson_core::syndrome::{
    atoms_for, mine_brute_force, mine_minimal_antisyndromes, AntisyndromeSet, SetSource, TrainingSample,
};
use watson_core::{DomainSchema, RawVector, SolutionId};

pub struct Report {
    pub ok: bool,
    pub text: String,
}

fn read_doc(path: &Path) -> Result<DomainDoc<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn validate(path: &Path) -> Result<Report> {
    let doc = read_doc(path)?;
    let issues = check_schema(&doc.schema);
    let mut text = String::new();
    if !issues.is_empty() {
        for issue in &issues {
            writeln!(text, "error: {issue}")?;
        }
        writeln!(text, "{}: invalid ({} problem(s))", path.display(), issues.len())?;
        return Ok(Report { ok: false, text });
    }
    match Domain::from_doc(&doc) {
        Ok(d) => {
            let s = d.schema();
            writeln!(
                text,
                "{}: valid domain `{}` with {} parameters, {} solutions, {} antisyndromes",
                path.display(),
                d.id(),
                s.dim(),
                s.solutions().len(),
                d.antisyndrome_count()
            )?;
            Ok(Report { ok: true, text })
        }
        Err(e) => {
            writeln!(text, "error: {e}")?;
            writeln!(text, "{}: invalid", path.display())?;
            Ok(Report { ok: false, text })
        }
    }
}

/// Training sample file for `mine`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub solution: SolutionId,
    pub cases: Vec<RawVector<f64>>,
}

/// Mined set with entries in the domain file's notation.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MinedSet {
    pub solution: SolutionId,
    pub source: SetSource,
    pub k_max: usize,
    pub entries: Vec<RawVector<f64>>,
}

fn render(schema: &DomainSchema, set: &AntisyndromeSet<f64>, k_max: usize) -> MinedSet {
    MinedSet {
        solution: set.solution.clone(),
        source: set.source,
        k_max,
        entries: set.entries().iter().map(|e| schema.render_vector(e)).collect(),
    }
}

pub fn mine(schema_path: &Path, sample_path: &Path, k_max: usize, oracle: bool) -> Result<Report> {
    let doc = read_doc(schema_path)?;
    let schema = DomainSchema::from_doc(&doc.schema)?;
    let text = std::fs::read_to_string(sample_path).with_context(|| format!("reading {}", sample_path.display()))?;
    let file: SampleFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", sample_path.display()))?;
    if !schema.has_solution(&file.solution) {
        bail!("unknown solution `{}`", file.solution);
    }
    let cases = file.cases.iter().map(|r| schema.parse_vector(r)).collect::<Result<Vec<_>, _>>()?;
    let sample = TrainingSample::new(&schema, file.solution, cases)?;
    let atoms = atoms_for(&schema, &doc.bins)?;
    let mined = mine_minimal_antisyndromes(&sample, &atoms, k_max)?;
    let mut out = serde_json::to_string_pretty(&render(&schema, &mined, k_max))?;
    out.push('\n');
    if oracle {
        let reference = mine_brute_force(&sample, &atoms, k_max)?;
        if reference.entries() != mined.entries() {
            let missing = reference.entries().iter().filter(|e| !mined.entries().contains(e)).count();
            let extra = mined.entries().iter().filter(|e| !reference.entries().contains(e)).count();
            writeln!(out, "oracle mismatch: {missing} missing, {extra} extra")?;
            return Ok(Report { ok: false, text: out });
        }
    }
    Ok(Report { ok: true, text: out })
}

/// Clock for replays: starts at a fixed instant and advances one minute per
/// reading, so timestamps are the same on every run.
fn replay_clock() -> Arc<dyn Fn() -> DateTime<Utc> + Send + Sync> {
    let start = DateTime::parse_from_rfc3339("2020-01-01T08:00:00Z")
        .expect("valid constant")
        .with_timezone(&Utc);
    let ticks = AtomicI64::new(0);
    Arc::new(move || start + chrono::Duration::minutes(ticks.fetch_add(1, Ordering::Relaxed)))
}

pub fn replay_report(domain_path: &Path, script_path: &Path, seed: Option<u64>) -> Result<ReplayReport<f64>> {
    let doc = read_doc(domain_path)?;
    let domain = Arc::new(Domain::from_doc(&doc)?);
    let text = std::fs::read_to_string(script_path).with_context(|| format!("reading {}", script_path.display()))?;
    let script: Script<f64> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", script_path.display()))?;
    let engine = Engine::new(domain);
    let store = PrecedentStore::in_memory().with_clock(replay_clock());
    Ok(run_script(&engine, &store, &script, seed)?)
}

pub fn replay(domain_path: &Path, script_path: &Path, seed: Option<u64>, json: bool) -> Result<Report> {
    let report = replay_report(domain_path, script_path, seed)?;
    let ok = report.passed();
    if json {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        return Ok(Report { ok, text });
    }
    let mut text = String::new();
    for line in &report.lines {
        writeln!(
            text,
            "{} S{} {:?}({}) {}",
            if line.matched { "ok  " } else { "FAIL" },
            line.scenario,
            line.kind,
            line.subject.join(","),
            line.question
        )?;
        writeln!(text, "     {}", line.prompt)?;
        if let Some(w) = &line.warning {
            writeln!(text, "     warning: {w}")?;
        }
    }
    for m in &report.mismatches {
        writeln!(text, "mismatch: {m}")?;
    }
    writeln!(text, "transcript:")?;
    for event in &report.session.transcript {
        writeln!(text, "  {}", serde_json::to_string(event)?)?;
    }
    match &report.precedent {
        Some(p) => writeln!(text, "recorded precedent {} ({})", p.id, p.decision)?,
        None => writeln!(text, "no precedent recorded")?,
    }
    writeln!(text, "{}", if ok { "replay passed" } else { "replay FAILED" })?;
    Ok(Report { ok, text })
}

pub fn inspect(dir: &Path, user: &str, json: bool) -> Result<Report> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    let store = PrecedentStore::<f64>::open(dir)?;
    let list = store.inspect(user)?;
    if json {
        let mut text = serde_json::to_string_pretty(&list)?;
        text.push('\n');
        return Ok(Report { ok: true, text });
    }
    let mut text = String::new();
    writeln!(text, "{} precedent(s) for {user}", list.len())?;
    for p in &list {
        let outcome = match (&p.outcome, p.correct()) {
            (None, _) => "pending".to_owned(),
            (Some(o), Some(true)) => format!("correct: {}", o.summary),
            (Some(o), _) => format!("wrong: {}", o.summary),
        };
        writeln!(
            text,
            "{}  {}  {}  {}  [{}]",
            p.id,
            p.created_at.format("%Y-%m-%d %H:%M"),
            p.domain,
            p.decision,
            outcome
        )?;
        if let Some(e) = &p.error_explanation {
            writeln!(text, "    error explanation: {e}")?;
        }
    }
    Ok(Report { ok: true, text })
}
