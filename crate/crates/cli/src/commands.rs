//! The single-bundle subcommands.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use omplan::dl::Axiom;
use omplan::justify::JustifyStats;
use omplan::omps::{candidates, Manifest, Omps, OmpsError, Semantics};
use omplan::pddl::{parse_plan, print_domain, print_problem, PddlError};
use omplan::planner::{format_plan, solve, PlannerError, PlannerStats, SearchOutcome};
use omplan::reasoner::ReasonerError;
use omplan::rewrite::{compute_tables, rew, RewriteError, RewrittenSpec, Tables};
use serde::Serialize;

use crate::{exit, RunConfig};

/// An error with the exit code it maps to.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl fmt::Display) -> Self {
        CliError { code: exit::INPUT, message: message.to_string() }
    }
}

fn reasoner_code(e: &ReasonerError) -> i32 {
    match e {
        ReasonerError::NodeBudgetExceeded { .. } => exit::BUDGET,
        _ => exit::INPUT,
    }
}

impl From<OmpsError> for CliError {
    fn from(e: OmpsError) -> Self {
        let code = match &e {
            OmpsError::Reasoner(r) => reasoner_code(r),
            _ => exit::INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        let code = if e.is_budget() {
            exit::BUDGET
        } else if matches!(e, RewriteError::StaticInconsistent) {
            exit::STATIC_INCONSISTENT
        } else {
            exit::INPUT
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<PddlError> for CliError {
    fn from(e: PddlError) -> Self {
        CliError::input(e)
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        CliError::input(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(e)
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn out_err(e: io::Error) -> CliError {
    CliError::input(format!("writing output: {e}"))
}

pub fn load(manifest: &Path) -> Result<Omps, CliError> {
    Ok(Manifest::read(manifest)?.load()?)
}

fn out_dir(run: &RunConfig) -> PathBuf {
    run.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Emits `domain.pddl`, `problem.pddl` and `provenance.json`.
pub fn write_compiled(rw: &RewrittenSpec, dir: &Path) -> Result<[PathBuf; 3], CliError> {
    let files = [dir.join("domain.pddl"), dir.join("problem.pddl"), dir.join("provenance.json")];
    write_file(&files[0], &print_domain(&rw.spec.domain))?;
    write_file(&files[1], &print_problem(&rw.spec.problem))?;
    write_file(&files[2], &(rw.provenance_json() + "\n"))?;
    Ok(files)
}

fn print_justify_stats(out: &mut dyn Write, s: &JustifyStats) -> io::Result<()> {
    writeln!(out, "consistency calls: {}", s.consistency_calls)?;
    writeln!(out, "single-just calls: {}", s.single_just_calls)?;
    writeln!(out, "hst nodes: {}", s.hst_nodes)
}

pub fn compile(manifest: &Path, run: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let omps = load(manifest)?;
    let rw = rew(&omps, &run.reasoner(), &run.rewrite())?;
    let files = write_compiled(&rw, &out_dir(run))?;
    let s = &rw.stats;
    (|| -> io::Result<()> {
        writeln!(out, "algorithm: {}", run.algorithm)?;
        writeln!(out, "query axioms: {}", s.query_axioms)?;
        writeln!(out, "query rules: {}", s.query_rules)?;
        match &rw.inc_predicate {
            Some(p) => writeln!(out, "inc rule: {p} ({} disjuncts)", s.inc_disjuncts)?,
            None => writeln!(out, "inc rule: none")?,
        }
        writeln!(out, "total disjuncts: {}", s.total_disjuncts)?;
        print_justify_stats(out, &s.justify)?;
        if rw.rules.is_empty() {
            writeln!(out, "note: no rules emitted; the specification is unchanged")?;
        }
        for f in &files {
            writeln!(out, "wrote {}", f.display())?;
        }
        Ok(())
    })()
    .map_err(out_err)?;
    Ok(exit::OK)
}

/// The explanation table of a bundle.
pub fn tables(omps: &Omps, run: &RunConfig) -> Result<(Tables, JustifyStats), CliError> {
    let reasoner = run.reasoner();
    if !reasoner.is_consistent(omps.static_ontology.iter()).map_err(|e| CliError { code: reasoner_code(&e), message: e.to_string() })? {
        return Err(RewriteError::StaticInconsistent.into());
    }
    let cands: Vec<Vec<Vec<String>>> =
        omps.queries.iter().map(|q| candidates(q, omps, &reasoner)).collect::<Result<_, _>>()?;
    Ok(compute_tables(omps, &reasoner, &run.rewrite(), &cands)?)
}

/// Label of the inconsistency rows in the query column.
pub const INC_LABEL: &str = "inconsistent";

/// The table as CSV with columns `query` and `fluent-set`.
pub fn table_csv(tables: &Tables) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["query", "fluent-set"])?;
    for (q, fs) in tables.table.iter() {
        let query = q.map_or_else(|| INC_LABEL.to_string(), Axiom::to_string);
        let set: Vec<String> = fs.iter().map(Axiom::to_string).collect();
        w.write_record([query, set.join(";")])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("stats serialise")
}

pub fn justify(manifest: &Path, run: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let omps = load(manifest)?;
    let (tables, stats) = tables(&omps, run)?;
    let csv = table_csv(&tables)?;
    let json = to_json(&stats);
    if let Some(dir) = &run.out {
        write_file(&dir.join("justifications.csv"), &csv)?;
        write_file(&dir.join("justify-stats.json"), &(json.clone() + "\n"))?;
    }
    out.write_all(csv.as_bytes()).map_err(out_err)?;
    writeln!(err, "{json}").map_err(out_err)?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct PlanReport<'a> {
    outcome: String,
    justify: &'a JustifyStats,
    planner: &'a PlannerStats,
}

pub fn plan(manifest: &Path, run: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let omps = load(manifest)?;
    let rw = rew(&omps, &run.reasoner(), &run.rewrite())?;
    let res = solve(&rw.spec, &run.planner())?;
    let report = PlanReport { outcome: res.outcome.to_string(), justify: &rw.stats.justify, planner: &res.stats };
    writeln!(err, "{}", to_json(&report)).map_err(out_err)?;
    match &res.outcome {
        SearchOutcome::Plan(p) => {
            let text = format_plan(p);
            if let Some(dir) = &run.out {
                write_compiled(&rw, dir)?;
                write_file(&dir.join("plan.txt"), &text)?;
            }
            out.write_all(text.as_bytes()).map_err(out_err)?;
            Ok(exit::OK)
        }
        SearchOutcome::Unsolvable => Ok(exit::UNSOLVABLE),
        SearchOutcome::Timeout | SearchOutcome::MemoryLimit => Ok(exit::SEARCH_LIMIT),
    }
}

pub fn validate(manifest: &Path, plan: &Path, run: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let omps = load(manifest)?;
    let text = fs::read_to_string(plan).map_err(io_err(plan))?;
    let actions = parse_plan(&text, &omps.spec)?;
    let reasoner = run.reasoner();
    let verdict = Semantics::new(&omps, &reasoner)?.validate_plan(&actions)?;
    writeln!(out, "{verdict}").map_err(out_err)?;
    Ok(if verdict.is_accept() { exit::OK } else { exit::PLAN_REJECTED })
}
