//! Benchmark harness over seeded instance families.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use omplan::justify::Algorithm;
use omplan::planner::{solve, SearchOutcome};
use omplan::rewrite::rew;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commands::{io_err, write_file, CliError};
use crate::gen::{blocksworld, interchangeable, Bundle};
use crate::{exit, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Blocksworld,
    Interchangeable,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub kind: FamilyKind,
    /// Blocks or individuals per instance.
    pub sizes: Vec<usize>,
    /// Instances per size.
    #[serde(default = "one")]
    pub instances: usize,
}

fn one() -> usize {
    1
}

fn all_algorithms() -> Vec<String> {
    Algorithm::ALL.iter().map(ToString::to_string).collect()
}

/// A suite description, as read from TOML.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<String>,
    #[serde(default, rename = "family")]
    pub families: Vec<Family>,
}

impl Default for Suite {
    /// Blocksworld with 3 to 6 blocks under every algorithm.
    fn default() -> Self {
        Suite {
            algorithms: all_algorithms(),
            families: vec![Family { kind: FamilyKind::Blocksworld, sizes: vec![3, 4, 5, 6], instances: 1 }],
        }
    }
}

impl Suite {
    pub fn parse(text: &str) -> Result<Suite, CliError> {
        toml::from_str(text).map_err(|e| CliError::input(format!("suite: {e}")))
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, CliError> {
        self.algorithms.iter().map(|a| a.parse().map_err(CliError::input)).collect()
    }

    /// The generated instances, in suite order.
    pub fn instances(&self, seed: u64) -> Vec<Bundle> {
        let mut out = Vec::new();
        for f in &self.families {
            for &n in &f.sizes {
                for i in 0..f.instances {
                    match f.kind {
                        FamilyKind::Blocksworld => {
                            let name = format!("blocksworld-{n}-{i}");
                            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(out.len() as u64));
                            out.push(blocksworld(&mut rng, n, &name));
                        }
                        FamilyKind::Interchangeable => out.push(interchangeable(n, &format!("interchangeable-{n}-{i}"))),
                    }
                }
            }
        }
        out
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub algorithm: String,
    #[serde(rename = "reasoning-time")]
    pub reasoning_time: f64,
    #[serde(rename = "planning-time")]
    pub planning_time: f64,
    #[serde(rename = "total-time")]
    pub total_time: f64,
    pub solved: bool,
    #[serde(rename = "consistency-calls")]
    pub consistency_calls: u64,
    #[serde(rename = "plan-length")]
    pub plan_length: Option<usize>,
    pub status: String,
}

fn secs(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

/// Compiles and plans one instance; failures become unsolved rows.
pub fn run_instance(b: &Bundle, alg: Algorithm, run: &RunConfig) -> Row {
    let mut row = Row {
        instance: b.name.clone(),
        algorithm: alg.to_string(),
        reasoning_time: 0.0,
        planning_time: 0.0,
        total_time: 0.0,
        solved: false,
        consistency_calls: 0,
        plan_length: None,
        status: String::new(),
    };
    let omps = match b.load() {
        Ok(o) => o,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    let mut cfg = run.clone();
    cfg.algorithm = alg;
    let t0 = Instant::now();
    let rw = rew(&omps, &cfg.reasoner(), &cfg.rewrite());
    row.reasoning_time = secs(t0.elapsed());
    let rw = match rw {
        Ok(r) => r,
        Err(e) => {
            row.total_time = row.reasoning_time;
            row.status = format!("error: {e}");
            return row;
        }
    };
    row.consistency_calls = rw.stats.justify.consistency_calls;
    let t1 = Instant::now();
    let mut pcfg = cfg.planner();
    pcfg.time_limit = Some(run.time_limit.unwrap_or(Duration::from_secs(60)));
    let res = solve(&rw.spec, &pcfg);
    row.planning_time = secs(t1.elapsed());
    row.total_time = secs(t0.elapsed());
    row.status = match res {
        Ok(r) => match r.outcome {
            SearchOutcome::Plan(p) => {
                row.solved = true;
                row.plan_length = Some(p.len());
                "solved".into()
            }
            SearchOutcome::Unsolvable => "unsolvable".into(),
            SearchOutcome::Timeout => "timeout".into(),
            SearchOutcome::MemoryLimit => "state-limit".into(),
        },
        Err(e) => format!("error: {e}"),
    };
    row
}

pub fn run_suite(suite: &Suite, run: &RunConfig) -> Result<Vec<Row>, CliError> {
    let algs = suite.algorithms()?;
    let mut rows = Vec::new();
    for b in suite.instances(run.seed) {
        for &alg in &algs {
            rows.push(run_instance(&b, alg, run));
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 9] = [
    "instance",
    "algorithm",
    "reasoning-time",
    "planning-time",
    "total-time",
    "solved",
    "consistency-calls",
    "plan-length",
    "status",
];

pub fn rows_csv(rows: &[Row]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

/// Per algorithm, the k-th fastest solved instance time for k = 1, 2, ...
pub fn cactus_csv(rows: &[Row]) -> String {
    let mut s = String::from("algorithm,solved,time\n");
    let mut algs: Vec<&str> = Vec::new();
    for r in rows {
        if !algs.contains(&r.algorithm.as_str()) {
            algs.push(&r.algorithm);
        }
    }
    for a in algs {
        let mut times: Vec<f64> = rows.iter().filter(|r| r.algorithm == a && r.solved).map(|r| r.total_time).collect();
        times.sort_by(f64::total_cmp);
        for (k, t) in times.iter().enumerate() {
            s.push_str(&format!("{a},{},{t:.3}\n", k + 1));
        }
    }
    s
}

pub fn run(suite: Option<&Path>, run: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let suite = match suite {
        Some(p) => Suite::parse(&fs::read_to_string(p).map_err(io_err(p))?)?,
        None => Suite::default(),
    };
    let rows = run_suite(&suite, run)?;
    let csv = rows_csv(&rows)?;
    let dir = run.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    write_file(&dir.join("bench.csv"), &csv)?;
    write_file(&dir.join("cactus.csv"), &cactus_csv(&rows))?;
    out.write_all(csv.as_bytes()).map_err(|e| CliError::input(e.to_string()))?;
    Ok(exit::OK)
}
