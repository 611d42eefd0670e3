//! Command-line front end: compile, justify, plan, validate and bench.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (plan found, plan accepted) |
//! | 1 | parse, validation, I/O or compilation error |
//! | 2 | reasoner node budget exceeded |
//! | 3 | static ontology inconsistent |
//! | 4 | plan rejected by the validator |
//! | 5 | planning problem unsolvable |
//! | 6 | planner time or state limit reached |

pub mod bench;
pub mod commands;
pub mod gen;

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use omplan::justify::{Algorithm, JustifyConfig};
use omplan::planner::{Heuristic, PlannerConfig};
use omplan::reasoner::Reasoner;
use omplan::rewrite::RewriteConfig;

pub use commands::CliError;

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const BUDGET: i32 = 2;
    pub const STATIC_INCONSISTENT: i32 = 3;
    pub const PLAN_REJECTED: i32 = 4;
    pub const UNSOLVABLE: i32 = 5;
    pub const SEARCH_LIMIT: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "omplan", version, about = "Compile, plan and validate ontology-mediated planning specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a bundle into PDDL with derived predicates.
    Compile {
        manifest: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Print the explanation table of a bundle as CSV.
    Justify {
        manifest: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Compile a bundle and search for a plan.
    Plan {
        manifest: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Check a plan file against the reasoner-backed semantics.
    Validate {
        manifest: PathBuf,
        plan: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Run a benchmark suite of generated instances.
    Bench {
        /// TOML suite description; the default suite is blocksworld with 3 to 6 blocks.
        suite: Option<PathBuf>,
        #[command(flatten)]
        run: RunConfig,
    },
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Justification algorithm: basic, concept or schema.
    #[arg(long, env = "OMPS_ALGORITHM", default_value = "schema")]
    pub algorithm: Algorithm,
    /// Branch on every axiom instead of using query markers.
    #[arg(long, env = "OMPS_NO_FIGURE4_PRUNING")]
    pub no_figure4_pruning: bool,
    /// Disable closed-set and expanded-path pruning in hitting-set trees.
    #[arg(long, env = "OMPS_NO_PATH_PRUNING")]
    pub no_path_pruning: bool,
    /// Explore hitting-set tree branches in parallel.
    #[arg(long, env = "OMPS_CONCURRENT")]
    pub concurrent: bool,
    /// Planner time limit in seconds.
    #[arg(long, env = "OMPS_TIME_LIMIT", value_parser = positive_secs)]
    pub time_limit: Option<Duration>,
    /// Tableau node budget per consistency check.
    #[arg(long, env = "OMPS_NODE_BUDGET", default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub node_budget: u64,
    /// Planner heuristic: zero or goal-count.
    #[arg(long, env = "OMPS_HEURISTIC", default_value = "zero")]
    pub heuristic: Heuristic,
    /// Output directory.
    #[arg(long, env = "OMPS_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for instance generators.
    #[arg(long, env = "OMPS_SEED", default_value_t = 0)]
    pub seed: u64,
}

fn positive_secs(s: &str) -> Result<Duration, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(Duration::from_secs_f64(v))
    } else {
        Err("the time limit must be positive".into())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Schema,
            no_figure4_pruning: false,
            no_path_pruning: false,
            concurrent: false,
            time_limit: None,
            node_budget: 1_000_000,
            heuristic: Heuristic::Zero,
            out: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn justify(&self) -> JustifyConfig {
        JustifyConfig {
            figure4_pruning: !self.no_figure4_pruning,
            path_pruning: !self.no_path_pruning,
            concurrent: self.concurrent,
        }
    }

    pub fn rewrite(&self) -> RewriteConfig {
        RewriteConfig { algorithm: self.algorithm, justify: self.justify(), ..RewriteConfig::default() }
    }

    pub fn planner(&self) -> PlannerConfig {
        PlannerConfig { heuristic: self.heuristic, time_limit: self.time_limit, ..PlannerConfig::default() }
    }

    pub fn reasoner(&self) -> Reasoner {
        Reasoner::with_budget(self.node_budget)
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Compile { manifest, run } => commands::compile(&manifest, &run, out),
        Command::Justify { manifest, run } => commands::justify(&manifest, &run, out, err),
        Command::Plan { manifest, run } => commands::plan(&manifest, &run, out, err),
        Command::Validate { manifest, plan, run } => commands::validate(&manifest, &plan, &run, out),
        Command::Bench { suite, run } => bench::run(suite.as_deref(), &run, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}
