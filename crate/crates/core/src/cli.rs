//! Run configuration and the `dedekind` command line.
//!
//! Every command prints one JSON document on standard output. Counts are
//! decimal strings. Exit codes: 0 success, 1 i/o or interrupted run,
//! 2 invalid input or rejected checkpoint, 3 capability limit,
//! 4 consistency failure.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::antichain::Antichain;
use crate::engine::{self, ExecOptions, Limits, Method};
use crate::error::{Error, Result};
use crate::oracle::{self, CandidateSpace};
use crate::pcoef::{self, SystemInstance};
use crate::symmetry;
use crate::tables;

#[derive(Debug, Parser)]
#[command(name = "dedekind", version, about = "Dedekind numbers from interval sums over antichains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute D(n + k) with one of the summation methods.
    Compute(ComputeArgs),
    /// Solution count of one equation system.
    Pcoef(PcoefArgs),
    /// Antichain classes under relabelling of the base set.
    Classes {
        #[arg(long)]
        n: usize,
        /// Print counts only.
        #[arg(long)]
        summary: bool,
    },
    /// Compare closed-form solution counts with the brute-force solver.
    OracleCheck {
        #[arg(long)]
        n: usize,
        /// Numbers of variables to check.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        r: Vec<usize>,
    },
    /// Recompute the reference worked-example tables.
    Tables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bruteforce,
    Nplus2,
    Nplus3,
    Nplus4,
    Wiedemann,
    Consistency,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Base size; for `consistency` the largest D(m) to cross-check.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub reduce_symmetry: bool,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many outstanding shards (resume later).
    #[arg(long)]
    pub stop_after_shards: Option<usize>,
    /// Override a cap, e.g. `nplus3=2`. Built-in ceilings still apply.
    #[arg(long = "limit", value_name = "METHOD=N")]
    pub limits: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PcoefArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: String,
    /// Right-hand sides in order 12, 13, ..., 1r, 23, ...; give r(r-1)/2 of them.
    #[arg(long = "beta", required = true)]
    pub betas: Vec<String>,
    /// Reduce non-antichain input to its maximal sets instead of rejecting it.
    #[arg(long)]
    pub normalize: bool,
    /// Also count solutions by brute force.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Task {
    Compute(Method),
    Consistency,
    Pcoef {
        alpha: String,
        betas: Vec<String>,
        normalize: bool,
        oracle: bool,
    },
    Classes {
        summary: bool,
    },
    OracleCheck {
        rs: Vec<usize>,
    },
    Tables,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: Task,
    pub base_n: usize,
    pub workers: usize,
    pub reduce_symmetry: bool,
    pub checkpoint_path: Option<PathBuf>,
    pub stop_after_shards: Option<usize>,
    pub limits: Limits,
}

impl RunConfig {
    pub fn new(task: Task, base_n: usize) -> Self {
        let exec = ExecOptions::default();
        RunConfig {
            task,
            base_n,
            workers: exec.workers,
            reduce_symmetry: false,
            checkpoint_path: None,
            stop_after_shards: None,
            limits: exec.limits,
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        Ok(match cli.command {
            Command::Compute(a) => {
                let task = match a.method {
                    MethodArg::Bruteforce => Task::Compute(Method::Bruteforce),
                    MethodArg::Nplus2 => Task::Compute(Method::Nplus2),
                    MethodArg::Nplus3 => Task::Compute(Method::Nplus3),
                    MethodArg::Nplus4 => Task::Compute(Method::Nplus4),
                    MethodArg::Wiedemann => Task::Compute(Method::Wiedemann),
                    MethodArg::Consistency => Task::Consistency,
                };
                let mut cfg = RunConfig::new(task, a.n);
                if let Some(w) = a.workers {
                    cfg.workers = w;
                }
                cfg.reduce_symmetry = a.reduce_symmetry;
                cfg.checkpoint_path = a.checkpoint;
                cfg.stop_after_shards = a.stop_after_shards;
                for spec in &a.limits {
                    apply_limit(&mut cfg.limits, spec)?;
                }
                cfg
            }
            Command::Pcoef(a) => RunConfig::new(
                Task::Pcoef {
                    alpha: a.alpha,
                    betas: a.betas,
                    normalize: a.normalize,
                    oracle: a.oracle,
                },
                a.n,
            ),
            Command::Classes { n, summary } => RunConfig::new(Task::Classes { summary }, n),
            Command::OracleCheck { n, r } => RunConfig::new(Task::OracleCheck { rs: r }, n),
            Command::Tables => RunConfig::new(Task::Tables, 0),
        })
    }

    fn exec(&self) -> ExecOptions {
        ExecOptions {
            workers: self.workers,
            checkpoint: self.checkpoint_path.clone(),
            stop_after_shards: self.stop_after_shards,
            limits: self.limits,
        }
    }
}

fn apply_limit(limits: &mut Limits, spec: &str) -> Result<()> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| Error::invalid(format!("limit {spec:?} is not METHOD=N")))?;
    let value: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("limit {spec:?}: {value:?} is not a number")))?;
    let slot = match name.trim().parse::<Method>()? {
        Method::Bruteforce => &mut limits.bruteforce,
        Method::Nplus2 => &mut limits.nplus2,
        Method::Nplus3 => &mut limits.nplus3,
        Method::Nplus4 => &mut limits.nplus4,
        Method::Wiedemann => &mut limits.wiedemann,
    };
    *slot = value;
    Ok(())
}

/// A finished run: the document to print and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, ok: true }
    }

    /// 0, or 4 when a check inside the run failed.
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            4
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.workers == 0 {
        return Err(Error::invalid("workers must be at least 1"));
    }
    let n = cfg.base_n;
    match &cfg.task {
        Task::Compute(method) => {
            let r = engine::compute(*method, n, cfg.reduce_symmetry, &cfg.exec())?;
            Ok(Outcome::ok(to_value(&r)))
        }
        Task::Consistency => {
            let start = Instant::now();
            let rows = engine::consistency_matrix(n, &cfg.exec())?;
            let result = rows
                .last()
                .and_then(|r| r.values.first())
                .map(|(_, v)| v.to_string());
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let values: serde_json::Map<String, Value> = row
                        .values
                        .iter()
                        .map(|(m, v)| (m.name().to_string(), Value::String(v.to_string())))
                        .collect();
                    json!({ "m": row.m, "values": values })
                })
                .collect();
            Ok(Outcome::ok(json!({
                "method": "consistency",
                "n": n,
                "result": result,
                "rows": rows,
                "seconds": start.elapsed().as_secs_f64(),
            })))
        }
        Task::Pcoef {
            alpha,
            betas,
            normalize,
            oracle: with_oracle,
        } => {
            let alpha = Antichain::parse(alpha, n, *normalize)?;
            let betas = betas
                .iter()
                .map(|b| Antichain::parse(b, n, *normalize))
                .collect::<Result<Vec<_>>>()?;
            let inst = SystemInstance::new(alpha, betas)?;
            let count = pcoef::p_general(&inst);
            let mut doc = json!({
                "n": n,
                "r": inst.r(),
                "alpha": inst.alpha().to_string(),
                "betas": inst.betas().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "count": count.to_string(),
                "reduction": to_value(&pcoef::reduce(&inst)),
            });
            if inst.r() == 2 && inst.alpha().le(&inst.betas()[0])? {
                doc["connector_number"] = json!(pcoef::connector_number(inst.alpha(), &inst.betas()[0])?);
            }
            let mut ok = true;
            if *with_oracle {
                let solved = oracle::count_solutions(&inst, CandidateSpace::Restricted)?;
                ok = count == crate::count::BigCount::from(solved);
                doc["oracle"] = json!(solved.to_string());
            }
            Ok(Outcome { report: doc, ok })
        }
        Task::Classes { summary } => {
            let classes = symmetry::enumerate_classes(n)?;
            let total: u64 = classes.iter().map(|c| c.orbit_size).sum();
            let mut doc = json!({
                "n": n,
                "count": classes.len(),
                "orbit_total": total.to_string(),
            });
            if !summary {
                doc["classes"] = to_value(&classes);
            }
            Ok(Outcome::ok(doc))
        }
        Task::OracleCheck { rs } => {
            let mut certs = Vec::new();
            for &r in rs {
                certs.push(oracle::certify_exhaustive(n, r)?);
            }
            let ok = certs.iter().all(|c| c.mismatches.is_empty());
            Ok(Outcome {
                report: json!({ "n": n, "checks": to_value(&certs) }),
                ok,
            })
        }
        Task::Tables => {
            let reps = tables::reproduce_all()?;
            let ok = reps.iter().all(|r| r.ok);
            Ok(Outcome {
                report: json!({ "ok": ok, "tables": to_value(&reps) }),
                ok,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(std::iter::once("dedekind").chain(args.iter().copied())).unwrap();
        RunConfig::from_cli(cli).unwrap()
    }

    #[test]
    fn compute_reports_decimal_strings() {
        let cfg = parse(&["compute", "--method", "bruteforce", "--n", "3", "--workers", "1"]);
        let out = run(&cfg).unwrap();
        assert_eq!(out.report["result"], "20");
        assert_eq!(out.report["method"], "bruteforce");
        for key in ["method", "n", "result", "terms", "seconds", "shards"] {
            assert!(out.report.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn limits_and_errors() {
        let cfg = parse(&["compute", "--method", "nplus2", "--n", "3", "--limit", "nplus2=2"]);
        assert_eq!(run(&cfg).unwrap_err().exit_code(), 3);
        let cli = Cli::try_parse_from(["dedekind", "compute", "--method", "nplus2", "--n", "1", "--limit", "x"]);
        assert_eq!(RunConfig::from_cli(cli.unwrap()).unwrap_err().exit_code(), 2);
        let cfg = parse(&["compute", "--method", "nplus2", "--n", "1", "--workers", "0"]);
        assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn pcoef_command() {
        let cfg = parse(&[
            "pcoef", "--n", "2", "--alpha", "{0}", "--beta", "{1,2}", "--oracle",
        ]);
        let out = run(&cfg).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["count"], "4");
        assert_eq!(out.report["connector_number"], 2);
        let bad = parse(&["pcoef", "--n", "2", "--alpha", "{}", "--beta", "{1,12}"]);
        assert_eq!(run(&bad).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn classes_and_tables() {
        let out = run(&parse(&["classes", "--n", "3", "--summary"])).unwrap();
        assert_eq!(out.report["count"], 10);
        assert_eq!(out.report["orbit_total"], "20");
        let out = run(&parse(&["tables"])).unwrap();
        assert!(out.ok);
    }
}
