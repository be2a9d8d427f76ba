//! Batch sweep: every circuit, key budget and seed is locked with SubLock
//! and the two baselines, attacked, and summarised in one JSON document.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use sublock_core::attack::AttackStatus;
use sublock_core::Netlist;

use super::attack::{run_attack, status_name};
use super::lock::{lock_netlist, Locked};
use crate::args::{ReportArgs, Scheme, SublockOptions};
use crate::exit::{CliError, Exit};
use crate::formats::{read_bench, write_json, TOOL_VERSION};

#[derive(Clone, Debug, Serialize)]
struct SchemeResult {
    /// Why the design could not be locked, if it could not.
    error: Option<String>,
    gate_delta: Option<i64>,
    literal_delta: Option<i64>,
    depth_delta: Option<i64>,
    corruption: Option<f64>,
    /// `KeyFound`, `WrongKey`, `UnsatNoKey`, `BudgetExceeded` or `null`
    /// when not attacked.
    status: Option<&'static str>,
    iterations: Option<usize>,
    wall_time_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
struct Row {
    circuit: String,
    keys: usize,
    seed: u64,
    sublock: SchemeResult,
    xor: SchemeResult,
    antisat: SchemeResult,
}

#[derive(Serialize)]
struct Summary {
    runs: usize,
    sublock_locked: usize,
    sublock_key_found: usize,
    xor_locked: usize,
    xor_key_found: usize,
    antisat_locked: usize,
    /// Rows where both locked and SubLock added at most as many gates as
    /// Anti-SAT, out of rows where both locked.
    overhead_not_worse: usize,
    overhead_compared: usize,
}

#[derive(Serialize)]
struct ReportConfigJson<'a> {
    circuits: Vec<String>,
    keys: &'a [usize],
    seeds: u64,
    jobs: usize,
    max_iters: usize,
    attack_antisat: bool,
    #[serde(flatten)]
    sublock: &'a SublockOptions,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    tool_version: &'static str,
    seed: u64,
    config: ReportConfigJson<'a>,
    summary: Summary,
    rows: Vec<Row>,
}

fn evaluate(nl: &Netlist, l: Result<Locked, CliError>, attack: bool, max_iters: usize) -> SchemeResult {
    let mut r = SchemeResult {
        error: None,
        gate_delta: None,
        literal_delta: None,
        depth_delta: None,
        corruption: None,
        status: None,
        iterations: None,
        wall_time_ms: None,
    };
    let l = match l {
        Ok(l) => l,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    r.gate_delta = Some(l.gate_delta(nl));
    r.literal_delta = Some(l.locked.literal_count() as i64 - nl.literal_count() as i64);
    r.depth_delta = Some(l.locked.depth() as i64 - nl.depth() as i64);
    r.corruption = Some(l.corruption);
    if attack && !l.locked.key_inputs().is_empty() {
        match run_attack(&l.locked, nl, max_iters, None, false, &mut |_| {}) {
            Ok(run) => {
                r.wall_time_ms = Some(run.wall_time_ms);
                match run.outcome {
                    Ok(a) => {
                        r.status = Some(status_name(a.status));
                        r.iterations = Some(a.iterations);
                    }
                    Err(_) => r.status = Some("BudgetExceeded"),
                }
            }
            Err(e) => r.error = Some(e.to_string()),
        }
    }
    r
}

fn run_one(circuit: &str, nl: &Netlist, keys: usize, seed: u64, args: &ReportArgs) -> Row {
    let opts = &args.sublock;
    Row {
        circuit: circuit.to_string(),
        keys,
        seed,
        sublock: evaluate(nl, lock_netlist(nl, Scheme::Sublock, keys, seed, opts), true, args.max_iters),
        xor: evaluate(nl, lock_netlist(nl, Scheme::Xor, keys, seed, opts), true, args.max_iters),
        antisat: evaluate(
            nl,
            lock_netlist(nl, Scheme::Antisat, keys, seed, opts),
            args.attack_antisat,
            args.max_iters,
        ),
    }
}

fn circuit_name(p: &std::path::Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn run(args: &ReportArgs) -> Result<Exit, CliError> {
    let circuits: Vec<(PathBuf, Netlist)> = args
        .circuits
        .iter()
        .map(|p| Ok((p.clone(), read_bench(p)?)))
        .collect::<Result<_, CliError>>()?;
    let mut tasks = Vec::new();
    for (ci, _) in circuits.iter().enumerate() {
        for &k in &args.keys {
            for s in 0..args.seeds {
                tasks.push((ci, k, args.seed.wrapping_add(s)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(CliError::failure)?;
    let rows: Vec<Row> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(ci, k, seed)| run_one(&circuit_name(&circuits[ci].0), &circuits[ci].1, k, seed, args))
            .collect()
    });

    let found = |s: &SchemeResult| s.status == Some(status_name(AttackStatus::KeyFound));
    let locked = |s: &SchemeResult| s.error.is_none();
    let compared: Vec<&Row> = rows.iter().filter(|r| locked(&r.sublock) && locked(&r.antisat)).collect();
    let summary = Summary {
        runs: rows.len(),
        sublock_locked: rows.iter().filter(|r| locked(&r.sublock)).count(),
        sublock_key_found: rows.iter().filter(|r| found(&r.sublock)).count(),
        xor_locked: rows.iter().filter(|r| locked(&r.xor)).count(),
        xor_key_found: rows.iter().filter(|r| found(&r.xor)).count(),
        antisat_locked: rows.iter().filter(|r| locked(&r.antisat)).count(),
        overhead_not_worse: compared.iter().filter(|r| r.sublock.gate_delta <= r.antisat.gate_delta).count(),
        overhead_compared: compared.len(),
    };
    let report = ReportJson {
        tool_version: TOOL_VERSION,
        seed: args.seed,
        config: ReportConfigJson {
            circuits: args.circuits.iter().map(|p| p.display().to_string()).collect(),
            keys: &args.keys,
            seeds: args.seeds,
            jobs: args.jobs,
            max_iters: args.max_iters,
            attack_antisat: args.attack_antisat,
            sublock: &args.sublock,
        },
        summary,
        rows,
    };
    write_json(args.out.as_deref(), &report)?;
    Ok(Exit::Ok)
}
