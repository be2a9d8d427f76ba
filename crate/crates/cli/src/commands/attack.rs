use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;
use sublock_core::attack::{default_max_iters, AttackError, AttackReport, AttackStatus, Dip, NetlistOracle, SatAttack};
use sublock_core::sat::CnfFormula;
use sublock_core::Netlist;

use crate::args::AttackArgs;
use crate::exit::{CliError, Exit};
use crate::formats::{bits, read_bench, write_json, write_text, TOOL_VERSION};

/// One line of the JSON-lines trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub dip_bits: String,
    pub oracle_bits: String,
}

impl TraceRecord {
    pub fn new(iter: usize, d: &Dip) -> Self {
        TraceRecord {
            iter,
            dip_bits: bits(&d.input),
            oracle_bits: bits(&d.output),
        }
    }
}

pub fn status_name(s: AttackStatus) -> &'static str {
    match s {
        AttackStatus::KeyFound => "KeyFound",
        AttackStatus::WrongKey => "WrongKey",
        AttackStatus::UnsatNoKey => "UnsatNoKey",
    }
}

pub struct AttackRun {
    /// `Err` only for budget exhaustion; other failures are returned as
    /// [`CliError`]s.
    pub outcome: Result<AttackReport, AttackError>,
    pub wall_time_ms: u64,
    pub formula: Option<CnfFormula>,
}

/// Runs the attack with `oracle` behind the black-box interface, calling
/// `on_dip` with every learned DIP.
pub fn run_attack(
    locked: &Netlist,
    oracle: &Netlist,
    max_iters: usize,
    time_limit: Option<Duration>,
    keep_formula: bool,
    on_dip: &mut dyn FnMut(&Dip),
) -> Result<AttackRun, CliError> {
    let start = Instant::now();
    let mut attack = SatAttack::new(locked).map_err(CliError::failure)?;
    let outcome = attack.run_with(&mut NetlistOracle::new(oracle), max_iters, &mut |d| {
        on_dip(d);
        match time_limit {
            Some(t) if start.elapsed() > t => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        }
    });
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let outcome = match outcome {
        Ok(r) => Ok(r),
        Err(e @ (AttackError::IterationBudgetExceeded(_) | AttackError::Interrupted(_))) => Err(e),
        Err(e) => return Err(CliError::failure(e)),
    };
    Ok(AttackRun {
        outcome,
        wall_time_ms,
        formula: keep_formula.then(|| attack.formula()),
    })
}

#[derive(Serialize)]
struct AttackConfigJson {
    locked: String,
    oracle: String,
    max_iters: usize,
    time_limit_s: Option<f64>,
}

#[derive(Serialize)]
struct AttackJson {
    tool_version: &'static str,
    seed: u64,
    config: AttackConfigJson,
    key_inputs: Vec<String>,
    status: &'static str,
    iterations: usize,
    candidate_key: Option<String>,
    /// True iff the candidate key was proven to restore the function.
    validated: bool,
    counterexample: Option<String>,
    dips: Vec<TraceRecord>,
    conflicts: u64,
    decisions: u64,
    wall_time_ms: u64,
}

fn open_trace(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

pub fn run(args: &AttackArgs) -> Result<Exit, CliError> {
    let locked = read_bench(&args.locked)?;
    let oracle = read_bench(&args.oracle)?;
    if !oracle.key_inputs().is_empty() {
        return Err(CliError::failure(format!("oracle {} has key inputs", args.oracle.display())));
    }
    let max_iters = args.max_iters.unwrap_or_else(|| default_max_iters(locked.key_inputs().len()));
    let time_limit = args.time_limit.map(Duration::from_secs_f64);

    let mut trace = args.trace.as_deref().map(open_trace).transpose()?;
    let mut trace_err = None;
    let mut iter = 0;
    let run = run_attack(&locked, &oracle, max_iters, time_limit, args.dump_cnf.is_some(), &mut |d| {
        iter += 1;
        if let Some(w) = trace.as_mut() {
            let line = serde_json::to_string(&TraceRecord::new(iter, d)).expect("trace records serialize");
            if let Err(e) = writeln!(w, "{line}") {
                trace_err.get_or_insert(e);
            }
        }
    })?;
    if let (Some(w), Some(path)) = (trace.as_mut(), args.trace.as_deref()) {
        if let Some(e) = trace_err.take() {
            return Err(CliError::io(path, e));
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    if let (Some(f), Some(path)) = (&run.formula, args.dump_cnf.as_deref()) {
        write_text(path, &f.to_dimacs())?;
    }

    let r = match run.outcome {
        Ok(r) => r,
        Err(e) => return Err(CliError::coded(Exit::Budget, e)),
    };
    let report = AttackJson {
        tool_version: TOOL_VERSION,
        seed: args.seed,
        config: AttackConfigJson {
            locked: args.locked.display().to_string(),
            oracle: args.oracle.display().to_string(),
            max_iters,
            time_limit_s: args.time_limit,
        },
        key_inputs: locked.key_inputs().iter().map(|&k| locked.name(k).to_string()).collect(),
        status: status_name(r.status),
        iterations: r.iterations,
        candidate_key: r.candidate_key.as_deref().map(bits),
        validated: r.status == AttackStatus::KeyFound,
        counterexample: r.counterexample.as_deref().map(bits),
        dips: r.dips.iter().enumerate().map(|(i, d)| TraceRecord::new(i + 1, d)).collect(),
        conflicts: r.conflicts,
        decisions: r.decisions,
        wall_time_ms: run.wall_time_ms,
    };
    write_json(args.report.as_deref(), &report)?;
    Ok(match r.status {
        AttackStatus::KeyFound => Exit::KeyFound,
        AttackStatus::WrongKey | AttackStatus::UnsatNoKey => Exit::Ok,
    })
}
