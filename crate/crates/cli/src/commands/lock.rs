use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sublock_core::idkll::KeyMemory;
use sublock_core::sublock::{
    corruption_report, lock_antisat_baseline, lock_design, lock_xor_baseline, BaselineLock, LockConfig, SublockError,
};
use sublock_core::Netlist;

use super::Stats;
use crate::args::{LockArgs, Scheme, SublockOptions};
use crate::exit::{CliError, Exit};
use crate::formats::{keymem_file, read_bench, write_bench, write_json, TOOL_VERSION};

/// Key bits per memory block for the single-key baselines.
const BASELINE_BLOCK: usize = 32;

#[derive(Clone, Debug, Serialize)]
pub struct LockLine {
    pub root: String,
    pub support: Vec<String>,
    pub key_inputs: Vec<String>,
    pub gates_removed: usize,
    pub gates_added: usize,
    pub pins: usize,
    pub complemented_unused_keys: bool,
}

/// A locked design with its memory and the figures that go into reports.
pub struct Locked {
    pub locked: Netlist,
    pub memory: Vec<KeyMemory>,
    pub num_locks: usize,
    pub corruption: f64,
    pub locks: Vec<LockLine>,
}

impl Locked {
    pub fn gate_delta(&self, original: &Netlist) -> i64 {
        self.locked.gates().len() as i64 - original.gates().len() as i64
    }
}

pub fn sublock_config(keys: usize, seed: u64, o: &SublockOptions) -> LockConfig {
    LockConfig {
        budget_key_bits: keys,
        key_bits_per_lock: o.key_bits_per_lock,
        sets_per_lock: o.sets_per_lock,
        support_sizes: o.support_sizes.clone(),
        selection: o.selection.into(),
        partition: o.partition.into(),
        policy: o.policy.into(),
        seed,
        fault_samples: o.fault_samples,
        corruption_trials: o.corruption_trials,
        reuse_cone: !o.no_reuse_cone,
    }
}

fn lock_error(e: SublockError) -> CliError {
    let code = match e {
        SublockError::InsufficientCandidates { .. } => Exit::InsufficientCandidates,
        SublockError::EquivalenceFailure { .. } => Exit::LockEquivalence,
        _ => Exit::Failure,
    };
    CliError::coded(code, e)
}

/// Constant memory blocks holding a single key.
fn constant_memory(locked: &Netlist, key: &[bool]) -> Vec<KeyMemory> {
    let names: Vec<String> = locked.key_inputs().iter().map(|&k| locked.name(k).to_string()).collect();
    names
        .chunks(BASELINE_BLOCK)
        .zip(key.chunks(BASELINE_BLOCK))
        .map(|(names, bits)| KeyMemory {
            key_inputs: names.to_vec(),
            support: Vec::new(),
            entries: vec![bits.iter().fold(0u64, |w, &b| w << 1 | b as u64)],
        })
        .collect()
}

pub fn lock_netlist(
    nl: &Netlist,
    scheme: Scheme,
    keys: usize,
    seed: u64,
    opts: &SublockOptions,
) -> Result<Locked, CliError> {
    let baseline = |lock: Result<BaselineLock, SublockError>, num_locks: usize| -> Result<Locked, CliError> {
        let lock = lock.map_err(lock_error)?;
        let memory = constant_memory(&lock.locked, &lock.correct_key);
        let corruption =
            corruption_report(&lock.locked, &memory, opts.corruption_trials.max(1), seed).map_err(lock_error)?;
        Ok(Locked {
            locked: lock.locked,
            memory,
            num_locks,
            corruption,
            locks: Vec::new(),
        })
    };
    match scheme {
        Scheme::Sublock => {
            let d = lock_design(nl, &sublock_config(keys, seed, opts)).map_err(lock_error)?;
            let locks = d
                .report
                .locks
                .iter()
                .map(|l| LockLine {
                    root: l.root.clone(),
                    support: l.support.clone(),
                    key_inputs: l.key_inputs.clone(),
                    gates_removed: l.gates_removed,
                    gates_added: l.gates_added,
                    pins: l.pins,
                    complemented_unused_keys: l.complemented_unused_keys,
                })
                .collect();
            Ok(Locked {
                locked: d.locked,
                memory: d.memory,
                num_locks: d.report.num_locks,
                corruption: d.report.corruption,
                locks,
            })
        }
        Scheme::Xor => baseline(lock_xor_baseline(nl, keys, seed), keys),
        Scheme::Antisat => baseline(lock_antisat_baseline(nl, keys, seed), 1),
    }
}

#[derive(Serialize)]
struct LockConfigJson<'a> {
    input: String,
    scheme: Scheme,
    keys: usize,
    #[serde(flatten)]
    sublock: &'a SublockOptions,
}

#[derive(Serialize)]
struct LockReportJson<'a> {
    tool_version: &'static str,
    seed: u64,
    config: LockConfigJson<'a>,
    num_locks: usize,
    key_bits_total: usize,
    gate_delta: i64,
    literal_delta: i64,
    depth_delta: i64,
    corruption: f64,
    original: Stats,
    locked: Stats,
    locks: &'a [LockLine],
}

/// `dir/name.bench` becomes `dir/name.locked`.
fn default_prefix(input: &Path) -> PathBuf {
    input.with_extension("locked")
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn run(args: &LockArgs) -> Result<Exit, CliError> {
    let nl = read_bench(&args.input)?;
    let out = args.out.clone().unwrap_or_else(|| default_prefix(&args.input));
    let l = lock_netlist(&nl, args.scheme, args.keys, args.seed, &args.sublock)?;
    let (a, b) = (Stats::of(&nl), Stats::of(&l.locked));
    let report = LockReportJson {
        tool_version: TOOL_VERSION,
        seed: args.seed,
        config: LockConfigJson {
            input: args.input.display().to_string(),
            scheme: args.scheme,
            keys: args.keys,
            sublock: &args.sublock,
        },
        num_locks: l.num_locks,
        key_bits_total: b.key_inputs,
        gate_delta: b.gates as i64 - a.gates as i64,
        literal_delta: b.literals as i64 - a.literals as i64,
        depth_delta: b.depth as i64 - a.depth as i64,
        corruption: l.corruption,
        original: a,
        locked: b,
        locks: &l.locks,
    };
    write_bench(&with_suffix(&out, ".bench"), &l.locked)?;
    write_json(Some(&with_suffix(&out, ".keymem.json")), &keymem_file(&l.memory))?;
    write_json(Some(&with_suffix(&out, ".report.json")), &report)?;
    Ok(Exit::Ok)
}
