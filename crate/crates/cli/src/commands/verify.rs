//! Activation equivalence plus a search for a single key that unlocks
//! every input.
//!
//! The search is the SAT attack with the original as oracle. When the DIP
//! loop ends, every key consistent with the observed DIPs behaves like
//! every other on all inputs, and a universal key would be one of them. So
//! the attack reports `KeyFound` exactly when a universal key exists.

use serde::Serialize;
use sublock_core::attack::{default_max_iters, AttackStatus};
use sublock_core::idkll::activate;
use sublock_core::sat::{check_equivalence, Bindings, EXHAUSTIVE_LIMIT};

use super::attack::run_attack;
use crate::args::VerifyArgs;
use crate::exit::{CliError, Exit};
use crate::formats::{bits, read_bench, read_keymem, write_json, TOOL_VERSION};

#[derive(Serialize)]
struct VerifyConfigJson {
    locked: String,
    keymem: String,
    original: String,
    max_iters: usize,
}

#[derive(Serialize)]
struct VerdictJson {
    tool_version: &'static str,
    seed: u64,
    config: VerifyConfigJson,
    equivalent: bool,
    equivalence_method: &'static str,
    /// Input values (original input order) on which the activated design
    /// differs.
    counterexample: Option<String>,
    /// `passed`, `failed`, `inconclusive` or `not-run`.
    universal_key_check: &'static str,
    universal_key: Option<String>,
    search_iterations: Option<usize>,
    verdict: &'static str,
}

pub fn run(args: &VerifyArgs) -> Result<Exit, CliError> {
    let locked = read_bench(&args.locked)?;
    let memory = read_keymem(&args.keymem)?;
    let original = read_bench(&args.original)?;
    let names = |nl: &sublock_core::Netlist| -> Vec<String> {
        nl.primary_inputs().iter().map(|&i| nl.name(i).to_string()).collect()
    };
    if names(&locked) != names(&original) {
        return Err(CliError::failure("locked and original designs have different primary inputs"));
    }
    let max_iters = args.max_iters.unwrap_or_else(|| default_max_iters(locked.key_inputs().len()));
    let mut verdict = VerdictJson {
        tool_version: TOOL_VERSION,
        seed: args.seed,
        config: VerifyConfigJson {
            locked: args.locked.display().to_string(),
            keymem: args.keymem.display().to_string(),
            original: args.original.display().to_string(),
            max_iters,
        },
        equivalent: false,
        equivalence_method: if original.primary_inputs().len() <= EXHAUSTIVE_LIMIT { "exhaustive" } else { "sat-miter" },
        counterexample: None,
        universal_key_check: "not-run",
        universal_key: None,
        search_iterations: None,
        verdict: "fail",
    };

    let act = activate(&locked, &memory).map_err(|e| CliError::parse(&args.keymem, e))?;
    let bind = Bindings::by_name(&original, &act).map_err(CliError::failure)?;
    let eq = check_equivalence(&original, &act, &bind).map_err(CliError::failure)?;
    verdict.equivalent = eq.equivalent;
    verdict.counterexample = eq.counterexample.as_deref().map(bits);
    if !eq.equivalent {
        write_json(None, &verdict)?;
        return Ok(Exit::VerifyEquivalence);
    }

    let code = if locked.key_inputs().is_empty() {
        // Nothing is locked, so the empty key is trivially universal.
        verdict.universal_key_check = "failed";
        verdict.universal_key = Some(String::new());
        Exit::UniversalKey
    } else {
        let run = run_attack(&locked, &original, max_iters, None, false, &mut |_| {})?;
        match run.outcome {
            Ok(r) => {
                verdict.search_iterations = Some(r.iterations);
                if r.status == AttackStatus::KeyFound {
                    verdict.universal_key_check = "failed";
                    verdict.universal_key = r.candidate_key.as_deref().map(bits);
                    Exit::UniversalKey
                } else {
                    verdict.universal_key_check = "passed";
                    verdict.verdict = "pass";
                    Exit::Ok
                }
            }
            Err(_) => {
                verdict.universal_key_check = "inconclusive";
                Exit::Budget
            }
        }
    };
    write_json(None, &verdict)?;
    Ok(code)
}
