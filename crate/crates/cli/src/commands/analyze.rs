use serde::Serialize;
use sublock_core::attack::{attempts_antisat, attempts_total, MAX_EXACT_K};

use crate::args::{AnalyzeArgs, AttemptScheme};
use crate::exit::{CliError, Exit};
use crate::formats::{write_json, TOOL_VERSION};

/// Largest `k` for which `2^k` is printed in full.
const MAX_POWER_K: u32 = 4096;
/// Largest `k` whose `log10 PC(2^k)` still fits an `f64`.
const MAX_APPROX_K: u32 = 1000;

#[derive(Serialize)]
struct AnalyzeConfigJson {
    k: u32,
    scheme: AttemptScheme,
    approx: bool,
}

#[derive(Serialize, Debug, PartialEq)]
struct Log10Json {
    l: f64,
    lambda: Option<f64>,
    pc: f64,
    total: f64,
}

#[derive(Serialize)]
struct AnalyzeJson {
    tool_version: &'static str,
    seed: u64,
    config: AnalyzeConfigJson,
    k: u32,
    /// Decimal integers; `null` where not defined or beyond the exact
    /// limit.
    l: Option<String>,
    lambda: Option<String>,
    pc: Option<String>,
    total: Option<String>,
    increased: Option<String>,
    /// The count for the chosen scheme.
    attempts: Option<String>,
    log10: Option<Log10Json>,
}

/// `ln(n!)` by Stirling's series, accurate to about `1/(360 n^3)`.
fn ln_factorial(n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n) - 1.0 / (360.0 * n * n * n)
}

/// Base-10 logarithms of the counts. `PC(l) = floor(e * l!) - 1`, so
/// `log10 PC` is about `(ln l! + 1) / ln 10`.
fn log10_counts(k: u32) -> Log10Json {
    let l = (k as f64) * std::f64::consts::LOG10_2;
    let pc = (ln_factorial(2f64.powi(k as i32)) + 1.0) / std::f64::consts::LN_10;
    let total = pc.max(l) + (1.0 + 10f64.powf(-(pc - l).abs())).log10();
    Log10Json {
        l,
        lambda: k.is_multiple_of(2).then(|| l / 2.0),
        pc,
        total,
    }
}

pub fn run(args: &AnalyzeArgs) -> Result<Exit, CliError> {
    let k = args.k;
    if args.scheme == AttemptScheme::Antisat && k % 2 == 1 {
        return Err(CliError::failure(format!("the Anti-SAT count needs an even k, got {k}")));
    }
    let beyond = match args.scheme {
        AttemptScheme::Idkll => k > MAX_EXACT_K,
        _ => k > MAX_POWER_K,
    };
    if beyond && !args.approx {
        return Err(CliError::failure(format!(
            "k = {k} is beyond the exact limit for this scheme; pass --approx for logarithms"
        )));
    }
    if args.approx && k > MAX_APPROX_K {
        return Err(CliError::failure(format!("k = {k} is beyond the approximation range (at most {MAX_APPROX_K})")));
    }
    let exact_power = k <= MAX_POWER_K;
    let a = exact_power.then(|| attempts_total(k));
    fn s<T: ToString>(v: &Option<T>) -> Option<String> {
        v.as_ref().map(T::to_string)
    }
    let (l, lambda, pc, total, increased) = match &a {
        Some(a) => (Some(a.l.to_string()), s(&a.lambda), s(&a.pc), s(&a.total), s(&a.increased)),
        None => (None, None, None, None, None),
    };
    let attempts = match args.scheme {
        AttemptScheme::Conventional => l.clone(),
        AttemptScheme::Antisat => exact_power.then(|| attempts_antisat(k).expect("k is even").to_string()),
        AttemptScheme::Idkll => total.clone(),
    };
    let out = AnalyzeJson {
        tool_version: TOOL_VERSION,
        seed: args.seed,
        config: AnalyzeConfigJson {
            k,
            scheme: args.scheme,
            approx: args.approx,
        },
        k,
        l,
        lambda,
        pc,
        total,
        increased,
        attempts,
        log10: args.approx.then(|| log10_counts(k)),
    };
    write_json(None, &out)?;
    Ok(Exit::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sublock_core::attack::permuted_combinations;

    #[test]
    fn stirling_matches_exact_counts() {
        for k in 3..=12u32 {
            let exact = permuted_combinations(1 << k).unwrap().to_string();
            let got = log10_counts(k).pc;
            // The exact value has floor(log10) + 1 digits.
            assert_eq!(got.floor() as usize + 1, exact.len(), "k = {k}");
            let n = exact.len().min(15);
            let lead = exact[..n].parse::<f64>().unwrap() / 10f64.powi(n as i32 - 1);
            assert!((10f64.powf(got.fract()) / lead - 1.0).abs() < 1e-4, "k = {k}");
        }
    }

    #[test]
    fn total_is_dominated_by_pc() {
        let c = log10_counts(30);
        assert!((c.total - c.pc).abs() < 1e-9);
        assert_eq!(c.lambda, Some(15.0 * std::f64::consts::LOG10_2));
        assert!((log10_counts(0).l).abs() < 1e-12);
    }
}
