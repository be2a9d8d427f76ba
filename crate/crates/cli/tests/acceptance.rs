//! End-to-end acceptance checks. Each `criterion_*` test prints one
//! `PASS`/`FAIL` line on stderr (uncaptured) before asserting.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sublock_core::attack::{
    attempts_antisat, attempts_conventional, attempts_total, permuted_combinations, permuted_combinations_closed_form,
};
use sublock_core::idkll::{activate, lock_function_with, verify_no_universal_key, DontCarePolicy, KeyPlan, LockOptions};
use sublock_core::netlist::patterns::bits_of;
use sublock_core::netlist::{emit_bench, parse_bench};
use sublock_core::sat::{
    check_equivalence, exhaustive_equivalence, miter_equivalence, tseitin, Bindings, Signal, Solver,
};
use sublock_core::sublock::{lock_design, LockConfig};
use sublock_core::tables::{Ternary, TruthTable};
use sublock_core::{GateKind, Netlist, NetlistBuilder};

const ISCAS: [&str; 5] = ["c432", "c499", "c880", "c1355", "c1908"];

fn verdict(n: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {tag}: {detail}");
    assert!(pass, "criterion {n}: {detail}");
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(rel: &str) -> PathBuf {
    root().join("corpus").join(rel)
}

fn iscas(name: &str) -> PathBuf {
    corpus(&format!("iscas85/{name}.bench"))
}

fn work(sub: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(sub);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sublock")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ext(prefix: &Path, e: &str) -> PathBuf {
    PathBuf::from(format!("{}.{e}", prefix.display()))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).expect("valid JSON")
}

fn load(p: &Path) -> Netlist {
    parse_bench(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// One invocation of `lock`.
#[derive(Clone, Debug)]
struct Lock {
    circuit: String,
    original: PathBuf,
    prefix: PathBuf,
    keys: usize,
    seed: u64,
}

impl Lock {
    fn report(&self) -> Value {
        read_json(&ext(&self.prefix, "report.json"))
    }
}

fn lock(dir: &Path, circuit: &str, original: &Path, scheme: &str, keys: usize, seed: u64) -> (i32, Lock) {
    let prefix = dir.join(format!("{circuit}_{scheme}_k{keys}_s{seed}"));
    let o = run(&[
        "lock",
        s(original),
        "--scheme",
        scheme,
        "--keys",
        &keys.to_string(),
        "--seed",
        &seed.to_string(),
        "-o",
        s(&prefix),
    ]);
    let l = Lock {
        circuit: circuit.to_string(),
        original: original.to_path_buf(),
        prefix,
        keys,
        seed,
    };
    (code(&o), l)
}

fn must_lock(dir: &Path, circuit: &str, original: &Path, scheme: &str, keys: usize, seed: u64) -> Lock {
    let (c, l) = lock(dir, circuit, original, scheme, keys, seed);
    assert_eq!(c, 0, "lock {circuit} {scheme} k={keys} seed={seed}");
    l
}

/// Attack report and exit code.
fn attack(l: &Lock, extra: &[&str]) -> (i32, Option<Value>) {
    let report = ext(&l.prefix, "attack.json");
    let _ = std::fs::remove_file(&report);
    let bench = ext(&l.prefix, "bench");
    let mut args = vec!["attack", s(&bench), "--oracle", s(&l.original), "--report", s(&report)];
    args.extend_from_slice(extra);
    let o = run(&args);
    let r = report.exists().then(|| read_json(&report));
    (code(&o), r)
}

fn verify(l: &Lock) -> (i32, Value) {
    let o = run(&[
        "verify",
        s(&ext(&l.prefix, "bench")),
        "--keymem",
        s(&ext(&l.prefix, "keymem.json")),
        "--original",
        s(&l.original),
    ]);
    (code(&o), serde_json::from_slice(&o.stdout).expect("verdict JSON"))
}

/// Random design of about c17 size in which every gate without fanout is
/// an output.
fn synthetic_bench(rng: &mut ChaCha8Rng, inputs: usize, gates: usize) -> String {
    const KINDS: [&str; 6] = ["AND", "NAND", "OR", "NOR", "XOR", "XNOR"];
    let mut nets: Vec<String> = (0..inputs).map(|i| format!("i{i}")).collect();
    let mut used = vec![false; inputs + gates];
    let mut body = String::new();
    for g in 0..gates {
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let arity = if kind.starts_with('X') { 2 } else { rng.gen_range(2..=3) };
        let lo = nets.len().saturating_sub(inputs + 4);
        let mut ins: Vec<usize> = Vec::new();
        while ins.len() < arity {
            let i = rng.gen_range(lo..nets.len());
            if !ins.contains(&i) {
                ins.push(i);
            }
        }
        for &i in &ins {
            used[i] = true;
        }
        let args: Vec<&str> = ins.iter().map(|&i| nets[i].as_str()).collect();
        body += &format!("g{g} = {kind}({})\n", args.join(", "));
        nets.push(format!("g{g}"));
    }
    let mut text: String = (0..inputs).map(|i| format!("INPUT(i{i})\n")).collect();
    for (i, n) in nets.iter().enumerate().skip(inputs) {
        if !used[i] {
            text += &format!("OUTPUT({n})\n");
        }
    }
    text + &body
}

/// SubLock locks shared by criteria 1, 3, 4 and 7.
fn sublock_locks() -> &'static [Lock] {
    static LOCKS: OnceLock<Vec<Lock>> = OnceLock::new();
    LOCKS.get_or_init(|| {
        let dir = work("sublock");
        let mut jobs: Vec<(String, PathBuf, usize, u64)> = Vec::new();
        for c in ISCAS {
            for keys in [16, 32] {
                for seed in 0..3 {
                    jobs.push((c.to_string(), iscas(c), keys, seed));
                }
            }
        }
        for keys in [2, 4] {
            for seed in 0..5 {
                jobs.push(("c17".into(), iscas("c17"), keys, seed));
            }
        }
        for seed in 0..3 {
            jobs.push(("s27".into(), corpus("iscas89/s27.bench"), 2, seed));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for i in 0..16 {
            let path = dir.join(format!("syn{i}.bench"));
            std::fs::write(&path, synthetic_bench(&mut rng, 5, 9)).unwrap();
            jobs.push((format!("syn{i}"), path, 4, i));
        }
        std::thread::scope(|sc| {
            let handles: Vec<_> = jobs
                .chunks(jobs.len().div_ceil(8))
                .map(|chunk| {
                    let dir = &dir;
                    sc.spawn(move || {
                        chunk
                            .iter()
                            .map(|(c, p, keys, seed)| {
                                let (code, l) = lock(dir, c, p, "sublock", *keys, *seed);
                                if code == 2 && c.starts_with("syn") {
                                    // Too few cuts for two locks; settle for one.
                                    return must_lock(dir, c, p, "sublock", 2, *seed);
                                }
                                assert_eq!(code, 0, "lock {c} k={keys} seed={seed}");
                                l
                            })
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        })
    })
}

/// `verify` verdicts for [`sublock_locks`], in the same order.
fn sublock_verdicts() -> &'static [(i32, Value)] {
    static V: OnceLock<Vec<(i32, Value)>> = OnceLock::new();
    V.get_or_init(|| {
        let locks = sublock_locks();
        std::thread::scope(|sc| {
            let handles: Vec<_> = locks
                .chunks(locks.len().div_ceil(8))
                .map(|chunk| sc.spawn(move || chunk.iter().map(verify).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        })
    })
}

#[test]
fn criterion_1_sublock_resists_the_sat_attack() {
    let locks = sublock_locks();
    let mut key_found = Vec::new();
    let mut other = Vec::new();
    let (mut wrong, mut unsat) = (0, 0);
    for l in locks {
        let (c, r) = attack(l, &[]);
        match c {
            10 => key_found.push(format!("{} k={} seed={}", l.circuit, l.keys, l.seed)),
            0 => match r.as_ref().and_then(|r| r["status"].as_str()) {
                Some("WrongKey") => wrong += 1,
                Some("UnsatNoKey") => unsat += 1,
                s => other.push(format!("{} status {s:?}", l.circuit)),
            },
            c => other.push(format!("{} k={} seed={} exit {c}", l.circuit, l.keys, l.seed)),
        }
    }
    let iscas_runs = locks.iter().filter(|l| l.circuit.starts_with('c') && l.keys >= 16).count();
    let pass = locks.len() >= 50 && iscas_runs >= 30 && key_found.is_empty() && other.is_empty();
    verdict(
        1,
        pass,
        &format!(
            "{} SubLock attacks ({iscas_runs} on ISCAS-85 at 16/32 keys): {wrong} WrongKey, {unsat} UnsatNoKey, \
             KeyFound {key_found:?}, other {other:?}",
            locks.len()
        ),
    );
}

#[test]
fn criterion_2_baselines_are_broken() {
    let dir = work("baseline");
    let mut runs = 0;
    let mut failures = Vec::new();
    for (c, keys) in [("c17", &[2usize, 4, 6][..]), ("c432", &[2, 4, 8, 16][..])] {
        for &k in keys {
            for seed in 0..3 {
                runs += 1;
                let l = must_lock(&dir, c, &iscas(c), "xor", k, seed);
                let (code, r) = attack(&l, &[]);
                let validated = r.as_ref().is_some_and(|r| r["validated"] == true && r["status"] == "KeyFound");
                if code != 10 || !validated {
                    failures.push(format!("{c} k={k} seed={seed} exit {code}"));
                }
            }
        }
    }
    let mut antisat = Vec::new();
    for seed in 0..2 {
        let l = must_lock(&dir, "c432", &iscas("c432"), "antisat", 16, seed);
        let (code, r) = attack(&l, &["--max-iters", "100000"]);
        let iters = r.as_ref().and_then(|r| r["iterations"].as_u64()).unwrap_or(0);
        antisat.push((code, iters));
    }
    // 2^(16/2) attempts with two iterations of slack on the low side.
    let floor = (1u64 << 7) - 2;
    let anti_ok = antisat.iter().all(|&(c, i)| c == 10 && i >= floor);
    verdict(
        2,
        runs >= 20 && failures.is_empty() && anti_ok,
        &format!(
            "{runs} XOR-baseline attacks, failures {failures:?}; Anti-SAT k=16 on c432 (exit, DIPs) {antisat:?}, \
             needing >= {floor}"
        ),
    );
}

#[test]
fn criterion_3_activation_restores_the_function() {
    let mut bad = Vec::new();
    let mut methods = (0, 0);
    let mut check = |l: &Lock, v: &Value| {
        if v["equivalent"] != true {
            bad.push(format!("{} {}", l.prefix.display(), v["counterexample"]));
        }
        let n = load(&l.original).primary_inputs().len();
        let want = if n <= 16 { "exhaustive" } else { "sat-miter" };
        if v["equivalence_method"] != want {
            bad.push(format!("{}: method {}", l.circuit, v["equivalence_method"]));
        }
        if want == "exhaustive" {
            methods.0 += 1;
        } else {
            methods.1 += 1;
        }
    };
    let locks = sublock_locks();
    for (l, (_, v)) in locks.iter().zip(sublock_verdicts()) {
        check(l, v);
    }
    // The baselines go through the same memory format.
    let dir = work("equiv");
    let mut baselines = 0;
    let mut wrong_exit = Vec::new();
    for c in ["c17", "c432", "c880"] {
        for scheme in ["xor", "antisat"] {
            let keys = if c == "c17" { 4 } else { 16 };
            let l = must_lock(&dir, c, &iscas(c), scheme, keys, 0);
            let (code, v) = verify(&l);
            check(&l, &v);
            if code != 6 {
                wrong_exit.push(format!("{c} {scheme}: verify exit {code}"));
            }
            baselines += 1;
        }
    }
    bad.extend(wrong_exit);
    verdict(
        3,
        bad.is_empty(),
        &format!(
            "{} SubLock + {baselines} baseline locks activated; {} exhaustive, {} SAT-miter; failures {bad:?}",
            locks.len(),
            methods.0,
            methods.1
        ),
    );
}

#[test]
fn criterion_4_no_key_unlocks_everything() {
    let verdicts = sublock_verdicts();
    let failed: Vec<String> = sublock_locks()
        .iter()
        .zip(verdicts)
        .filter(|(_, (c, v))| *c != 0 || v["universal_key_check"] != "passed")
        .map(|(l, (c, v))| format!("{} k={} seed={} exit {c} {}", l.circuit, l.keys, l.seed, v["universal_key"]))
        .collect();

    // The sum output of a half adder; key 01 unlocks AB in {00, 01}, key 10
    // unlocks {10, 11}.
    let plan = KeyPlan::new(2, 2, vec![0, 0, 1, 1], vec![0b01, 0b10], DontCarePolicy::DontCare).unwrap();
    let original = TruthTable::parse_column(2, "0110").unwrap();
    // Two-level realisation, as read off a K-map.
    let opts = LockOptions {
        two_level: true,
        ..LockOptions::default()
    };
    let lf = lock_function_with(&original, &plan, &opts).unwrap();
    let check = verify_no_universal_key(&lf);
    let r = lf.realised();
    let correct_on = |key: usize| -> Vec<usize> {
        (0..4)
            .filter(|&x| original.get(0, x).admits(r.get(0, key << 2 | x) == Ternary::One))
            .collect()
    };
    let (k00, k11) = (correct_on(0b00), correct_on(0b11));
    let fixture_ok = check.ok
        && check.universal_keys().is_empty()
        && check.partially_correct(&plan) == [0b00, 0b11]
        && !k00.is_empty()
        && !k11.is_empty()
        && k00.len() < 4
        && k11.len() < 4;
    verdict(
        4,
        failed.is_empty() && fixture_ok,
        &format!(
            "{} emitted locks passed the universal-key search, failures {failed:?}; half adder: no universal key = {}, \
             key 00 correct on AB {k00:?} of 0..4, key 11 on AB {k11:?}",
            verdicts.len(),
            check.ok
        ),
    );
}

/// Ordered selections of one or more distinct items out of `l`, counted by
/// walking every selection.
fn enumerate_selections(l: usize) -> u64 {
    fn walk(used: &mut Vec<bool>) -> u64 {
        let mut n = 0;
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                n += 1 + walk(used);
                used[i] = false;
            }
        }
        n
    }
    walk(&mut vec![false; l])
}

#[test]
fn criterion_5_attempt_counts() {
    let mut bad = Vec::new();
    for l in 1..=6u64 {
        let brute = enumerate_selections(l as usize).to_string();
        let rec = permuted_combinations(l).unwrap().to_string();
        let closed = permuted_combinations_closed_form(l).unwrap().to_string();
        if rec != brute || closed != brute {
            bad.push(format!("l={l}: enumeration {brute}, recurrence {rec}, closed form {closed}"));
        }
    }
    let expect = [
        ("PC(2)", permuted_combinations(2).unwrap().to_string(), "4"),
        ("PC(4)", permuted_combinations(4).unwrap().to_string(), "64"),
        ("total(1)", attempts_total(1).total.unwrap().to_string(), "6"),
        ("total(2)", attempts_total(2).total.unwrap().to_string(), "68"),
        ("antisat(16)", attempts_antisat(16).unwrap().to_string(), "256"),
        ("conventional(16)", attempts_conventional(16).to_string(), "65536"),
    ];
    for (what, got, want) in &expect {
        if got != want {
            bad.push(format!("{what} = {got}, expected {want}"));
        }
    }
    // The CLI reports the same numbers.
    let o = run(&["analyze", "--k", "2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    if code(&o) != 0 || v["total"] != "68" || v["pc"] != "64" {
        bad.push(format!("analyze --k 2: {v}"));
    }
    verdict(5, bad.is_empty(), &format!("enumeration matches both PC forms for l = 1..6; mismatches {bad:?}"));
}

/// Small two-level example: Y = NOT(c AND d) OR (d AND e) feeds Z together
/// with X = a AND b, and W = b XOR c is a second output.
const FIG7: &str = "\
INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\n\
OUTPUT(Z)\nOUTPUT(W)\n\
n1 = NAND(c, d)\nn2 = AND(d, e)\nY = OR(n1, n2)\n\
X = AND(a, b)\nZ = OR(X, Y)\nW = XOR(b, c)\n";

#[test]
fn criterion_6_small_cone_lock() {
    let nl = parse_bench(FIG7).unwrap();
    let mut found = None;
    for seed in 0..64 {
        let config = LockConfig {
            budget_key_bits: 2,
            support_sizes: vec![3],
            seed,
            ..LockConfig::default()
        };
        let Ok(d) = lock_design(&nl, &config) else { continue };
        let l = &d.report.locks[0];
        if l.root == "Y" && l.support == ["c", "d", "e"] {
            found = Some(d);
            break;
        }
    }
    let Some(d) = found else {
        verdict(6, false, "no seed in 0..64 locks the Y cone over (c, d, e)");
        return;
    };
    let act = activate(&d.locked, &d.memory).unwrap();
    let eq = check_equivalence(&nl, &act, &Bindings::by_name(&nl, &act).unwrap()).unwrap();
    let l = &d.report.locks[0];
    verdict(
        6,
        eq.equivalent && d.report.gate_delta <= 5,
        &format!(
            "Y cone: {} gates replaced by {}, gate delta {} (bound 5), activated design equivalent = {}",
            l.gates_removed, l.gates_added, d.report.gate_delta, eq.equivalent
        ),
    );
}

#[test]
fn criterion_7_overhead_below_antisat() {
    let dir = work("overhead");
    let mut rows = Vec::new();
    for l in sublock_locks().iter().filter(|l| ISCAS.contains(&l.circuit.as_str()) && l.keys == 16) {
        let a = must_lock(&dir, &l.circuit, &l.original, "antisat", 16, l.seed);
        let sub = l.report()["gate_delta"].as_i64().unwrap();
        let anti = a.report()["gate_delta"].as_i64().unwrap();
        rows.push((l.circuit.clone(), l.seed, sub, anti));
    }
    let worse: Vec<_> = rows.iter().filter(|r| r.2 > r.3).collect();
    let circuits: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.0.as_str()).collect();
    verdict(
        7,
        circuits.len() >= 3 && worse.is_empty(),
        &format!("k=16 (circuit, seed, SubLock delta, Anti-SAT delta): {rows:?}"),
    );
}

fn random_netlist(rng: &mut ChaCha8Rng, inputs: usize, gates: usize, outputs: usize) -> Netlist {
    const KINDS: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];
    let mut b = NetlistBuilder::new();
    let mut nets: Vec<_> = (0..inputs).map(|i| b.add_input(&format!("i{i}")).unwrap()).collect();
    for g in 0..gates {
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let arity = match kind {
            GateKind::Not | GateKind::Buf => 1,
            GateKind::Xor | GateKind::Xnor => 2,
            _ => rng.gen_range(2..=3),
        };
        let ins: Vec<_> = (0..arity).map(|_| nets[rng.gen_range(0..nets.len())]).collect();
        let out = b.net(&format!("g{g}"));
        b.add_gate(kind, &ins, out).unwrap();
        nets.push(out);
    }
    for k in 0..outputs.min(nets.len() - inputs) {
        b.add_output(nets[nets.len() - 1 - k]);
    }
    b.finish().unwrap()
}

/// `nl` with one random gate changed to another kind.
fn mutate(nl: &Netlist, rng: &mut ChaCha8Rng) -> Netlist {
    let text = emit_bench(nl);
    let g = &nl.gates()[rng.gen_range(0..nl.gates().len())];
    let name = nl.name(g.output);
    let swap = match g.kind {
        GateKind::And => "OR",
        GateKind::Or => "AND",
        GateKind::Nand => "NOR",
        GateKind::Nor => "NAND",
        GateKind::Xor => "XNOR",
        GateKind::Xnor => "XOR",
        GateKind::Not => "BUFF",
        _ => "NOT",
    };
    let from = format!("\n{name} = {}(", g.kind.bench_name());
    parse_bench(&text.replacen(&from, &format!("\n{name} = {swap}("), 1)).unwrap()
}

fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = ["iscas85", "iscas89"]
        .iter()
        .flat_map(|d| std::fs::read_dir(corpus(d)).unwrap())
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bench"))
        .collect();
    v.sort();
    v
}

#[test]
fn criterion_8_infrastructure() {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // Bench round trip, with simulation on random words as a semantic check.
    let files = corpus_files();
    for p in &files {
        let nl = load(p);
        let once = emit_bench(&nl);
        let back = parse_bench(&once).unwrap();
        let words: Vec<u64> = (0..nl.primary_inputs().len()).map(|_| rng.gen()).collect();
        if emit_bench(&back) != once || nl.eval_words(&words, &[]).unwrap() != back.eval_words(&words, &[]).unwrap() {
            bad.push(format!("round trip {}", p.display()));
        }
    }

    // Tseitin models against simulation on every input.
    for t in 0..500 {
        let n = rng.gen_range(1..=6);
        let (g, o) = (rng.gen_range(1..=20), rng.gen_range(1..=3));
        let nl = random_netlist(&mut rng, n, g, o);
        let enc = tseitin(&nl);
        let mut solver = Solver::new();
        solver.add_formula(&enc.formula);
        for p in 0..1u64 << n {
            let x = bits_of(p, n);
            let assume: Vec<_> = nl
                .primary_inputs()
                .iter()
                .zip(&x)
                .map(|(&pi, &v)| match enc.net(pi) {
                    Signal::Lit(l) => {
                        if v {
                            l
                        } else {
                            !l
                        }
                    }
                    Signal::Const(_) => unreachable!("inputs are variables"),
                })
                .collect();
            let model = solver.solve(&assume).model.expect("encodings are satisfiable");
            let got: Vec<bool> = nl.primary_outputs().iter().map(|&o| enc.net(o).eval(&model)).collect();
            if got != nl.simulate(&x, &[]).unwrap() {
                bad.push(format!("tseitin netlist {t} input {p}"));
                break;
            }
        }
    }

    // Miter verdicts against exhaustive ones for every small circuit.
    let mut small: Vec<Netlist> = files.iter().map(|p| load(p)).filter(|nl| nl.primary_inputs().len() <= 12).collect();
    small.push(parse_bench(FIG7).unwrap());
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let g = rng.gen_range(1..=30);
        small.push(random_netlist(&mut rng, n, g, 2));
    }
    let mut pairs = 0;
    for a in &small {
        let mut others = vec![a.clone(), mutate(a, &mut rng)];
        if let Ok(d) = lock_design(a, &LockConfig { budget_key_bits: 2, ..LockConfig::default() }) {
            others.push(activate(&d.locked, &d.memory).unwrap());
        }
        for b in &others {
            let bind = Bindings::by_name(a, b).unwrap();
            let m = miter_equivalence(a, b, &bind).unwrap();
            let e = exhaustive_equivalence(a, b, &bind).unwrap();
            pairs += 1;
            if m.equivalent != e.equivalent {
                bad.push(format!("miter disagrees: {} inputs", a.primary_inputs().len()));
            }
        }
    }

    // The whole pipeline twice with one seed.
    let (d1, d2) = (work("det1"), work("det2"));
    let mut outputs = Vec::new();
    for d in [&d1, &d2] {
        let l = must_lock(d, "c880", &iscas("c880"), "sublock", 16, 42);
        let (c, r) = attack(&l, &[]);
        let mut r = r.expect("attack report");
        r["wall_time_ms"] = Value::Null;
        r["config"]["locked"] = Value::Null;
        let files: Vec<Vec<u8>> =
            ["bench", "keymem.json", "report.json"].iter().map(|e| std::fs::read(ext(&l.prefix, e)).unwrap()).collect();
        outputs.push((files, c, r));
    }
    if outputs[0] != outputs[1] {
        bad.push("lock or attack output differs between identical runs".into());
    }

    verdict(
        8,
        bad.is_empty(),
        &format!(
            "{} corpus round trips, 500 Tseitin netlists, {pairs} miter/exhaustive pairs, deterministic pipeline; \
             failures {bad:?}",
            files.len()
        ),
    );
}
