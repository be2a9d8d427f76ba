//! Locking by sub-circuit replacement.
//!
//! Small single-output cones (cuts) of the design are replaced by their
//! IDKLL locks. Every replacement must keep the design equivalent once the
//! key memories are attached, and every key value of every lock must be
//! visible at the primary outputs (otherwise the lock adds a key that the
//! rest of the design masks, which a SAT attack would simply learn).
//!
//! Conventional XOR/XNOR and Anti-SAT insertion are provided as baselines.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::idkll::{
    activate, build_key_memory, lock_function_with, make_key_plan_with, DontCarePolicy, IdkllError, KeyMemory,
    LockOptions, LockedFunction, PartitionStrategy,
};
use crate::netlist::{patterns, BuildNet, GateKind, NetId, Netlist, NetlistBuilder, NetlistError};
use crate::rng::{seeded, STREAM_GATE, STREAM_LOCK_BASE, STREAM_SELECT};
use crate::sat::{check_equivalence, Bindings, EquivError};
use crate::tables::{table_of_netlist, TableError};

mod baseline;
mod metrics;

pub use baseline::{lock_antisat_baseline, lock_xor_baseline, BaselineLock};
pub use metrics::{corruption_exhaustive, corruption_report, fault_impact, DEFAULT_FAULT_SAMPLES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SublockError {
    #[error("design already has key inputs")]
    AlreadyLocked,
    #[error("key budget {budget} is not a multiple of {per_lock} key bits per lock")]
    BadBudget { budget: usize, per_lock: usize },
    #[error("requested {requested} locks but only {available} disjoint usable cuts exist")]
    InsufficientCandidates { requested: usize, available: usize },
    #[error("activated design differs from the original on input {counterexample:?}")]
    EquivalenceFailure { counterexample: Vec<bool> },
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Idkll(#[from] IdkllError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A single-output cone that can be cut out of the design.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CutCandidate {
    pub root: NetId,
    /// Leaves in ascending id order.
    pub support: Vec<NetId>,
    /// Gate indices of the cone, ascending; the last is the root's driver.
    pub internal_gates: Vec<usize>,
}

impl CutCandidate {
    fn overlaps(&self, other: &CutCandidate) -> bool {
        self.internal_gates.iter().any(|g| other.internal_gates.binary_search(g).is_ok())
    }
}

/// One cut per gate output: the cone is grown from the root gate by
/// absorbing leaves whose every fanout is already inside it, the latest
/// leaf first, while the leaf count stays within the largest requested
/// size. Cuts whose final leaf count is in `support_sizes` are returned in
/// root order.
pub fn enumerate_cuts(nl: &Netlist, support_sizes: &[usize]) -> Vec<CutCandidate> {
    let Some(&max_size) = support_sizes.iter().max() else {
        return Vec::new();
    };
    let fanouts = nl.fanouts();
    let is_po: BTreeSet<NetId> = nl.primary_outputs().iter().copied().collect();
    let mut cuts = Vec::new();
    for (gi, g) in nl.gates().iter().enumerate() {
        if g.kind.is_const() {
            continue;
        }
        let mut cone: BTreeSet<usize> = BTreeSet::from([gi]);
        let mut leaves: BTreeSet<NetId> = g.inputs.iter().copied().collect();
        if leaves.len() > max_size {
            continue;
        }
        loop {
            let grown = leaves.iter().rev().find_map(|&l| {
                let d = nl.driver(l)?;
                if nl.gates()[d].kind.is_const()
                    || is_po.contains(&l)
                    || !fanouts[l.index()].iter().all(|f| cone.contains(f))
                {
                    return None;
                }
                let mut next = leaves.clone();
                next.remove(&l);
                next.extend(nl.gates()[d].inputs.iter().copied());
                (next.len() <= max_size).then_some((d, next))
            });
            match grown {
                Some((d, next)) => {
                    cone.insert(d);
                    leaves = next;
                }
                None => break,
            }
        }
        if support_sizes.contains(&leaves.len()) {
            cuts.push(CutCandidate {
                root: g.output,
                support: leaves.into_iter().collect(),
                internal_gates: cone.into_iter().collect(),
            });
        }
    }
    cuts
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Selection {
    /// Seeded uniform order.
    #[default]
    Random,
    /// Descending fault impact of the root, ties by root id.
    FaultImpact,
}

/// Order in which candidates are considered.
pub fn rank_cuts(
    nl: &Netlist,
    cands: &[CutCandidate],
    strategy: Selection,
    seed: u64,
    fault_samples: usize,
) -> Result<Vec<usize>, SublockError> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    match strategy {
        Selection::Random => order.shuffle(&mut seeded(seed, STREAM_SELECT)),
        Selection::FaultImpact => {
            let impact = cands
                .iter()
                .map(|c| fault_impact(nl, c.root, fault_samples, seed))
                .collect::<Result<Vec<f64>, _>>()?;
            order.sort_by(|&a, &b| impact[b].total_cmp(&impact[a]).then(cands[a].root.cmp(&cands[b].root)));
        }
    }
    Ok(order)
}

/// Pairwise disjoint cuts for `budget_key_bits / key_bits_per_lock` locks,
/// taken greedily in [`rank_cuts`] order.
pub fn select_cuts(
    nl: &Netlist,
    cands: &[CutCandidate],
    budget_key_bits: usize,
    key_bits_per_lock: usize,
    strategy: Selection,
    seed: u64,
) -> Result<Vec<CutCandidate>, SublockError> {
    let wanted = locks_for_budget(budget_key_bits, key_bits_per_lock)?;
    if wanted == 0 {
        return Ok(Vec::new());
    }
    let order = rank_cuts(nl, cands, strategy, seed, DEFAULT_FAULT_SAMPLES)?;
    let mut picked: Vec<CutCandidate> = Vec::new();
    for i in order {
        if !picked.iter().any(|p| p.overlaps(&cands[i])) {
            picked.push(cands[i].clone());
        }
    }
    if picked.len() < wanted {
        return Err(SublockError::InsufficientCandidates {
            requested: wanted,
            available: picked.len(),
        });
    }
    picked.truncate(wanted);
    Ok(picked)
}

fn locks_for_budget(budget: usize, per_lock: usize) -> Result<usize, SublockError> {
    if per_lock == 0 || !budget.is_multiple_of(per_lock) {
        return Err(SublockError::BadBudget { budget, per_lock });
    }
    Ok(budget / per_lock)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LockConfig {
    pub budget_key_bits: usize,
    pub key_bits_per_lock: usize,
    pub sets_per_lock: usize,
    pub support_sizes: Vec<usize>,
    pub selection: Selection,
    pub partition: PartitionStrategy,
    pub policy: DontCarePolicy,
    pub seed: u64,
    pub fault_samples: usize,
    pub corruption_trials: usize,
    /// Let locks reuse the replaced cone (original XOR flip term) when
    /// that needs fewer gates.
    pub reuse_cone: bool,
}

impl Default for LockConfig {
    fn default() -> Self {
        LockConfig {
            budget_key_bits: 16,
            key_bits_per_lock: 2,
            sets_per_lock: 2,
            support_sizes: vec![3, 4],
            selection: Selection::Random,
            partition: PartitionStrategy::MsbSplit,
            policy: DontCarePolicy::DontCare,
            seed: 0,
            fault_samples: DEFAULT_FAULT_SAMPLES,
            corruption_trials: 1000,
            reuse_cone: true,
        }
    }
}

/// Per-lock line of a [`LockReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LockSummary {
    pub root: String,
    pub support: Vec<String>,
    pub key_inputs: Vec<String>,
    pub gates_removed: usize,
    pub gates_added: usize,
    pub pins: usize,
    pub complemented_unused_keys: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LockReport {
    pub num_locks: usize,
    pub key_bits_total: usize,
    pub gate_delta: i64,
    pub literal_delta: i64,
    pub depth_delta: i64,
    pub corruption: f64,
    pub seed: u64,
    pub locks: Vec<LockSummary>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LockedDesign {
    pub locked: Netlist,
    pub memory: Vec<KeyMemory>,
    pub report: LockReport,
}

struct Accepted {
    cut: CutCandidate,
    lock: LockedFunction,
}

/// The cone of `cut` as a stand-alone netlist over its leaves.
pub fn cut_network(nl: &Netlist, cut: &CutCandidate) -> Result<Netlist, NetlistError> {
    let mut b = NetlistBuilder::new();
    for &l in &cut.support {
        b.add_input(nl.name(l))?;
    }
    let keep: BTreeSet<usize> = cut.internal_gates.iter().copied().collect();
    nl.copy_gates_into(&mut b, |g| keep.contains(&g))?;
    let root = b.net(nl.name(cut.root));
    b.add_output(root);
    b.finish()
}

fn lock_cut(nl: &Netlist, cut: &CutCandidate, config: &LockConfig) -> Result<Option<LockedFunction>, SublockError> {
    let original = table_of_netlist(nl, &[cut.root], &cut.support)?;
    let mut rng = seeded(config.seed, STREAM_LOCK_BASE + cut.root.0 as u64);
    let plan = make_key_plan_with(
        cut.support.len(),
        config.key_bits_per_lock,
        config.sets_per_lock,
        config.partition,
        &mut rng,
    )?
    .with_policy(config.policy);
    let reference = if config.reuse_cone {
        Some(cut_network(nl, cut)?)
    } else {
        None
    };
    let opts = LockOptions {
        reference: reference.as_ref(),
        ..LockOptions::default()
    };
    match lock_function_with(&original, &plan, &opts) {
        Ok(lf) => Ok(Some(lf)),
        // A leaf the root does not depend on cannot be locked against.
        Err(IdkllError::CannotForceDependency { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Values of every net of `nl` on a batch of patterns: all of them when
/// the design has at most 16 inputs, else `random_blocks` random blocks.
fn pattern_batches(nl: &Netlist, random_blocks: usize, seed: u64, stream: u64) -> Vec<(Vec<u64>, u64)> {
    let n = nl.primary_inputs().len();
    if n <= crate::sat::EXHAUSTIVE_LIMIT {
        (0..patterns::num_blocks(n))
            .map(|b| (patterns::exhaustive_block(n, b), patterns::valid_lanes(n)))
            .collect()
    } else {
        let mut rng = seeded(seed, stream);
        (0..random_blocks)
            .map(|_| ((0..n).map(|_| rng.gen()).collect(), !0))
            .collect()
    }
}

/// Design with the root of `cut` driven by `lock` under the constant key
/// `key` instead of the cone.
fn keyed_replacement(nl: &Netlist, cut: &CutCandidate, lock: &Netlist, kb: usize, key: u64) -> Result<Netlist, NetlistError> {
    let mut b = NetlistBuilder::new();
    for &i in nl.primary_inputs() {
        b.add_input(nl.name(i))?;
    }
    let root_gate = *cut.internal_gates.last().expect("nonempty cone");
    nl.copy_gates_into(&mut b, |g| g != root_gate)?;
    let mut ins = Vec::new();
    for i in 0..kb {
        let n = b.fresh("tie");
        let kind = if key >> (kb - 1 - i) & 1 == 1 { GateKind::Const1 } else { GateKind::Const0 };
        b.add_gate(kind, &[], n)?;
        ins.push(n);
    }
    ins.extend(cut.support.iter().map(|&l| b.net(nl.name(l))));
    let root = b.net(nl.name(cut.root));
    lock.splice_into(&mut b, &ins, &[root], "trial_")?;
    for &o in nl.primary_outputs() {
        let n = b.net(nl.name(o));
        b.add_output(n);
    }
    b.finish()
}

/// True iff every key value of `lf`, applied with the rest of the design
/// intact, changes some primary output for some input.
fn every_key_observable(
    nl: &Netlist,
    cut: &CutCandidate,
    lf: &LockedFunction,
    batches: &[(Vec<u64>, u64)],
) -> Result<bool, SublockError> {
    let kb = lf.num_key_bits();
    let root_gate = *cut.internal_gates.last().expect("nonempty cone");
    let mut seen = vec![false; 1 << kb];
    let mut values = Vec::new();
    for (pi, valid) in batches {
        nl.eval_words_into(pi, &[], &mut values)?;
        let golden = nl.output_words(&values);
        for key in 0..1u64 << kb {
            if seen[key as usize] {
                continue;
            }
            let mut ins: Vec<u64> = (0..kb).map(|i| if key >> (kb - 1 - i) & 1 == 1 { !0 } else { 0 }).collect();
            ins.extend(cut.support.iter().map(|l| values[l.index()]));
            let lv = lf.network.eval_words(&ins, &[])?;
            let mut trial = values.clone();
            trial[cut.root.index()] = lv[lf.network.primary_outputs()[0].index()];
            nl.eval_gates_from(&mut trial, root_gate + 1);
            let out = nl.output_words(&trial);
            if out.iter().zip(&golden).any(|(a, b)| (a ^ b) & valid != 0) {
                seen[key as usize] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            return Ok(true);
        }
    }
    if nl.primary_inputs().len() <= crate::sat::EXHAUSTIVE_LIMIT {
        return Ok(false);
    }
    for key in 0..1u64 << kb {
        if seen[key as usize] {
            continue;
        }
        let trial = keyed_replacement(nl, cut, &lf.network, kb, key)?;
        if check_equivalence(nl, &trial, &Bindings::by_name(nl, &trial)?)?.equivalent {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces cuts of `nl` by IDKLL locks until the key budget is spent.
///
/// Candidates are tried in [`rank_cuts`] order. A candidate is skipped if
/// it overlaps an accepted cut, if its root does not depend on every leaf,
/// or if some key value of its lock is invisible at the outputs. The result
/// is checked for equivalence with `nl` once the memories are attached.
pub fn lock_design(nl: &Netlist, config: &LockConfig) -> Result<LockedDesign, SublockError> {
    if !nl.key_inputs().is_empty() {
        return Err(SublockError::AlreadyLocked);
    }
    let wanted = locks_for_budget(config.budget_key_bits, config.key_bits_per_lock)?;
    let kb = config.key_bits_per_lock;
    let mut accepted: Vec<Accepted> = Vec::new();
    if wanted > 0 {
        let cands = enumerate_cuts(nl, &config.support_sizes);
        let order = rank_cuts(nl, &cands, config.selection, config.seed, config.fault_samples)?;
        let batches = pattern_batches(nl, 16, config.seed, STREAM_GATE);
        for i in order {
            if accepted.len() == wanted {
                break;
            }
            let cut = &cands[i];
            if accepted.iter().any(|a| a.cut.overlaps(cut)) {
                continue;
            }
            let Some(lock) = lock_cut(nl, cut, config)? else {
                continue;
            };
            if !every_key_observable(nl, cut, &lock, &batches)? {
                continue;
            }
            accepted.push(Accepted { cut: cut.clone(), lock });
        }
        if accepted.len() < wanted {
            return Err(SublockError::InsufficientCandidates {
                requested: wanted,
                available: accepted.len(),
            });
        }
    }
    // Locks are spliced in root order so key numbering follows the design.
    accepted.sort_by_key(|a| a.cut.root);

    let removed: BTreeSet<usize> = accepted.iter().flat_map(|a| a.cut.internal_gates.iter().copied()).collect();
    let mut b = NetlistBuilder::new();
    for &i in nl.primary_inputs() {
        b.add_input(nl.name(i))?;
    }
    let mut key_names: Vec<Vec<String>> = Vec::new();
    let mut next_key = 0usize;
    for _ in &accepted {
        let mut names = Vec::new();
        for _ in 0..kb {
            let mut name = format!("keyinput{next_key}");
            while nl.find(&name).is_some() {
                next_key += 1;
                name = format!("keyinput{next_key}");
            }
            b.add_input(&name)?;
            names.push(name);
            next_key += 1;
        }
        key_names.push(names);
    }
    nl.copy_gates_into(&mut b, |g| !removed.contains(&g))?;
    let mut memory = Vec::new();
    let mut locks = Vec::new();
    for (li, (a, keys)) in accepted.iter().zip(&key_names).enumerate() {
        let mut ins: Vec<BuildNet> = keys.iter().map(|k| b.net(k)).collect();
        ins.extend(a.cut.support.iter().map(|&l| b.net(nl.name(l))));
        let root = b.net(nl.name(a.cut.root));
        a.lock.network.splice_into(&mut b, &ins, &[root], &format!("lk{li}_"))?;
        let support: Vec<&str> = a.cut.support.iter().map(|&l| nl.name(l)).collect();
        memory.push(build_key_memory(&a.lock.plan, &support, keys)?);
        locks.push(LockSummary {
            root: nl.name(a.cut.root).to_string(),
            support: support.iter().map(|s| s.to_string()).collect(),
            key_inputs: keys.clone(),
            gates_removed: a.cut.internal_gates.len(),
            gates_added: a.lock.gate_count(),
            pins: a.lock.pins.len(),
            complemented_unused_keys: a.lock.fallback,
        });
    }
    for &o in nl.primary_outputs() {
        let n = b.net(nl.name(o));
        b.add_output(n);
    }
    let locked = b.finish()?;

    let activated = activate(&locked, &memory)?;
    let eq = check_equivalence(nl, &activated, &Bindings::by_name(nl, &activated)?)?;
    if !eq.equivalent {
        return Err(SublockError::EquivalenceFailure {
            counterexample: eq.counterexample.unwrap_or_default(),
        });
    }

    let corruption = corruption_report(&locked, &memory, config.corruption_trials.max(1), config.seed)?;
    let report = LockReport {
        num_locks: accepted.len(),
        key_bits_total: accepted.len() * kb,
        gate_delta: locked.gates().len() as i64 - nl.gates().len() as i64,
        literal_delta: locked.literal_count() as i64 - nl.literal_count() as i64,
        depth_delta: locked.depth() as i64 - nl.depth() as i64,
        corruption,
        seed: config.seed,
        locks,
    };
    Ok(LockedDesign { locked, memory, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    pub(crate) const FIG7: &str = "\
INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\nOUTPUT(Z)\nOUTPUT(W)\n\
n1 = NAND(c, d)\nn2 = AND(d, e)\nY = OR(n1, n2)\nX = AND(a, b)\nZ = OR(X, Y)\nW = XOR(b, c)\n";

    const C17: &str = "\
INPUT(N1)\nINPUT(N2)\nINPUT(N3)\nINPUT(N6)\nINPUT(N7)\nOUTPUT(N22)\nOUTPUT(N23)\n\
N10 = NAND(N1, N3)\nN11 = NAND(N3, N6)\nN16 = NAND(N2, N11)\nN19 = NAND(N11, N7)\n\
N22 = NAND(N10, N16)\nN23 = NAND(N16, N19)\n";

    #[test]
    fn fig7_cut_is_enumerated() {
        let nl = parse_bench(FIG7).unwrap();
        let cuts = enumerate_cuts(&nl, &[3]);
        let y = nl.find("Y").unwrap();
        let cut = cuts.iter().find(|c| c.root == y).expect("Y cut");
        let names: Vec<&str> = cut.support.iter().map(|&n| nl.name(n)).collect();
        assert_eq!(names, ["c", "d", "e"]);
        assert_eq!(cut.internal_gates.len(), 3);
    }

    #[test]
    fn no_cuts_in_tiny_designs() {
        let and = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        assert!(enumerate_cuts(&and, &[3, 4]).is_empty());
        let ha = parse_bench("INPUT(A)\nINPUT(B)\nOUTPUT(S)\nOUTPUT(C)\nS = XOR(A, B)\nC = AND(A, B)\n").unwrap();
        assert!(enumerate_cuts(&ha, &[3]).is_empty());
    }

    /// Cone of `root` over `support` checked from first principles: every
    /// internal gate's fanout stays inside, and the cone is closed.
    fn check_cut(nl: &Netlist, c: &CutCandidate) {
        let fanouts = nl.fanouts();
        let internal: BTreeSet<usize> = c.internal_gates.iter().copied().collect();
        for &g in &c.internal_gates {
            let out = nl.gates()[g].output;
            if out != c.root {
                assert!(fanouts[out.index()].iter().all(|f| internal.contains(f)));
                assert!(!nl.primary_outputs().contains(&out));
            }
            for i in &nl.gates()[g].inputs {
                let inside = nl.driver(*i).is_some_and(|d| internal.contains(&d));
                assert!(inside || c.support.contains(i));
            }
        }
    }

    #[test]
    fn c17_selection_is_disjoint_and_seeded() {
        let nl = parse_bench(C17).unwrap();
        let cands = enumerate_cuts(&nl, &[3, 4]);
        for c in &cands {
            check_cut(&nl, c);
        }
        for seed in 0..10 {
            let a = select_cuts(&nl, &cands, 4, 2, Selection::Random, seed).unwrap();
            let b = select_cuts(&nl, &cands, 4, 2, Selection::Random, seed).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 2);
            assert!(!a[0].overlaps(&a[1]));
        }
        assert!(select_cuts(&nl, &cands, 0, 2, Selection::Random, 0).unwrap().is_empty());
        assert!(matches!(
            select_cuts(&nl, &cands, 40, 2, Selection::FaultImpact, 0),
            Err(SublockError::InsufficientCandidates { requested: 20, .. })
        ));
    }

    #[test]
    fn zero_budget_is_identity() {
        let nl = parse_bench(C17).unwrap();
        let cfg = LockConfig {
            budget_key_bits: 0,
            ..LockConfig::default()
        };
        let d = lock_design(&nl, &cfg).unwrap();
        assert_eq!(d.locked, nl);
        assert!(d.memory.is_empty());
        assert_eq!(d.report.gate_delta, 0);
        assert_eq!(d.report.corruption, 0.0);
    }

    #[test]
    fn fig7_lock_is_small_and_equivalent() {
        let nl = parse_bench(FIG7).unwrap();
        let y = nl.find("Y").unwrap();
        let cut = enumerate_cuts(&nl, &[3]).into_iter().find(|c| c.root == y).unwrap();
        for seed in 0..8 {
            let cfg = LockConfig {
                seed,
                ..LockConfig::default()
            };
            let lf = lock_cut(&nl, &cut, &cfg).unwrap().unwrap();
            assert!(lf.gate_count() <= cut.internal_gates.len() + 5, "{}", lf.gate_count());
        }
    }

    #[test]
    fn c17_lock_design() {
        let nl = parse_bench(C17).unwrap();
        for seed in 0..10 {
            let cfg = LockConfig {
                budget_key_bits: 4,
                seed,
                ..LockConfig::default()
            };
            let d = lock_design(&nl, &cfg).unwrap();
            assert_eq!(d.locked.key_inputs().len(), 4);
            assert_eq!(d.report.key_bits_total, 4);
            let act = activate(&d.locked, &d.memory).unwrap();
            for p in 0..32u64 {
                let x = patterns::bits_of(p, 5);
                assert_eq!(act.simulate(&x, &[]).unwrap(), nl.simulate(&x, &[]).unwrap());
            }
            assert!((0.0..=1.0).contains(&d.report.corruption));
            assert_eq!(lock_design(&nl, &cfg).unwrap(), d);
        }
    }
}
