//! Oracle-guided SAT attack, exhaustive key-map recovery for tiny designs
//! and exact brute-force attempt counts.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::idkll::KeyMemory;
use crate::netlist::{patterns, Netlist, NetlistError};
use crate::sat::{check_equivalence, encode_netlist, Bindings, CnfFormula, Encoder, EquivError, Signal, Solver};

mod complexity;

pub use complexity::{
    attempts_antisat, attempts_conventional, attempts_total, permuted_combinations, permuted_combinations_closed_form,
    Attempts, ComplexityError, MAX_EXACT_K, MAX_EXACT_L,
};

/// Input/output access to an activated design. The attack sees nothing
/// else.
pub trait Oracle {
    fn num_inputs(&self) -> usize;
    fn num_outputs(&self) -> usize;
    fn query(&mut self, input: &[bool]) -> Vec<bool>;
    /// An input on which `candidate` (a key-free netlist with the same
    /// input and output order) differs from the hidden design, if any.
    fn validate(&mut self, candidate: &Netlist) -> Result<Option<Vec<bool>>, AttackError>;
}

/// Oracle backed by a reference netlist, matched by position.
#[derive(Clone, Debug)]
pub struct NetlistOracle<'a> {
    design: &'a Netlist,
    queries: usize,
}

impl<'a> NetlistOracle<'a> {
    pub fn new(design: &'a Netlist) -> Self {
        NetlistOracle { design, queries: 0 }
    }

    pub fn queries(&self) -> usize {
        self.queries
    }
}

impl Oracle for NetlistOracle<'_> {
    fn num_inputs(&self) -> usize {
        self.design.primary_inputs().len()
    }

    fn num_outputs(&self) -> usize {
        self.design.primary_outputs().len()
    }

    fn query(&mut self, input: &[bool]) -> Vec<bool> {
        self.queries += 1;
        self.design.simulate(input, &[]).expect("input width checked by the attack")
    }

    fn validate(&mut self, candidate: &Netlist) -> Result<Option<Vec<bool>>, AttackError> {
        let bind = Bindings::by_position(candidate, self.design)?;
        Ok(check_equivalence(candidate, self.design, &bind)?.counterexample)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttackError {
    #[error("locked design has no key inputs")]
    NoKeyInputs,
    #[error("oracle has {oracle} {what}, locked design has {locked}")]
    OracleArity {
        what: &'static str,
        oracle: usize,
        locked: usize,
    },
    #[error("no verdict after {} iterations", .0.iterations)]
    IterationBudgetExceeded(Box<AttackTrace>),
    #[error("stopped by the caller after {} iterations", .0.iterations)]
    Interrupted(Box<AttackTrace>),
    #[error("{n} inputs plus {k} key bits exceed the exhaustive limit of 20")]
    ScaleExceeded { n: usize, k: usize },
    #[error("key block refers to unknown or non-input net `{0}`")]
    BadBlock(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// A distinguishing input and the oracle's answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dip {
    pub input: Vec<bool>,
    pub output: Vec<bool>,
}

/// Progress of an attack that ran out of iterations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackTrace {
    pub iterations: usize,
    pub dips: Vec<Dip>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AttackStatus {
    /// A key consistent with every DIP that makes the design equivalent.
    KeyFound,
    /// A key consistent with every DIP that is still wrong somewhere.
    WrongKey,
    /// No single key is consistent with the observed DIPs.
    UnsatNoKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackReport {
    pub iterations: usize,
    pub dips: Vec<Dip>,
    pub status: AttackStatus,
    pub candidate_key: Option<Vec<bool>>,
    /// For [`AttackStatus::WrongKey`]: an input the candidate gets wrong.
    pub counterexample: Option<Vec<bool>>,
    pub conflicts: u64,
    pub decisions: u64,
}

/// Incremental state of one SAT attack: two copies of the locked design
/// sharing inputs, with independent key vectors, plus the accumulated
/// input/output constraints.
pub struct SatAttack<'a> {
    locked: &'a Netlist,
    enc: Encoder<Solver>,
    x: Vec<Signal>,
    keys: [Vec<Signal>; 2],
    diff: Signal,
    dips: Vec<Dip>,
}

impl<'a> SatAttack<'a> {
    pub fn new(locked: &'a Netlist) -> Result<Self, AttackError> {
        if locked.key_inputs().is_empty() {
            return Err(AttackError::NoKeyInputs);
        }
        let mut enc = Encoder::new(Solver::new());
        let x: Vec<Signal> = locked.primary_inputs().iter().map(|_| enc.fresh()).collect();
        let k1: Vec<Signal> = locked.key_inputs().iter().map(|_| enc.fresh()).collect();
        let k2: Vec<Signal> = locked.key_inputs().iter().map(|_| enc.fresh()).collect();
        let s1 = encode_netlist(&mut enc, locked, &x, &k1)?;
        let s2 = encode_netlist(&mut enc, locked, &x, &k2)?;
        let diffs: Vec<Signal> = locked
            .primary_outputs()
            .iter()
            .map(|o| enc.xor(s1[o.index()], s2[o.index()]))
            .collect();
        let diff = enc.or(&diffs);
        Ok(SatAttack {
            locked,
            enc,
            x,
            keys: [k1, k2],
            diff,
            dips: Vec::new(),
        })
    }

    /// Clauses added so far (DIMACS export).
    pub fn formula(&self) -> CnfFormula {
        self.enc.sink().formula()
    }

    pub fn dips(&self) -> &[Dip] {
        &self.dips
    }

    /// Next input on which two keys consistent with all DIPs so far
    /// disagree.
    fn next_dip(&mut self) -> Option<Vec<bool>> {
        let assumptions = match self.diff {
            Signal::Const(false) => return None,
            Signal::Const(true) => vec![],
            Signal::Lit(l) => vec![l],
        };
        let r = self.enc.sink_mut().solve(&assumptions);
        let m = r.model?;
        Some(self.x.iter().map(|s| s.eval(&m)).collect())
    }

    /// Constrains both key copies to reproduce `y` on `x`.
    fn learn(&mut self, x: &[bool], y: &[bool]) -> Result<(), NetlistError> {
        let xs: Vec<Signal> = x.iter().map(|&b| Signal::Const(b)).collect();
        for c in 0..2 {
            let keys = self.keys[c].clone();
            let s = encode_netlist(&mut self.enc, self.locked, &xs, &keys)?;
            for (o, &want) in self.locked.primary_outputs().iter().zip(y) {
                self.enc.assert_equal(s[o.index()], Signal::Const(want));
            }
        }
        Ok(())
    }

    fn trace(&self) -> AttackTrace {
        AttackTrace {
            iterations: self.dips.len(),
            dips: self.dips.clone(),
        }
    }

    /// Runs the DIP loop, then extracts and validates a key.
    pub fn run(&mut self, oracle: &mut dyn Oracle, max_iters: usize) -> Result<AttackReport, AttackError> {
        self.run_with(oracle, max_iters, &mut |_| ControlFlow::Continue(()))
    }

    /// [`SatAttack::run`], calling `on_dip` after every learned DIP; a
    /// `Break` stops the attack with [`AttackError::Interrupted`].
    pub fn run_with(
        &mut self,
        oracle: &mut dyn Oracle,
        max_iters: usize,
        on_dip: &mut dyn FnMut(&Dip) -> ControlFlow<()>,
    ) -> Result<AttackReport, AttackError> {
        let (n, m) = (self.locked.primary_inputs().len(), self.locked.primary_outputs().len());
        if oracle.num_inputs() != n {
            return Err(AttackError::OracleArity {
                what: "inputs",
                oracle: oracle.num_inputs(),
                locked: n,
            });
        }
        if oracle.num_outputs() != m {
            return Err(AttackError::OracleArity {
                what: "outputs",
                oracle: oracle.num_outputs(),
                locked: m,
            });
        }
        while let Some(x) = self.next_dip() {
            if self.dips.len() >= max_iters {
                return Err(AttackError::IterationBudgetExceeded(Box::new(self.trace())));
            }
            let y = oracle.query(&x);
            self.learn(&x, &y)?;
            self.dips.push(Dip { input: x, output: y });
            if on_dip(self.dips.last().expect("just pushed")).is_break() {
                return Err(AttackError::Interrupted(Box::new(self.trace())));
            }
        }
        let r = self.enc.sink_mut().solve(&[]);
        let (status, candidate_key, counterexample) = match r.model {
            None => (AttackStatus::UnsatNoKey, None, None),
            Some(model) => {
                let key: Vec<bool> = self.keys[0].iter().map(|s| s.eval(&model)).collect();
                let fixed = self.locked.with_keys_fixed(&key)?;
                match oracle.validate(&fixed)? {
                    None => (AttackStatus::KeyFound, Some(key), None),
                    Some(cex) => (AttackStatus::WrongKey, Some(key), Some(cex)),
                }
            }
        };
        let solver = self.enc.sink();
        Ok(AttackReport {
            iterations: self.dips.len(),
            dips: self.dips.clone(),
            status,
            candidate_key,
            counterexample,
            conflicts: solver.conflicts(),
            decisions: solver.decisions(),
        })
    }
}

/// Default DIP budget: `10 * 2^min(k, 20)`.
pub fn default_max_iters(key_bits: usize) -> usize {
    10usize << key_bits.min(20)
}

pub fn sat_attack(locked: &Netlist, oracle: &mut dyn Oracle, max_iters: usize) -> Result<AttackReport, AttackError> {
    SatAttack::new(locked)?.run(oracle, max_iters)
}

/// Key inputs driven together from one support, named by net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyBlock {
    pub key_inputs: Vec<String>,
    /// Primary inputs.
    pub support: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyMapRecovery {
    /// For every input pattern (most significant first over the primary
    /// inputs), the full keys (most significant first over the key inputs)
    /// on which the locked design matches the oracle.
    pub correct_keys: Vec<Vec<u64>>,
    /// A key map that reproduces the oracle everywhere, if one exists in
    /// the requested block shape.
    pub map: Option<Vec<KeyMemory>>,
}

impl KeyMapRecovery {
    /// Correct keys per input pattern.
    pub fn multiplicity(&self) -> Vec<usize> {
        self.correct_keys.iter().map(Vec::len).collect()
    }
}

/// Exhaustive attacker: for each input, every key that gives the oracle's
/// output. Without `blocks` the map is one block over all keys (for each
/// input the key correct on the most inputs), with its support reduced to
/// the inputs it depends on; with `blocks` each block
/// gets, per valuation of its support, the smallest key part that works
/// for every input with that valuation, and the assembled map is kept only
/// if it is correct everywhere.
pub fn brute_force_key_map(
    locked: &Netlist,
    oracle: &mut dyn Oracle,
    blocks: Option<&[KeyBlock]>,
) -> Result<KeyMapRecovery, AttackError> {
    let n = locked.primary_inputs().len();
    let k = locked.key_inputs().len();
    if n + k > 20 {
        return Err(AttackError::ScaleExceeded { n, k });
    }
    if oracle.num_inputs() != n {
        return Err(AttackError::OracleArity {
            what: "inputs",
            oracle: oracle.num_inputs(),
            locked: n,
        });
    }
    let mut correct_keys = Vec::with_capacity(1 << n);
    for x in 0..1u64 << n {
        let xb = patterns::bits_of(x, n);
        let y = oracle.query(&xb);
        let pi: Vec<u64> = xb.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let mut keys = Vec::new();
        for block in 0..patterns::num_blocks(k) {
            let kw = patterns::exhaustive_block(k, block);
            let out = locked.output_words(&locked.eval_words(&pi, &kw)?);
            let mut ok = patterns::valid_lanes(k);
            for (w, &want) in out.iter().zip(&y) {
                ok &= if want { *w } else { !*w };
            }
            while ok != 0 {
                let lane = ok.trailing_zeros() as u64;
                keys.push(block as u64 * 64 + lane);
                ok &= ok - 1;
            }
        }
        correct_keys.push(keys);
    }
    let map = match blocks {
        None => whole_map(locked, &correct_keys),
        Some(bs) => blocked_map(locked, &correct_keys, bs)?,
    };
    Ok(KeyMapRecovery { correct_keys, map })
}

fn whole_map(locked: &Netlist, correct: &[Vec<u64>]) -> Option<Vec<KeyMemory>> {
    let n = locked.primary_inputs().len();
    // Prefer keys that are correct on many inputs, so a design with a
    // universal key yields a constant map.
    let mut votes: BTreeMap<u64, usize> = BTreeMap::new();
    for &key in correct.iter().flatten() {
        *votes.entry(key).or_default() += 1;
    }
    let full: Vec<u64> = correct
        .iter()
        .map(|ks| ks.iter().copied().max_by_key(|k| (votes[k], core::cmp::Reverse(*k))))
        .collect::<Option<_>>()?;
    let depends = |v: usize| {
        let bit = 1usize << (n - 1 - v);
        (0..full.len()).any(|x| full[x] != full[x ^ bit])
    };
    let support: Vec<usize> = (0..n).filter(|&v| depends(v)).collect();
    let entries = (0..1usize << support.len())
        .map(|j| {
            let x = support.iter().enumerate().fold(0usize, |x, (p, &v)| {
                x | (j >> (support.len() - 1 - p) & 1) << (n - 1 - v)
            });
            full[x]
        })
        .collect();
    Some(vec![KeyMemory {
        key_inputs: locked.key_inputs().iter().map(|&k| locked.name(k).into()).collect(),
        support: support.iter().map(|&v| locked.name(locked.primary_inputs()[v]).into()).collect(),
        entries,
    }])
}

fn blocked_map(locked: &Netlist, correct: &[Vec<u64>], blocks: &[KeyBlock]) -> Result<Option<Vec<KeyMemory>>, AttackError> {
    let n = locked.primary_inputs().len();
    let k = locked.key_inputs().len();
    let pi_pos = |name: &str| {
        locked
            .primary_inputs()
            .iter()
            .position(|&p| locked.name(p) == name)
            .ok_or_else(|| AttackError::BadBlock(name.into()))
    };
    let key_pos = |name: &str| {
        locked
            .key_inputs()
            .iter()
            .position(|&p| locked.name(p) == name)
            .ok_or_else(|| AttackError::BadBlock(name.into()))
    };
    // Key bit `j` of a full key sits at bit `k - 1 - j`.
    let part = |full: u64, pos: &[usize]| {
        pos.iter().fold(0u64, |acc, &j| acc << 1 | (full >> (k - 1 - j) & 1))
    };
    let mut memories = Vec::new();
    let mut layout = Vec::new();
    for b in blocks {
        let kpos = b.key_inputs.iter().map(|s| key_pos(s)).collect::<Result<Vec<_>, _>>()?;
        let spos = b.support.iter().map(|s| pi_pos(s)).collect::<Result<Vec<_>, _>>()?;
        let mut entries = Vec::with_capacity(1 << spos.len());
        for j in 0..1usize << spos.len() {
            let mut allowed: Option<Vec<u64>> = None;
            for x in 0..1usize << n {
                let proj = spos.iter().fold(0usize, |acc, &v| acc << 1 | (x >> (n - 1 - v) & 1));
                if proj != j {
                    continue;
                }
                let mut here: Vec<u64> = correct[x].iter().map(|&f| part(f, &kpos)).collect();
                here.sort_unstable();
                here.dedup();
                allowed = Some(match allowed {
                    None => here,
                    Some(a) => a.into_iter().filter(|v| here.binary_search(v).is_ok()).collect(),
                });
            }
            match allowed.and_then(|a| a.first().copied()) {
                Some(v) => entries.push(v),
                None => return Ok(None),
            }
        }
        layout.push((kpos, spos));
        memories.push(KeyMemory {
            key_inputs: b.key_inputs.clone(),
            support: b.support.clone(),
            entries,
        });
    }
    let mut covered = vec![false; k];
    for (kpos, _) in &layout {
        for &j in kpos {
            covered[j] = true;
        }
    }
    if let Some(j) = covered.iter().position(|c| !c) {
        return Err(AttackError::BadBlock(format!("{} (not in any block)", locked.name(locked.key_inputs()[j]))));
    }
    for (x, ks) in correct.iter().enumerate() {
        let mut full = 0u64;
        for ((kpos, spos), m) in layout.iter().zip(&memories) {
            let proj = spos.iter().fold(0usize, |acc, &v| acc << 1 | (x >> (n - 1 - v) & 1));
            let e = m.entries[proj];
            for (i, &j) in kpos.iter().enumerate() {
                full |= (e >> (kpos.len() - 1 - i) & 1) << (k - 1 - j);
            }
        }
        if ks.binary_search(&full).is_err() {
            return Ok(None);
        }
    }
    Ok(Some(memories))
}
