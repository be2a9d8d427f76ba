//! Gate-level combinational netlists.
//!
//! A [`Netlist`] is immutable once built. Net ids are dense and canonical:
//! inputs (primary and key) come first in declaration order, followed by gate
//! outputs in topological order, so `gates[i].output == NetId(num_inputs + i)`.
//! Two netlists built from the same text therefore compare equal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

mod bench;
mod builder;
pub mod patterns;

pub use bench::{emit_bench, parse_bench};
pub use builder::{BuildNet, NetlistBuilder};

/// Name prefix that marks an input as a key input.
pub const KEY_PREFIX: &str = "keyinput";

/// Dense net index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    /// Constant tie cells. Never produced by the parser for ISCAS input; they
    /// appear when keys are fixed or a key memory is expanded.
    Const0,
    Const1,
}

impl GateKind {
    pub fn bench_name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUFF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    pub fn from_bench_name(name: &str) -> Option<GateKind> {
        let upper = name.to_ascii_uppercase();
        Some(match upper.as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "CONST0" => GateKind::Const0,
            "CONST1" => GateKind::Const1,
            _ => return None,
        })
    }

    pub fn is_const(self) -> bool {
        matches!(self, GateKind::Const0 | GateKind::Const1)
    }

    /// Evaluate on 64 patterns at once.
    #[inline]
    pub fn eval_words<I: IntoIterator<Item = u64>>(self, inputs: I) -> u64 {
        let mut it = inputs.into_iter();
        match self {
            GateKind::And => it.fold(!0, |a, b| a & b),
            GateKind::Nand => !it.fold(!0, |a, b| a & b),
            GateKind::Or => it.fold(0, |a, b| a | b),
            GateKind::Nor => !it.fold(0, |a, b| a | b),
            GateKind::Xor => it.fold(0, |a, b| a ^ b),
            GateKind::Xnor => !it.fold(0, |a, b| a ^ b),
            GateKind::Not => !it.next().unwrap_or(0),
            GateKind::Buf => it.next().unwrap_or(0),
            GateKind::Const0 => 0,
            GateKind::Const1 => !0,
        }
    }

    pub fn eval(self, inputs: &[bool]) -> bool {
        let w = self.eval_words(inputs.iter().map(|&b| if b { !0u64 } else { 0 }));
        w & 1 == 1
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.bench_name())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown gate type `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("undefined net `{0}`")]
    UndefinedNet(String),
    #[error("net `{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("combinational cycle through net `{0}`")]
    CombinationalCycle(String),
    #[error("{kind} gate driving `{net}` cannot take {arity} inputs")]
    BadArity {
        net: String,
        kind: GateKind,
        arity: usize,
    },
    #[error("expected {expected} {what} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown net `{0}`")]
    UnknownNet(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Netlist {
    names: Vec<String>,
    index: BTreeMap<String, NetId>,
    num_inputs: usize,
    primary_inputs: Vec<NetId>,
    key_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    gates: Vec<Gate>,
}

impl Netlist {
    pub(crate) fn from_parts(
        names: Vec<String>,
        num_inputs: usize,
        key_flags: Vec<bool>,
        primary_outputs: Vec<NetId>,
        gates: Vec<Gate>,
    ) -> Netlist {
        debug_assert_eq!(names.len(), num_inputs + gates.len());
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NetId(i as u32)))
            .collect();
        let mut primary_inputs = Vec::new();
        let mut key_inputs = Vec::new();
        for (i, &is_key) in key_flags.iter().enumerate() {
            if is_key {
                key_inputs.push(NetId(i as u32));
            } else {
                primary_inputs.push(NetId(i as u32));
            }
        }
        Netlist {
            names,
            index,
            num_inputs,
            primary_inputs,
            key_inputs,
            primary_outputs,
            gates,
        }
    }

    pub fn num_nets(&self) -> usize {
        self.names.len()
    }

    /// Number of input nets, primary and key together.
    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn key_inputs(&self) -> &[NetId] {
        &self.key_inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.primary_outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn name(&self, net: NetId) -> &str {
        &self.names[net.index()]
    }

    pub fn find(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<NetId, NetlistError> {
        self.find(name)
            .ok_or_else(|| NetlistError::UnknownNet(name.into()))
    }

    pub fn is_input(&self, net: NetId) -> bool {
        net.index() < self.num_inputs
    }

    pub fn is_key_input(&self, net: NetId) -> bool {
        self.is_input(net) && self.key_inputs.binary_search(&net).is_ok()
    }

    /// Index of the gate driving `net`, if it is not an input.
    pub fn driver(&self, net: NetId) -> Option<usize> {
        net.index().checked_sub(self.num_inputs)
    }

    pub fn driver_gate(&self, net: NetId) -> Option<&Gate> {
        self.driver(net).map(|g| &self.gates[g])
    }

    /// Total number of gate input pins; the usual literal-count proxy.
    pub fn literal_count(&self) -> usize {
        self.gates.iter().map(|g| g.inputs.len()).sum()
    }

    fn check_net(&self, net: NetId) -> Result<(), NetlistError> {
        if net.index() < self.num_nets() {
            Ok(())
        } else {
            Err(NetlistError::UnknownNet(alloc::format!("{net}")))
        }
    }

    /// Distinct consuming gates of every net.
    pub fn fanouts(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_nets()];
        for (gi, g) in self.gates.iter().enumerate() {
            for &i in &g.inputs {
                let list: &mut Vec<usize> = &mut out[i.index()];
                if list.last() != Some(&gi) {
                    list.push(gi);
                }
            }
        }
        out
    }

    /// Logic level of every net; inputs are level 0.
    pub fn levels(&self) -> Vec<u32> {
        let mut lvl = vec![0u32; self.num_nets()];
        for g in &self.gates {
            let l = g.inputs.iter().map(|i| lvl[i.index()] + 1).max().unwrap_or(0);
            lvl[g.output.index()] = l;
        }
        lvl
    }

    /// Longest input-to-output path, in gates.
    pub fn depth(&self) -> u32 {
        let lvl = self.levels();
        self.primary_outputs
            .iter()
            .map(|o| lvl[o.index()])
            .max()
            .unwrap_or(0)
    }

    /// Transitive fanin of `net`, including `net` itself.
    pub fn fanin_cone(&self, net: NetId) -> Result<BTreeSet<NetId>, NetlistError> {
        self.check_net(net)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![net];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            if let Some(g) = self.driver_gate(n) {
                stack.extend(g.inputs.iter().copied());
            }
        }
        Ok(seen)
    }

    /// Marks every net reachable forward from any of `sources`.
    pub fn transitive_fanout(&self, sources: &[NetId]) -> Vec<bool> {
        let mut hit = vec![false; self.num_nets()];
        for s in sources {
            hit[s.index()] = true;
        }
        for g in &self.gates {
            if g.inputs.iter().any(|i| hit[i.index()]) {
                hit[g.output.index()] = true;
            }
        }
        hit
    }

    fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), NetlistError> {
        if expected == got {
            Ok(())
        } else {
            Err(NetlistError::LengthMismatch {
                what,
                expected,
                got,
            })
        }
    }

    /// Single-pattern simulation; returns primary-output values.
    pub fn simulate(&self, pi_values: &[bool], key_values: &[bool]) -> Result<Vec<bool>, NetlistError> {
        let w = |v: &[bool]| -> Vec<u64> { v.iter().map(|&b| if b { !0 } else { 0 }).collect() };
        let values = self.eval_words(&w(pi_values), &w(key_values))?;
        Ok(self
            .primary_outputs
            .iter()
            .map(|o| values[o.index()] & 1 == 1)
            .collect())
    }

    /// Bit-parallel simulation of 64 patterns; returns the value of every net.
    pub fn eval_words(&self, pi_words: &[u64], key_words: &[u64]) -> Result<Vec<u64>, NetlistError> {
        let mut values = Vec::new();
        self.eval_words_into(pi_words, key_words, &mut values)?;
        Ok(values)
    }

    pub fn eval_words_into(
        &self,
        pi_words: &[u64],
        key_words: &[u64],
        values: &mut Vec<u64>,
    ) -> Result<(), NetlistError> {
        Self::check_len("primary input", self.primary_inputs.len(), pi_words.len())?;
        Self::check_len("key input", self.key_inputs.len(), key_words.len())?;
        values.clear();
        values.resize(self.num_nets(), 0);
        for (n, &w) in self.primary_inputs.iter().zip(pi_words) {
            values[n.index()] = w;
        }
        for (n, &w) in self.key_inputs.iter().zip(key_words) {
            values[n.index()] = w;
        }
        self.eval_gates_from(values, 0);
        Ok(())
    }

    /// Re-evaluates gates `first_gate..` in place, reading whatever is already
    /// stored for earlier nets. Used for fault injection.
    pub fn eval_gates_from(&self, values: &mut [u64], first_gate: usize) {
        for g in &self.gates[first_gate..] {
            let v = g.kind.eval_words(g.inputs.iter().map(|i| values[i.index()]));
            values[g.output.index()] = v;
        }
    }

    pub fn output_words(&self, values: &[u64]) -> Vec<u64> {
        self.primary_outputs.iter().map(|o| values[o.index()]).collect()
    }

    /// Copy with every key input replaced by a constant tie.
    pub fn with_keys_fixed(&self, key: &[bool]) -> Result<Netlist, NetlistError> {
        Self::check_len("key input", self.key_inputs.len(), key.len())?;
        let mut b = NetlistBuilder::new();
        for i in 0..self.num_inputs {
            let id = NetId(i as u32);
            if let Ok(pos) = self.key_inputs.binary_search(&id) {
                let n = b.net(self.name(id));
                let kind = if key[pos] { GateKind::Const1 } else { GateKind::Const0 };
                b.add_gate(kind, &[], n)?;
            } else {
                b.add_input(self.name(id))?;
            }
        }
        self.copy_gates_into(&mut b, |_| true)?;
        for &o in &self.primary_outputs {
            let n = b.net(self.name(o));
            b.add_output(n);
        }
        b.finish()
    }

    /// Copies this netlist into `b` as a fragment. `inputs` gives the nets
    /// that stand in for every input (in id order) and `outputs` the nets
    /// to drive for every primary output; internal nets get fresh names
    /// starting with `prefix`.
    pub fn splice_into(
        &self,
        b: &mut NetlistBuilder,
        inputs: &[BuildNet],
        outputs: &[BuildNet],
        prefix: &str,
    ) -> Result<(), NetlistError> {
        Self::check_len("fragment input", self.num_inputs, inputs.len())?;
        Self::check_len("fragment output", self.primary_outputs.len(), outputs.len())?;
        let mut map: Vec<Option<BuildNet>> = vec![None; self.num_nets()];
        for (i, &n) in inputs.iter().enumerate() {
            map[i] = Some(n);
        }
        // Each gate output that is a primary output drives its target
        // directly; the first such output claims it.
        let mut claimed = vec![false; outputs.len()];
        for (k, &o) in self.primary_outputs.iter().enumerate() {
            if self.driver(o).is_some() && map[o.index()].is_none() {
                map[o.index()] = Some(outputs[k]);
                claimed[k] = true;
            }
        }
        for g in &self.gates {
            let ins: Vec<BuildNet> = g.inputs.iter().map(|i| map[i.index()].expect("topological")).collect();
            let out = match map[g.output.index()] {
                Some(n) => n,
                None => {
                    let n = b.fresh(&alloc::format!("{prefix}{}", self.name(g.output)));
                    map[g.output.index()] = Some(n);
                    n
                }
            };
            b.add_gate(g.kind, &ins, out)?;
        }
        for (k, &o) in self.primary_outputs.iter().enumerate() {
            if !claimed[k] {
                let src = map[o.index()].expect("defined");
                b.add_gate(GateKind::Buf, &[src], outputs[k])?;
            }
        }
        Ok(())
    }

    /// Adds the gates accepted by `keep` (by gate index) to `b`, by net name.
    pub fn copy_gates_into<F: FnMut(usize) -> bool>(
        &self,
        b: &mut NetlistBuilder,
        mut keep: F,
    ) -> Result<(), NetlistError> {
        for (gi, g) in self.gates.iter().enumerate() {
            if !keep(gi) {
                continue;
            }
            let ins: Vec<BuildNet> = g.inputs.iter().map(|&i| b.net(self.name(i))).collect();
            let out = b.net(self.name(g.output));
            b.add_gate(g.kind, &ins, out)?;
        }
        Ok(())
    }
}
