use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{IdkllError, KeyPlan};
use crate::netlist::{BuildNet, GateKind, Netlist, NetlistBuilder, NetlistError};

/// Lookup table from input values to key values for one group of key
/// inputs.
///
/// `entries[j]` is the key for support valuation `j` (first support net is
/// the most significant bit); bit `kb - 1 - i` of an entry drives
/// `key_inputs[i]`. The support lists only the nets the key actually
/// depends on.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KeyMemory {
    pub key_inputs: Vec<String>,
    pub support: Vec<String>,
    pub entries: Vec<u64>,
}

impl KeyMemory {
    /// Key for a valuation of the support.
    pub fn lookup(&self, support_values: &[bool]) -> u64 {
        let j = support_values.iter().fold(0usize, |j, &b| j << 1 | b as usize);
        self.entries[j]
    }

    fn check(&self) -> Result<(), IdkllError> {
        let kb = self.key_inputs.len();
        if self.support.len() > 20 {
            return Err(IdkllError::BadMemory(format!("support of {} nets is too large", self.support.len())));
        }
        if self.entries.len() != 1 << self.support.len() {
            return Err(IdkllError::BadMemory(format!(
                "{} entries for a support of {} nets",
                self.entries.len(),
                self.support.len()
            )));
        }
        if kb == 0 || kb > 64 || self.entries.iter().any(|&e| kb < 64 && e >> kb != 0) {
            return Err(IdkllError::BadMemory("entries do not fit the key width".into()));
        }
        let distinct: BTreeSet<&String> = self.support.iter().collect();
        if distinct.len() != self.support.len() {
            return Err(IdkllError::BadMemory("support repeats a net".into()));
        }
        Ok(())
    }
}

/// Memory that supplies `plan`'s key for every input pattern. `inputs` and
/// `keys` name the nets standing for the plan's inputs and key bits.
pub fn build_key_memory<S: AsRef<str>, T: AsRef<str>>(
    plan: &KeyPlan,
    inputs: &[S],
    keys: &[T],
) -> Result<KeyMemory, IdkllError> {
    let v = plan.num_inputs();
    if inputs.len() != v || keys.len() != plan.num_key_bits() {
        return Err(IdkllError::BadMemory(format!(
            "plan has {v} inputs and {} key bits, got {} and {} names",
            plan.num_key_bits(),
            inputs.len(),
            keys.len()
        )));
    }
    let depends = |var: usize| {
        let bit = 1usize << (v - 1 - var);
        (0..1usize << v).any(|x| plan.key_for(x) != plan.key_for(x ^ bit))
    };
    let support: Vec<usize> = (0..v).filter(|&i| depends(i)).collect();
    let entries = (0..1usize << support.len())
        .map(|j| {
            let x = support.iter().enumerate().fold(0usize, |x, (p, &var)| {
                let b = j >> (support.len() - 1 - p) & 1;
                x | b << (v - 1 - var)
            });
            plan.key_for(x)
        })
        .collect();
    Ok(KeyMemory {
        key_inputs: keys.iter().map(|k| k.as_ref().to_string()).collect(),
        support: support.iter().map(|&i| inputs[i].as_ref().to_string()).collect(),
        entries,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Val {
    Const(bool),
    Net(BuildNet),
}

struct MuxBuilder<'a> {
    b: &'a mut NetlistBuilder,
    vars: &'a [BuildNet],
    inverted: BTreeMap<BuildNet, BuildNet>,
    hint: String,
}

impl MuxBuilder<'_> {
    fn not(&mut self, n: BuildNet) -> Result<BuildNet, NetlistError> {
        if let Some(&m) = self.inverted.get(&n) {
            return Ok(m);
        }
        let h = format!("{}_n", self.hint);
        let m = self.b.gate(GateKind::Not, &[n], &h)?;
        self.inverted.insert(n, m);
        Ok(m)
    }

    fn gate(&mut self, kind: GateKind, ins: &[BuildNet]) -> Result<Val, NetlistError> {
        let h = self.hint.clone();
        Ok(Val::Net(self.b.gate(kind, ins, &h)?))
    }

    /// Shannon expansion of `bits` over `vars[depth..]`, folding constants.
    fn build(&mut self, bits: &[bool], depth: usize) -> Result<Val, NetlistError> {
        use Val::{Const, Net};
        if bits.iter().all(|&b| b == bits[0]) {
            return Ok(Const(bits[0]));
        }
        let var = self.vars[depth];
        let half = bits.len() / 2;
        let lo = self.build(&bits[..half], depth + 1)?;
        let hi = self.build(&bits[half..], depth + 1)?;
        match (lo, hi) {
            _ if lo == hi => Ok(lo),
            (Const(false), Const(_)) => Ok(Net(var)),
            (Const(true), Const(_)) => Ok(Net(self.not(var)?)),
            (Const(false), Net(h)) => self.gate(GateKind::And, &[var, h]),
            (Net(l), Const(false)) => {
                let nv = self.not(var)?;
                self.gate(GateKind::And, &[nv, l])
            }
            (Const(true), Net(h)) => {
                let nv = self.not(var)?;
                self.gate(GateKind::Or, &[nv, h])
            }
            (Net(l), Const(true)) => self.gate(GateKind::Or, &[var, l]),
            (Net(l), Net(h)) => {
                let nv = self.not(var)?;
                let a = self.gate(GateKind::And, &[var, h])?;
                let c = self.gate(GateKind::And, &[nv, l])?;
                let (Net(a), Net(c)) = (a, c) else { unreachable!() };
                self.gate(GateKind::Or, &[a, c])
            }
        }
    }
}

/// Replaces the key inputs of `locked` by logic reading the memories, so
/// that the result has no key inputs. Every key input must be driven by
/// exactly one memory.
pub fn activate(locked: &Netlist, memories: &[KeyMemory]) -> Result<Netlist, IdkllError> {
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (mi, m) in memories.iter().enumerate() {
        m.check()?;
        for k in &m.key_inputs {
            let id = locked.find(k).ok_or_else(|| IdkllError::UnknownNet(k.clone()))?;
            if !locked.is_key_input(id) {
                return Err(IdkllError::BadMemory(format!("`{k}` is not a key input")));
            }
            if owner.insert(k, mi).is_some() {
                return Err(IdkllError::DoublyCoveredKey(k.clone()));
            }
        }
        for s in &m.support {
            let id = locked.find(s).ok_or_else(|| IdkllError::UnknownNet(s.clone()))?;
            if locked.is_key_input(id) {
                return Err(IdkllError::BadMemory(format!("support net `{s}` is a key input")));
            }
        }
    }
    if let Some(&k) = locked.key_inputs().iter().find(|&&k| !owner.contains_key(locked.name(k))) {
        return Err(IdkllError::UncoveredKey(locked.name(k).to_string()));
    }

    let mut b = NetlistBuilder::new();
    for &i in locked.primary_inputs() {
        b.add_input(locked.name(i))?;
    }
    locked.copy_gates_into(&mut b, |_| true)?;
    for m in memories {
        let vars: Vec<BuildNet> = m.support.iter().map(|s| b.net(s)).collect();
        let kb = m.key_inputs.len();
        for (i, k) in m.key_inputs.iter().enumerate() {
            let bits: Vec<bool> = m.entries.iter().map(|e| e >> (kb - 1 - i) & 1 == 1).collect();
            let mut mux = MuxBuilder {
                b: &mut b,
                vars: &vars,
                inverted: BTreeMap::new(),
                hint: format!("{k}_mem"),
            };
            let val = mux.build(&bits, 0)?;
            let out = b.net(k);
            match val {
                Val::Const(c) => b.add_gate(if c { GateKind::Const1 } else { GateKind::Const0 }, &[], out)?,
                Val::Net(n) => b.add_gate(GateKind::Buf, &[n], out)?,
            }
        }
    }
    for &o in locked.primary_outputs() {
        let n = b.net(locked.name(o));
        b.add_output(n);
    }
    Ok(b.finish()?)
}
