use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{Gate, GateKind, NetId, Netlist, NetlistError, KEY_PREFIX};

/// Handle to a net inside a [`NetlistBuilder`]. Only meaningful for the
/// builder that produced it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BuildNet(u32);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    Undefined,
    Input,
    Gate(usize),
}

/// Mutable netlist under construction. Gates may be added in any order;
/// [`finish`](Self::finish) checks definitions, sorts topologically and
/// assigns canonical ids.
#[derive(Clone, Debug, Default)]
pub struct NetlistBuilder {
    names: Vec<String>,
    index: BTreeMap<String, u32>,
    slots: Vec<Slot>,
    referenced: Vec<bool>,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    gates: Vec<(GateKind, Vec<u32>, u32)>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the net called `name`, creating an (as yet undefined) net if
    /// necessary.
    pub fn net(&mut self, name: &str) -> BuildNet {
        if let Some(&id) = self.index.get(name) {
            return BuildNet(id);
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.slots.push(Slot::Undefined);
        self.referenced.push(false);
        BuildNet(id)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// A new net whose name starts with `hint` and collides with nothing.
    pub fn fresh(&mut self, hint: &str) -> BuildNet {
        if !self.contains(hint) {
            return self.net(hint);
        }
        let mut i = 1usize;
        loop {
            let candidate = format!("{hint}_{i}");
            if !self.contains(&candidate) {
                return self.net(&candidate);
            }
            i += 1;
        }
    }

    pub fn name(&self, net: BuildNet) -> &str {
        &self.names[net.0 as usize]
    }

    pub fn is_defined(&self, net: BuildNet) -> bool {
        self.slots[net.0 as usize] != Slot::Undefined
    }

    fn define(&mut self, net: BuildNet, slot: Slot) -> Result<(), NetlistError> {
        let s = &mut self.slots[net.0 as usize];
        if *s != Slot::Undefined {
            return Err(NetlistError::DuplicateDefinition(self.names[net.0 as usize].clone()));
        }
        *s = slot;
        Ok(())
    }

    /// Declares an input; names starting with `keyinput` become key inputs.
    pub fn add_input(&mut self, name: &str) -> Result<BuildNet, NetlistError> {
        let n = self.net(name);
        self.define(n, Slot::Input)?;
        self.inputs.push(n.0);
        Ok(n)
    }

    pub fn add_output(&mut self, net: BuildNet) {
        self.referenced[net.0 as usize] = true;
        self.outputs.push(net.0);
    }

    /// Gates added so far, counting the binary gates of expanded XOR chains.
    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn is_output(&self, net: BuildNet) -> bool {
        self.outputs.contains(&net.0)
    }

    /// Adds a gate driving `output`. Unary AND/OR forms become buffers or
    /// inverters and wide XOR/XNOR gates are split into a chain of binary
    /// gates.
    pub fn add_gate(&mut self, kind: GateKind, inputs: &[BuildNet], output: BuildNet) -> Result<(), NetlistError> {
        let arity = inputs.len();
        let bad = || NetlistError::BadArity {
            net: self.names[output.0 as usize].clone(),
            kind,
            arity,
        };
        let kind = match (kind, arity) {
            (GateKind::Const0 | GateKind::Const1, 0) => kind,
            (GateKind::Const0 | GateKind::Const1, _) => return Err(bad()),
            (_, 0) => return Err(bad()),
            (GateKind::Not | GateKind::Buf, 1) => kind,
            (GateKind::Not | GateKind::Buf, _) => return Err(bad()),
            (GateKind::And | GateKind::Or | GateKind::Xor, 1) => GateKind::Buf,
            (GateKind::Nand | GateKind::Nor | GateKind::Xnor, 1) => GateKind::Not,
            (GateKind::Xor | GateKind::Xnor, n) if n > 2 => {
                let mut acc = inputs[0];
                for (i, &next) in inputs[1..n - 1].iter().enumerate() {
                    let hint = format!("{}_xor{}", self.names[output.0 as usize], i + 1);
                    let t = self.fresh(&hint);
                    self.push_gate(GateKind::Xor, &[acc, next], t)?;
                    acc = t;
                }
                return self.push_gate(kind, &[acc, inputs[n - 1]], output);
            }
            _ => kind,
        };
        self.push_gate(kind, inputs, output)
    }

    fn push_gate(&mut self, kind: GateKind, inputs: &[BuildNet], output: BuildNet) -> Result<(), NetlistError> {
        self.define(output, Slot::Gate(self.gates.len()))?;
        for i in inputs {
            self.referenced[i.0 as usize] = true;
        }
        self.gates
            .push((kind, inputs.iter().map(|n| n.0).collect(), output.0));
        Ok(())
    }

    /// Adds a gate with a fresh output net named after `hint`.
    pub fn gate(&mut self, kind: GateKind, inputs: &[BuildNet], hint: &str) -> Result<BuildNet, NetlistError> {
        let out = self.fresh(hint);
        self.add_gate(kind, inputs, out)?;
        Ok(out)
    }

    pub fn finish(self) -> Result<Netlist, NetlistError> {
        for (i, (&slot, &used)) in self.slots.iter().zip(&self.referenced).enumerate() {
            if used && slot == Slot::Undefined {
                return Err(NetlistError::UndefinedNet(self.names[i].clone()));
            }
        }

        // Kahn's algorithm; the heap keeps insertion order wherever the
        // dependencies allow, so already-sorted input round-trips unchanged.
        let ng = self.gates.len();
        let mut pending = vec![0usize; ng];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); ng];
        for (gi, (_, ins, _)) in self.gates.iter().enumerate() {
            for &i in ins {
                if let Slot::Gate(src) = self.slots[i as usize] {
                    pending[gi] += 1;
                    users[src].push(gi);
                }
            }
        }
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..ng).filter(|&g| pending[g] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(ng);
        while let Some(Reverse(g)) = heap.pop() {
            order.push(g);
            for &u in &users[g] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    heap.push(Reverse(u));
                }
            }
        }
        if order.len() != ng {
            return Err(NetlistError::CombinationalCycle(self.cycle_witness(&pending)));
        }

        let mut new_id = vec![u32::MAX; self.names.len()];
        let mut names = Vec::with_capacity(self.inputs.len() + ng);
        let mut key_flags = Vec::with_capacity(self.inputs.len());
        for &i in &self.inputs {
            new_id[i as usize] = names.len() as u32;
            let name = &self.names[i as usize];
            key_flags.push(name.starts_with(KEY_PREFIX));
            names.push(name.clone());
        }
        let num_inputs = names.len();
        for &g in &order {
            let out = self.gates[g].2;
            new_id[out as usize] = names.len() as u32;
            names.push(self.names[out as usize].clone());
        }
        let gates = order
            .iter()
            .map(|&g| {
                let (kind, ins, out) = &self.gates[g];
                Gate {
                    kind: *kind,
                    inputs: ins.iter().map(|&i| NetId(new_id[i as usize])).collect(),
                    output: NetId(new_id[*out as usize]),
                }
            })
            .collect();
        let outputs = self
            .outputs
            .iter()
            .map(|&o| NetId(new_id[o as usize]))
            .collect();
        Ok(Netlist::from_parts(names, num_inputs, key_flags, outputs, gates))
    }

    /// Name of a net that lies on a cycle among the unsorted gates.
    fn cycle_witness(&self, pending: &[usize]) -> String {
        let stuck = |g: usize| pending[g] > 0;
        let mut g = (0..pending.len()).find(|&g| stuck(g)).unwrap_or(0);
        let mut visited = vec![false; pending.len()];
        while !visited[g] {
            visited[g] = true;
            let next = self.gates[g].1.iter().find_map(|&i| match self.slots[i as usize] {
                Slot::Gate(src) if stuck(src) => Some(src),
                _ => None,
            });
            match next {
                Some(n) => g = n,
                None => break,
            }
        }
        self.names[self.gates[g].2 as usize].clone()
    }
}
