//! Tseitin lowering over AND and XOR nodes with constant folding and
//! structural hashing. Several netlist copies can share one encoder; nodes
//! that are structurally identical across copies are encoded once.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Not;

use super::{ClauseSink, CnfFormula, Lit, Var};
use crate::netlist::{GateKind, NetId, Netlist, NetlistError};

/// A value in the encoding: either folded to a constant or a literal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Signal {
    Const(bool),
    Lit(Lit),
}

impl Signal {
    pub const FALSE: Signal = Signal::Const(false);
    pub const TRUE: Signal = Signal::Const(true);

    pub fn lit(self) -> Option<Lit> {
        match self {
            Signal::Lit(l) => Some(l),
            Signal::Const(_) => None,
        }
    }

    /// Value under a solver model.
    pub fn eval(self, model: &[bool]) -> bool {
        match self {
            Signal::Const(b) => b,
            Signal::Lit(l) => l.eval(model),
        }
    }
}

impl Not for Signal {
    type Output = Signal;
    fn not(self) -> Signal {
        match self {
            Signal::Const(b) => Signal::Const(!b),
            Signal::Lit(l) => Signal::Lit(!l),
        }
    }
}

impl From<Lit> for Signal {
    fn from(l: Lit) -> Signal {
        Signal::Lit(l)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Node {
    And(Vec<Lit>),
    Xor(Var, Var),
}

#[derive(Clone, Debug)]
pub struct Encoder<S> {
    sink: S,
    nodes: BTreeMap<Node, Lit>,
}

impl<S: ClauseSink> Encoder<S> {
    pub fn new(sink: S) -> Self {
        Encoder {
            sink,
            nodes: BTreeMap::new(),
        }
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn sink_mut(&mut self) -> &mut S {
        &mut self.sink
    }

    pub fn into_sink(self) -> S {
        self.sink
    }

    pub fn fresh(&mut self) -> Signal {
        Signal::Lit(self.sink.new_var().pos())
    }

    /// Forces `s` to hold. Returns false if `s` is the constant false, in
    /// which case the empty clause has been added.
    pub fn assert(&mut self, s: Signal) -> bool {
        match s {
            Signal::Const(true) => true,
            Signal::Const(false) => {
                self.sink.add_clause(&[]);
                false
            }
            Signal::Lit(l) => {
                self.sink.add_clause(&[l]);
                true
            }
        }
    }

    /// Forces `a == b`.
    pub fn assert_equal(&mut self, a: Signal, b: Signal) -> bool {
        let x = self.xor(a, b);
        self.assert(!x)
    }

    pub fn and(&mut self, inputs: &[Signal]) -> Signal {
        let mut lits = Vec::with_capacity(inputs.len());
        for s in inputs {
            match *s {
                Signal::Const(false) => return Signal::FALSE,
                Signal::Const(true) => {}
                Signal::Lit(l) => lits.push(l),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[1] == !w[0]) {
            return Signal::FALSE;
        }
        match lits.len() {
            0 => return Signal::TRUE,
            1 => return Signal::Lit(lits[0]),
            _ => {}
        }
        let node = Node::And(lits);
        if let Some(&y) = self.nodes.get(&node) {
            return Signal::Lit(y);
        }
        let Node::And(lits) = &node else { unreachable!() };
        let y = self.sink.new_var().pos();
        let mut long: Vec<Lit> = lits.iter().map(|&a| !a).collect();
        long.push(y);
        self.sink.add_clause(&long);
        for &a in lits {
            self.sink.add_clause(&[a, !y]);
        }
        self.nodes.insert(node, y);
        Signal::Lit(y)
    }

    pub fn or(&mut self, inputs: &[Signal]) -> Signal {
        let neg: Vec<Signal> = inputs.iter().map(|&s| !s).collect();
        !self.and(&neg)
    }

    pub fn xor(&mut self, a: Signal, b: Signal) -> Signal {
        let (a, b) = match (a, b) {
            (Signal::Const(x), s) | (s, Signal::Const(x)) => return if x { !s } else { s },
            (Signal::Lit(a), Signal::Lit(b)) => (a, b),
        };
        if a == b {
            return Signal::FALSE;
        }
        if a == !b {
            return Signal::TRUE;
        }
        let flip = a.is_negated() != b.is_negated();
        let (va, vb) = if a.var() < b.var() { (a.var(), b.var()) } else { (b.var(), a.var()) };
        let node = Node::Xor(va, vb);
        let y = match self.nodes.get(&node) {
            Some(&y) => y,
            None => {
                let y = self.sink.new_var().pos();
                let (p, q) = (va.pos(), vb.pos());
                self.sink.add_clause(&[!p, !q, !y]);
                self.sink.add_clause(&[p, q, !y]);
                self.sink.add_clause(&[p, !q, y]);
                self.sink.add_clause(&[!p, q, y]);
                self.nodes.insert(node, y);
                y
            }
        };
        Signal::Lit(if flip { !y } else { y })
    }

    pub fn xor_many(&mut self, inputs: &[Signal]) -> Signal {
        inputs.iter().fold(Signal::FALSE, |acc, &s| self.xor(acc, s))
    }

    /// `if s { t } else { e }`.
    pub fn mux(&mut self, s: Signal, t: Signal, e: Signal) -> Signal {
        let a = self.and(&[s, t]);
        let b = self.and(&[!s, e]);
        self.or(&[a, b])
    }

    pub fn gate(&mut self, kind: GateKind, ins: &[Signal]) -> Signal {
        match kind {
            GateKind::And => self.and(ins),
            GateKind::Nand => !self.and(ins),
            GateKind::Or => self.or(ins),
            GateKind::Nor => !self.or(ins),
            GateKind::Xor => self.xor_many(ins),
            GateKind::Xnor => !self.xor_many(ins),
            GateKind::Not => !ins[0],
            GateKind::Buf => ins[0],
            GateKind::Const0 => Signal::FALSE,
            GateKind::Const1 => Signal::TRUE,
        }
    }
}

/// Encodes one copy of `nl` with the given input signals (in the order of
/// `primary_inputs` and `key_inputs`). Returns the signal of every net.
pub fn encode_netlist<S: ClauseSink>(
    enc: &mut Encoder<S>,
    nl: &Netlist,
    pis: &[Signal],
    keys: &[Signal],
) -> Result<Vec<Signal>, NetlistError> {
    let check = |what: &'static str, expected: usize, got: usize| {
        if expected == got {
            Ok(())
        } else {
            Err(NetlistError::LengthMismatch { what, expected, got })
        }
    };
    check("primary input", nl.primary_inputs().len(), pis.len())?;
    check("key input", nl.key_inputs().len(), keys.len())?;
    let mut sig = alloc::vec![Signal::FALSE; nl.num_nets()];
    for (&n, &s) in nl.primary_inputs().iter().zip(pis) {
        sig[n.index()] = s;
    }
    for (&n, &s) in nl.key_inputs().iter().zip(keys) {
        sig[n.index()] = s;
    }
    let mut ins = Vec::new();
    for g in nl.gates() {
        ins.clear();
        ins.extend(g.inputs.iter().map(|i| sig[i.index()]));
        sig[g.output.index()] = enc.gate(g.kind, &ins);
    }
    Ok(sig)
}

/// Stand-alone encoding of one netlist copy.
#[derive(Clone, Debug)]
pub struct Tseitin {
    pub formula: CnfFormula,
    /// Signal of every net, indexed by [`NetId`].
    pub nets: Vec<Signal>,
}

impl Tseitin {
    pub fn net(&self, n: NetId) -> Signal {
        self.nets[n.index()]
    }
}

/// Encodes `nl` with one fresh variable per input (primary inputs first,
/// then keys).
pub fn tseitin(nl: &Netlist) -> Tseitin {
    let mut enc = Encoder::new(CnfFormula::new());
    let pis: Vec<Signal> = nl.primary_inputs().iter().map(|_| enc.fresh()).collect();
    let keys: Vec<Signal> = nl.key_inputs().iter().map(|_| enc.fresh()).collect();
    let nets = encode_netlist(&mut enc, nl, &pis, &keys).expect("lengths match by construction");
    Tseitin {
        formula: enc.into_sink(),
        nets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;
    use alloc::vec;

    #[test]
    fn and_gate_clauses() {
        let nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        let t = tseitin(&nl);
        let a = t.net(nl.find("a").unwrap()).lit().unwrap();
        let b = t.net(nl.find("b").unwrap()).lit().unwrap();
        let y = t.net(nl.find("y").unwrap()).lit().unwrap();
        let mut got: Vec<Vec<Lit>> = t
            .formula
            .clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort();
                c
            })
            .collect();
        got.sort();
        let mut want = vec![vec![!a, !b, y], vec![a, !y], vec![b, !y]];
        for c in &mut want {
            c.sort();
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn constants_fold_away() {
        let mut enc = Encoder::new(CnfFormula::new());
        let x = enc.fresh();
        assert_eq!(enc.and(&[x, Signal::FALSE]), Signal::FALSE);
        assert_eq!(enc.and(&[x, Signal::TRUE]), x);
        assert_eq!(enc.xor(x, Signal::TRUE), !x);
        assert_eq!(enc.xor(x, !x), Signal::TRUE);
        assert_eq!(enc.and(&[x, !x]), Signal::FALSE);
        assert!(enc.sink().clauses.is_empty());
    }

    #[test]
    fn structural_hashing_shares_nodes() {
        let mut enc = Encoder::new(CnfFormula::new());
        let (x, y) = (enc.fresh(), enc.fresh());
        let a = enc.and(&[x, y]);
        let b = enc.and(&[y, x]);
        assert_eq!(a, b);
        let p = enc.xor(!x, y);
        let q = enc.xor(x, y);
        assert_eq!(p, !q);
        assert_eq!(enc.sink().clauses.len(), 3 + 4);
    }
}
