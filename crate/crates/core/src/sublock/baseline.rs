use alloc::format;
use alloc::vec::Vec;
use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{fault_impact, SublockError};
use crate::netlist::{BuildNet, GateKind, NetId, Netlist, NetlistBuilder, NetlistError};
use crate::rng::{seeded, STREAM_BASELINE};

/// A conventionally locked design and its single correct key (in key
/// input order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineLock {
    pub locked: Netlist,
    pub correct_key: Vec<bool>,
}

/// Builder that already knows every net name of `nl`, so fresh names never
/// collide with nets copied later.
fn builder_for(nl: &Netlist) -> Result<NetlistBuilder, NetlistError> {
    let mut b = NetlistBuilder::new();
    for i in 0..nl.num_nets() {
        b.net(nl.name(NetId(i as u32)));
    }
    for &i in nl.primary_inputs() {
        b.add_input(nl.name(i))?;
    }
    Ok(b)
}

fn key_inputs(b: &mut NetlistBuilder, count: usize) -> Result<Vec<BuildNet>, NetlistError> {
    (0..count).map(|j| b.add_input(&format!("keyinput{j}"))).collect()
}

fn finish(nl: &Netlist, mut b: NetlistBuilder) -> Result<Netlist, NetlistError> {
    for &o in nl.primary_outputs() {
        let n = b.net(nl.name(o));
        b.add_output(n);
    }
    b.finish()
}

fn check_unlocked(nl: &Netlist) -> Result<(), SublockError> {
    if nl.key_inputs().is_empty() {
        Ok(())
    } else {
        Err(SublockError::AlreadyLocked)
    }
}

/// XOR/XNOR key gates on `num_keys` seeded random gate outputs. A key bit
/// of 0 is correct for an XOR gate and 1 for an XNOR gate.
pub fn lock_xor_baseline(nl: &Netlist, num_keys: usize, seed: u64) -> Result<BaselineLock, SublockError> {
    check_unlocked(nl)?;
    let gates = nl.gates().len();
    if num_keys > gates {
        return Err(SublockError::BadArgument(format!("{num_keys} key gates requested, design has {gates} gates")));
    }
    let mut rng = seeded(seed, STREAM_BASELINE);
    let mut chosen = index::sample(&mut rng, gates, num_keys).into_vec();
    chosen.sort_unstable();
    let correct_key: Vec<bool> = (0..num_keys).map(|_| rng.gen()).collect();

    let mut b = builder_for(nl)?;
    let keys = key_inputs(&mut b, num_keys)?;
    for (gi, g) in nl.gates().iter().enumerate() {
        let ins: Vec<BuildNet> = g.inputs.iter().map(|&i| b.net(nl.name(i))).collect();
        let out = b.net(nl.name(g.output));
        match chosen.binary_search(&gi) {
            Ok(j) => {
                let pre = b.fresh(&format!("{}_enc", nl.name(g.output)));
                b.add_gate(g.kind, &ins, pre)?;
                let kind = if correct_key[j] { GateKind::Xnor } else { GateKind::Xor };
                b.add_gate(kind, &[pre, keys[j]], out)?;
            }
            Err(_) => b.add_gate(g.kind, &ins, out)?,
        }
    }
    Ok(BaselineLock {
        locked: finish(nl, b)?,
        correct_key,
    })
}

/// Balanced tree of two-input ANDs; the top gate is `top` (AND or NAND).
fn and_tree(b: &mut NetlistBuilder, mut level: Vec<BuildNet>, top: GateKind, hint: &str) -> Result<BuildNet, NetlistError> {
    if level.len() == 1 {
        return match top {
            GateKind::Nand => b.gate(GateKind::Not, &level, hint),
            _ => Ok(level[0]),
        };
    }
    while level.len() > 2 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            next.push(match pair {
                [x, y] => b.gate(GateKind::And, &[*x, *y], hint)?,
                [x] => *x,
                _ => unreachable!(),
            });
        }
        level = next;
    }
    b.gate(top, &level, hint)
}

/// Anti-SAT block `g(X ^ Ka) AND NOT g(X ^ Kb)` over `num_keys / 2` seeded
/// random primary inputs, with `g` a two-input AND tree, XORed into a
/// seeded random observable gate output. Any key with `Ka == Kb` is
/// correct; the returned one has a random `Ka`.
pub fn lock_antisat_baseline(nl: &Netlist, num_keys: usize, seed: u64) -> Result<BaselineLock, SublockError> {
    check_unlocked(nl)?;
    let p = num_keys / 2;
    if num_keys == 0 || !num_keys.is_multiple_of(2) || p > nl.primary_inputs().len() {
        return Err(SublockError::BadArgument(format!(
            "Anti-SAT needs an even key count of at most twice the {} inputs, got {num_keys}",
            nl.primary_inputs().len()
        )));
    }
    let mut rng = seeded(seed, STREAM_BASELINE);
    let mut xs = index::sample(&mut rng, nl.primary_inputs().len(), p).into_vec();
    xs.sort_unstable();
    let ka: Vec<bool> = (0..p).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..nl.gates().len()).collect();
    order.shuffle(&mut rng);
    let mut target = None;
    for g in order {
        let out = nl.gates()[g].output;
        if fault_impact(nl, out, 256, seed)? > 0.0 {
            target = Some(g);
            break;
        }
    }
    let target = target.ok_or_else(|| SublockError::BadArgument("no observable net to corrupt".into()))?;

    let mut b = builder_for(nl)?;
    let keys = key_inputs(&mut b, num_keys)?;
    let x_nets: Vec<BuildNet> = xs.iter().map(|&i| b.net(nl.name(nl.primary_inputs()[i]))).collect();
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    for (j, &x) in x_nets.iter().enumerate() {
        ta.push(b.gate(GateKind::Xor, &[x, keys[j]], "asb_a")?);
        tb.push(b.gate(GateKind::Xor, &[x, keys[p + j]], "asb_b")?);
    }
    let g = and_tree(&mut b, ta, GateKind::And, "asb_g")?;
    let gbar = and_tree(&mut b, tb, GateKind::Nand, "asb_gbar")?;
    let flip = b.gate(GateKind::And, &[g, gbar], "asb_y")?;
    for (gi, gate) in nl.gates().iter().enumerate() {
        let ins: Vec<BuildNet> = gate.inputs.iter().map(|&i| b.net(nl.name(i))).collect();
        let out = b.net(nl.name(gate.output));
        if gi == target {
            let pre = b.fresh(&format!("{}_asb", nl.name(gate.output)));
            b.add_gate(gate.kind, &ins, pre)?;
            b.add_gate(GateKind::Xor, &[pre, flip], out)?;
        } else {
            b.add_gate(gate.kind, &ins, out)?;
        }
    }
    let correct_key = ka.iter().chain(&ka).copied().collect();
    Ok(BaselineLock {
        locked: finish(nl, b)?,
        correct_key,
    })
}
