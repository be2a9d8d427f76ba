//! Random circuit generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sublock_core::{GateKind, Netlist, NetlistBuilder};

pub const KINDS: [GateKind; 8] = [
    GateKind::And,
    GateKind::Nand,
    GateKind::Or,
    GateKind::Nor,
    GateKind::Xor,
    GateKind::Xnor,
    GateKind::Not,
    GateKind::Buf,
];

pub fn random_netlist(rng: &mut ChaCha8Rng, inputs: usize, gates: usize, outputs: usize) -> Netlist {
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
    for k in 0..outputs {
        let n = nets[nets.len() - 1 - k % nets.len()];
        if !b.is_output(n) {
            b.add_output(n);
        }
    }
    b.finish().unwrap()
}

/// Random design in which every gate without fanout is a primary output,
/// so no logic is dead.
pub fn random_design(rng: &mut ChaCha8Rng, inputs: usize, gates: usize) -> Netlist {
    let mut b = NetlistBuilder::new();
    let mut nets: Vec<_> = (0..inputs).map(|i| b.add_input(&format!("i{i}")).unwrap()).collect();
    let mut used = vec![false; inputs + gates];
    for g in 0..gates {
        let kind = KINDS[rng.gen_range(0..6)];
        let arity = match kind {
            GateKind::Xor | GateKind::Xnor => 2,
            _ => rng.gen_range(2..=3),
        };
        // Favour recent nets so cones get deep enough to cut.
        let lo = nets.len().saturating_sub(inputs + 4);
        let mut ins = Vec::new();
        while ins.len() < arity {
            let i = rng.gen_range(lo..nets.len());
            if !ins.contains(&i) || nets.len() == 1 {
                ins.push(i);
            }
        }
        for &i in &ins {
            used[i] = true;
        }
        let ins: Vec<_> = ins.into_iter().map(|i| nets[i]).collect();
        let out = b.net(&format!("g{g}"));
        b.add_gate(kind, &ins, out).unwrap();
        nets.push(out);
    }
    for (i, &n) in nets.iter().enumerate().skip(inputs) {
        if !used[i] {
            b.add_output(n);
        }
    }
    b.finish().unwrap()
}
