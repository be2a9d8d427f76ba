use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

use super::SublockError;
use crate::idkll::{activate, KeyMemory};
use crate::netlist::{patterns, NetId, Netlist, NetlistError};
use crate::rng::{seeded, STREAM_CORRUPTION, STREAM_FAULT};
use crate::sat::EXHAUSTIVE_LIMIT;

pub const DEFAULT_FAULT_SAMPLES: usize = 10_000;

/// Fraction of input patterns on which inverting `net` (the stuck-at fault
/// opposite to its fault-free value) changes some primary output. All
/// patterns are used when the design has at most 16 inputs, otherwise
/// `samples` seeded random ones.
pub fn fault_impact(nl: &Netlist, net: NetId, samples: usize, seed: u64) -> Result<f64, SublockError> {
    if net.index() >= nl.num_nets() {
        return Err(NetlistError::UnknownNet(format!("{net}")).into());
    }
    if samples == 0 {
        return Err(SublockError::BadArgument("fault impact needs at least one sample".into()));
    }
    let n = nl.primary_inputs().len();
    let first = nl.driver(net).map_or(0, |g| g + 1);
    let keys = vec_zero(nl.key_inputs().len());
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut values = Vec::new();
    let mut run = |pi: &[u64], lanes: u64| -> Result<(), NetlistError> {
        nl.eval_words_into(pi, &keys, &mut values)?;
        let golden = nl.output_words(&values);
        values[net.index()] = !values[net.index()];
        nl.eval_gates_from(&mut values, first);
        let diff = nl
            .output_words(&values)
            .iter()
            .zip(&golden)
            .fold(0, |acc, (a, b)| acc | (a ^ b));
        hits += (diff & lanes).count_ones() as u64;
        total += lanes.count_ones() as u64;
        Ok(())
    };
    if n <= EXHAUSTIVE_LIMIT {
        for b in 0..patterns::num_blocks(n) {
            run(&patterns::exhaustive_block(n, b), patterns::valid_lanes(n))?;
        }
    } else {
        let mut rng = seeded(seed, STREAM_FAULT);
        let mut left = samples;
        while left > 0 {
            let pi: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
            run(&pi, patterns::low_lanes(left))?;
            left = left.saturating_sub(64);
        }
    }
    Ok(hits as f64 / total as f64)
}

fn vec_zero(n: usize) -> Vec<u64> {
    alloc::vec![0; n]
}

/// Words of the correct key for each pattern of `pi`, read from the key
/// nets of the activated design.
fn correct_key_words(act: &Netlist, locked: &Netlist, values: &[u64]) -> Vec<u64> {
    locked
        .key_inputs()
        .iter()
        .map(|&k| values[act.find(locked.name(k)).expect("activation keeps key net names").index()])
        .collect()
}

/// Fraction of `trials` random (input, wrong key) pairs on which `locked`
/// disagrees with the activated design. A key is wrong for an input when it
/// differs from what the memories supply for that input.
pub fn corruption_report(locked: &Netlist, memory: &[KeyMemory], trials: usize, seed: u64) -> Result<f64, SublockError> {
    let k = locked.key_inputs().len();
    if k == 0 {
        return Ok(0.0);
    }
    if trials == 0 {
        return Err(SublockError::BadArgument("corruption needs at least one trial".into()));
    }
    let act = activate(locked, memory)?;
    let n = locked.primary_inputs().len();
    let mut rng = seeded(seed, STREAM_CORRUPTION);
    let (mut counted, mut corrupted) = (0usize, 0usize);
    while counted < trials {
        let pi: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let key: Vec<u64> = (0..k).map(|_| rng.gen()).collect();
        let av = act.eval_words(&pi, &[])?;
        let good = correct_key_words(&act, locked, &av);
        let mut wrong = key.iter().zip(&good).fold(0, |acc, (a, b)| acc | (a ^ b));
        // Keep only as many lanes as still needed, lowest first.
        let need = trials - counted;
        while wrong.count_ones() as usize > need {
            wrong &= !(1u64 << (63 - wrong.leading_zeros()));
        }
        let lv = locked.eval_words(&pi, &key)?;
        let diff = locked
            .output_words(&lv)
            .iter()
            .zip(act.output_words(&av))
            .fold(0, |acc, (a, b)| acc | (a ^ b));
        counted += wrong.count_ones() as usize;
        corrupted += (diff & wrong).count_ones() as usize;
    }
    Ok(corrupted as f64 / counted as f64)
}

/// [`corruption_report`] over every input and every wrong key; needs
/// inputs plus key bits at most 20.
pub fn corruption_exhaustive(locked: &Netlist, memory: &[KeyMemory]) -> Result<f64, SublockError> {
    let k = locked.key_inputs().len();
    let n = locked.primary_inputs().len();
    if k == 0 {
        return Ok(0.0);
    }
    if n + k > 20 {
        return Err(SublockError::BadArgument(format!("{n} inputs and {k} key bits are too many to enumerate")));
    }
    let act = activate(locked, memory)?;
    let (mut counted, mut corrupted) = (0u64, 0u64);
    for b in 0..patterns::num_blocks(n) {
        let pi = patterns::exhaustive_block(n, b);
        let lanes = patterns::valid_lanes(n);
        let av = act.eval_words(&pi, &[])?;
        let good = correct_key_words(&act, locked, &av);
        let want = act.output_words(&av);
        for key in 0..1u64 << k {
            let kw: Vec<u64> = (0..k).map(|i| if key >> (k - 1 - i) & 1 == 1 { !0 } else { 0 }).collect();
            let wrong = kw.iter().zip(&good).fold(0, |acc, (a, b)| acc | (a ^ b)) & lanes;
            let lv = locked.eval_words(&pi, &kw)?;
            let diff = locked
                .output_words(&lv)
                .iter()
                .zip(&want)
                .fold(0, |acc, (a, b)| acc | (a ^ b));
            counted += wrong.count_ones() as u64;
            corrupted += (diff & wrong).count_ones() as u64;
        }
    }
    Ok(corrupted as f64 / counted as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn half_adder() -> Netlist {
        parse_bench("INPUT(A)\nINPUT(B)\nOUTPUT(S)\nOUTPUT(C)\nS = XOR(A, B)\nC = AND(A, B)\n").unwrap()
    }

    #[test]
    fn output_and_dead_nets() {
        let ha = half_adder();
        assert_eq!(fault_impact(&ha, ha.find("S").unwrap(), 4, 0).unwrap(), 1.0);
        assert_eq!(fault_impact(&ha, ha.find("A").unwrap(), 4, 0).unwrap(), 1.0);
        // B flips C only when A = 1, but always flips S.
        assert_eq!(fault_impact(&ha, ha.find("B").unwrap(), 4, 0).unwrap(), 1.0);
        let dead = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = BUF(a)\nz = AND(a, b)\n").unwrap();
        assert_eq!(fault_impact(&dead, dead.find("z").unwrap(), 4, 0).unwrap(), 0.0);
        assert!(fault_impact(&dead, NetId(99), 4, 0).is_err());
    }

    #[test]
    fn partial_impact() {
        // y = a AND b: flipping a matters only when b = 1.
        let nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        assert_eq!(fault_impact(&nl, nl.find("a").unwrap(), 4, 0).unwrap(), 0.5);
    }
}
