use std::cmp::Reverse;
use std::collections::BinaryHeap;

use proptest::prelude::*;
use sublock_core::netlist::patterns::bits_of;
use sublock_core::tables::{cost, minimize, netlist_of_sop, table_of_netlist, Cost, Cube, Ternary, TruthTable};

fn ternary() -> impl Strategy<Value = Ternary> {
    prop_oneof![Just(Ternary::Zero), Just(Ternary::One), Just(Ternary::DontCare)]
}

fn table(max_vars: usize) -> impl Strategy<Value = TruthTable> {
    (0..=max_vars).prop_flat_map(|nv| {
        prop::collection::vec(ternary(), 1 << nv).prop_map(move |e| TruthTable::from_entries(nv, 1, e).unwrap())
    })
}

/// Cheapest cover found by shortest path over the set of covered on-minterms,
/// using every implicant (prime or not) as an edge.
fn brute_force_min_cost(tt: &TruthTable) -> Cost {
    let nv = tt.num_vars();
    let col = tt.column(0);
    let on: Vec<u32> = (0..col.len() as u32).filter(|&m| col[m as usize] == Ternary::One).collect();
    let full: u32 = if on.is_empty() { 0 } else { (1u32 << on.len()) - 1 };
    let all = (1u32 << nv) - 1;
    let mut implicants = Vec::new();
    for mask in 0..=all {
        for bits in 0..=all {
            if bits & !mask != 0 {
                continue;
            }
            let c = Cube::new(mask, bits);
            if (0..col.len() as u32).any(|m| c.covers(m) && col[m as usize] == Ternary::Zero) {
                continue;
            }
            let cov = on.iter().enumerate().filter(|(_, &m)| c.covers(m)).fold(0u32, |a, (i, _)| a | (1 << i));
            if cov != 0 {
                implicants.push((cov, c.literal_count() as usize));
            }
        }
    }
    let mut best = vec![None::<(usize, usize)>; 1 << on.len()];
    let mut heap = BinaryHeap::new();
    best[0] = Some((0, 0));
    heap.push(Reverse(((0usize, 0usize), 0u32)));
    while let Some(Reverse((c, s))) = heap.pop() {
        if best[s as usize] != Some(c) {
            continue;
        }
        if s == full {
            return Cost { cubes: c.0, literals: c.1 };
        }
        for &(cov, lits) in &implicants {
            let t = s | cov;
            if t == s {
                continue;
            }
            let nc = (c.0 + 1, c.1 + lits);
            if best[t as usize].is_none_or(|b| nc < b) {
                best[t as usize] = Some(nc);
                heap.push(Reverse((nc, t)));
            }
        }
    }
    unreachable!("the minterms themselves always form a cover")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cover_agrees_with_care_set(tt in table(6)) {
        let c = minimize(&tt, 0);
        for m in 0..tt.rows() {
            prop_assert!(tt.get(0, m).admits(c.eval(m as u32)), "minterm {m}");
        }
    }

    #[test]
    fn cover_is_minimum(tt in table(4)) {
        prop_assert_eq!(cost(&minimize(&tt, 0)), brute_force_min_cost(&tt));
    }
}

#[test]
fn synthesized_networks_match_their_tables() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let names = ["a", "b", "c", "d", "e", "f"];
    for _ in 0..1000 {
        let nv = rng.gen_range(1..=6);
        let entries: Vec<Ternary> = (0..1 << nv)
            .map(|_| match rng.gen_range(0..3) {
                0 => Ternary::Zero,
                1 => Ternary::One,
                _ => Ternary::DontCare,
            })
            .collect();
        let tt = TruthTable::from_entries(nv, 1, entries).unwrap();
        let nl = netlist_of_sop(&[minimize(&tt, 0)], &names[..nv], &["y"]).unwrap();
        for m in 0..tt.rows() {
            let out = nl.simulate(&bits_of(m as u64, nv), &[]).unwrap();
            assert!(tt.get(0, m).admits(out[0]), "{tt} at {m}");
        }
        let back = table_of_netlist(&nl, nl.primary_outputs(), nl.primary_inputs()).unwrap();
        for m in 0..tt.rows() {
            assert!(tt.get(0, m).admits(back.get(0, m) == Ternary::One));
        }
    }
}
