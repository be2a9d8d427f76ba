use proptest::prelude::*;
use sublock_core::idkll::{
    activate, build_key_memory, lock_function, make_key_plan, verify_no_universal_key, DontCarePolicy, IdkllError,
    KeyPlan, PartitionStrategy,
};
use sublock_core::netlist::patterns::bits_of;
use sublock_core::tables::{Ternary, TruthTable};
use sublock_core::{Netlist, NetlistBuilder};

/// A fully specified function that depends on every one of its inputs, so
/// locking never has to report an unforceable dependency.
fn original(max_vars: usize) -> impl Strategy<Value = TruthTable> {
    (2..=max_vars, 1..=2usize)
        .prop_flat_map(|(v, outs)| (Just(v), Just(outs), prop::collection::vec(any::<bool>(), outs << v)))
        .prop_map(|(v, outs, bits)| {
            let entries = bits.into_iter().map(Ternary::from_bool).collect();
            TruthTable::from_entries(v, outs, entries).unwrap()
        })
        .prop_filter("every input must matter", |tt| {
            let used: std::collections::BTreeSet<usize> = (0..tt.num_outputs()).flat_map(|o| tt.support(o)).collect();
            used.len() == tt.num_vars()
        })
}

fn plan_for(v: usize) -> impl Strategy<Value = KeyPlan> {
    (2..=3usize, any::<bool>(), any::<bool>(), any::<u64>()).prop_flat_map(move |(kb, random, complement, seed)| {
        let max_m = (1usize << kb).min(1 << v);
        (2..=max_m).prop_map(move |m| {
            let strategy = if random { PartitionStrategy::BalancedRandom } else { PartitionStrategy::MsbSplit };
            let policy = if complement { DontCarePolicy::Complement } else { DontCarePolicy::DontCare };
            make_key_plan(v, kb, m, strategy, seed).unwrap().with_policy(policy)
        })
    })
}

fn case() -> impl Strategy<Value = (TruthTable, KeyPlan)> {
    original(4).prop_flat_map(|tt| {
        let v = tt.num_vars();
        (Just(tt), plan_for(v))
    })
}

/// The lock network with its key bits `k{i}` turned into key inputs.
fn as_locked(network: &Netlist, kb: usize) -> Netlist {
    let rename = |name: &str| match name.strip_prefix('k').and_then(|i| i.parse::<usize>().ok()) {
        Some(i) if i < kb => format!("keyinput{i}"),
        _ => name.to_string(),
    };
    let mut b = NetlistBuilder::new();
    for &i in network.primary_inputs() {
        b.add_input(&rename(network.name(i))).unwrap();
    }
    for g in network.gates() {
        let ins: Vec<_> = g.inputs.iter().map(|&i| b.net(&rename(network.name(i)))).collect();
        let out = b.net(&rename(network.name(g.output)));
        b.add_gate(g.kind, &ins, out).unwrap();
    }
    for &o in network.primary_outputs() {
        let n = b.net(&rename(network.name(o)));
        b.add_output(n);
    }
    let nl = b.finish().unwrap();
    assert_eq!(nl.key_inputs().len(), kb);
    nl
}

fn value(tt: &TruthTable, o: usize, m: usize) -> bool {
    tt.get(o, m) == Ternary::One
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correct_keys_restore_every_input((tt, plan) in case()) {
        let lf = lock_function(&tt, &plan).unwrap();
        let r = lf.realised();
        let v = plan.num_inputs();
        for x in 0..1usize << v {
            let key = plan.key_for(x) as usize;
            for o in 0..tt.num_outputs() {
                prop_assert_eq!(value(&r, o, key << v | x), value(&tt, o, x), "x={} o={}", x, o);
            }
        }
    }

    #[test]
    fn other_valid_keys_corrupt_every_output((tt, plan) in case()) {
        let lf = lock_function(&tt, &plan).unwrap();
        let r = lf.realised();
        let v = plan.num_inputs();
        for x in 0..1usize << v {
            for (j, &kj) in plan.valid_keys().iter().enumerate() {
                if j == plan.set_of(x) {
                    continue;
                }
                for o in 0..tt.num_outputs() {
                    prop_assert_ne!(value(&r, o, (kj as usize) << v | x), value(&tt, o, x));
                }
            }
        }
    }

    #[test]
    fn emitted_locks_have_no_universal_key((tt, plan) in case()) {
        let lf = lock_function(&tt, &plan).unwrap();
        let check = verify_no_universal_key(&lf);
        prop_assert!(check.ok, "universal keys {:?}", check.universal_keys());
        prop_assert!(check.witnesses.iter().all(Option::is_some));
    }

    #[test]
    fn activated_lock_matches_original((tt, plan) in case()) {
        let lf = lock_function(&tt, &plan).unwrap();
        let v = plan.num_inputs();
        let inputs: Vec<String> = (0..v).map(|i| format!("x{i}")).collect();
        let keys: Vec<String> = (0..plan.num_key_bits()).map(|i| format!("keyinput{i}")).collect();
        let mem = build_key_memory(&plan, &inputs, &keys).unwrap();
        let act = activate(&as_locked(&lf.network, plan.num_key_bits()), &[mem]).unwrap();
        prop_assert!(act.key_inputs().is_empty());
        for x in 0..1u64 << v {
            let out = act.simulate(&bits_of(x, v), &[]).unwrap();
            let want: Vec<bool> = (0..tt.num_outputs()).map(|o| value(&tt, o, x as usize)).collect();
            prop_assert_eq!(out, want);
        }
    }

    #[test]
    fn memory_agrees_with_plan_on_its_support(v in 1..=5usize, kb in 1..=3usize, seed in any::<u64>()) {
        let m = 2 + (seed as usize) % ((1usize << kb).min(1 << v) - 1);
        let plan = make_key_plan(v, kb, m, PartitionStrategy::BalancedRandom, seed).unwrap();
        let inputs: Vec<String> = (0..v).map(|i| format!("x{i}")).collect();
        let keys: Vec<String> = (0..kb).map(|i| format!("k{i}")).collect();
        let mem = build_key_memory(&plan, &inputs, &keys).unwrap();
        for x in 0..1u64 << v {
            let bits = bits_of(x, v);
            let proj: Vec<bool> = mem
                .support
                .iter()
                .map(|s| bits[inputs.iter().position(|i| i == s).unwrap()])
                .collect();
            prop_assert_eq!(mem.lookup(&proj), plan.key_for(x as usize));
        }
    }

    #[test]
    fn plans_are_deterministic(v in 1..=6usize, kb in 1..=3usize, seed in any::<u64>(), random in any::<bool>()) {
        let strategy = if random { PartitionStrategy::BalancedRandom } else { PartitionStrategy::MsbSplit };
        let m = 2usize.min(1 << v);
        let a = make_key_plan(v, kb, m, strategy, seed);
        prop_assert_eq!(a.clone(), make_key_plan(v, kb, m, strategy, seed));
        if let Ok(p) = a {
            prop_assert_eq!(p.partition().len(), 1 << v);
            let mut sizes = vec![0usize; m];
            for &s in p.partition() {
                sizes[s as usize] += 1;
            }
            if random {
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            }
        }
    }
}

#[test]
fn constant_original_cannot_be_forced() {
    let tt = TruthTable::from_bits(2, &[false; 4]).unwrap();
    let plan = make_key_plan(2, 2, 2, PartitionStrategy::MsbSplit, 0).unwrap();
    assert!(matches!(lock_function(&tt, &plan), Err(IdkllError::CannotForceDependency { .. })));
}
