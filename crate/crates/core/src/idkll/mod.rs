//! Input-dependent key locking of small functions.
//!
//! The input patterns of a function are split into `m` sets and each set
//! gets its own valid key sequence. A locked function answers correctly on
//! a set only under that set's key, and with the complement under any other
//! valid key, so no single key unlocks every input. The key for the input
//! currently applied comes from a lookup table ([`KeyMemory`]).
//!
//! Locked tables put the key bits first: entry `(key << v) | x`. Key `K`
//! and input `x` are read most significant bit first, so key bit 0 is the
//! first key input.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::{index, SliceRandom};

use crate::tables::{TableError, MAX_VARS};

mod lock;
mod memory;

pub use lock::{
    ensure_input_dependency, lock_function, lock_function_with, locked_table, realised_table, verify_no_universal_key,
    LockOptions, LockedFunction, Pin, UniversalKeyCheck,
};
pub use memory::{activate, build_key_memory, KeyMemory};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PartitionStrategy {
    /// Contiguous ranges of the input index; for `m = 2^j` this splits on
    /// the top `j` input bits.
    MsbSplit,
    /// Shuffled assignment with set sizes differing by at most one.
    BalancedRandom,
}

/// Treatment of the locked table under key sequences that are not valid.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum DontCarePolicy {
    /// Left unspecified; cheaper, but may admit extra partially correct keys.
    #[default]
    DontCare,
    /// Wrong (complemented) output on every input.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdkllError {
    #[error("cannot use {m} key sequences with {kb} key bits and {v} inputs")]
    InfeasibleSets { v: usize, kb: usize, m: usize },
    #[error("{v} inputs plus {kb} key bits exceed {MAX_VARS} variables")]
    TooLarge { v: usize, kb: usize },
    #[error("invalid key plan: {0}")]
    BadPlan(String),
    #[error("original table has {got} inputs, the plan expects {expected}")]
    InputMismatch { expected: usize, got: usize },
    #[error("no output depends on input(s) {vars:?}; their dependency cannot be forced")]
    CannotForceDependency { vars: Vec<usize> },
    #[error("key {key:#b} is correct on every input even with complemented unused keys")]
    UniversalKey { key: u64 },
    #[error("key input `{0}` is not driven by any memory block")]
    UncoveredKey(String),
    #[error("key input `{0}` is driven by more than one memory block")]
    DoublyCoveredKey(String),
    #[error("memory block refers to unknown net `{0}`")]
    UnknownNet(String),
    #[error("memory block is malformed: {0}")]
    BadMemory(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Netlist(#[from] crate::netlist::NetlistError),
}

/// Partition of the input patterns and the key sequence of every set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KeyPlan {
    num_inputs: usize,
    num_key_bits: usize,
    partition: Vec<u32>,
    valid_keys: Vec<u64>,
    policy: Vec<DontCarePolicy>,
}

impl KeyPlan {
    /// Checks and assembles a plan. `partition[x]` is the set of input
    /// pattern `x`; `valid_keys[i]` is the key of set `i`.
    pub fn new(
        num_inputs: usize,
        num_key_bits: usize,
        partition: Vec<u32>,
        valid_keys: Vec<u64>,
        policy: DontCarePolicy,
    ) -> Result<KeyPlan, IdkllError> {
        let m = valid_keys.len();
        check_sizes(num_inputs, num_key_bits, m)?;
        if partition.len() != 1 << num_inputs {
            return Err(IdkllError::BadPlan(alloc::format!(
                "partition has {} entries, expected {}",
                partition.len(),
                1usize << num_inputs
            )));
        }
        if partition.iter().any(|&s| s as usize >= m) {
            return Err(IdkllError::BadPlan("partition names a set without a key".into()));
        }
        let mut sorted = valid_keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != m || sorted.last().is_some_and(|&k| k >> num_key_bits != 0) {
            return Err(IdkllError::BadPlan("valid keys must be distinct and fit the key width".into()));
        }
        Ok(KeyPlan {
            num_inputs,
            num_key_bits,
            partition,
            valid_keys,
            policy: vec![policy; 1 << num_key_bits],
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_key_bits(&self) -> usize {
        self.num_key_bits
    }

    pub fn num_sets(&self) -> usize {
        self.valid_keys.len()
    }

    pub fn partition(&self) -> &[u32] {
        &self.partition
    }

    pub fn valid_keys(&self) -> &[u64] {
        &self.valid_keys
    }

    /// Set of input pattern `x`.
    pub fn set_of(&self, x: usize) -> usize {
        self.partition[x] as usize
    }

    /// Key sequence that unlocks input pattern `x`.
    pub fn key_for(&self, x: usize) -> u64 {
        self.valid_keys[self.set_of(x)]
    }

    /// Index of `key` among the valid keys.
    pub fn valid_index(&self, key: u64) -> Option<usize> {
        self.valid_keys.iter().position(|&k| k == key)
    }

    pub fn policy(&self, key: u64) -> DontCarePolicy {
        self.policy[key as usize]
    }

    /// Sets the policy of one unused key.
    pub fn set_policy(&mut self, key: u64, policy: DontCarePolicy) {
        self.policy[key as usize] = policy;
    }

    pub fn with_policy(mut self, policy: DontCarePolicy) -> KeyPlan {
        self.policy.iter_mut().for_each(|p| *p = policy);
        self
    }

    /// Number of key sequences that are not valid for any set.
    pub fn unused_keys(&self) -> usize {
        (1 << self.num_key_bits) - self.num_sets()
    }
}

fn check_sizes(v: usize, kb: usize, m: usize) -> Result<(), IdkllError> {
    if v + kb > MAX_VARS {
        return Err(IdkllError::TooLarge { v, kb });
    }
    if m < 2 || m > 1 << kb || m > 1 << v {
        return Err(IdkllError::InfeasibleSets { v, kb, m });
    }
    Ok(())
}

/// Seeded plan. Valid keys avoid the all-zero and all-one sequences when
/// enough other keys exist; otherwise only the all-zero one, otherwise
/// neither.
pub fn make_key_plan(
    v: usize,
    kb: usize,
    m: usize,
    strategy: PartitionStrategy,
    seed: u64,
) -> Result<KeyPlan, IdkllError> {
    make_key_plan_with(v, kb, m, strategy, &mut crate::rng::seeded(seed, crate::rng::STREAM_KEY_PLAN))
}

pub(crate) fn make_key_plan_with<R: rand::Rng>(
    v: usize,
    kb: usize,
    m: usize,
    strategy: PartitionStrategy,
    rng: &mut R,
) -> Result<KeyPlan, IdkllError> {
    check_sizes(v, kb, m)?;
    let rows = 1usize << v;
    let partition: Vec<u32> = match strategy {
        PartitionStrategy::MsbSplit => (0..rows).map(|x| (x * m / rows) as u32).collect(),
        PartitionStrategy::BalancedRandom => {
            let mut order: Vec<usize> = (0..rows).collect();
            order.shuffle(rng);
            let mut p = vec![0u32; rows];
            for (pos, &x) in order.iter().enumerate() {
                p[x] = (pos % m) as u32;
            }
            p
        }
    };
    let all_ones = (1u64 << kb) - 1;
    let keys = 1u64 << kb;
    let pool: Vec<u64> = if keys - 2 >= m as u64 {
        (1..all_ones).collect()
    } else if keys > m as u64 {
        (1..=all_ones).collect()
    } else {
        (0..=all_ones).collect()
    };
    let valid_keys: Vec<u64> = index::sample(rng, pool.len(), m).iter().map(|i| pool[i]).collect();
    KeyPlan::new(v, kb, partition, valid_keys, DontCarePolicy::DontCare)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_split_two_inputs() {
        let p = make_key_plan(2, 2, 2, PartitionStrategy::MsbSplit, 1).unwrap();
        assert_eq!(p.partition(), &[0, 0, 1, 1]);
        let mut keys = p.valid_keys().to_vec();
        keys.sort();
        assert_eq!(keys, [0b01, 0b10]);
    }

    #[test]
    fn msb_split_three_inputs() {
        let p = make_key_plan(3, 2, 2, PartitionStrategy::MsbSplit, 1).unwrap();
        assert_eq!(p.partition(), &[0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn seeded_plans_repeat() {
        for seed in 0..20 {
            let a = make_key_plan(4, 3, 3, PartitionStrategy::BalancedRandom, seed).unwrap();
            let b = make_key_plan(4, 3, 3, PartitionStrategy::BalancedRandom, seed).unwrap();
            assert_eq!(a, b);
            let mut sizes = [0usize; 3];
            for &s in a.partition() {
                sizes[s as usize] += 1;
            }
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            assert!(a.valid_keys().iter().all(|&k| k != 0 && k != 0b111));
        }
    }

    #[test]
    fn infeasible_counts() {
        assert!(matches!(
            make_key_plan(2, 2, 5, PartitionStrategy::MsbSplit, 0),
            Err(IdkllError::InfeasibleSets { .. })
        ));
        assert!(make_key_plan(1, 2, 1, PartitionStrategy::MsbSplit, 0).is_err());
        // All four keys needed: the exclusions are dropped.
        let p = make_key_plan(2, 2, 4, PartitionStrategy::MsbSplit, 0).unwrap();
        let mut keys = p.valid_keys().to_vec();
        keys.sort();
        assert_eq!(keys, [0, 1, 2, 3]);
        assert_eq!(p.unused_keys(), 0);
    }
}
