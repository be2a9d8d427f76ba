//! Exact brute-force attempt counts.
//!
//! With `k` key bits there are `l = 2^k` key sequences. A conventional lock
//! needs up to `l` attempts and Anti-SAT at least `2^(k/2)`. Under IDKLL the
//! attacker must also guess which ordered selection of key sequences the
//! design uses, which adds `PC(l) = sum over r = 1..l of l! / (l - r)!`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Largest `l` accepted by [`permuted_combinations`].
pub const MAX_EXACT_L: u64 = 1 << 20;
/// Largest `k` for which [`attempts_total`] computes `PC` exactly.
pub const MAX_EXACT_K: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexityError {
    #[error("Anti-SAT splits the key in halves; k = {0} is odd")]
    OddKey(u32),
    #[error("permuted combinations need at least one key sequence")]
    Empty,
    #[error("l = {0} exceeds the exact limit of 2^20")]
    TooLarge(u64),
}

/// `2^k`.
pub fn attempts_conventional(k: u32) -> BigUint {
    BigUint::one() << k
}

/// `2^(k/2)`.
pub fn attempts_antisat(k: u32) -> Result<BigUint, ComplexityError> {
    if k % 2 == 1 {
        return Err(ComplexityError::OddKey(k));
    }
    Ok(BigUint::one() << (k / 2))
}

/// Composition of the maps `a -> i * (a + 1)` for `i` in `lo..=hi`, lowest
/// first, as `(p, q)` with result `p * a + q`. Splitting the range in
/// halves keeps the big multiplications balanced.
fn horner_range(lo: u64, hi: u64) -> (BigUint, BigUint) {
    if hi - lo < 16 {
        let mut p = BigUint::one();
        let mut q = BigUint::zero();
        for i in lo..=hi {
            p *= i;
            q = (q + 1u32) * i;
        }
        return (p, q);
    }
    let mid = lo + (hi - lo) / 2;
    let (p1, q1) = horner_range(lo, mid);
    let (p2, q2) = horner_range(mid + 1, hi);
    let q = &p2 * q1 + q2;
    (p2 * p1, q)
}

/// `PC(l)`: the number of ordered selections of one or more distinct items
/// out of `l`.
///
/// Uses `PC(l) = l * (1 + PC(l - 1))` with `PC(0) = 0`.
pub fn permuted_combinations(l: u64) -> Result<BigUint, ComplexityError> {
    if l == 0 {
        return Err(ComplexityError::Empty);
    }
    if l > MAX_EXACT_L {
        return Err(ComplexityError::TooLarge(l));
    }
    Ok(horner_range(1, l).1)
}

/// The same count written as `l! * sum over j = 0..l-1 of 1/j!`, evaluated
/// term by term as `l!/j!`. Quadratic; meant for cross-checking.
pub fn permuted_combinations_closed_form(l: u64) -> Result<BigUint, ComplexityError> {
    if l == 0 {
        return Err(ComplexityError::Empty);
    }
    if l > MAX_EXACT_L {
        return Err(ComplexityError::TooLarge(l));
    }
    let mut fact = BigUint::one();
    for i in 2..=l {
        fact *= i;
    }
    let mut sum = BigUint::zero();
    let mut jfact = BigUint::one();
    for j in 0..l {
        if j > 1 {
            jfact *= j;
        }
        sum += &fact / &jfact;
    }
    Ok(sum)
}

/// Attempt counts for `k` key bits. Fields that cannot be computed are
/// `None`: `lambda` for odd `k`, and the `PC`-based ones above
/// [`MAX_EXACT_K`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempts {
    pub k: u32,
    pub l: BigUint,
    pub lambda: Option<BigUint>,
    pub pc: Option<BigUint>,
    pub total: Option<BigUint>,
    pub increased: Option<BigUint>,
}

pub fn attempts_total(k: u32) -> Attempts {
    let l = attempts_conventional(k);
    let lambda = attempts_antisat(k).ok();
    let pc = (k <= MAX_EXACT_K).then(|| permuted_combinations(1u64 << k).expect("within the exact limit"));
    let total = pc.as_ref().map(|pc| &l + pc);
    let increased = total.as_ref().map(|t| t - &l);
    Attempts {
        k,
        l,
        lambda,
        pc,
        total,
        increased,
    }
}
