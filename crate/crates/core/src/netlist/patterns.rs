//! Bit-parallel pattern helpers.
//!
//! Pattern `p` over `n` variables assigns variable `i` the bit
//! `(p >> (n - 1 - i)) & 1`; variable 0 is the most significant. Block `b`
//! holds patterns `64 * b .. 64 * b + 63`, one per bit lane.

use alloc::vec::Vec;

const LANE_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Word for variable `var` of `num_vars` in exhaustive block `block`.
pub fn exhaustive_word(var: usize, num_vars: usize, block: usize) -> u64 {
    let bit = num_vars - 1 - var;
    if bit < 6 {
        LANE_MASKS[bit]
    } else if (block >> (bit - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

/// Words for all variables in exhaustive block `block`.
pub fn exhaustive_block(num_vars: usize, block: usize) -> Vec<u64> {
    (0..num_vars).map(|v| exhaustive_word(v, num_vars, block)).collect()
}

/// Number of 64-pattern blocks needed to enumerate `num_vars` variables.
pub fn num_blocks(num_vars: usize) -> usize {
    if num_vars <= 6 {
        1
    } else {
        1 << (num_vars - 6)
    }
}

/// Mask of lanes that carry real patterns in an exhaustive enumeration.
pub fn valid_lanes(num_vars: usize) -> u64 {
    if num_vars >= 6 {
        !0
    } else {
        (1u64 << (1 << num_vars)) - 1
    }
}

/// Mask with the low `count` lanes set.
pub fn low_lanes(count: usize) -> u64 {
    if count >= 64 {
        !0
    } else {
        (1u64 << count) - 1
    }
}

/// Bits of pattern `p` over `n` variables, most significant first.
pub fn bits_of(p: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (p >> (n - 1 - i)) & 1 == 1).collect()
}

/// Inverse of [`bits_of`].
pub fn index_of(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

/// Extracts lane `lane` of each word as a bool.
pub fn lane(words: &[u64], lane: usize) -> Vec<bool> {
    words.iter().map(|w| (w >> lane) & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_enumerate_in_order() {
        for n in [1usize, 3, 6, 8] {
            let total = 1u64 << n;
            for p in 0..total {
                let block = (p / 64) as usize;
                let l = (p % 64) as usize;
                let words = exhaustive_block(n, block);
                assert_eq!(lane(&words, l), bits_of(p, n));
            }
        }
        assert_eq!(index_of(&bits_of(0b1011, 4)), 0b1011);
    }
}
