use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for `seed`, split into an independent stream per
/// `stream` so sub-tasks can draw in any order and still agree.
pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// Stream identifiers. Each consumer of the master seed owns one.
pub(crate) const STREAM_KEY_PLAN: u64 = 1;
pub(crate) const STREAM_SELECT: u64 = 2;
pub(crate) const STREAM_FAULT: u64 = 3;
pub(crate) const STREAM_CORRUPTION: u64 = 4;
pub(crate) const STREAM_BASELINE: u64 = 5;
pub(crate) const STREAM_GATE: u64 = 6;
/// Per-lock streams start here; lock `i` uses `STREAM_LOCK_BASE + i`.
pub(crate) const STREAM_LOCK_BASE: u64 = 1 << 32;
