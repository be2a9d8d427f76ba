//! Input-dependent key-based logic locking (IDKLL) on gate-level netlists.
//!
//! The crate is `no_std` (with `alloc`) and contains only algorithmic code:
//!
//! * [`netlist`]: combinational netlist IR, `.bench` parsing/emission, simulation.
//! * [`tables`]: truth tables with don't-cares, exact two-level minimization.
//! * [`idkll`]: lock synthesis with per-input-set key sequences and key memories.
//! * [`sublock`]: sub-circuit replacement locking plus XOR and Anti-SAT baselines.
//! * [`sat`]: CNF lowering, a CDCL solver and miter equivalence checking.
//! * [`attack`]: the oracle-guided SAT attack, brute-force key recovery and
//!   exact brute-force attempt counts.
//!
//! File formats and the command-line front-end live in the `sublock` crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod attack;
pub mod idkll;
pub mod netlist;
pub mod sat;
pub mod sublock;
pub mod tables;

mod rng;

pub use netlist::{Gate, GateKind, NetId, Netlist, NetlistBuilder, NetlistError};
