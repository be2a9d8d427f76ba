pub mod analyze;
pub mod attack;
pub mod lock;
pub mod report;
pub mod verify;

use serde::Serialize;
use sublock_core::Netlist;

/// Size figures of one netlist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub inputs: usize,
    pub key_inputs: usize,
    pub outputs: usize,
    pub gates: usize,
    pub literals: usize,
    pub depth: u32,
}

impl Stats {
    pub fn of(nl: &Netlist) -> Self {
        Stats {
            inputs: nl.primary_inputs().len(),
            key_inputs: nl.key_inputs().len(),
            outputs: nl.primary_outputs().len(),
            gates: nl.gates().len(),
            literals: nl.literal_count(),
            depth: nl.depth(),
        }
    }
}
