//! Truth tables with don't-cares, exact two-level minimization and
//! conversion between tables and gate networks.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::netlist::{patterns, NetId, Netlist};

mod cube;
mod minimize;
mod sop;

pub use cube::{cost, Cost, Cube, CubeLit, SopCover};
pub use minimize::{minimize, EXACT_VAR_LIMIT};
pub use sop::{netlist_of_sop, pla_dump, synthesize_cover_into, LiteralCache};

/// Largest supported variable count.
pub const MAX_VARS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Ternary {
    Zero,
    One,
    DontCare,
}

impl Ternary {
    pub fn from_bool(b: bool) -> Ternary {
        if b {
            Ternary::One
        } else {
            Ternary::Zero
        }
    }

    pub fn complement(self) -> Ternary {
        match self {
            Ternary::Zero => Ternary::One,
            Ternary::One => Ternary::Zero,
            Ternary::DontCare => Ternary::DontCare,
        }
    }

    pub fn is_care(self) -> bool {
        self != Ternary::DontCare
    }

    /// True if `value` is an acceptable realisation of this entry.
    pub fn admits(self, value: bool) -> bool {
        match self {
            Ternary::Zero => !value,
            Ternary::One => value,
            Ternary::DontCare => true,
        }
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ternary::Zero => "0",
            Ternary::One => "1",
            Ternary::DontCare => "x",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("{0} variables requested; at most {MAX_VARS} are supported")]
    TooManyVars(usize),
    #[error("table needs {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("net `{net}` depends on `{leaf}`, which is outside the support")]
    OutsideSupport { net: String, leaf: String },
    #[error("cover has {got} variables, expected {expected}")]
    VarCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Netlist(#[from] crate::netlist::NetlistError),
}

/// Multi-output function table. Variable 0 is the most significant bit of
/// the minterm index. Entries are stored output-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruthTable {
    num_vars: usize,
    num_outputs: usize,
    entries: Vec<Ternary>,
}

impl TruthTable {
    pub fn new(num_vars: usize, num_outputs: usize, fill: Ternary) -> Result<TruthTable, TableError> {
        if num_vars > MAX_VARS {
            return Err(TableError::TooManyVars(num_vars));
        }
        Ok(TruthTable {
            num_vars,
            num_outputs,
            entries: vec![fill; num_outputs << num_vars],
        })
    }

    pub fn from_entries(num_vars: usize, num_outputs: usize, entries: Vec<Ternary>) -> Result<TruthTable, TableError> {
        if num_vars > MAX_VARS {
            return Err(TableError::TooManyVars(num_vars));
        }
        let expected = num_outputs << num_vars;
        if entries.len() != expected {
            return Err(TableError::LengthMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(TruthTable {
            num_vars,
            num_outputs,
            entries,
        })
    }

    /// Single-output table from fully specified values.
    pub fn from_bits(num_vars: usize, bits: &[bool]) -> Result<TruthTable, TableError> {
        Self::from_entries(num_vars, 1, bits.iter().map(|&b| Ternary::from_bool(b)).collect())
    }

    /// Single-output table from `0`/`1`/`x` characters.
    pub fn parse_column(num_vars: usize, s: &str) -> Option<TruthTable> {
        let entries = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Some(Ternary::Zero),
                '1' => Some(Ternary::One),
                'x' | 'X' | '-' => Some(Ternary::DontCare),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Self::from_entries(num_vars, 1, entries).ok()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    /// Number of minterms, `2^num_vars`.
    pub fn rows(&self) -> usize {
        1 << self.num_vars
    }

    pub fn get(&self, output: usize, minterm: usize) -> Ternary {
        self.entries[(output << self.num_vars) + minterm]
    }

    pub fn set(&mut self, output: usize, minterm: usize, value: Ternary) {
        let nv = self.num_vars;
        self.entries[(output << nv) + minterm] = value;
    }

    pub fn column(&self, output: usize) -> &[Ternary] {
        let n = self.rows();
        &self.entries[output * n..(output + 1) * n]
    }

    pub fn entries(&self) -> &[Ternary] {
        &self.entries
    }

    /// Variables the care-set of `output` depends on: there are two
    /// specified minterms, differing only in that variable, with different
    /// values.
    pub fn support(&self, output: usize) -> Vec<usize> {
        let col = self.column(output);
        (0..self.num_vars)
            .filter(|&v| {
                let bit = 1usize << (self.num_vars - 1 - v);
                (0..col.len()).filter(|m| m & bit == 0).any(|m| {
                    let (a, b) = (col[m], col[m | bit]);
                    a.is_care() && b.is_care() && a != b
                })
            })
            .collect()
    }

    /// True if `f` realises every specified entry of `output`.
    pub fn is_realised_by<F: Fn(usize) -> bool>(&self, output: usize, f: F) -> bool {
        self.column(output)
            .iter()
            .enumerate()
            .all(|(m, t)| t.admits(f(m)))
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in 0..self.num_outputs {
            if o > 0 {
                f.write_str(" | ")?;
            }
            for t in self.column(o) {
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

/// Function of `outputs` over the ordered `support` nets, obtained by
/// simulating only the cone between them.
pub fn table_of_netlist(nl: &Netlist, outputs: &[NetId], support: &[NetId]) -> Result<TruthTable, TableError> {
    let nv = support.len();
    if nv > MAX_VARS {
        return Err(TableError::TooManyVars(nv));
    }
    let is_leaf: BTreeSet<NetId> = support.iter().copied().collect();
    let mut cone = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for &out in outputs {
        if out.index() >= nl.num_nets() {
            return Err(crate::netlist::NetlistError::UnknownNet(alloc::format!("{out}")).into());
        }
        let mut stack = vec![out];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) || is_leaf.contains(&n) {
                continue;
            }
            match nl.driver(n) {
                Some(g) => {
                    cone.insert(g);
                    stack.extend(nl.gates()[g].inputs.iter().copied());
                }
                None => {
                    return Err(TableError::OutsideSupport {
                        net: nl.name(out).into(),
                        leaf: nl.name(n).into(),
                    })
                }
            }
        }
    }

    let mut tt = TruthTable::new(nv, outputs.len(), Ternary::Zero)?;
    let mut values = vec![0u64; nl.num_nets()];
    let rows = 1usize << nv;
    for block in 0..patterns::num_blocks(nv) {
        for (v, &leaf) in support.iter().enumerate() {
            values[leaf.index()] = patterns::exhaustive_word(v, nv, block);
        }
        for &g in &cone {
            let gate = &nl.gates()[g];
            values[gate.output.index()] = gate.kind.eval_words(gate.inputs.iter().map(|i| values[i.index()]));
        }
        for (o, &out) in outputs.iter().enumerate() {
            let w = values[out.index()];
            for lane in 0..64.min(rows) {
                let m = block * 64 + lane;
                tt.set(o, m, Ternary::from_bool((w >> lane) & 1 == 1));
            }
        }
    }
    Ok(tt)
}
