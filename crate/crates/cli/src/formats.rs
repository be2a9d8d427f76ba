//! File formats: `.bench` I/O, key-memory JSON and bit strings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sublock_core::idkll::KeyMemory;
use sublock_core::netlist::{emit_bench, parse_bench};
use sublock_core::Netlist;

use crate::exit::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_bench(path: &Path) -> Result<Netlist, CliError> {
    parse_bench(&read_text(path)?).map_err(|e| CliError::parse(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_bench(path: &Path, nl: &Netlist) -> Result<(), CliError> {
    write_text(path, &emit_bench(nl))
}

/// Pretty JSON with a trailing newline, to `path` or standard output.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    match path {
        Some(p) => write_text(p, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

/// `0`/`1` string, first element first.
pub fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Low `width` bits of `value`, most significant first.
pub fn word_bits(value: u64, width: usize) -> String {
    (0..width).rev().map(|i| if value >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeymemFile {
    pub blocks: Vec<KeymemBlock>,
}

/// One memory block. `entries` maps a support valuation (one character per
/// support net, in order) to the key bits (one per key input, in order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeymemBlock {
    pub key_inputs: Vec<String>,
    pub support: Vec<String>,
    pub entries: BTreeMap<String, String>,
}

impl From<&KeyMemory> for KeymemBlock {
    fn from(m: &KeyMemory) -> Self {
        let (s, kb) = (m.support.len(), m.key_inputs.len());
        KeymemBlock {
            key_inputs: m.key_inputs.clone(),
            support: m.support.clone(),
            entries: m
                .entries
                .iter()
                .enumerate()
                .map(|(j, &e)| (word_bits(j as u64, s), word_bits(e, kb)))
                .collect(),
        }
    }
}

impl KeymemBlock {
    pub fn to_memory(&self) -> Result<KeyMemory, String> {
        let (s, kb) = (self.support.len(), self.key_inputs.len());
        if s > 20 {
            return Err(format!("support of {s} nets is too large"));
        }
        if kb == 0 || kb > 64 {
            return Err(format!("{kb} key inputs in one block"));
        }
        if self.entries.len() != 1 << s {
            return Err(format!("{} entries for a support of {s} nets", self.entries.len()));
        }
        let mut entries = vec![0u64; 1 << s];
        for (valuation, key) in &self.entries {
            let v = parse_bits(valuation).filter(|v| v.len() == s);
            let k = parse_bits(key).filter(|k| k.len() == kb);
            let (Some(v), Some(k)) = (v, k) else {
                return Err(format!("malformed entry {valuation:?}: {key:?}"));
            };
            let word = |bits: &[bool]| bits.iter().fold(0u64, |w, &b| w << 1 | b as u64);
            entries[word(&v) as usize] = word(&k);
        }
        Ok(KeyMemory {
            key_inputs: self.key_inputs.clone(),
            support: self.support.clone(),
            entries,
        })
    }
}

pub fn keymem_file(memory: &[KeyMemory]) -> KeymemFile {
    KeymemFile {
        blocks: memory.iter().map(KeymemBlock::from).collect(),
    }
}

pub fn read_keymem(path: &Path) -> Result<Vec<KeyMemory>, CliError> {
    let file: KeymemFile = serde_json::from_str(&read_text(path)?).map_err(|e| CliError::parse(path, e))?;
    file.blocks
        .iter()
        .map(|b| b.to_memory().map_err(|e| CliError::parse(path, e)))
        .collect()
}
