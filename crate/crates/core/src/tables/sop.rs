//! AND-OR realisation of covers and a PLA-style debug dump.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{CubeLit, SopCover, TableError};
use crate::netlist::{BuildNet, GateKind, Netlist, NetlistBuilder, NetlistError};

/// Shares one inverter per complemented variable across covers.
#[derive(Clone, Debug, Default)]
pub struct LiteralCache {
    negated: BTreeMap<BuildNet, BuildNet>,
}

impl LiteralCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn literal(&mut self, b: &mut NetlistBuilder, var: BuildNet, positive: bool) -> Result<BuildNet, NetlistError> {
        if positive {
            return Ok(var);
        }
        if let Some(&n) = self.negated.get(&var) {
            return Ok(n);
        }
        let hint = format!("{}_n", b.name(var));
        let n = b.gate(GateKind::Not, &[var], &hint)?;
        self.negated.insert(var, n);
        Ok(n)
    }
}

/// Adds gates computing `cover` over `vars` and drives `out` with the result.
pub fn synthesize_cover_into(
    b: &mut NetlistBuilder,
    cover: &SopCover,
    vars: &[BuildNet],
    cache: &mut LiteralCache,
    out: BuildNet,
) -> Result<(), NetlistError> {
    let nv = cover.num_vars;
    let lits = |c: super::Cube| -> Vec<(usize, bool)> {
        (0..nv)
            .filter_map(|v| match c.lit(v, nv) {
                CubeLit::Zero => Some((v, false)),
                CubeLit::One => Some((v, true)),
                CubeLit::Absent => None,
            })
            .collect()
    };
    match cover.cubes.as_slice() {
        [] => return b.add_gate(GateKind::Const0, &[], out),
        [c] => {
            let l = lits(*c);
            return match l.as_slice() {
                [] => b.add_gate(GateKind::Const1, &[], out),
                [(v, true)] => b.add_gate(GateKind::Buf, &[vars[*v]], out),
                [(v, false)] => b.add_gate(GateKind::Not, &[vars[*v]], out),
                _ => {
                    let ins = l
                        .iter()
                        .map(|&(v, p)| cache.literal(b, vars[v], p))
                        .collect::<Result<Vec<_>, _>>()?;
                    b.add_gate(GateKind::And, &ins, out)
                }
            };
        }
        _ => {}
    }
    if cover.is_tautology_cube() || cover.cubes.iter().any(|c| c.literal_count() == 0) {
        return b.add_gate(GateKind::Const1, &[], out);
    }
    let mut terms = Vec::with_capacity(cover.cubes.len());
    for &c in &cover.cubes {
        let l = lits(c);
        let ins = l
            .iter()
            .map(|&(v, p)| cache.literal(b, vars[v], p))
            .collect::<Result<Vec<_>, _>>()?;
        if ins.len() == 1 {
            terms.push(ins[0]);
        } else {
            let hint = format!("{}_t", b.name(out));
            terms.push(b.gate(GateKind::And, &ins, &hint)?);
        }
    }
    b.add_gate(GateKind::Or, &terms, out)
}

/// Stand-alone network with inputs `var_names` and one output per cover.
pub fn netlist_of_sop(covers: &[SopCover], var_names: &[&str], out_names: &[&str]) -> Result<Netlist, TableError> {
    for c in covers {
        if c.num_vars != var_names.len() {
            return Err(TableError::VarCountMismatch {
                expected: var_names.len(),
                got: c.num_vars,
            });
        }
    }
    if out_names.len() != covers.len() {
        return Err(NetlistError::LengthMismatch {
            what: "output name",
            expected: covers.len(),
            got: out_names.len(),
        }
        .into());
    }
    let mut b = NetlistBuilder::new();
    let vars = var_names
        .iter()
        .map(|n| b.add_input(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cache = LiteralCache::new();
    for (cover, name) in covers.iter().zip(out_names) {
        let out = b.net(name);
        synthesize_cover_into(&mut b, cover, &vars, &mut cache, out)?;
        b.add_output(out);
    }
    Ok(b.finish()?)
}

/// `.i/.o/.p` header, one `cube outputs` line per cube, `.e`.
pub fn pla_dump(covers: &[SopCover]) -> String {
    let nv = covers.first().map_or(0, |c| c.num_vars);
    let total: usize = covers.iter().map(|c| c.cubes.len()).sum();
    let mut s = String::new();
    let _ = writeln!(s, ".i {nv}\n.o {}\n.p {total}", covers.len());
    for (o, cover) in covers.iter().enumerate() {
        for c in &cover.cubes {
            let outs: String = (0..covers.len()).map(|j| if j == o { '1' } else { '0' }).collect();
            let _ = writeln!(s, "{} {outs}", c.render(nv));
        }
    }
    s.push_str(".e\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{minimize, Cube, TruthTable};
    use alloc::vec;

    fn cover(nv: usize, cubes: &[&str]) -> SopCover {
        SopCover {
            num_vars: nv,
            cubes: cubes.iter().map(|c| Cube::parse(c).unwrap()).collect(),
        }
    }

    fn count(nl: &Netlist, kind: GateKind) -> usize {
        nl.gates().iter().filter(|g| g.kind == kind).count()
    }

    #[test]
    fn single_and() {
        let nl = netlist_of_sop(&[cover(2, &["11"])], &["A", "B"], &["y"]).unwrap();
        assert_eq!(nl.gates().len(), 1);
        assert_eq!(nl.gates()[0].kind, GateKind::And);
        assert_eq!(nl.gates()[0].inputs.len(), 2);
    }

    #[test]
    fn xor_structure() {
        let nl = netlist_of_sop(&[cover(2, &["10", "01"])], &["A", "B"], &["y"]).unwrap();
        assert_eq!(count(&nl, GateKind::Not), 2);
        assert_eq!(count(&nl, GateKind::And), 2);
        assert_eq!(count(&nl, GateKind::Or), 1);
        let and_pins: usize = nl
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::And)
            .map(|g| g.inputs.len())
            .sum();
        assert_eq!(and_pins, cover(2, &["10", "01"]).cost().literals);
        for (m, want) in [(0, false), (1, true), (2, true), (3, false)] {
            let x = crate::netlist::patterns::bits_of(m, 2);
            assert_eq!(nl.simulate(&x, &[]).unwrap(), vec![want]);
        }
    }

    #[test]
    fn constants() {
        let nl = netlist_of_sop(&[SopCover::empty(1), cover(1, &["-"])], &["a"], &["z", "o"]).unwrap();
        assert_eq!(nl.simulate(&[true], &[]).unwrap(), vec![false, true]);
    }

    #[test]
    fn var_count_checked() {
        assert!(matches!(
            netlist_of_sop(&[cover(3, &["1--"])], &["a"], &["y"]),
            Err(TableError::VarCountMismatch { .. })
        ));
    }

    #[test]
    fn pla_format() {
        let tt = TruthTable::parse_column(2, "0110").unwrap();
        let text = pla_dump(&[minimize(&tt, 0)]);
        assert_eq!(text, ".i 2\n.o 1\n.p 2\n01 1\n10 1\n.e\n");
    }
}
