//! Combinational equivalence by miter and by exhaustive simulation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{encode_netlist, ClauseSink, Encoder, Signal, Solver};
use crate::netlist::{patterns, NetId, Netlist, NetlistError};

/// Largest input count checked by exhaustive simulation in
/// [`check_equivalence`].
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("`{0}` has key inputs; fix them before checking equivalence")]
    KeyInputs(String),
    #[error("{what} count differs: {a} vs {b}")]
    ArityMismatch { what: &'static str, a: usize, b: usize },
    #[error("no counterpart for {what} `{name}`")]
    Unbound { what: &'static str, name: String },
    #[error("{0} inputs is too many for exhaustive simulation")]
    TooManyInputs(usize),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Correspondence between the primary inputs and outputs of two netlists,
/// as `(net in a, net in b)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bindings {
    pub inputs: Vec<(NetId, NetId)>,
    pub outputs: Vec<(NetId, NetId)>,
}

impl Bindings {
    /// Pairs inputs and outputs with equal names.
    pub fn by_name(a: &Netlist, b: &Netlist) -> Result<Bindings, EquivError> {
        let pair = |what: &'static str, xs: &[NetId], ys: &[NetId]| -> Result<Vec<(NetId, NetId)>, EquivError> {
            if xs.len() != ys.len() {
                return Err(EquivError::ArityMismatch {
                    what,
                    a: xs.len(),
                    b: ys.len(),
                });
            }
            xs.iter()
                .map(|&x| {
                    let name = a.name(x);
                    b.find(name)
                        .filter(|y| ys.contains(y))
                        .map(|y| (x, y))
                        .ok_or_else(|| EquivError::Unbound { what, name: name.into() })
                })
                .collect()
        };
        Ok(Bindings {
            inputs: pair("input", a.primary_inputs(), b.primary_inputs())?,
            outputs: pair("output", a.primary_outputs(), b.primary_outputs())?,
        })
    }

    /// Pairs inputs and outputs by declaration order.
    pub fn by_position(a: &Netlist, b: &Netlist) -> Result<Bindings, EquivError> {
        let zip = |what: &'static str, xs: &[NetId], ys: &[NetId]| {
            if xs.len() == ys.len() {
                Ok(xs.iter().copied().zip(ys.iter().copied()).collect())
            } else {
                Err(EquivError::ArityMismatch {
                    what,
                    a: xs.len(),
                    b: ys.len(),
                })
            }
        };
        Ok(Bindings {
            inputs: zip("input", a.primary_inputs(), b.primary_inputs())?,
            outputs: zip("output", a.primary_outputs(), b.primary_outputs())?,
        })
    }

    fn validate(&self, a: &Netlist, b: &Netlist) -> Result<(), EquivError> {
        for (nl, side) in [(a, 0), (b, 1)] {
            if !nl.key_inputs().is_empty() {
                return Err(EquivError::KeyInputs(nl.name(nl.key_inputs()[0]).into()));
            }
            let pis = nl.primary_inputs();
            if self.inputs.len() != pis.len() {
                return Err(EquivError::ArityMismatch {
                    what: "input",
                    a: a.primary_inputs().len(),
                    b: b.primary_inputs().len(),
                });
            }
            for &p in pis {
                if !self.inputs.iter().any(|pr| if side == 0 { pr.0 == p } else { pr.1 == p }) {
                    return Err(EquivError::Unbound {
                        what: "input",
                        name: nl.name(p).into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Position of each of `b`'s primary inputs in `a`'s primary input list.
    fn b_input_sources(&self, a: &Netlist, b: &Netlist) -> Vec<usize> {
        b.primary_inputs()
            .iter()
            .map(|&p| {
                let an = self.inputs.iter().find(|pr| pr.1 == p).expect("validated").0;
                a.primary_inputs().iter().position(|&x| x == an).expect("validated")
            })
            .collect()
    }

    fn output_positions(&self, a: &Netlist, b: &Netlist) -> Vec<(usize, usize)> {
        let pos = |nl: &Netlist, n: NetId| nl.primary_outputs().iter().position(|&x| x == n);
        self.outputs
            .iter()
            .map(|&(x, y)| (pos(a, x).expect("bound output"), pos(b, y).expect("bound output")))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Values for `a`'s primary inputs on which the outputs differ.
    pub counterexample: Option<Vec<bool>>,
}

impl Equivalence {
    fn holds() -> Self {
        Equivalence {
            equivalent: true,
            counterexample: None,
        }
    }

    fn fails(x: Vec<bool>) -> Self {
        Equivalence {
            equivalent: false,
            counterexample: Some(x),
        }
    }
}

fn outputs_differ(a: &Netlist, b: &Netlist, bind: &Bindings, x: &[bool]) -> Result<bool, EquivError> {
    let src = bind.b_input_sources(a, b);
    let xb: Vec<bool> = src.iter().map(|&i| x[i]).collect();
    let ya = a.simulate(x, &[])?;
    let yb = b.simulate(&xb, &[])?;
    Ok(bind.output_positions(a, b).iter().any(|&(i, j)| ya[i] != yb[j]))
}

/// SAT check of the miter `OR_i (a_i XOR b_i)`. A returned counterexample
/// has been confirmed by simulation.
pub fn miter_equivalence(a: &Netlist, b: &Netlist, bind: &Bindings) -> Result<Equivalence, EquivError> {
    bind.validate(a, b)?;
    let mut enc = Encoder::new(Solver::new());
    let pa: Vec<Signal> = a.primary_inputs().iter().map(|_| enc.fresh()).collect();
    let src = bind.b_input_sources(a, b);
    let pb: Vec<Signal> = src.iter().map(|&i| pa[i]).collect();
    let sa = encode_netlist(&mut enc, a, &pa, &[])?;
    let sb = encode_netlist(&mut enc, b, &pb, &[])?;
    let diffs: Vec<Signal> = bind
        .outputs
        .iter()
        .map(|&(x, y)| enc.xor(sa[x.index()], sb[y.index()]))
        .collect();
    let miter = enc.or(&diffs);
    let x = match miter {
        Signal::Const(false) => return Ok(Equivalence::holds()),
        Signal::Const(true) => vec![false; pa.len()],
        Signal::Lit(l) => {
            enc.sink_mut().add_clause(&[l]);
            let r = enc.sink_mut().solve(&[]);
            match r.model {
                None => return Ok(Equivalence::holds()),
                Some(m) => pa.iter().map(|s| s.eval(&m)).collect(),
            }
        }
    };
    assert!(
        outputs_differ(a, b, bind, &x)?,
        "miter counterexample not confirmed by simulation"
    );
    Ok(Equivalence::fails(x))
}

/// Bit-parallel simulation over all input patterns. The counterexample is
/// the smallest differing pattern.
pub fn exhaustive_equivalence(a: &Netlist, b: &Netlist, bind: &Bindings) -> Result<Equivalence, EquivError> {
    bind.validate(a, b)?;
    let n = a.primary_inputs().len();
    if n > 30 {
        return Err(EquivError::TooManyInputs(n));
    }
    let src = bind.b_input_sources(a, b);
    let outs = bind.output_positions(a, b);
    let valid = patterns::valid_lanes(n);
    for block in 0..patterns::num_blocks(n) {
        let wa = patterns::exhaustive_block(n, block);
        let wb: Vec<u64> = src.iter().map(|&i| wa[i]).collect();
        let ya = a.output_words(&a.eval_words(&wa, &[])?);
        let yb = b.output_words(&b.eval_words(&wb, &[])?);
        let diff = outs.iter().fold(0u64, |d, &(i, j)| d | (ya[i] ^ yb[j])) & valid;
        if diff != 0 {
            let p = (block as u64) * 64 + diff.trailing_zeros() as u64;
            return Ok(Equivalence::fails(patterns::bits_of(p, n)));
        }
    }
    Ok(Equivalence::holds())
}

/// Exhaustive for at most [`EXHAUSTIVE_LIMIT`] inputs, SAT miter otherwise.
pub fn check_equivalence(a: &Netlist, b: &Netlist, bind: &Bindings) -> Result<Equivalence, EquivError> {
    if a.primary_inputs().len() <= EXHAUSTIVE_LIMIT {
        exhaustive_equivalence(a, b, bind)
    } else {
        miter_equivalence(a, b, bind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    const HA: &str = "INPUT(A)\nINPUT(B)\nOUTPUT(S)\nOUTPUT(C)\nS = XOR(A, B)\nC = AND(A, B)\n";

    #[test]
    fn self_equivalence() {
        let nl = parse_bench(HA).unwrap();
        let b = Bindings::by_name(&nl, &nl).unwrap();
        assert!(miter_equivalence(&nl, &nl, &b).unwrap().equivalent);
        assert!(exhaustive_equivalence(&nl, &nl, &b).unwrap().equivalent);
    }

    #[test]
    fn inverted_sum_is_caught() {
        let a = parse_bench(HA).unwrap();
        let b = parse_bench("INPUT(A)\nINPUT(B)\nOUTPUT(S)\nOUTPUT(C)\nS = XNOR(A, B)\nC = AND(A, B)\n").unwrap();
        let bind = Bindings::by_name(&a, &b).unwrap();
        let r = miter_equivalence(&a, &b, &bind).unwrap();
        assert!(!r.equivalent);
        let x = r.counterexample.unwrap();
        assert_ne!(a.simulate(&x, &[]).unwrap(), b.simulate(&x, &[]).unwrap());
        let e = exhaustive_equivalence(&a, &b, &bind).unwrap();
        assert_eq!(e.counterexample, Some(vec![false, false]));
    }

    #[test]
    fn inputs_matched_by_name() {
        let a = parse_bench("INPUT(x)\nINPUT(y)\nOUTPUT(z)\nz = AND(x, NOTy)\nNOTy = NOT(y)\n").unwrap();
        let b = parse_bench("INPUT(y)\nINPUT(x)\nOUTPUT(z)\nny = NOT(y)\nz = AND(ny, x)\n").unwrap();
        let bind = Bindings::by_name(&a, &b).unwrap();
        assert!(miter_equivalence(&a, &b, &bind).unwrap().equivalent);
        assert!(exhaustive_equivalence(&a, &b, &bind).unwrap().equivalent);
        let pos = Bindings::by_position(&a, &b).unwrap();
        assert!(!exhaustive_equivalence(&a, &b, &pos).unwrap().equivalent);
        assert!(!miter_equivalence(&a, &b, &pos).unwrap().equivalent);
    }

    #[test]
    fn key_inputs_rejected() {
        let a = parse_bench("INPUT(x)\nINPUT(keyinput0)\nOUTPUT(z)\nz = XOR(x, keyinput0)\n").unwrap();
        assert!(matches!(
            Bindings::by_name(&a, &a).and_then(|b| miter_equivalence(&a, &a, &b)),
            Err(EquivError::KeyInputs(_))
        ));
    }

    #[test]
    fn constant_outputs() {
        let a = parse_bench("INPUT(x)\nOUTPUT(z)\nz = CONST1()\n").unwrap();
        let b = parse_bench("INPUT(x)\nOUTPUT(z)\nnx = NOT(x)\nz = OR(x, nx)\n").unwrap();
        let bind = Bindings::by_name(&a, &b).unwrap();
        assert!(miter_equivalence(&a, &b, &bind).unwrap().equivalent);
        let c = parse_bench("INPUT(x)\nOUTPUT(z)\nz = CONST0()\n").unwrap();
        assert!(!miter_equivalence(&a, &c, &Bindings::by_name(&a, &c).unwrap()).unwrap().equivalent);
    }
}
