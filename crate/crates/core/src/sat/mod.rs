//! CNF formulas, a CDCL solver, Tseitin lowering of netlists and miter-based
//! equivalence checking.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::ops::Not;

mod encode;
mod equiv;
mod solver;

pub use encode::{encode_netlist, tseitin, Encoder, Signal, Tseitin};
pub use equiv::{
    check_equivalence, exhaustive_equivalence, miter_equivalence, Bindings, EquivError, Equivalence, EXHAUSTIVE_LIMIT,
};
pub use solver::Solver;

/// Propositional variable, numbered from 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    pub fn neg(self) -> Lit {
        Lit(self.0 << 1 | 1)
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

/// Literal: `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lit(u32);

impl Lit {
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(d: i64) -> Lit {
        assert!(d != 0, "0 is not a literal");
        Var(d.unsigned_abs() as u32 - 1).lit(d > 0)
    }

    /// Value of the literal under `model`.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var().index()] != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Anything that accepts fresh variables and clauses.
pub trait ClauseSink {
    fn new_var(&mut self) -> Var;
    fn add_clause(&mut self, lits: &[Lit]);
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SatResult {
    pub status: Status,
    /// Total assignment, present exactly when `status` is `Sat`.
    pub model: Option<Vec<bool>>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

/// Clause list with explicit variable count.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dimacs_clauses(clauses: &[&[i64]]) -> Self {
        let mut f = Self::new();
        for c in clauses {
            let lits: Vec<Lit> = c.iter().map(|&d| Lit::from_dimacs(d)).collect();
            for l in &lits {
                f.num_vars = f.num_vars.max(l.var().index() + 1);
            }
            f.clauses.push(lits);
        }
        f
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(model)))
    }

    /// `p cnf` header followed by one zero-terminated clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn solve(&self, assumptions: &[Lit]) -> SatResult {
        let mut s = Solver::new();
        s.add_formula(self);
        s.solve(assumptions)
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars as u32 - 1)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.num_vars = self.num_vars.max(l.var().index() + 1);
        }
        self.clauses.push(lits.to_vec());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn literal_codes() {
        let v = Var(4);
        assert_eq!(v.pos().to_dimacs(), 5);
        assert_eq!(v.neg().to_dimacs(), -5);
        assert_eq!(!v.pos(), v.neg());
        assert_eq!(Lit::from_dimacs(-5), v.neg());
    }

    #[test]
    fn dimacs_export() {
        let f = CnfFormula::from_dimacs_clauses(&[&[1, -2], &[2]]);
        assert_eq!(f.to_dimacs(), "p cnf 2 2\n1 -2 0\n2 0\n");
        assert!(f.is_satisfied_by(&[true, true]));
        assert!(!f.is_satisfied_by(&[false, true]));
        assert_eq!(f.solve(&[]).model, Some(vec![true, true]));
    }
}
