use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// One position of a product term.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CubeLit {
    Zero,
    One,
    Absent,
}

/// Product term over at most 32 variables. Variable `i` of an `n`-variable
/// cube lives at bit `n - 1 - i`; `mask` marks present literals and `bits`
/// their polarity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cube {
    mask: u32,
    bits: u32,
}

impl Cube {
    /// The all-dash cube, covering everything.
    pub const UNIVERSE: Cube = Cube { mask: 0, bits: 0 };

    pub fn new(mask: u32, bits: u32) -> Cube {
        Cube {
            mask,
            bits: bits & mask,
        }
    }

    pub fn minterm(m: u32, num_vars: usize) -> Cube {
        let mask = if num_vars == 32 { !0 } else { (1u32 << num_vars) - 1 };
        Cube::new(mask, m)
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn covers(self, minterm: u32) -> bool {
        minterm & self.mask == self.bits
    }

    pub fn literal_count(self) -> u32 {
        self.mask.count_ones()
    }

    pub fn lit(self, var: usize, num_vars: usize) -> CubeLit {
        let b = 1u32 << (num_vars - 1 - var);
        if self.mask & b == 0 {
            CubeLit::Absent
        } else if self.bits & b != 0 {
            CubeLit::One
        } else {
            CubeLit::Zero
        }
    }

    /// Cube with variable `var` removed.
    pub fn without(self, var: usize, num_vars: usize) -> Cube {
        let b = 1u32 << (num_vars - 1 - var);
        Cube::new(self.mask & !b, self.bits)
    }

    /// Ternary string, variable 0 first: `0`, `1` or `-`.
    pub fn render(self, num_vars: usize) -> String {
        (0..num_vars)
            .map(|v| match self.lit(v, num_vars) {
                CubeLit::Zero => '0',
                CubeLit::One => '1',
                CubeLit::Absent => '-',
            })
            .collect()
    }

    /// Parses the output of [`render`](Self::render).
    pub fn parse(s: &str) -> Option<Cube> {
        let n = s.chars().count();
        let mut mask = 0;
        let mut bits = 0;
        for (v, c) in s.chars().enumerate() {
            let b = 1u32 << (n - 1 - v);
            match c {
                '0' => mask |= b,
                '1' => {
                    mask |= b;
                    bits |= b;
                }
                '-' => {}
                _ => return None,
            }
        }
        Some(Cube { mask, bits })
    }

    /// Total order on cubes by their ternary strings with `0 < 1 < -`,
    /// variable 0 most significant. Used to break ties between covers.
    pub fn ternary_cmp(self, other: Cube, num_vars: usize) -> Ordering {
        self.ternary_key(num_vars).cmp(&other.ternary_key(num_vars))
    }

    pub(crate) fn ternary_key(self, num_vars: usize) -> u64 {
        (0..num_vars).fold(0u64, |acc, v| {
            let digit = match self.lit(v, num_vars) {
                CubeLit::Zero => 0,
                CubeLit::One => 1,
                CubeLit::Absent => 2,
            };
            acc * 3 + digit
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Cost {
    pub cubes: usize,
    pub literals: usize,
}

/// Sum of products over `num_vars` variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SopCover {
    pub num_vars: usize,
    pub cubes: Vec<Cube>,
}

impl SopCover {
    pub fn empty(num_vars: usize) -> SopCover {
        SopCover {
            num_vars,
            cubes: Vec::new(),
        }
    }

    pub fn eval(&self, minterm: u32) -> bool {
        self.cubes.iter().any(|c| c.covers(minterm))
    }

    pub fn cost(&self) -> Cost {
        cost(self)
    }

    /// Variables that appear in some cube.
    pub fn support(&self) -> Vec<usize> {
        let mask = self.cubes.iter().fold(0, |m, c| m | c.mask());
        (0..self.num_vars)
            .filter(|&v| mask & (1 << (self.num_vars - 1 - v)) != 0)
            .collect()
    }

    pub fn is_tautology_cube(&self) -> bool {
        self.cubes.len() == 1 && self.cubes[0] == Cube::UNIVERSE
    }
}

pub fn cost(cover: &SopCover) -> Cost {
    Cost {
        cubes: cover.cubes.len(),
        literals: cover.cubes.iter().map(|c| c.literal_count() as usize).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn render_parse() {
        let c = Cube::parse("1-0").unwrap();
        assert_eq!(c.render(3), "1-0");
        assert!(c.covers(0b100) && c.covers(0b110) && !c.covers(0b101));
        assert_eq!(c.literal_count(), 2);
    }

    #[test]
    fn ordering_is_zero_one_dash() {
        let a = Cube::parse("1-").unwrap();
        let b = Cube::parse("-1").unwrap();
        let z = Cube::parse("0-").unwrap();
        assert_eq!(a.ternary_cmp(b, 2), Ordering::Less);
        assert_eq!(z.ternary_cmp(a, 2), Ordering::Less);
    }

    #[test]
    fn costs() {
        assert_eq!(cost(&SopCover::empty(3)), Cost { cubes: 0, literals: 0 });
        let taut = SopCover {
            num_vars: 2,
            cubes: vec![Cube::UNIVERSE],
        };
        assert_eq!(cost(&taut), Cost { cubes: 1, literals: 0 });
        let xor = SopCover {
            num_vars: 2,
            cubes: vec![Cube::parse("01").unwrap(), Cube::parse("10").unwrap()],
        };
        assert_eq!(cost(&xor), Cost { cubes: 2, literals: 4 });
    }
}
