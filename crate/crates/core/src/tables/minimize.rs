//! Quine–McCluskey prime generation with an exact branch-and-bound cover.
//!
//! Cover cost is `(cubes, literals)` compared lexicographically. Among
//! covers of equal cost the one whose cube list, sorted by
//! [`Cube::ternary_cmp`], is lexicographically smallest wins.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::{Cost, Cube, SopCover, Ternary, TruthTable};

/// Tables with at most this many variables are minimized exactly.
pub const EXACT_VAR_LIMIT: usize = 8;

/// Search nodes after which equal-cost branches are no longer explored.
/// Cost optimality is kept; only the tie-break becomes best-effort.
const TIE_BREAK_BUDGET: usize = 200_000;

pub fn minimize(tt: &TruthTable, output: usize) -> SopCover {
    let nv = tt.num_vars();
    let col = tt.column(output);
    let on: Vec<u32> = (0..col.len() as u32)
        .filter(|&m| col[m as usize] == Ternary::One)
        .collect();
    if on.is_empty() {
        return SopCover::empty(nv);
    }
    let mut cubes = if nv <= EXACT_VAR_LIMIT {
        let care: Vec<u32> = (0..col.len() as u32)
            .filter(|&m| col[m as usize] != Ternary::Zero)
            .collect();
        let primes = prime_implicants(nv, &care);
        exact_cover(nv, &primes, &on)
    } else {
        greedy_cover(nv, col, &on)
    };
    cubes.sort_by(|a, b| a.ternary_cmp(*b, nv));
    SopCover { num_vars: nv, cubes }
}

/// All prime implicants of the function that is 1 on `minterms`.
pub(crate) fn prime_implicants(num_vars: usize, minterms: &[u32]) -> Vec<Cube> {
    let mut current: BTreeSet<Cube> = minterms.iter().map(|&m| Cube::minterm(m, num_vars)).collect();
    let mut primes = Vec::new();
    while !current.is_empty() {
        let mut next = BTreeSet::new();
        let mut merged = BTreeSet::new();
        for &c in &current {
            let mut free = c.mask() & !c.bits();
            while free != 0 {
                let b = free & free.wrapping_neg();
                free &= !b;
                let partner = Cube::new(c.mask(), c.bits() | b);
                if current.contains(&partner) {
                    next.insert(Cube::new(c.mask() & !b, c.bits()));
                    merged.insert(c);
                    merged.insert(partner);
                }
            }
        }
        primes.extend(current.iter().filter(|c| !merged.contains(c)).copied());
        current = next;
    }
    primes
}

type Bits = Vec<u64>;

fn bit(b: &Bits, i: usize) -> bool {
    (b[i / 64] >> (i % 64)) & 1 == 1
}

struct Search<'a> {
    num_vars: usize,
    primes: &'a [Cube],
    covers: Vec<Bits>,
    by_minterm: Vec<Vec<usize>>,
    num_on: usize,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<(Cost, Vec<u64>, Vec<usize>)>,
    nodes: usize,
}

impl Search<'_> {
    fn uncovered(&self, covered: &Bits) -> Vec<usize> {
        (0..self.num_on).filter(|&m| !bit(covered, m)).collect()
    }

    fn candidates(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_minterm[m].iter().copied().filter(move |&p| !self.excluded[p])
    }

    /// Disjoint minterms (no shared candidate prime) each need their own cube.
    fn lower_bound(&self, uncovered: &[usize]) -> Option<Cost> {
        let mut order: Vec<(usize, usize)> = Vec::with_capacity(uncovered.len());
        for &m in uncovered {
            let n = self.candidates(m).count();
            if n == 0 {
                return None;
            }
            order.push((n, m));
        }
        order.sort_unstable();
        let mut blocked = vec![false; self.primes.len()];
        let mut lb = Cost::default();
        for &(_, m) in &order {
            if self.candidates(m).any(|p| blocked[p]) {
                continue;
            }
            let mut min_lits = u32::MAX;
            for p in self.candidates(m) {
                blocked[p] = true;
                min_lits = min_lits.min(self.primes[p].literal_count());
            }
            lb.cubes += 1;
            lb.literals += min_lits as usize;
        }
        Some(lb)
    }

    fn run(&mut self, covered: Bits, cost: Cost) {
        self.nodes += 1;
        let uncovered = self.uncovered(&covered);
        if uncovered.is_empty() {
            self.offer(cost);
            return;
        }
        let Some(lb) = self.lower_bound(&uncovered) else {
            return;
        };
        let bound = Cost {
            cubes: cost.cubes + lb.cubes,
            literals: cost.literals + lb.literals,
        };
        if let Some((best, _, _)) = &self.best {
            if bound > *best || (bound == *best && self.nodes > TIE_BREAK_BUDGET) {
                return;
            }
        }
        let m = *uncovered
            .iter()
            .min_by_key(|&&m| (self.candidates(m).count(), m))
            .expect("nonempty");
        let options: Vec<usize> = self.candidates(m).collect();
        let mut newly_excluded = Vec::new();
        for p in options {
            let mut next = covered.clone();
            for (w, c) in next.iter_mut().zip(&self.covers[p]) {
                *w |= c;
            }
            self.chosen.push(p);
            let c = Cost {
                cubes: cost.cubes + 1,
                literals: cost.literals + self.primes[p].literal_count() as usize,
            };
            self.run(next, c);
            self.chosen.pop();
            // Every cover using `p` for `m` has been seen.
            self.excluded[p] = true;
            newly_excluded.push(p);
        }
        for p in newly_excluded {
            self.excluded[p] = false;
        }
    }

    fn offer(&mut self, cost: Cost) {
        let mut keys: Vec<u64> = self
            .chosen
            .iter()
            .map(|&p| self.primes[p].ternary_key(self.num_vars))
            .collect();
        keys.sort_unstable();
        let better = match &self.best {
            None => true,
            Some((c, k, _)) => (cost, &keys) < (*c, k),
        };
        if better {
            self.best = Some((cost, keys, self.chosen.clone()));
        }
    }
}

fn exact_cover(num_vars: usize, primes: &[Cube], on: &[u32]) -> Vec<Cube> {
    let words = on.len().div_ceil(64);
    let mut primes: Vec<Cube> = primes
        .iter()
        .copied()
        .filter(|p| on.iter().any(|&m| p.covers(m)))
        .collect();
    // Cheaper, then lexicographically smaller primes are tried first so good
    // incumbents are found early.
    primes.sort_by(|a, b| {
        a.literal_count()
            .cmp(&b.literal_count())
            .then(a.ternary_cmp(*b, num_vars))
    });
    let covers: Vec<Bits> = primes
        .iter()
        .map(|p| {
            let mut b = vec![0u64; words];
            for (i, &m) in on.iter().enumerate() {
                if p.covers(m) {
                    b[i / 64] |= 1 << (i % 64);
                }
            }
            b
        })
        .collect();
    let by_minterm: Vec<Vec<usize>> = (0..on.len())
        .map(|i| (0..primes.len()).filter(|&p| bit(&covers[p], i)).collect())
        .collect();
    let mut search = Search {
        num_vars,
        primes: &primes,
        covers,
        by_minterm,
        num_on: on.len(),
        excluded: vec![false; primes.len()],
        chosen: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.run(vec![0u64; words], Cost::default());
    let (_, _, chosen) = search.best.expect("primes always cover the on-set");
    chosen.into_iter().map(|p| primes[p]).collect()
}

/// True if no minterm inside `cube` is in the off-set.
fn is_implicant(num_vars: usize, col: &[Ternary], cube: Cube) -> bool {
    let free = !cube.mask() & if num_vars == 32 { !0 } else { (1u32 << num_vars) - 1 };
    // Enumerate subsets of the free bits.
    let mut sub = 0u32;
    loop {
        if col[(cube.bits() | sub) as usize] == Ternary::Zero {
            return false;
        }
        if sub == free {
            return true;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
}

/// Expansion of every on-minterm into a prime followed by greedy set cover.
fn greedy_cover(num_vars: usize, col: &[Ternary], on: &[u32]) -> Vec<Cube> {
    let mut candidates: BTreeSet<Cube> = BTreeSet::new();
    let mut reached = vec![false; on.len()];
    for (i, &m) in on.iter().enumerate() {
        if reached[i] {
            continue;
        }
        for reverse in [false, true] {
            let mut cube = Cube::minterm(m, num_vars);
            for step in 0..num_vars {
                let v = if reverse { num_vars - 1 - step } else { step };
                let wider = cube.without(v, num_vars);
                if is_implicant(num_vars, col, wider) {
                    cube = wider;
                }
            }
            for (j, &m2) in on.iter().enumerate() {
                if cube.covers(m2) {
                    reached[j] = true;
                }
            }
            candidates.insert(cube);
        }
    }
    let candidates: Vec<Cube> = candidates.into_iter().collect();
    let mut covered = vec![false; on.len()];
    let mut left = on.len();
    let mut chosen = Vec::new();
    while left > 0 {
        let gain = |c: &Cube| on.iter().zip(&covered).filter(|(m, done)| !**done && c.covers(**m)).count();
        let best = candidates
            .iter()
            .copied()
            .max_by(|a, b| {
                gain(a)
                    .cmp(&gain(b))
                    .then(b.literal_count().cmp(&a.literal_count()))
                    .then(b.ternary_cmp(*a, num_vars))
            })
            .expect("candidates cover every on-minterm");
        for (m, done) in on.iter().zip(covered.iter_mut()) {
            if !*done && best.covers(*m) {
                *done = true;
                left -= 1;
            }
        }
        chosen.push(best);
    }
    chosen
}
