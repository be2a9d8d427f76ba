use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DontCarePolicy, IdkllError, KeyPlan};
use crate::netlist::{BuildNet, GateKind, Netlist, NetlistBuilder, NetlistError};
use crate::tables::{minimize, synthesize_cover_into, table_of_netlist, LiteralCache, SopCover, Ternary, TruthTable, EXACT_VAR_LIMIT};

/// A don't-care entry of the locked table fixed to a value so that an
/// output keeps depending on an input.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Pin {
    pub output: usize,
    pub minterm: usize,
    pub value: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LockOptions<'a> {
    /// A network for the original function (inputs in table order, one
    /// output per table output). When given, the lock may also be realised
    /// as that network XOR a key-controlled flip term, whichever needs
    /// fewer gates.
    pub reference: Option<&'a Netlist>,
    /// Realise every output as a minimised sum of products only, as read
    /// off a K-map: no XOR-decomposed forms and no reference flip. Usually
    /// costs more gates.
    pub two_level: bool,
}

/// Locked table, the plan it was built from and a gate network for it.
///
/// The network's inputs are `k0..` (key bits, first is most significant)
/// followed by `x0..` (function inputs); its outputs are `y0..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LockedFunction {
    pub original: TruthTable,
    pub plan: KeyPlan,
    pub table: TruthTable,
    pub network: Netlist,
    pub pins: Vec<Pin>,
    /// True if unused keys had to be complemented to remove a universal key.
    pub fallback: bool,
    reference: Option<Netlist>,
    via_reference: bool,
    two_level: bool,
}

impl LockedFunction {
    pub fn num_key_bits(&self) -> usize {
        self.plan.num_key_bits()
    }

    pub fn num_inputs(&self) -> usize {
        self.plan.num_inputs()
    }

    pub fn gate_count(&self) -> usize {
        self.network.gates().len()
    }

    /// True if the network is the reference network XOR a flip term.
    pub fn uses_reference(&self) -> bool {
        self.via_reference
    }

    /// Exhaustive function of the network over `(key, x)`.
    pub fn realised(&self) -> TruthTable {
        realised_table(&self.network)
    }
}

/// Locked table for `original` under `plan`: correct under the valid key of
/// the input's set, complemented under every other valid key, and per the
/// plan's policy under unused keys.
pub fn locked_table(original: &TruthTable, plan: &KeyPlan) -> Result<TruthTable, IdkllError> {
    let v = plan.num_inputs();
    if original.num_vars() != v {
        return Err(IdkllError::InputMismatch {
            expected: v,
            got: original.num_vars(),
        });
    }
    let kb = plan.num_key_bits();
    let mut t = TruthTable::new(kb + v, original.num_outputs(), Ternary::DontCare)?;
    for o in 0..original.num_outputs() {
        for key in 0..1u64 << kb {
            let valid = plan.valid_index(key);
            for x in 0..1usize << v {
                let f = original.get(o, x);
                let e = match valid {
                    Some(i) if plan.set_of(x) == i => f,
                    Some(_) => f.complement(),
                    None => match plan.policy(key) {
                        DontCarePolicy::DontCare => Ternary::DontCare,
                        DontCarePolicy::Complement => f.complement(),
                    },
                };
                t.set(o, ((key as usize) << v) | x, e);
            }
        }
    }
    Ok(t)
}

/// Function computed by a network over all its inputs, in input order.
pub fn realised_table(network: &Netlist) -> TruthTable {
    table_of_netlist(network, network.primary_outputs(), network.primary_inputs())
        .expect("every fragment output depends only on fragment inputs")
}

/// Two-level forms tried for each output.
#[derive(Clone, Debug)]
enum Form {
    Sop(SopCover),
    /// `vars[0] ^ vars[1] ^ ... ^ inner`, complemented if `invert`.
    Xor {
        vars: Vec<usize>,
        inner: SopCover,
        invert: bool,
    },
}

fn column_table(nv: usize, col: Vec<Ternary>) -> TruthTable {
    TruthTable::from_entries(nv, 1, col).expect("sizes match")
}

fn xor_with_vars(nv: usize, col: &[Ternary], vars: &[usize], invert: bool) -> Vec<Ternary> {
    col.iter()
        .enumerate()
        .map(|(m, &t)| {
            let flip = vars.iter().fold(invert, |acc, &v| acc ^ (m >> (nv - 1 - v) & 1 == 1));
            if flip {
                t.complement()
            } else {
                t
            }
        })
        .collect()
}

fn candidate_forms(nv: usize, col: &[Ternary], two_level: bool) -> Vec<Form> {
    let mut forms = vec![Form::Sop(minimize(&column_table(nv, col.to_vec()), 0))];
    if two_level {
        return forms;
    }
    let mut groups: Vec<Vec<usize>> = (0..nv).map(|a| vec![a]).collect();
    if nv <= EXACT_VAR_LIMIT {
        for a in 0..nv {
            for b in a + 1..nv {
                groups.push(vec![a, b]);
            }
        }
    }
    for vars in groups {
        for invert in [false, true] {
            let inner_col = xor_with_vars(nv, col, &vars, invert);
            let inner = minimize(&column_table(nv, inner_col), 0);
            forms.push(Form::Xor {
                vars: vars.clone(),
                inner,
                invert,
            });
        }
    }
    forms
}

/// Net computing `cover`, reusing an input net or inverter when the cover
/// is a single literal.
fn cover_signal(
    b: &mut NetlistBuilder,
    cover: &SopCover,
    vars: &[BuildNet],
    cache: &mut LiteralCache,
    hint: &str,
) -> Result<BuildNet, NetlistError> {
    if let [c] = cover.cubes.as_slice() {
        if c.literal_count() == 1 {
            let v = (0..cover.num_vars)
                .find(|&v| c.lit(v, cover.num_vars) != crate::tables::CubeLit::Absent)
                .expect("one literal");
            let positive = c.lit(v, cover.num_vars) == crate::tables::CubeLit::One;
            return cache.literal(b, vars[v], positive);
        }
    }
    let n = b.fresh(hint);
    synthesize_cover_into(b, cover, vars, cache, n)?;
    Ok(n)
}

fn build_form(
    b: &mut NetlistBuilder,
    form: &Form,
    vars: &[BuildNet],
    cache: &mut LiteralCache,
    out: BuildNet,
) -> Result<(), NetlistError> {
    match form {
        Form::Sop(c) => synthesize_cover_into(b, c, vars, cache, out),
        Form::Xor { vars: xs, inner, invert } => {
            let hint = format!("{}_f", b.name(out));
            let inner = cover_signal(b, inner, vars, cache, &hint)?;
            let mut acc = vars[xs[0]];
            for &x in &xs[1..] {
                let h = format!("{}_p", b.name(out));
                acc = b.gate(GateKind::Xor, &[acc, vars[x]], &h)?;
            }
            let kind = if *invert { GateKind::Xnor } else { GateKind::Xor };
            b.add_gate(kind, &[acc, inner], out)
        }
    }
}

fn input_names(kb: usize, v: usize) -> Vec<String> {
    (0..kb).map(|i| format!("k{i}")).chain((0..v).map(|i| format!("x{i}"))).collect()
}

/// Gates needed by `form` on its own.
fn form_cost(nv: usize, form: &Form) -> usize {
    let mut b = NetlistBuilder::new();
    let vars: Vec<BuildNet> = (0..nv).map(|i| b.add_input(&format!("v{i}")).expect("fresh")).collect();
    let out = b.net("out");
    build_form(&mut b, form, &vars, &mut LiteralCache::new(), out).expect("valid form");
    b.num_gates()
}

fn best_form(nv: usize, col: &[Ternary], two_level: bool) -> Form {
    let forms = candidate_forms(nv, col, two_level);
    let costs: Vec<usize> = forms.iter().map(|f| form_cost(nv, f)).collect();
    let best = (0..forms.len()).min_by_key(|&i| (costs[i], i)).expect("nonempty");
    forms[best].clone()
}

fn assemble(
    kb: usize,
    v: usize,
    forms: &[Form],
    flip_reference: Option<&Netlist>,
) -> Result<Netlist, NetlistError> {
    let nv = kb + v;
    let mut b = NetlistBuilder::new();
    let vars = input_names(kb, v)
        .iter()
        .map(|n| b.add_input(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cache = LiteralCache::new();
    let outs: Vec<BuildNet> = (0..forms.len()).map(|o| b.net(&format!("y{o}"))).collect();
    match flip_reference {
        None => {
            for (form, &out) in forms.iter().zip(&outs) {
                build_form(&mut b, form, &vars, &mut cache, out)?;
            }
        }
        Some(r) => {
            // An output with no flip term is the reference output itself.
            let no_flip = |f: &Form| matches!(f, Form::Sop(c) if c.cubes.is_empty());
            let refs: Vec<BuildNet> = (0..forms.len())
                .map(|o| if no_flip(&forms[o]) { outs[o] } else { b.fresh(&format!("ref_y{o}")) })
                .collect();
            r.splice_into(&mut b, &vars[kb..], &refs, "ref_")?;
            for (o, form) in forms.iter().enumerate() {
                if no_flip(form) {
                    continue;
                }
                let flip = b.fresh(&format!("y{o}_flip"));
                build_form(&mut b, form, &vars, &mut cache, flip)?;
                b.add_gate(GateKind::Xor, &[refs[o], flip], outs[o])?;
            }
        }
    }
    debug_assert_eq!(vars.len(), nv);
    for &o in &outs {
        b.add_output(o);
    }
    b.finish()
}

/// Cheapest network found for `table` (key bits first, then inputs).
fn synthesize(
    table: &TruthTable,
    kb: usize,
    reference: Option<&Netlist>,
    two_level: bool,
) -> Result<(Netlist, bool), IdkllError> {
    let nv = table.num_vars();
    let v = nv - kb;
    let direct: Vec<Form> = (0..table.num_outputs())
        .map(|o| best_form(nv, table.column(o), two_level))
        .collect();
    let direct = assemble(kb, v, &direct, None)?;
    let Some(r) = reference.filter(|_| !two_level) else {
        return Ok((direct, false));
    };
    let f = realised_table(r);
    let flips: Vec<Form> = (0..table.num_outputs())
        .map(|o| {
            let col: Vec<Ternary> = table
                .column(o)
                .iter()
                .enumerate()
                .map(|(m, &t)| {
                    let x = m & ((1 << v) - 1);
                    if f.get(o, x) == Ternary::One {
                        t.complement()
                    } else {
                        t
                    }
                })
                .collect();
            best_form(nv, &col, false)
        })
        .collect();
    let flipped = assemble(kb, v, &flips, Some(r))?;
    Ok(if flipped.gates().len() < direct.gates().len() {
        (flipped, true)
    } else {
        (direct, false)
    })
}

fn check_reference(original: &TruthTable, r: &Netlist) -> Result<(), IdkllError> {
    if r.num_inputs() != original.num_vars() || r.primary_outputs().len() != original.num_outputs() {
        return Err(IdkllError::BadPlan("reference network does not match the original table".into()));
    }
    let f = realised_table(r);
    for o in 0..original.num_outputs() {
        if !original.is_realised_by(o, |x| f.get(o, x) == Ternary::One) {
            return Err(IdkllError::BadPlan("reference network does not compute the original".into()));
        }
    }
    Ok(())
}

/// Inputs of the original that some output depends on.
fn original_support(original: &TruthTable) -> BTreeSet<usize> {
    (0..original.num_outputs()).flat_map(|o| original.support(o)).collect()
}

pub fn lock_function(original: &TruthTable, plan: &KeyPlan) -> Result<LockedFunction, IdkllError> {
    lock_function_with(original, plan, &LockOptions::default())
}

/// Builds, repairs and checks a lock. If a universal key survives under
/// the plan's don't-cares, every unused key is switched to
/// [`DontCarePolicy::Complement`] and the lock is rebuilt.
pub fn lock_function_with(
    original: &TruthTable,
    plan: &KeyPlan,
    opts: &LockOptions<'_>,
) -> Result<LockedFunction, IdkllError> {
    if let Some(r) = opts.reference {
        check_reference(original, r)?;
    }
    let v = plan.num_inputs();
    if original.num_vars() != v {
        return Err(IdkllError::InputMismatch {
            expected: v,
            got: original.num_vars(),
        });
    }
    let support = original_support(original);
    let missing: Vec<usize> = (0..v).filter(|x| !support.contains(x)).collect();
    if !missing.is_empty() {
        return Err(IdkllError::CannotForceDependency { vars: missing });
    }

    let attempt = |plan: &KeyPlan, fallback: bool| -> Result<LockedFunction, IdkllError> {
        let table = locked_table(original, plan)?;
        let (network, via_reference) = synthesize(&table, plan.num_key_bits(), opts.reference, opts.two_level)?;
        let lf = LockedFunction {
            via_reference,
            original: original.clone(),
            plan: plan.clone(),
            table,
            network,
            pins: Vec::new(),
            fallback,
            reference: opts.reference.cloned(),
            two_level: opts.two_level,
        };
        ensure_input_dependency(lf)
    };

    let mut lf = attempt(plan, false)?;
    let mut check = verify_no_universal_key(&lf);
    // A universal key first gets one of its don't-cares pinned to a wrong
    // value; only when that is impossible are all unused keys complemented.
    for _ in 0..1usize << plan.num_key_bits() {
        if check.ok {
            return Ok(lf);
        }
        match pin_wrong_entries(lf, &check.universal_keys())? {
            Some(next) => lf = next,
            None => break,
        }
        check = verify_no_universal_key(&lf);
    }
    let strict = plan.clone().with_policy(DontCarePolicy::Complement);
    if strict == *plan {
        return Err(IdkllError::UniversalKey {
            key: check.universal_keys()[0],
        });
    }
    let lf = attempt(&strict, true)?;
    let check = verify_no_universal_key(&lf);
    match check.universal_keys().first() {
        None => Ok(lf),
        Some(&key) => Err(IdkllError::UniversalKey { key }),
    }
}

/// Pins, for each key, its lowest don't-care entry whose original value is
/// known to the wrong value, then resynthesises. `None` if some key has no
/// such entry.
fn pin_wrong_entries(mut lf: LockedFunction, keys: &[u64]) -> Result<Option<LockedFunction>, IdkllError> {
    let v = lf.num_inputs();
    for &key in keys {
        let base = (key as usize) << v;
        let spot = (0..1usize << v).find_map(|x| {
            (0..lf.original.num_outputs())
                .find(|&o| lf.original.get(o, x).is_care() && !lf.table.get(o, base | x).is_care())
                .map(|o| (o, x))
        });
        let Some((o, x)) = spot else {
            return Ok(None);
        };
        let value = lf.original.get(o, x) == Ternary::Zero;
        lf.table.set(o, base | x, Ternary::from_bool(value));
        lf.pins.push(Pin {
            output: o,
            minterm: base | x,
            value,
        });
    }
    (lf.network, lf.via_reference) = synthesize(&lf.table, lf.num_key_bits(), lf.reference.as_ref(), lf.two_level)?;
    ensure_input_dependency(lf).map(Some)
}

fn depends_on(t: &TruthTable, o: usize, var: usize) -> bool {
    let bit = 1usize << (t.num_vars() - 1 - var);
    (0..t.rows())
        .filter(|m| m & bit == 0)
        .any(|m| t.get(o, m) != t.get(o, m | bit))
}

/// Don't-care entries to fix so that a realisation of `col` must depend on
/// the variable at `bit`. A pair with one fixed side needs one pin. Else a
/// pair of two don't-cares is pinned to the complements of the original
/// column `orig`, so both pins are wrong outputs; the lowest pair where
/// those complements differ is used, failing that the lowest pair gets 0
/// and 1.
fn pins_for(col: &[Ternary], orig: &[Ternary], bit: usize) -> Option<Vec<(usize, bool)>> {
    let lows = || (0..col.len()).filter(move |m| m & bit == 0);
    for m in lows() {
        let (a, b) = (col[m], col[m | bit]);
        match (a.is_care(), b.is_care()) {
            (true, false) => return Some(vec![(m | bit, a == Ternary::Zero)]),
            (false, true) => return Some(vec![(m, b == Ternary::Zero)]),
            _ => {}
        }
    }
    let free = |m: &usize| !col[*m].is_care() && !col[*m | bit].is_care();
    let wrong = |m: usize| match orig[m % orig.len()] {
        Ternary::Zero => Some(true),
        Ternary::One => Some(false),
        Ternary::DontCare => None,
    };
    lows()
        .filter(free)
        .find_map(|m| match (wrong(m), wrong(m | bit)) {
            (Some(a), Some(b)) if a != b => Some(vec![(m, a), (m | bit, b)]),
            _ => None,
        })
        .or_else(|| lows().find(free).map(|m| vec![(m, false), (m | bit, true)]))
}

/// Makes every locked output depend on every input its original output
/// depends on, by pinning don't-cares (lowest minterm first) and
/// resynthesising. Returns `lf` unchanged if nothing is missing.
pub fn ensure_input_dependency(mut lf: LockedFunction) -> Result<LockedFunction, IdkllError> {
    let kb = lf.num_key_bits();
    let v = lf.num_inputs();
    let nv = kb + v;
    let support = original_support(&lf.original);
    let unreachable: Vec<usize> = (0..v).filter(|x| !support.contains(x)).collect();
    if !unreachable.is_empty() {
        return Err(IdkllError::CannotForceDependency { vars: unreachable });
    }
    // One round suffices: a pinned pair differs in the variable, so every
    // realisation depends on it.
    let realised = lf.realised();
    let mut stuck = BTreeSet::new();
    let mut pinned = false;
    for o in 0..lf.original.num_outputs() {
        for x in lf.original.support(o) {
            if depends_on(&realised, o, kb + x) {
                continue;
            }
            let bit = 1usize << (nv - 1 - (kb + x));
            match pins_for(lf.table.column(o), lf.original.column(o), bit) {
                Some(ps) => {
                    for (m, value) in ps {
                        lf.table.set(o, m, Ternary::from_bool(value));
                        lf.pins.push(Pin {
                            output: o,
                            minterm: m,
                            value,
                        });
                    }
                    pinned = true;
                }
                None => {
                    stuck.insert(x);
                }
            }
        }
    }
    if !stuck.is_empty() {
        return Err(IdkllError::CannotForceDependency {
            vars: stuck.into_iter().collect(),
        });
    }
    if pinned {
        (lf.network, lf.via_reference) = synthesize(&lf.table, kb, lf.reference.as_ref(), lf.two_level)?;
    }
    Ok(lf)
}

/// Result of checking every key sequence against the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalKeyCheck {
    /// True iff every key is wrong on some input.
    pub ok: bool,
    /// Per key value: the smallest input on which it is wrong, or `None`
    /// if it is correct everywhere.
    pub witnesses: Vec<Option<usize>>,
    /// Per key value: the number of inputs on which it is correct.
    pub correct_inputs: Vec<usize>,
}

impl UniversalKeyCheck {
    pub fn universal_keys(&self) -> Vec<u64> {
        (0..self.witnesses.len() as u64)
            .filter(|&k| self.witnesses[k as usize].is_none())
            .collect()
    }

    /// Keys other than the valid ones that are correct on some input.
    pub fn partially_correct(&self, plan: &KeyPlan) -> Vec<u64> {
        (0..self.witnesses.len() as u64)
            .filter(|&k| plan.valid_index(k).is_none() && self.correct_inputs[k as usize] > 0)
            .collect()
    }
}

/// Exhaustive check of the synthesised network: each key must give a wrong
/// output on at least one input.
pub fn verify_no_universal_key(lf: &LockedFunction) -> UniversalKeyCheck {
    let r = lf.realised();
    let kb = lf.num_key_bits();
    let v = lf.num_inputs();
    let keys = 1usize << kb;
    let mut witnesses = vec![None; keys];
    let mut correct_inputs = vec![0; keys];
    for key in 0..keys {
        for x in 0..1usize << v {
            let ok = (0..lf.original.num_outputs())
                .all(|o| lf.original.get(o, x).admits(r.get(o, (key << v) | x) == Ternary::One));
            if ok {
                correct_inputs[key] += 1;
            } else if witnesses[key].is_none() {
                witnesses[key] = Some(x);
            }
        }
    }
    UniversalKeyCheck {
        ok: witnesses.iter().all(Option::is_some),
        witnesses,
        correct_inputs,
    }
}
