// SPDX-License-Identifier: Apache-2.0

//! Finite action lattices given by tables, and exhaustive validity checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rules::{builtin_rules, q_a_of, structural_library, Quasiequation, Rule};
use crate::syntax::{Formula, Sequent};

/// Default bound on the number of valuations of one validity query.
pub const DEFAULT_VALUATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{needed} valuations exceed the budget of {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("bad model: {0}")]
    Shape(String),
    #[error("unknown model `{0}`")]
    Unknown(String),
}

/// A finite action lattice. Binary tables are row-major: `prod[x * n + y]`
/// is `x·y`, `lres[x * n + z]` is `x\z` and `rres[z * n + y]` is `z/y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteActionLattice {
    pub name: String,
    pub names: Vec<String>,
    pub leq: Vec<bool>,
    pub meet: Vec<usize>,
    pub join: Vec<usize>,
    pub prod: Vec<usize>,
    pub lres: Vec<usize>,
    pub rres: Vec<usize>,
    pub star: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

impl FiniteActionLattice {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.size() + y]
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.prod[x * self.size() + y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.size() + y]
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.size() + y]
    }

    /// `x\z`.
    #[inline]
    pub fn under(&self, x: usize, z: usize) -> usize {
        self.lres[x * self.size() + z]
    }

    /// `z/y`.
    #[inline]
    pub fn over(&self, z: usize, y: usize) -> usize {
        self.rres[z * self.size() + y]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Complete the lattice and residual tables from an order, a product and
    /// a star by search. Fails when a bound or residual does not exist.
    pub fn from_tables(
        name: &str,
        names: Vec<String>,
        leq: Vec<bool>,
        prod: Vec<usize>,
        star: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<FiniteActionLattice, ModelError> {
        let n = names.len();
        if leq.len() != n * n || prod.len() != n * n || star.len() != n {
            return Err(ModelError::Shape("table sizes do not match the carrier".into()));
        }
        let le = |x: usize, y: usize| leq[x * n + y];
        let greatest = |pred: &dyn Fn(usize) -> bool| -> Option<usize> {
            let cands: Vec<usize> = (0..n).filter(|&c| pred(c)).collect();
            cands
                .iter()
                .copied()
                .find(|&c| cands.iter().all(|&d| le(d, c)))
        };
        let least = |pred: &dyn Fn(usize) -> bool| -> Option<usize> {
            let cands: Vec<usize> = (0..n).filter(|&c| pred(c)).collect();
            cands
                .iter()
                .copied()
                .find(|&c| cands.iter().all(|&d| le(c, d)))
        };
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        let mut lres = vec![0; n * n];
        let mut rres = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                meet[x * n + y] = greatest(&|c| le(c, x) && le(c, y))
                    .ok_or_else(|| ModelError::Shape(format!("no meet of {x} and {y}")))?;
                join[x * n + y] = least(&|c| le(x, c) && le(y, c))
                    .ok_or_else(|| ModelError::Shape(format!("no join of {x} and {y}")))?;
                lres[x * n + y] = greatest(&|c| le(prod[x * n + c], y))
                    .ok_or_else(|| ModelError::Shape(format!("no residual {x}\\{y}")))?;
                rres[x * n + y] = greatest(&|c| le(prod[c * n + y], x))
                    .ok_or_else(|| ModelError::Shape(format!("no residual {x}/{y}")))?;
            }
        }
        Ok(FiniteActionLattice {
            name: name.to_string(),
            names,
            leq,
            meet,
            join,
            prod,
            lres,
            rres,
            star,
            zero,
            one,
        })
    }

    /// `⋁ { xⁿ | n ∈ ℕ }`, iterating powers until one repeats.
    pub fn power_join(&self, x: usize) -> usize {
        let mut seen = vec![false; self.size()];
        let (mut acc, mut pow) = (self.one, self.one);
        while !seen[pow] {
            seen[pow] = true;
            acc = self.join(acc, pow);
            pow = self.mul(pow, x);
        }
        acc
    }
}

/// Powerset quantale over `atoms` generators: the product of two sets is
/// the union of the pairwise atom products.
fn powerset_model(
    name: &str,
    atom_names: &[String],
    atom_prod: &dyn Fn(usize, usize) -> u32,
    unit: u32,
) -> FiniteActionLattice {
    let m = atom_names.len();
    let n = 1usize << m;
    let mut prod = vec![0usize; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut acc = 0u32;
            for i in (0..m).filter(|i| x >> i & 1 == 1) {
                for j in (0..m).filter(|j| y >> j & 1 == 1) {
                    acc |= atom_prod(i, j);
                }
            }
            prod[x * n + y] = acc as usize;
        }
    }
    let mut lres = vec![0usize; n * n];
    let mut rres = vec![0usize; n * n];
    for x in 0..n {
        for z in 0..n {
            let mut l = 0;
            let mut r = 0;
            for a in 0..m {
                if prod[x * n + (1 << a)] & !z == 0 {
                    l |= 1 << a;
                }
                if prod[(1 << a) * n + x] & !z == 0 {
                    r |= 1 << a;
                }
            }
            lres[x * n + z] = l;
            // rres[z][y] with y = x here.
            rres[z * n + x] = r;
        }
    }
    let mut star = vec![0usize; n];
    for (x, s) in star.iter_mut().enumerate() {
        let mut acc = unit as usize;
        loop {
            let next = acc | prod[acc * n + x];
            if next == acc {
                break;
            }
            acc = next;
        }
        *s = acc;
    }
    let names = (0..n)
        .map(|x| {
            let parts: Vec<&str> = (0..m)
                .filter(|i| x >> i & 1 == 1)
                .map(|i| atom_names[i].as_str())
                .collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    FiniteActionLattice {
        name: name.to_string(),
        names,
        leq: (0..n * n).map(|i| (i / n) & !(i % n) == 0).collect(),
        meet: (0..n * n).map(|i| (i / n) & (i % n)).collect(),
        join: (0..n * n).map(|i| (i / n) | (i % n)).collect(),
        prod,
        lres,
        rres,
        star,
        zero: 0,
        one: unit as usize,
    }
}

/// The chain `0 < … < 1` of `k` elements with `min` as product.
pub fn chain(k: usize) -> FiniteActionLattice {
    let names: Vec<String> = match k {
        2 => vec!["0".into(), "1".into()],
        3 => vec!["0".into(), "m".into(), "1".into()],
        _ => (0..k).map(|i| format!("c{i}")).collect(),
    };
    let name = match k {
        2 => "two-chain".to_string(),
        3 => "three-chain".to_string(),
        _ => format!("chain-{k}"),
    };
    let leq = (0..k * k).map(|i| i / k <= i % k).collect();
    let prod = (0..k * k).map(|i| (i / k).min(i % k)).collect();
    FiniteActionLattice::from_tables(&name, names, leq, prod, vec![k - 1; k], 0, k - 1)
        .expect("chains are residuated")
}

pub fn two_chain() -> FiniteActionLattice {
    chain(2)
}

pub fn three_chain() -> FiniteActionLattice {
    chain(3)
}

/// Binary relations on `k ≤ 3` points with composition.
pub fn rel_algebra(k: usize) -> Result<FiniteActionLattice, ModelError> {
    if k == 0 || k > 3 {
        return Err(ModelError::Shape(format!("rel_algebra needs 1 <= k <= 3, got {k}")));
    }
    let atoms: Vec<String> = (0..k * k).map(|i| format!("{}{}", i / k, i % k)).collect();
    let comp = |a: usize, b: usize| {
        let (i, j) = (a / k, a % k);
        let (j2, l) = (b / k, b % k);
        if j == j2 {
            1u32 << (i * k + l)
        } else {
            0
        }
    };
    let unit = (0..k).fold(0u32, |u, i| u | 1 << (i * k + i));
    Ok(powerset_model(&format!("rel_algebra({k})"), &atoms, &comp, unit))
}

/// Sets of words of length at most 2 over `{a, b}`, with concatenation
/// dropping longer words.
pub fn trunc_words() -> FiniteActionLattice {
    let words = ["", "a", "b", "aa", "ab", "ba", "bb"];
    let atoms: Vec<String> = words
        .iter()
        .map(|w| if w.is_empty() { "e".to_string() } else { w.to_string() })
        .collect();
    let cat = |i: usize, j: usize| {
        let w = format!("{}{}", words[i], words[j]);
        match words.iter().position(|x| *x == w) {
            Some(p) => 1u32 << p,
            None => 0,
        }
    };
    powerset_model("trunc_words", &atoms, &cat, 1)
}

/// The full model library.
pub fn library() -> Vec<FiniteActionLattice> {
    vec![
        two_chain(),
        three_chain(),
        rel_algebra(1).expect("k=1"),
        rel_algebra(2).expect("k=2"),
        rel_algebra(3).expect("k=3"),
        trunc_words(),
    ]
}

pub fn by_name(name: &str) -> Result<FiniteActionLattice, ModelError> {
    match name {
        "two-chain" => Ok(two_chain()),
        "three-chain" => Ok(three_chain()),
        "rel_algebra(1)" | "rel1" => rel_algebra(1),
        "rel_algebra(2)" | "rel2" => rel_algebra(2),
        "rel_algebra(3)" | "rel3" => rel_algebra(3),
        "trunc_words" | "words" => Ok(trunc_words()),
        _ => Err(ModelError::Unknown(name.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// A failed law with the elements witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub law: &'static str,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<LawViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "{} fails at {:?}", v.law, v.witness)?;
        }
        Ok(())
    }
}

const PER_LAW: usize = 4;

/// Check every action lattice law, residuation and star continuity.
pub fn validate_algebra(a: &FiniteActionLattice) -> ValidationReport {
    let n = a.size();
    let mut out: Vec<LawViolation> = Vec::new();
    let mut fail = |law: &'static str, w: Vec<usize>| {
        if out.iter().filter(|v| v.law == law).count() < PER_LAW {
            out.push(LawViolation { law, witness: w });
        }
    };
    let tables = [&a.meet, &a.join, &a.prod, &a.lres, &a.rres];
    if a.leq.len() != n * n
        || a.star.len() != n
        || tables.iter().any(|t| t.len() != n * n || t.iter().any(|&x| x >= n))
        || a.star.iter().any(|&x| x >= n)
        || a.zero >= n
        || a.one >= n
    {
        fail("tables are total", vec![]);
        return ValidationReport { violations: out };
    }
    for x in 0..n {
        if !a.le(x, x) {
            fail("reflexivity", vec![x]);
        }
        if !a.le(a.zero, x) {
            fail("0 <= x", vec![x]);
        }
        if a.mul(a.one, x) != x || a.mul(x, a.one) != x {
            fail("1 is a unit", vec![x]);
        }
        let s = a.star[x];
        if !a.le(a.join(a.one, a.mul(x, s)), s) {
            fail("1 | x.x* <= x*", vec![x]);
        }
        if s != a.power_join(x) {
            fail("x* is the join of the powers of x", vec![x]);
        }
        for y in 0..n {
            if x != y && a.le(x, y) && a.le(y, x) {
                fail("antisymmetry", vec![x, y]);
            }
            let (m, j) = (a.meet(x, y), a.join(x, y));
            if !(a.le(m, x) && a.le(m, y)) {
                fail("meet is a lower bound", vec![x, y]);
            }
            if !(a.le(x, j) && a.le(y, j)) {
                fail("join is an upper bound", vec![x, y]);
            }
            if a.le(a.mul(x, y), y) && !a.le(a.mul(s, y), y) {
                fail("x.y <= y implies x*.y <= y", vec![x, y]);
            }
            if a.le(a.mul(y, x), y) && !a.le(a.mul(y, s), y) {
                fail("y.x <= y implies y.x* <= y", vec![x, y]);
            }
            let xy = a.mul(x, y);
            for z in 0..n {
                if a.le(x, y) && a.le(y, z) && !a.le(x, z) {
                    fail("transitivity", vec![x, y, z]);
                }
                if a.le(z, x) && a.le(z, y) && !a.le(z, m) {
                    fail("meet is greatest", vec![x, y, z]);
                }
                if a.le(x, z) && a.le(y, z) && !a.le(j, z) {
                    fail("join is least", vec![x, y, z]);
                }
                if a.mul(xy, z) != a.mul(x, a.mul(y, z)) {
                    fail("associativity", vec![x, y, z]);
                }
                let p = a.le(xy, z);
                if p != a.le(y, a.under(x, z)) {
                    fail("x.y <= z iff y <= x\\z", vec![x, y, z]);
                }
                if p != a.le(x, a.over(z, y)) {
                    fail("x.y <= z iff x <= z/y", vec![x, y, z]);
                }
            }
        }
    }
    ValidationReport { violations: out }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

pub type Valuation = BTreeMap<String, usize>;

pub fn eval(a: &FiniteActionLattice, v: &Valuation, f: &Formula) -> Result<usize, ModelError> {
    Ok(match f {
        Formula::Var(x) => *v.get(x).ok_or_else(|| ModelError::Unbound(x.clone()))?,
        Formula::Zero => a.zero,
        Formula::One => a.one,
        Formula::Meet(x, y) => a.meet(eval(a, v, x)?, eval(a, v, y)?),
        Formula::Join(x, y) => a.join(eval(a, v, x)?, eval(a, v, y)?),
        Formula::Prod(x, y) => a.mul(eval(a, v, x)?, eval(a, v, y)?),
        Formula::LRes(x, y) => a.under(eval(a, v, x)?, eval(a, v, y)?),
        Formula::RRes(x, y) => a.over(eval(a, v, x)?, eval(a, v, y)?),
        Formula::Star(x) => a.star[eval(a, v, x)?],
    })
}

/// Postfix program over variable slots.
#[derive(Clone, Debug)]
enum Op {
    Var(usize),
    Const(usize),
    Meet,
    Join,
    Prod,
    Under,
    Over,
    Star,
}

fn compile(a: &FiniteActionLattice, f: &Formula, vars: &[String], out: &mut Vec<Op>) {
    match f {
        Formula::Var(x) => out.push(Op::Var(
            vars.iter().position(|v| v == x).expect("variable list is complete"),
        )),
        Formula::Zero => out.push(Op::Const(a.zero)),
        Formula::One => out.push(Op::Const(a.one)),
        Formula::Star(x) => {
            compile(a, x, vars, out);
            out.push(Op::Star);
        }
        Formula::Meet(x, y)
        | Formula::Join(x, y)
        | Formula::Prod(x, y)
        | Formula::LRes(x, y)
        | Formula::RRes(x, y) => {
            compile(a, x, vars, out);
            compile(a, y, vars, out);
            out.push(match f {
                Formula::Meet(..) => Op::Meet,
                Formula::Join(..) => Op::Join,
                Formula::Prod(..) => Op::Prod,
                Formula::LRes(..) => Op::Under,
                _ => Op::Over,
            });
        }
    }
}

fn run(a: &FiniteActionLattice, prog: &[Op], vals: &[usize], stack: &mut Vec<usize>) -> usize {
    stack.clear();
    for op in prog {
        let v = match op {
            Op::Var(i) => vals[*i],
            Op::Const(c) => *c,
            Op::Star => {
                let x = stack.pop().expect("well-formed program");
                a.star[x]
            }
            _ => {
                let y = stack.pop().expect("well-formed program");
                let x = stack.pop().expect("well-formed program");
                match op {
                    Op::Meet => a.meet(x, y),
                    Op::Join => a.join(x, y),
                    Op::Prod => a.mul(x, y),
                    Op::Under => a.under(x, y),
                    _ => a.over(x, y),
                }
            }
        };
        stack.push(v);
    }
    stack.pop().expect("well-formed program")
}

/// The single inequation `α₀ ⋯ αₙ ≤ β` of a sequent.
pub fn sequent_inequation(s: &Sequent) -> (Formula, Formula) {
    let lhs = s
        .antecedent
        .iter()
        .cloned()
        .reduce(Formula::prod)
        .unwrap_or(Formula::One);
    (lhs, s.succedent.clone())
}

/// A universally quantified implication between inequations, compiled.
struct Query {
    vars: Vec<String>,
    premises: Vec<(Vec<Op>, Vec<Op>)>,
    conclusion: (Vec<Op>, Vec<Op>),
}

impl Query {
    fn new(a: &FiniteActionLattice, premises: &[(Formula, Formula)], concl: &(Formula, Formula)) -> Query {
        let mut vars: Vec<String> = Vec::new();
        for (l, r) in premises.iter().chain(std::iter::once(concl)) {
            for v in l.vars().into_iter().chain(r.vars()) {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let c = |f: &Formula| {
            let mut p = Vec::new();
            compile(a, f, &vars, &mut p);
            p
        };
        Query {
            premises: premises.iter().map(|(l, r)| (c(l), c(r))).collect(),
            conclusion: (c(&concl.0), c(&concl.1)),
            vars,
        }
    }

    /// First valuation (in lexicographic order) under which the premises
    /// hold and the conclusion fails.
    fn refute(&self, a: &FiniteActionLattice, budget: u64) -> Result<Option<Valuation>, ModelError> {
        let n = a.size();
        let k = self.vars.len();
        let needed = (n as u128).pow(k as u32);
        if needed > budget as u128 {
            return Err(ModelError::Budget { needed, budget });
        }
        let total = needed as usize;
        let threads = std::thread::available_parallelism()
            .map(|t| t.get())
            .unwrap_or(1)
            .min(total.div_ceil(4096).max(1));
        let chunk = total.div_ceil(threads);
        let found: Vec<Option<usize>> = std::thread::scope(|sc| {
            let hs: Vec<_> = (0..threads)
                .map(|t| {
                    sc.spawn(move || {
                        let mut vals = vec![0usize; k];
                        let mut stack = Vec::new();
                        let hi = ((t + 1) * chunk).min(total);
                        for idx in t * chunk..hi {
                            let mut r = idx;
                            for slot in vals.iter_mut().rev() {
                                *slot = r % n;
                                r /= n;
                            }
                            let holds = |p: &(Vec<Op>, Vec<Op>), st: &mut Vec<usize>| {
                                let l = run(a, &p.0, &vals, st);
                                let r = run(a, &p.1, &vals, st);
                                a.le(l, r)
                            };
                            if self.premises.iter().all(|p| holds(p, &mut stack))
                                && !holds(&self.conclusion, &mut stack)
                            {
                                return Some(idx);
                            }
                        }
                        None
                    })
                })
                .collect();
            hs.into_iter().map(|h| h.join().expect("worker")).collect()
        });
        Ok(found.into_iter().flatten().next().map(|mut idx| {
            let mut vals = vec![0usize; k];
            for slot in vals.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            self.vars.iter().cloned().zip(vals).collect()
        }))
    }
}

/// A valuation falsifying `S`, if any.
pub fn refute_sequent(
    a: &FiniteActionLattice,
    s: &Sequent,
    budget: u64,
) -> Result<Option<Valuation>, ModelError> {
    Query::new(a, &[], &sequent_inequation(s)).refute(a, budget)
}

pub fn holds_sequent(a: &FiniteActionLattice, s: &Sequent) -> Result<bool, ModelError> {
    Ok(refute_sequent(a, s, DEFAULT_VALUATION_BUDGET)?.is_none())
}

/// A valuation satisfying the premises of `q` and falsifying its
/// conclusion, if any.
pub fn refute_quasieq(
    a: &FiniteActionLattice,
    q: &Quasiequation,
    budget: u64,
) -> Result<Option<Valuation>, ModelError> {
    Query::new(a, &q.premises, &q.conclusion).refute(a, budget)
}

pub fn holds_quasieq(a: &FiniteActionLattice, q: &Quasiequation) -> Result<bool, ModelError> {
    Ok(refute_quasieq(a, q, DEFAULT_VALUATION_BUDGET)?.is_none())
}

/// `l ≤ r` for every valuation.
pub fn holds_inequation(
    a: &FiniteActionLattice,
    l: &Formula,
    r: &Formula,
) -> Result<bool, ModelError> {
    Ok(Query::new(a, &[], &(l.clone(), r.clone()))
        .refute(a, DEFAULT_VALUATION_BUDGET)?
        .is_none())
}

/// The analytic quasiequations of the named structural rules.
pub fn rule_quasieqs(rules: &[&str]) -> Result<Vec<Quasiequation>, crate::rules::RuleError> {
    let lib: Vec<Rule> = structural_library().into_iter().chain(builtin_rules()).collect();
    rules
        .iter()
        .map(|name| {
            let canon = crate::rules::canonical_name(name);
            let r = lib
                .iter()
                .find(|r| r.name == canon)
                .ok_or(crate::rules::RuleError::UnknownRule(canon))?;
            q_a_of(r)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Soundness audit
// ---------------------------------------------------------------------------

/// One proved sequent and the structural rules its proof may use.
#[derive(Clone, Debug)]
pub struct AuditItem {
    pub sequent: Sequent,
    pub quasieqs: Vec<Quasiequation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditViolation {
    pub sequent: Sequent,
    pub model: String,
    pub valuation: Valuation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// (sequent, model) pairs checked.
    pub checked: usize,
    /// Pairs skipped because the model fails an active quasiequation.
    pub skipped: usize,
    /// Pairs skipped because the valuation budget was exceeded.
    pub over_budget: usize,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every item in every model satisfying its quasiequations.
pub fn soundness_audit(
    items: &[AuditItem],
    models: &[FiniteActionLattice],
    budget: u64,
) -> Result<AuditReport, ModelError> {
    let mut report = AuditReport::default();
    let mut sat: BTreeMap<(usize, String), bool> = BTreeMap::new();
    for it in items {
        for (mi, m) in models.iter().enumerate() {
            let mut ok = true;
            for q in &it.quasieqs {
                let key = (mi, q.to_string());
                let holds = match sat.get(&key) {
                    Some(&h) => h,
                    None => {
                        let h = holds_quasieq(m, q)?;
                        sat.insert(key, h);
                        h
                    }
                };
                ok &= holds;
            }
            if !ok {
                report.skipped += 1;
                continue;
            }
            match refute_sequent(m, &it.sequent, budget) {
                Ok(None) => report.checked += 1,
                Ok(Some(v)) => {
                    report.checked += 1;
                    report.violations.push(AuditViolation {
                        sequent: it.sequent.clone(),
                        model: m.name.clone(),
                        valuation: v,
                    });
                }
                Err(ModelError::Budget { .. }) => report.over_budget += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

/// JSON form of a model. Tables are row-major over element indices; the
/// lattice and residual tables may be omitted and are then computed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub leq: Vec<Vec<bool>>,
    pub prod: Vec<Vec<usize>>,
    pub star: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lres: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rres: Option<Vec<Vec<usize>>>,
}

fn rows<T: Clone>(flat: &[T], n: usize) -> Vec<Vec<T>> {
    flat.chunks(n).map(<[T]>::to_vec).collect()
}

fn flatten<T: Clone>(t: &[Vec<T>], n: usize, what: &str) -> Result<Vec<T>, ModelError> {
    if t.len() != n || t.iter().any(|r| r.len() != n) {
        return Err(ModelError::Shape(format!("{what} table is not {n}x{n}")));
    }
    Ok(t.concat())
}

impl ModelFile {
    pub fn from_model(a: &FiniteActionLattice) -> ModelFile {
        let n = a.size();
        ModelFile {
            name: a.name.clone(),
            elements: a.names.clone(),
            zero: a.names[a.zero].clone(),
            one: a.names[a.one].clone(),
            leq: rows(&a.leq, n),
            prod: rows(&a.prod, n),
            star: a.star.clone(),
            meet: Some(rows(&a.meet, n)),
            join: Some(rows(&a.join, n)),
            lres: Some(rows(&a.lres, n)),
            rres: Some(rows(&a.rres, n)),
        }
    }

    pub fn to_model(&self) -> Result<FiniteActionLattice, ModelError> {
        let n = self.elements.len();
        let idx = |s: &str| {
            self.elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| ModelError::Shape(format!("unknown element `{s}`")))
        };
        let (zero, one) = (idx(&self.zero)?, idx(&self.one)?);
        let leq = flatten(&self.leq, n, "leq")?;
        let prod = flatten(&self.prod, n, "prod")?;
        if self.star.len() != n {
            return Err(ModelError::Shape("star table has the wrong length".into()));
        }
        let mut a = match (&self.meet, &self.join, &self.lres, &self.rres) {
            (Some(m), Some(j), Some(l), Some(r)) => FiniteActionLattice {
                name: self.name.clone(),
                names: self.elements.clone(),
                leq,
                meet: flatten(m, n, "meet")?,
                join: flatten(j, n, "join")?,
                prod,
                lres: flatten(l, n, "lres")?,
                rres: flatten(r, n, "rres")?,
                star: self.star.clone(),
                zero,
                one,
            },
            _ => FiniteActionLattice::from_tables(
                &self.name,
                self.elements.clone(),
                leq,
                prod,
                self.star.clone(),
                zero,
                one,
            )?,
        };
        a.name = self.name.clone();
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{analytic_qe_to_equation, builtin, q_of};
    use crate::syntax::{f, seq};

    #[test]
    fn library_models_are_valid() {
        for m in library() {
            let r = validate_algebra(&m);
            assert!(r.is_valid(), "{}: {r}", m.name);
        }
        assert_eq!(rel_algebra(1).unwrap().size(), 2);
        assert_eq!(rel_algebra(2).unwrap().size(), 16);
        assert!(rel_algebra(4).is_err());
    }

    #[test]
    fn broken_star_is_reported() {
        let mut m = two_chain();
        m.star = vec![0, 1];
        let r = validate_algebra(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| v.law == "1 | x.x* <= x*" && v.witness == vec![0]));
    }

    #[test]
    fn relation_star_is_reflexive_transitive_closure() {
        let m = rel_algebra(2).unwrap();
        let swap = m.element("{01,10}").unwrap();
        assert_eq!(m.names[m.star[swap]], "{00,01,10,11}");
        assert_eq!(m.names[m.one], "{00,11}");
        assert_eq!(m.names[m.zero], "{}");
    }

    #[test]
    fn sequent_validity() {
        let rel = rel_algebra(2).unwrap();
        assert!(holds_sequent(&rel, &seq("a |- a")).unwrap());
        assert!(holds_sequent(&rel, &seq("a*, a* |- a*")).unwrap());
        let two = two_chain();
        let v = refute_sequent(&two, &seq("a |- b"), DEFAULT_VALUATION_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!((v["a"], v["b"]), (1, 0));
        assert!(holds_sequent(&two, &seq("|- 1")).unwrap());
    }

    #[test]
    fn quasiequation_validity() {
        let qc = &rule_quasieqs(&["C"]).unwrap()[0];
        assert!(holds_quasieq(&two_chain(), qc).unwrap());
        assert!(!holds_quasieq(&rel_algebra(2).unwrap(), qc).unwrap());
        let cut = q_of(&builtin("Cut")).unwrap();
        for m in [two_chain(), three_chain(), rel_algebra(2).unwrap()] {
            assert!(holds_quasieq(&m, &cut).unwrap(), "{}", m.name);
        }
    }

    #[test]
    fn analytic_correspondence() {
        for m in [two_chain(), three_chain(), rel_algebra(2).unwrap(), trunc_words()] {
            for q in rule_quasieqs(&["C", "Wk", "E"]).unwrap() {
                let (l, r) = analytic_qe_to_equation(&q).unwrap();
                assert_eq!(
                    holds_quasieq(&m, &q).unwrap(),
                    holds_inequation(&m, &l, &r).unwrap(),
                    "{} {q}",
                    m.name
                );
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let w = trunc_words();
        let e = refute_sequent(&w, &seq("a, b, c, d |- a"), 1000).unwrap_err();
        assert!(matches!(e, ModelError::Budget { .. }));
    }

    #[test]
    fn audit_flags_unsound_items() {
        let items = vec![
            AuditItem {
                sequent: seq("a* |- a*"),
                quasieqs: vec![],
            },
            AuditItem {
                sequent: seq("a |- b"),
                quasieqs: vec![],
            },
            AuditItem {
                sequent: seq("a |- a . a"),
                quasieqs: rule_quasieqs(&["C"]).unwrap(),
            },
        ];
        let r = soundness_audit(
            &items,
            &[two_chain(), rel_algebra(2).unwrap()],
            DEFAULT_VALUATION_BUDGET,
        )
        .unwrap();
        assert_eq!(r.violations.len(), 2);
        assert!(r.violations.iter().all(|v| v.sequent == seq("a |- b")));
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn model_file_round_trip() {
        let m = three_chain();
        let text = serde_json::to_string(&ModelFile::from_model(&m)).unwrap();
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_model().unwrap(), m);
        let mut bare = ModelFile::from_model(&m);
        bare.meet = None;
        assert_eq!(bare.to_model().unwrap(), m);
    }

    #[test]
    fn eval_matches_tables() {
        let m = rel_algebra(2).unwrap();
        let v: Valuation = [("a".to_string(), 6)].into();
        assert_eq!(eval(&m, &v, &f("a*")).unwrap(), m.power_join(6));
        assert!(eval(&m, &v, &f("b")).is_err());
    }
}
