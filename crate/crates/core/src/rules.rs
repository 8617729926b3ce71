// SPDX-License-Identifier: Apache-2.0

//! Schematic rules, instantiation, matching, classification of structural
//! rules and their quasiequations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::{
    self, print_formula_compact, product_of, Formula, OccurrencePos, ParseError, Sequent, Tok,
};

/// Default cap on candidate splits explored by [`match_conclusion`].
pub const DEFAULT_MATCH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("missing binding for metavariable `{0}`")]
    MissingBinding(String),
    #[error("identity rule needs a propositional variable, got `{0}`")]
    NotAVariable(String),
    #[error("rule `{rule}` has no premise {index}")]
    NoSuchPremise { rule: String, index: usize },
    #[error("matching exceeded {0} candidate splits")]
    MatchCap(usize),
    #[error("rule `{rule}` is not {wanted}")]
    Classification { rule: String, wanted: &'static str },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("analytic quasiequation with no premises has no equation form")]
    EmptyJoin,
    #[error("not an analytic quasiequation")]
    NotAnalytic,
    #[error("rule file line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

// ---------------------------------------------------------------------------
// Metasyntax
// ---------------------------------------------------------------------------

/// A formula built from formula metavariables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaFormula {
    FVar(String),
    Zero,
    One,
    Meet(Box<MetaFormula>, Box<MetaFormula>),
    Join(Box<MetaFormula>, Box<MetaFormula>),
    Prod(Box<MetaFormula>, Box<MetaFormula>),
    LRes(Box<MetaFormula>, Box<MetaFormula>),
    RRes(Box<MetaFormula>, Box<MetaFormula>),
    Star(Box<MetaFormula>),
}

fn fv(name: &str) -> MetaFormula {
    MetaFormula::FVar(name.to_string())
}

fn bx(m: MetaFormula) -> Box<MetaFormula> {
    Box::new(m)
}

impl MetaFormula {
    pub fn is_fvar(&self) -> Option<&str> {
        match self {
            MetaFormula::FVar(n) => Some(n),
            _ => None,
        }
    }

    /// `α^n` with `α` a metaformula, right nested with a trailing `1`.
    pub fn power(alpha: &MetaFormula, n: usize) -> MetaFormula {
        let mut acc = MetaFormula::One;
        for _ in 0..n {
            acc = MetaFormula::Prod(bx(alpha.clone()), bx(acc));
        }
        acc
    }

    pub fn fvars(&self, out: &mut BTreeSet<String>) {
        match self {
            MetaFormula::FVar(n) => {
                out.insert(n.clone());
            }
            MetaFormula::Zero | MetaFormula::One => {}
            MetaFormula::Star(b) => b.fvars(out),
            MetaFormula::Meet(l, r)
            | MetaFormula::Join(l, r)
            | MetaFormula::Prod(l, r)
            | MetaFormula::LRes(l, r)
            | MetaFormula::RRes(l, r) => {
                l.fvars(out);
                r.fvars(out);
            }
        }
    }

    pub fn instantiate(&self, inst: &Instantiation) -> Result<Formula, RuleError> {
        Ok(match self {
            MetaFormula::FVar(n) => inst
                .fmap
                .get(n)
                .cloned()
                .ok_or_else(|| RuleError::MissingBinding(n.clone()))?,
            MetaFormula::Zero => Formula::Zero,
            MetaFormula::One => Formula::One,
            MetaFormula::Star(b) => Formula::star(b.instantiate(inst)?),
            MetaFormula::Meet(l, r) => Formula::meet(l.instantiate(inst)?, r.instantiate(inst)?),
            MetaFormula::Join(l, r) => Formula::join(l.instantiate(inst)?, r.instantiate(inst)?),
            MetaFormula::Prod(l, r) => Formula::prod(l.instantiate(inst)?, r.instantiate(inst)?),
            MetaFormula::LRes(l, r) => Formula::lres(l.instantiate(inst)?, r.instantiate(inst)?),
            MetaFormula::RRes(l, r) => Formula::rres(l.instantiate(inst)?, r.instantiate(inst)?),
        })
    }

    /// Extend `fmap` so that this metaformula instantiates to `f`.
    fn match_into(&self, f: &Formula, fmap: &mut BTreeMap<String, Formula>) -> bool {
        match (self, f) {
            (MetaFormula::FVar(n), _) => match fmap.get(n) {
                Some(bound) => bound == f,
                None => {
                    fmap.insert(n.clone(), f.clone());
                    true
                }
            },
            (MetaFormula::Zero, Formula::Zero) | (MetaFormula::One, Formula::One) => true,
            (MetaFormula::Star(a), Formula::Star(b)) => a.match_into(b, fmap),
            (MetaFormula::Meet(a, b), Formula::Meet(c, d))
            | (MetaFormula::Join(a, b), Formula::Join(c, d))
            | (MetaFormula::Prod(a, b), Formula::Prod(c, d))
            | (MetaFormula::LRes(a, b), Formula::LRes(c, d))
            | (MetaFormula::RRes(a, b), Formula::RRes(c, d)) => {
                a.match_into(c, fmap) && b.match_into(d, fmap)
            }
            _ => false,
        }
    }

    fn from_formula(f: &Formula) -> MetaFormula {
        match f {
            Formula::Var(v) => MetaFormula::FVar(v.clone()),
            Formula::Zero => MetaFormula::Zero,
            Formula::One => MetaFormula::One,
            Formula::Star(b) => MetaFormula::Star(bx(Self::from_formula(b))),
            Formula::Meet(l, r) => {
                MetaFormula::Meet(bx(Self::from_formula(l)), bx(Self::from_formula(r)))
            }
            Formula::Join(l, r) => {
                MetaFormula::Join(bx(Self::from_formula(l)), bx(Self::from_formula(r)))
            }
            Formula::Prod(l, r) => {
                MetaFormula::Prod(bx(Self::from_formula(l)), bx(Self::from_formula(r)))
            }
            Formula::LRes(l, r) => {
                MetaFormula::LRes(bx(Self::from_formula(l)), bx(Self::from_formula(r)))
            }
            Formula::RRes(l, r) => {
                MetaFormula::RRes(bx(Self::from_formula(l)), bx(Self::from_formula(r)))
            }
        }
    }

    fn to_formula(&self) -> Formula {
        match self {
            MetaFormula::FVar(v) => Formula::Var(v.clone()),
            MetaFormula::Zero => Formula::Zero,
            MetaFormula::One => Formula::One,
            MetaFormula::Star(b) => Formula::star(b.to_formula()),
            MetaFormula::Meet(l, r) => Formula::meet(l.to_formula(), r.to_formula()),
            MetaFormula::Join(l, r) => Formula::join(l.to_formula(), r.to_formula()),
            MetaFormula::Prod(l, r) => Formula::prod(l.to_formula(), r.to_formula()),
            MetaFormula::LRes(l, r) => Formula::lres(l.to_formula(), r.to_formula()),
            MetaFormula::RRes(l, r) => Formula::rres(l.to_formula(), r.to_formula()),
        }
    }
}

impl fmt::Display for MetaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaItem {
    SVar(String),
    Form(MetaFormula),
}

impl fmt::Display for MetaItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaItem::SVar(s) => f.write_str(s),
            MetaItem::Form(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetaSequent {
    pub lhs: Vec<MetaItem>,
    pub rhs: MetaFormula,
}

impl fmt::Display for MetaSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.lhs.iter().map(|i| i.to_string()).collect();
        if items.is_empty() {
            write!(f, "|- {}", self.rhs)
        } else {
            write!(f, "{} |- {}", items.join(", "), self.rhs)
        }
    }
}

impl MetaSequent {
    pub fn svars(&self) -> BTreeSet<String> {
        self.lhs
            .iter()
            .filter_map(|i| match i {
                MetaItem::SVar(s) => Some(s.clone()),
                MetaItem::Form(_) => None,
            })
            .collect()
    }

    pub fn fvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for i in &self.lhs {
            if let MetaItem::Form(m) = i {
                m.fvars(&mut out);
            }
        }
        self.rhs.fvars(&mut out);
        out
    }

    pub fn instantiate(&self, inst: &Instantiation) -> Result<Sequent, RuleError> {
        let mut ante = Vec::new();
        for item in &self.lhs {
            match item {
                MetaItem::SVar(s) => ante.extend(
                    inst.smap
                        .get(s)
                        .ok_or_else(|| RuleError::MissingBinding(s.clone()))?
                        .iter()
                        .cloned(),
                ),
                MetaItem::Form(m) => ante.push(m.instantiate(inst)?),
            }
        }
        Ok(Sequent::new(ante, self.rhs.instantiate(inst)?))
    }

    /// Start and length of every item of the instantiated antecedent.
    pub fn layout(&self, inst: &Instantiation) -> Result<Vec<(usize, usize)>, RuleError> {
        let mut out = Vec::with_capacity(self.lhs.len());
        let mut at = 0;
        for item in &self.lhs {
            let len = match item {
                MetaItem::SVar(s) => inst
                    .smap
                    .get(s)
                    .ok_or_else(|| RuleError::MissingBinding(s.clone()))?
                    .len(),
                MetaItem::Form(_) => 1,
            };
            out.push((at, len));
            at += len;
        }
        Ok(out)
    }
}

/// A metavariable instantiation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instantiation {
    pub fmap: BTreeMap<String, Formula>,
    pub smap: BTreeMap<String, Vec<Formula>>,
}

impl Instantiation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn f(mut self, name: &str, value: Formula) -> Self {
        self.fmap.insert(name.to_string(), value);
        self
    }

    pub fn s(mut self, name: &str, value: Vec<Formula>) -> Self {
        self.smap.insert(name.to_string(), value);
        self
    }
}

/// A position in a metasequent: an antecedent item or the succedent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaPos {
    Item(usize),
    Succ,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Identity,
    Principal,
    Structural,
}

/// Premises of a rule. The two ω-shapes generate their premises on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premises {
    Finite(Vec<MetaSequent>),
    /// `(Γ, α^(n), Δ ⇒ β)_n`
    OmegaStandard,
    /// `Γ, Δ ⇒ β` followed by `(Γ, α, α^i, Δ ⇒ β)_i`
    OmegaModified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub kind: RuleKind,
    pub premises: Premises,
    pub conclusion: MetaSequent,
    pub principal: Option<SchemaPos>,
    /// Boxed premise positions, per finite premise.
    pub auxiliary: Vec<Vec<SchemaPos>>,
    /// Child slot used by each finite premise; `None` means `0, 1, …`.
    pub slots: Option<Vec<usize>>,
}

/// A ground rule instance: premises then conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub premises: Vec<Sequent>,
    pub conclusion: Sequent,
}

pub const OMEGA_GAMMA: &str = "Gamma";
pub const OMEGA_DELTA: &str = "Delta";
pub const OMEGA_ALPHA: &str = "alpha";
pub const OMEGA_BETA: &str = "beta";

impl Rule {
    pub fn is_omega(&self) -> bool {
        !matches!(self.premises, Premises::Finite(_))
    }

    pub fn arity(&self) -> Option<usize> {
        match &self.premises {
            Premises::Finite(p) => Some(p.len()),
            _ => None,
        }
    }

    /// Slot of the `i`-th finite premise.
    pub fn slot(&self, i: usize) -> usize {
        match &self.slots {
            Some(s) => s[i],
            None => i,
        }
    }

    /// Index of the finite premise stored at `slot`.
    pub fn premise_of_slot(&self, slot: usize) -> Option<usize> {
        match &self.slots {
            Some(s) => s.iter().position(|&x| x == slot),
            None => match self.arity() {
                Some(n) if slot < n => Some(slot),
                Some(_) => None,
                None => Some(slot),
            },
        }
    }

    /// The `n`-th premise schema.
    pub fn premise(&self, n: usize) -> Result<MetaSequent, RuleError> {
        let sv = |s: &str| MetaItem::SVar(s.to_string());
        match &self.premises {
            Premises::Finite(ps) => ps.get(n).cloned().ok_or_else(|| RuleError::NoSuchPremise {
                rule: self.name.clone(),
                index: n,
            }),
            Premises::OmegaStandard => {
                let mut lhs = vec![sv(OMEGA_GAMMA)];
                lhs.extend((0..n).map(|_| MetaItem::Form(fv(OMEGA_ALPHA))));
                lhs.push(sv(OMEGA_DELTA));
                Ok(MetaSequent {
                    lhs,
                    rhs: fv(OMEGA_BETA),
                })
            }
            Premises::OmegaModified => {
                let lhs = if n == 0 {
                    vec![sv(OMEGA_GAMMA), sv(OMEGA_DELTA)]
                } else {
                    vec![
                        sv(OMEGA_GAMMA),
                        MetaItem::Form(fv(OMEGA_ALPHA)),
                        MetaItem::Form(MetaFormula::power(&fv(OMEGA_ALPHA), n - 1)),
                        sv(OMEGA_DELTA),
                    ]
                };
                Ok(MetaSequent {
                    lhs,
                    rhs: fv(OMEGA_BETA),
                })
            }
        }
    }

    pub fn auxiliary_of(&self, n: usize) -> Vec<SchemaPos> {
        match &self.premises {
            Premises::Finite(_) => self.auxiliary.get(n).cloned().unwrap_or_default(),
            Premises::OmegaStandard => (1..=n).map(SchemaPos::Item).collect(),
            Premises::OmegaModified => {
                if n == 0 {
                    vec![]
                } else {
                    vec![SchemaPos::Item(1), SchemaPos::Item(2)]
                }
            }
        }
    }

    /// All metavariables of the conclusion and the finite premises.
    pub fn metavariables(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut f = self.conclusion.fvars();
        let mut s = self.conclusion.svars();
        if let Premises::Finite(ps) = &self.premises {
            for p in ps {
                f.extend(p.fvars());
                s.extend(p.svars());
            }
        }
        (f, s)
    }

    pub fn conclusion_of(&self, inst: &Instantiation) -> Result<Sequent, RuleError> {
        if self.kind == RuleKind::Identity {
            let a = inst
                .fmap
                .get("a")
                .ok_or_else(|| RuleError::MissingBinding("a".into()))?;
            if !a.is_var() {
                return Err(RuleError::NotAVariable(a.to_string()));
            }
        }
        self.conclusion.instantiate(inst)
    }

    pub fn premise_of(&self, inst: &Instantiation, n: usize) -> Result<Sequent, RuleError> {
        self.premise(n)?.instantiate(inst)
    }

    /// Ground occurrence of the principal formula under `inst`.
    pub fn principal_pos(&self, inst: &Instantiation) -> Result<Option<OccurrencePos>, RuleError> {
        match self.principal {
            None => Ok(None),
            Some(SchemaPos::Succ) => Ok(Some(OccurrencePos::Succ)),
            Some(SchemaPos::Item(i)) => {
                let lay = self.conclusion.layout(inst)?;
                Ok(Some(OccurrencePos::Ante(lay[i].0)))
            }
        }
    }

    pub fn display_schema(&self) -> String {
        let mut out = format!("rule {}:\n", self.name);
        match &self.premises {
            Premises::Finite(ps) => {
                for p in ps {
                    out.push_str(&format!("  {p}\n"));
                }
            }
            Premises::OmegaStandard => out.push_str("  (Gamma, alpha^(n), Delta |- beta)_n\n"),
            Premises::OmegaModified => out.push_str(
                "  Gamma, Delta |- beta\n  (Gamma, alpha, alpha^i, Delta |- beta)_i\n",
            ),
        }
        out.push_str("  ----\n");
        out.push_str(&format!("  {}\n", self.conclusion));
        out
    }
}

/// `instantiate(rule, inst)`: premises then conclusion, for rules with
/// finitely many premises.
pub fn instantiate(rule: &Rule, inst: &Instantiation) -> Result<RuleInstance, RuleError> {
    let n = rule.arity().ok_or(RuleError::Classification {
        rule: rule.name.clone(),
        wanted: "finitary",
    })?;
    let premises = (0..n)
        .map(|i| rule.premise_of(inst, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RuleInstance {
        premises,
        conclusion: rule.conclusion_of(inst)?,
    })
}

// ---------------------------------------------------------------------------
// Built-in rules
// ---------------------------------------------------------------------------

fn sv(s: &str) -> MetaItem {
    MetaItem::SVar(s.to_string())
}

fn fi(m: MetaFormula) -> MetaItem {
    MetaItem::Form(m)
}

fn ms(lhs: Vec<MetaItem>, rhs: MetaFormula) -> MetaSequent {
    MetaSequent { lhs, rhs }
}

fn principal_rule(
    name: &str,
    premises: Vec<(MetaSequent, Vec<SchemaPos>)>,
    conclusion: MetaSequent,
    principal: SchemaPos,
) -> Rule {
    let (ps, aux): (Vec<_>, Vec<_>) = premises.into_iter().unzip();
    Rule {
        name: name.to_string(),
        kind: RuleKind::Principal,
        premises: Premises::Finite(ps),
        conclusion,
        principal: Some(principal),
        auxiliary: aux,
        slots: None,
    }
}

fn structural_rule(name: &str, premises: Vec<MetaSequent>, conclusion: MetaSequent) -> Rule {
    let n = premises.len();
    Rule {
        name: name.to_string(),
        kind: RuleKind::Structural,
        premises: Premises::Finite(premises),
        conclusion,
        principal: None,
        auxiliary: vec![vec![]; n],
        slots: None,
    }
}

/// Canonical ASCII name for a rule name that may use unicode spellings.
pub fn canonical_name(name: &str) -> String {
    let mut s = String::new();
    for c in name.chars() {
        match c {
            '∧' => s.push('&'),
            '∨' => s.push('|'),
            '·' => s.push('.'),
            '⧵' | '∖' => s.push('\\'),
            '⧸' => s.push('/'),
            '₀' => s.push('0'),
            '₁' => s.push('1'),
            'ω' => s.push('w'),
            '′' => s.push('\''),
            ' ' => {}
            c => s.push(c),
        }
    }
    s
}

/// Every principal rule, the identity axiom, `·L+1` and the modified ω-rule.
pub fn builtin_rules() -> Vec<Rule> {
    use MetaFormula as M;
    use SchemaPos::{Item, Succ};
    let g = || sv("Gamma");
    let d = || sv("Delta");
    let s = || sv("Sigma");
    let a = || fv("alpha");
    let a0 = || fv("alpha0");
    let a1 = || fv("alpha1");
    let b = || fv("beta");
    let b0 = || fv("beta0");
    let b1 = || fv("beta1");
    let mut out = vec![Rule {
        name: "id".into(),
        kind: RuleKind::Identity,
        premises: Premises::Finite(vec![]),
        conclusion: ms(vec![fi(fv("a"))], fv("a")),
        principal: None,
        auxiliary: vec![],
        slots: None,
    }];
    out.push(principal_rule(
        "0L",
        vec![],
        ms(vec![g(), fi(M::Zero), d()], b()),
        Item(1),
    ));
    out.push(principal_rule(
        "1L",
        vec![(ms(vec![g(), d()], b()), vec![])],
        ms(vec![g(), fi(M::One), d()], b()),
        Item(1),
    ));
    out.push(principal_rule("1R", vec![], ms(vec![], M::One), Succ));
    for (i, ai) in [("&L0", a0()), ("&L1", a1())] {
        out.push(principal_rule(
            i,
            vec![(ms(vec![g(), fi(ai), d()], b()), vec![Item(1)])],
            ms(vec![g(), fi(M::Meet(bx(a0()), bx(a1()))), d()], b()),
            Item(1),
        ));
    }
    out.push(principal_rule(
        "&R",
        vec![
            (ms(vec![g()], b0()), vec![Succ]),
            (ms(vec![g()], b1()), vec![Succ]),
        ],
        ms(vec![g()], M::Meet(bx(b0()), bx(b1()))),
        Succ,
    ));
    out.push(principal_rule(
        "|L",
        vec![
            (ms(vec![g(), fi(a0()), d()], b()), vec![Item(1)]),
            (ms(vec![g(), fi(a1()), d()], b()), vec![Item(1)]),
        ],
        ms(vec![g(), fi(M::Join(bx(a0()), bx(a1()))), d()], b()),
        Item(1),
    ));
    for (i, bi) in [("|R0", b0()), ("|R1", b1())] {
        out.push(principal_rule(
            i,
            vec![(ms(vec![g()], bi), vec![Succ])],
            ms(vec![g()], M::Join(bx(b0()), bx(b1()))),
            Succ,
        ));
    }
    out.push(principal_rule(
        ".L",
        vec![(ms(vec![g(), fi(a0()), fi(a1()), d()], b()), vec![Item(1), Item(2)])],
        ms(vec![g(), fi(M::Prod(bx(a0()), bx(a1()))), d()], b()),
        Item(1),
    ));
    out.push(principal_rule(
        ".R",
        vec![
            (ms(vec![g()], b0()), vec![Succ]),
            (ms(vec![d()], b1()), vec![Succ]),
        ],
        ms(vec![g(), d()], M::Prod(bx(b0()), bx(b1()))),
        Succ,
    ));
    out.push(principal_rule(
        "\\L",
        vec![
            (ms(vec![d()], a0()), vec![Succ]),
            (ms(vec![g(), fi(a1()), s()], b()), vec![Item(1)]),
        ],
        ms(vec![g(), d(), fi(M::LRes(bx(a0()), bx(a1()))), s()], b()),
        Item(2),
    ));
    out.push(principal_rule(
        "/L",
        vec![
            (ms(vec![d()], a0()), vec![Succ]),
            (ms(vec![g(), fi(a1()), s()], b()), vec![Item(1)]),
        ],
        ms(vec![g(), fi(M::RRes(bx(a1()), bx(a0()))), d(), s()], b()),
        Item(1),
    ));
    out.push(principal_rule(
        "\\R",
        vec![(ms(vec![fi(b0()), g()], b1()), vec![Item(0), Succ])],
        ms(vec![g()], M::LRes(bx(b0()), bx(b1()))),
        Succ,
    ));
    out.push(principal_rule(
        "/R",
        vec![(ms(vec![g(), fi(b0())], b1()), vec![Item(1), Succ])],
        ms(vec![g()], M::RRes(bx(b1()), bx(b0()))),
        Succ,
    ));
    out.push(principal_rule("*R0", vec![], ms(vec![], M::Star(bx(b()))), Succ));
    out.push(principal_rule(
        "*R1",
        vec![
            (ms(vec![g()], b()), vec![Succ]),
            (ms(vec![d()], M::Star(bx(b()))), vec![Succ]),
        ],
        ms(vec![g(), d()], M::Star(bx(b()))),
        Succ,
    ));
    out.push(principal_rule(
        "*L",
        vec![
            (ms(vec![g(), d()], b()), vec![]),
            (
                ms(vec![g(), fi(a()), fi(M::Star(bx(a()))), d()], b()),
                vec![Item(1), Item(2)],
            ),
        ],
        ms(vec![g(), fi(M::Star(bx(a()))), d()], b()),
        Item(1),
    ));
    let star_concl = ms(vec![g(), fi(M::Star(bx(a()))), d()], b());
    out.push(Rule {
        name: "*Lw".into(),
        kind: RuleKind::Principal,
        premises: Premises::OmegaStandard,
        conclusion: star_concl.clone(),
        principal: Some(Item(1)),
        auxiliary: vec![],
        slots: None,
    });
    out.push(Rule {
        name: "*Lw'".into(),
        kind: RuleKind::Principal,
        premises: Premises::OmegaModified,
        conclusion: star_concl,
        principal: Some(Item(1)),
        auxiliary: vec![],
        slots: None,
    });
    let mut dot1 = principal_rule(
        ".L+1",
        vec![(ms(vec![g(), fi(a0()), fi(a1()), d()], b()), vec![Item(1), Item(2)])],
        ms(vec![g(), fi(M::Prod(bx(a0()), bx(a1()))), d()], b()),
        Item(1),
    );
    dot1.slots = Some(vec![1]);
    out.push(dot1);
    out
}

/// The structural rules `Cut`, `c`, `C`, `e`, `Wk` and the sequence
/// exchange `E`.
pub fn structural_library() -> Vec<Rule> {
    let g = || sv("Gamma");
    let d = || sv("Delta");
    let p = || sv("Pi");
    let s = || sv("Sigma");
    let a = || fi(fv("alpha"));
    let b = || fv("beta");
    vec![
        structural_rule(
            "Cut",
            vec![ms(vec![d()], fv("alpha")), ms(vec![g(), a(), p()], b())],
            ms(vec![g(), d(), p()], b()),
        ),
        structural_rule(
            "c",
            vec![ms(vec![g(), a(), a(), d()], b())],
            ms(vec![g(), a(), d()], b()),
        ),
        structural_rule(
            "C",
            vec![ms(vec![g(), p(), p(), d()], b())],
            ms(vec![g(), p(), d()], b()),
        ),
        structural_rule(
            "e",
            vec![ms(vec![g(), a(), fi(fv("beta")), d()], fv("gamma"))],
            ms(vec![g(), fi(fv("beta")), a(), d()], fv("gamma")),
        ),
        structural_rule(
            "Wk",
            vec![ms(vec![g(), d()], b())],
            ms(vec![g(), p(), d()], b()),
        ),
        structural_rule(
            "E",
            vec![ms(vec![g(), p(), s(), d()], b())],
            ms(vec![g(), s(), p(), d()], b()),
        ),
    ]
}

/// A named collection of rules.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    rules: BTreeMap<String, Arc<Rule>>,
    /// Non-built-in rules in load order.
    pub extra: Vec<String>,
}

impl RuleSet {
    /// Built-in principal rules only.
    pub fn builtin() -> RuleSet {
        let mut rs = RuleSet::default();
        for r in builtin_rules() {
            rs.rules.insert(r.name.clone(), Arc::new(r));
        }
        rs
    }

    /// Built-ins plus the named rules of the structural library.
    pub fn with_structural(names: &[&str]) -> Result<RuleSet, RuleError> {
        let mut rs = RuleSet::builtin();
        let lib = structural_library();
        for n in names {
            let r = lib
                .iter()
                .find(|r| r.name == *n)
                .ok_or_else(|| RuleError::UnknownRule(n.to_string()))?;
            rs.add(r.clone());
        }
        Ok(rs)
    }

    pub fn add(&mut self, rule: Rule) {
        if !self.extra.contains(&rule.name) {
            self.extra.push(rule.name.clone());
        }
        self.rules.insert(rule.name.clone(), Arc::new(rule));
    }

    pub fn get(&self, name: &str) -> Option<Arc<Rule>> {
        self.rules
            .get(name)
            .or_else(|| self.rules.get(&canonical_name(name)))
            .cloned()
    }

    pub fn require(&self, name: &str) -> Result<Arc<Rule>, RuleError> {
        self.get(name)
            .ok_or_else(|| RuleError::UnknownRule(name.to_string()))
    }

    pub fn extra_rules(&self) -> Vec<Arc<Rule>> {
        self.extra.iter().filter_map(|n| self.get(n)).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.rules.keys().cloned().collect()
    }
}

/// A shared rule from the built-ins or the structural library.
///
/// Panics on unknown names; intended for names fixed in source.
pub fn builtin(name: &str) -> Arc<Rule> {
    static ALL: OnceLock<BTreeMap<String, Arc<Rule>>> = OnceLock::new();
    let all = ALL.get_or_init(|| {
        builtin_rules()
            .into_iter()
            .chain(structural_library())
            .map(|r| (r.name.clone(), Arc::new(r)))
            .collect()
    });
    all.get(&canonical_name(name))
        .cloned()
        .unwrap_or_else(|| panic!("unknown built-in rule `{name}`"))
}

/// Look a rule up among the built-ins and the structural library.
pub fn lookup(name: &str) -> Option<Rule> {
    let n = canonical_name(name);
    builtin_rules()
        .into_iter()
        .chain(structural_library())
        .find(|r| r.name == n)
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// All instantiations whose conclusion is exactly `goal`.
pub fn match_conclusion(rule: &Rule, goal: &Sequent) -> Result<Vec<Instantiation>, RuleError> {
    match_conclusion_capped(rule, goal, DEFAULT_MATCH_CAP)
}

pub fn match_conclusion_capped(
    rule: &Rule,
    goal: &Sequent,
    cap: usize,
) -> Result<Vec<Instantiation>, RuleError> {
    if rule.kind == RuleKind::Identity {
        if goal.len() == 1 && goal.antecedent[0] == goal.succedent && goal.succedent.is_var() {
            return Ok(vec![Instantiation::new().f("a", goal.succedent.clone())]);
        }
        return Ok(vec![]);
    }
    let mut inst = Instantiation::new();
    if !rule.conclusion.rhs.match_into(&goal.succedent, &mut inst.fmap) {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut counter = 0usize;
    match_items(
        &rule.conclusion.lhs,
        &goal.antecedent,
        inst,
        &mut out,
        &mut counter,
        cap,
    )?;
    Ok(out)
}

fn match_items(
    items: &[MetaItem],
    rest: &[Formula],
    inst: Instantiation,
    out: &mut Vec<Instantiation>,
    counter: &mut usize,
    cap: usize,
) -> Result<(), RuleError> {
    *counter += 1;
    if *counter > cap {
        return Err(RuleError::MatchCap(cap));
    }
    let Some((first, tail)) = items.split_first() else {
        if rest.is_empty() {
            out.push(inst);
        }
        return Ok(());
    };
    match first {
        MetaItem::Form(m) => {
            let Some((f, more)) = rest.split_first() else {
                return Ok(());
            };
            let mut next = inst;
            if m.match_into(f, &mut next.fmap) {
                match_items(tail, more, next, out, counter, cap)?;
            }
        }
        MetaItem::SVar(s) => {
            if let Some(bound) = inst.smap.get(s) {
                if rest.starts_with(bound) {
                    let n = bound.len();
                    match_items(tail, &rest[n..], inst, out, counter, cap)?;
                }
                return Ok(());
            }
            // Items to the right that consume exactly one formula bound the split.
            let min_rest = tail
                .iter()
                .filter(|i| matches!(i, MetaItem::Form(_)))
                .count();
            if rest.len() < min_rest {
                return Ok(());
            }
            for len in 0..=(rest.len() - min_rest) {
                let mut next = inst.clone();
                next.smap.insert(s.clone(), rest[..len].to_vec());
                match_items(tail, &rest[len..], next, out, counter, cap)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ancestry
// ---------------------------------------------------------------------------

/// Immediate-ancestor pairs `(premise occurrence, conclusion occurrence)` for
/// premise `premise` of the instance of `rule` under `inst`.
pub fn ancestry(
    rule: &Rule,
    inst: &Instantiation,
    premise: usize,
) -> Result<Vec<(OccurrencePos, OccurrencePos)>, RuleError> {
    if rule.kind == RuleKind::Identity {
        return Ok(vec![]);
    }
    let pm = rule.premise(premise)?;
    let cm = &rule.conclusion;
    let play = pm.layout(inst)?;
    let clay = cm.layout(inst)?;
    let ppos = |sp: SchemaPos| match sp {
        SchemaPos::Succ => OccurrencePos::Succ,
        SchemaPos::Item(i) => OccurrencePos::Ante(play[i].0),
    };
    let mut out = BTreeSet::new();
    // Clause 1: auxiliary to principal.
    if let Some(pr) = rule.principal {
        let cpos = match pr {
            SchemaPos::Succ => OccurrencePos::Succ,
            SchemaPos::Item(i) => OccurrencePos::Ante(clay[i].0),
        };
        for aux in rule.auxiliary_of(premise) {
            out.insert((ppos(aux), cpos));
        }
    }
    // Clause 2: bare occurrences of the same formula metavariable.
    let bare = |m: &MetaSequent, lay: &[(usize, usize)]| {
        let mut v: Vec<(String, OccurrencePos)> = Vec::new();
        for (i, item) in m.lhs.iter().enumerate() {
            if let MetaItem::Form(MetaFormula::FVar(n)) = item {
                v.push((n.clone(), OccurrencePos::Ante(lay[i].0)));
            }
        }
        if let MetaFormula::FVar(n) = &m.rhs {
            v.push((n.clone(), OccurrencePos::Succ));
        }
        v
    };
    let pb = bare(&pm, &play);
    let cb = bare(cm, &clay);
    for (pn, pp) in &pb {
        for (cn, cp) in &cb {
            if pn == cn {
                out.insert((*pp, *cp));
            }
        }
    }
    // Clause 3: same sequence metavariable, same position inside its image.
    for (pi, pitem) in pm.lhs.iter().enumerate() {
        let MetaItem::SVar(ps) = pitem else { continue };
        for (ci, citem) in cm.lhs.iter().enumerate() {
            if let MetaItem::SVar(cs) = citem {
                if ps == cs {
                    let (pstart, len) = play[pi];
                    let (cstart, _) = clay[ci];
                    for j in 0..len {
                        out.insert((OccurrencePos::Ante(pstart + j), OccurrencePos::Ante(cstart + j)));
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Classification and quasiequations
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub structural: bool,
    pub linear: bool,
    pub analytic: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v = Vec::new();
        for (flag, name) in [
            (self.structural, "structural"),
            (self.linear, "linear"),
            (self.analytic, "analytic"),
        ] {
            v.push(if flag {
                name.to_string()
            } else {
                format!("not {name}")
            });
        }
        f.write_str(&v.join(", "))
    }
}

fn structural_shape(m: &MetaSequent) -> bool {
    m.rhs.is_fvar().is_some()
        && m.lhs.iter().all(|i| match i {
            MetaItem::SVar(_) => true,
            MetaItem::Form(f) => f.is_fvar().is_some(),
        })
}

/// Decomposition of an analytic rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticShape {
    pub gamma: String,
    pub delta: String,
    pub beta: String,
    pub upsilon: Vec<String>,
    pub premises: Vec<Vec<String>>,
}

pub fn classify(rule: &Rule) -> Classification {
    let structural = rule.kind == RuleKind::Structural
        && rule.principal.is_none()
        && match &rule.premises {
            Premises::Finite(ps) => {
                ps.iter().all(structural_shape) && structural_shape(&rule.conclusion)
            }
            _ => false,
        };
    let linear = structural && {
        let mut seen = BTreeSet::new();
        rule.conclusion.lhs.iter().all(|i| match i {
            MetaItem::SVar(s) => seen.insert(s.clone()),
            MetaItem::Form(_) => false,
        })
    };
    let analytic = linear && analytic_shape(rule).is_some();
    Classification {
        structural,
        linear,
        analytic,
    }
}

pub fn analytic_shape(rule: &Rule) -> Option<AnalyticShape> {
    let c = &rule.conclusion;
    if c.lhs.len() < 2 {
        return None;
    }
    let names: Vec<String> = c
        .lhs
        .iter()
        .map(|i| match i {
            MetaItem::SVar(s) => Some(s.clone()),
            MetaItem::Form(_) => None,
        })
        .collect::<Option<Vec<_>>>()?;
    let gamma = names[0].clone();
    let delta = names[names.len() - 1].clone();
    let upsilon = names[1..names.len() - 1].to_vec();
    let beta = c.rhs.is_fvar()?.to_string();
    let Premises::Finite(ps) = &rule.premises else {
        return None;
    };
    let mut premises = Vec::new();
    for p in ps {
        if p.rhs.is_fvar() != Some(beta.as_str()) || p.lhs.len() < 2 {
            return None;
        }
        let items: Vec<String> = p
            .lhs
            .iter()
            .map(|i| match i {
                MetaItem::SVar(s) => Some(s.clone()),
                MetaItem::Form(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        if items[0] != gamma || items[items.len() - 1] != delta {
            return None;
        }
        let mid = items[1..items.len() - 1].to_vec();
        if !mid.iter().all(|m| upsilon.contains(m)) {
            return None;
        }
        premises.push(mid);
    }
    Some(AnalyticShape {
        gamma,
        delta,
        beta,
        upsilon,
        premises,
    })
}

/// Variable standing for a metavariable in `t(Υ)`.
pub fn mangle(name: &str) -> String {
    format!("x_{name}")
}

fn item_name(item: &MetaItem) -> Option<&str> {
    match item {
        MetaItem::SVar(s) => Some(s),
        MetaItem::Form(MetaFormula::FVar(s)) => Some(s),
        MetaItem::Form(_) => None,
    }
}

/// `t(Υ)`: the product of the variables for `Υ`, or `1` when empty.
pub fn t_term(items: &[MetaItem]) -> Option<Formula> {
    let vars = items
        .iter()
        .map(|i| item_name(i).map(|n| Formula::var(mangle(n))))
        .collect::<Option<Vec<_>>>()?;
    Some(product_of(&vars))
}

fn t_names(names: &[String]) -> Formula {
    let vars: Vec<Formula> = names.iter().map(|n| Formula::var(mangle(n))).collect();
    product_of(&vars)
}

/// A quasiequation `s1 <= t1 & … & sn <= tn => s0 <= t0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quasiequation {
    pub premises: Vec<(Formula, Formula)>,
    pub conclusion: (Formula, Formula),
}

fn product_vars(f: &Formula, out: &mut Vec<String>) -> bool {
    match f {
        Formula::One => true,
        Formula::Var(v) => {
            out.push(v.clone());
            true
        }
        Formula::Prod(l, r) => product_vars(l, out) && product_vars(r, out),
        _ => false,
    }
}

impl Quasiequation {
    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |f: &Formula| {
            for v in f.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        for (l, r) in &self.premises {
            push(l);
            push(r);
        }
        push(&self.conclusion.0);
        push(&self.conclusion.1);
        out
    }

    pub fn is_analytic(&self) -> bool {
        let Formula::Var(y) = &self.conclusion.1 else {
            return false;
        };
        let mut xs = Vec::new();
        if !product_vars(&self.conclusion.0, &mut xs) {
            return false;
        }
        let distinct: BTreeSet<&String> = xs.iter().collect();
        if distinct.len() != xs.len() || xs.contains(y) {
            return false;
        }
        self.premises.iter().all(|(l, r)| {
            let mut ps = Vec::new();
            r == &self.conclusion.1 && product_vars(l, &mut ps) && ps.iter().all(|p| xs.contains(p))
        })
    }

    /// Rename variables canonically: in order of first appearance, except that
    /// the conclusion's bound comes last.
    pub fn canonical(&self) -> Quasiequation {
        let mut order = Vec::new();
        let last = match &self.conclusion.1 {
            Formula::Var(v) => Some(v.clone()),
            _ => None,
        };
        for v in self.vars() {
            if Some(&v) != last.as_ref() {
                order.push(v);
            }
        }
        if let Some(l) = last {
            order.push(l);
        }
        let names = canonical_letters(order.len());
        let map: BTreeMap<String, String> = order.into_iter().zip(names).collect();
        let ren = |f: &Formula| f.rename(&|v| map.get(v).cloned());
        Quasiequation {
            premises: self.premises.iter().map(|(l, r)| (ren(l), ren(r))).collect(),
            conclusion: (ren(&self.conclusion.0), ren(&self.conclusion.1)),
        }
    }

    pub fn parse(text: &str) -> Result<Quasiequation, ParseError> {
        let mut p = syntax::Parser::new(text)?;
        p.expect(Tok::LParen, "`(`")?;
        let mut premises = Vec::new();
        if *p.peek() != Tok::RParen {
            loop {
                premises.push(inequation(&mut p)?);
                if *p.peek() == Tok::Amp {
                    p.bump();
                } else {
                    break;
                }
            }
        }
        p.expect(Tok::RParen, "`)`")?;
        p.expect(Tok::Implies, "`=>`")?;
        let conclusion = inequation(&mut p)?;
        p.finish()?;
        Ok(Quasiequation {
            premises,
            conclusion,
        })
    }
}

fn inequation(p: &mut syntax::Parser) -> Result<(Formula, Formula), ParseError> {
    let l = p.formula()?;
    p.expect(Tok::Le, "`<=`")?;
    let r = p.bound()?;
    Ok((l, r))
}

fn canonical_letters(n: usize) -> Vec<String> {
    const BASE: [&str; 8] = ["x", "y", "z", "w", "u", "v", "s", "t"];
    (0..n)
        .map(|i| {
            if i < BASE.len() {
                BASE[i].to_string()
            } else {
                format!("x{}", i - BASE.len() + 1)
            }
        })
        .collect()
}

impl fmt::Display for Quasiequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.canonical();
        let prem: Vec<String> = q
            .premises
            .iter()
            .map(|(l, r)| format!("{} <= {}", print_formula_compact(l), print_formula_compact(r)))
            .collect();
        write!(
            f,
            "({}) => {} <= {}",
            prem.join(" & "),
            print_formula_compact(&q.conclusion.0),
            print_formula_compact(&q.conclusion.1)
        )
    }
}

/// `q(R)` for a structural rule.
pub fn q_of(rule: &Rule) -> Result<Quasiequation, RuleError> {
    if !classify(rule).structural {
        return Err(RuleError::Classification {
            rule: rule.name.clone(),
            wanted: "structural",
        });
    }
    let Premises::Finite(ps) = &rule.premises else {
        unreachable!("structural rules are finitary")
    };
    let side = |m: &MetaSequent| -> (Formula, Formula) {
        let rhs = Formula::var(mangle(m.rhs.is_fvar().expect("structural rhs")));
        (t_term(&m.lhs).expect("structural lhs"), rhs)
    };
    Ok(Quasiequation {
        premises: ps.iter().map(side).collect(),
        conclusion: side(&rule.conclusion),
    })
}

/// `q_a(R)` for an analytic rule: the context is forgotten.
pub fn q_a_of(rule: &Rule) -> Result<Quasiequation, RuleError> {
    let shape = analytic_shape(rule)
        .filter(|_| classify(rule).analytic)
        .ok_or_else(|| RuleError::Classification {
            rule: rule.name.clone(),
            wanted: "analytic",
        })?;
    let y = Formula::var(mangle(&shape.beta));
    Ok(Quasiequation {
        premises: shape
            .premises
            .iter()
            .map(|p| (t_names(p), y.clone()))
            .collect(),
        conclusion: (t_names(&shape.upsilon), y),
    })
}

/// `α0 <= α1 | … | αn` for an analytic quasiequation.
pub fn analytic_qe_to_equation(q: &Quasiequation) -> Result<(Formula, Formula), RuleError> {
    if !q.is_analytic() {
        return Err(RuleError::NotAnalytic);
    }
    let lhss: Vec<Formula> = q.premises.iter().map(|(l, _)| l.clone()).collect();
    let rhs = syntax::join_of(&lhss).ok_or(RuleError::EmptyJoin)?;
    Ok((q.conclusion.0.clone(), rhs))
}

// ---------------------------------------------------------------------------
// Rule files
// ---------------------------------------------------------------------------

fn to_meta_sequent(s: &Sequent, line: usize) -> Result<MetaSequent, RuleError> {
    let is_upper = |v: &str| v.chars().next().is_some_and(|c| c.is_ascii_uppercase());
    let err = |message: String| RuleError::File { line, message };
    let mut lhs = Vec::new();
    for f in &s.antecedent {
        match f {
            Formula::Var(v) if is_upper(v) => lhs.push(MetaItem::SVar(v.clone())),
            other => {
                if other.vars().iter().any(|v| is_upper(v)) {
                    return Err(err(format!(
                        "sequence metavariable inside a formula in `{other}`"
                    )));
                }
                lhs.push(MetaItem::Form(MetaFormula::from_formula(other)));
            }
        }
    }
    if s.succedent.vars().iter().any(|v| is_upper(v)) {
        return Err(err("sequence metavariable in succedent".into()));
    }
    Ok(MetaSequent {
        lhs,
        rhs: MetaFormula::from_formula(&s.succedent),
    })
}

/// Parse a rule file. Every rule must be structural.
pub fn parse_rule_file(text: &str) -> Result<Vec<Rule>, RuleError> {
    let mut rules = Vec::new();
    let mut current: Option<(String, usize, Vec<MetaSequent>, bool, Option<MetaSequent>)> = None;
    let finish = |cur: (String, usize, Vec<MetaSequent>, bool, Option<MetaSequent>)| -> Result<Rule, RuleError> {
        let (name, line, premises, _, concl) = cur;
        let conclusion = concl.ok_or_else(|| RuleError::File {
            line,
            message: format!("rule `{name}` has no conclusion"),
        })?;
        let rule = structural_rule(&name, premises, conclusion);
        if !classify(&rule).structural {
            return Err(RuleError::File {
                line,
                message: format!("rule `{name}` is not structural"),
            });
        }
        Ok(rule)
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("rule ") {
            if let Some(cur) = current.take() {
                rules.push(finish(cur)?);
            }
            let name = rest.trim().trim_end_matches(':').trim().to_string();
            if name.is_empty() {
                return Err(RuleError::File {
                    line,
                    message: "missing rule name".into(),
                });
            }
            current = Some((name, line, Vec::new(), false, None));
            continue;
        }
        let Some(cur) = current.as_mut() else {
            return Err(RuleError::File {
                line,
                message: "expected `rule NAME:`".into(),
            });
        };
        if body.chars().all(|c| c == '-') && body.len() >= 2 {
            if cur.3 {
                return Err(RuleError::File {
                    line,
                    message: "second separator".into(),
                });
            }
            cur.3 = true;
            continue;
        }
        let s = syntax::parse_sequent(body).map_err(|e| RuleError::File {
            line,
            message: e.to_string(),
        })?;
        let m = to_meta_sequent(&s, line)?;
        if cur.3 {
            if cur.4.is_some() {
                return Err(RuleError::File {
                    line,
                    message: "more than one conclusion".into(),
                });
            }
            cur.4 = Some(m);
        } else {
            cur.2.push(m);
        }
    }
    if let Some(cur) = current.take() {
        rules.push(finish(cur)?);
    }
    Ok(rules)
}

/// Render rules in the file format accepted by [`parse_rule_file`].
pub fn print_rule_file(rules: &[Rule]) -> String {
    rules.iter().map(|r| r.display_schema()).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{f, seq};

    fn rule(name: &str) -> Rule {
        lookup(name).unwrap()
    }

    #[test]
    fn lookups() {
        let r = rule("∧R");
        assert_eq!(r.arity(), Some(2));
        assert_eq!(r.conclusion.to_string(), "Gamma |- beta0 & beta1");
        assert_eq!(rule("*R₀").conclusion.to_string(), "|- beta*");
        assert!(lookup("nope").is_none());
        assert_eq!(rule("·L+1").slots, Some(vec![1]));
    }

    #[test]
    fn identity_instances() {
        let id = rule("id");
        let ok = Instantiation::new().f("a", f("p"));
        assert_eq!(id.conclusion_of(&ok).unwrap(), seq("p |- p"));
        let bad = Instantiation::new().f("a", f("p . q"));
        assert!(matches!(id.conclusion_of(&bad), Err(RuleError::NotAVariable(_))));
        assert_eq!(match_conclusion(&id, &seq("p |- p")).unwrap().len(), 1);
        assert!(match_conclusion(&id, &seq("p* |- p*")).unwrap().is_empty());
    }

    #[test]
    fn instantiation_examples() {
        let inst = Instantiation::new()
            .s("Gamma", vec![f("a")])
            .f("beta0", f("b"))
            .f("beta1", f("c"));
        let i = instantiate(&rule("&R"), &inst).unwrap();
        assert_eq!(i.premises, vec![seq("a |- b"), seq("a |- c")]);
        assert_eq!(i.conclusion, seq("a |- b & c"));
        let one = instantiate(&rule("1R"), &Instantiation::new()).unwrap();
        assert_eq!(one.conclusion, seq("|- 1"));
        let wk = Instantiation::new()
            .s("Gamma", vec![])
            .s("Pi", vec![f("p"), f("q")])
            .s("Delta", vec![f("r")])
            .f("beta", f("s"));
        let i = instantiate(&rule("Wk"), &wk).unwrap();
        assert_eq!(i.premises, vec![seq("r |- s")]);
        assert_eq!(i.conclusion, seq("p, q, r |- s"));
        let missing = instantiate(&rule("Wk"), &Instantiation::new());
        assert!(matches!(missing, Err(RuleError::MissingBinding(_))));
    }

    /// Count matches of `rule` against `goal` by trying every split of the
    /// antecedent into the rule's items independently of the matcher.
    fn brute_force_count(rule: &Rule, goal: &Sequent) -> usize {
        fn splits(n: usize, parts: usize) -> Vec<Vec<usize>> {
            if parts == 0 {
                return if n == 0 { vec![vec![]] } else { vec![] };
            }
            let mut out = Vec::new();
            for k in 0..=n {
                for mut rest in splits(n - k, parts - 1) {
                    rest.insert(0, k);
                    out.push(rest);
                }
            }
            out
        }
        let items = &rule.conclusion.lhs;
        let mut seen = BTreeSet::new();
        for lens in splits(goal.len(), items.len()) {
            if items
                .iter()
                .zip(&lens)
                .any(|(i, &l)| matches!(i, MetaItem::Form(_)) && l != 1)
            {
                continue;
            }
            let mut inst = Instantiation::new();
            let mut at = 0;
            let mut ok = true;
            for (item, &l) in items.iter().zip(&lens) {
                let chunk = goal.antecedent[at..at + l].to_vec();
                at += l;
                match item {
                    MetaItem::SVar(s) => {
                        if let Some(prev) = inst.smap.get(s) {
                            ok &= *prev == chunk;
                        }
                        inst.smap.insert(s.clone(), chunk);
                    }
                    MetaItem::Form(m) => ok &= m.match_into(&chunk[0], &mut inst.fmap),
                }
            }
            ok &= rule.conclusion.rhs.match_into(&goal.succedent, &mut inst.fmap);
            if ok && rule.conclusion_of(&inst).ok().as_ref() == Some(goal) {
                seen.insert(inst);
            }
        }
        seen.len()
    }

    #[test]
    fn matching_examples() {
        let goal = seq("a, b |- a . b");
        let got = match_conclusion(&rule(".R"), &goal).unwrap();
        assert_eq!(got.len(), brute_force_count(&rule(".R"), &goal));
        assert_eq!(got.len(), 3);
        assert!(match_conclusion(&rule("&R"), &seq("a |- b . c")).unwrap().is_empty());
        let wk = match_conclusion(&rule("Wk"), &seq("p |- q")).unwrap();
        assert_eq!(wk.len(), 3);
        assert_eq!(wk.len(), brute_force_count(&rule("Wk"), &seq("p |- q")));
        let stars = match_conclusion(&rule("*L"), &seq("a*, b, a* |- c")).unwrap();
        assert_eq!(stars.len(), 2);
    }

    #[test]
    fn matching_cap() {
        let goal = Sequent::new(vec![f("a"); 30], f("b"));
        assert!(matches!(
            match_conclusion_capped(&rule("E"), &goal, 1000),
            Err(RuleError::MatchCap(1000))
        ));
    }

    #[test]
    fn classification_verdicts() {
        let c = |n: &str| classify(&rule(n));
        assert_eq!(
            c("C"),
            Classification {
                structural: true,
                linear: true,
                analytic: true
            }
        );
        assert!(c("Wk").analytic);
        assert!(c("E").analytic);
        let cut = c("Cut");
        assert!(cut.structural && cut.linear && !cut.analytic);
        let small_c = c("c");
        assert!(small_c.structural && !small_c.linear && !small_c.analytic);
        assert!(!c("e").linear);
        assert!(!c(".L").structural);
    }

    #[test]
    fn t_terms() {
        assert_eq!(t_term(&[]), Some(Formula::One));
        assert_eq!(t_term(&[sv("Gamma")]), Some(f("x_Gamma")));
        assert_eq!(t_term(&[sv("Gamma"), sv("Delta")]), Some(f("x_Gamma . x_Delta")));
    }

    #[test]
    fn quasiequations() {
        assert_eq!(
            q_of(&rule("Cut")).unwrap().to_string(),
            "(x <= y & z.y.w <= u) => z.x.w <= u"
        );
        assert_eq!(q_a_of(&rule("C")).unwrap().to_string(), "(x.x <= y) => x <= y");
        assert_eq!(q_a_of(&rule("Wk")).unwrap().to_string(), "(1 <= y) => x <= y");
        assert_eq!(q_a_of(&rule("E")).unwrap().to_string(), "(x.y <= z) => y.x <= z");
        assert!(q_a_of(&rule("Cut")).is_err());
        assert!(q_of(&rule("*L")).is_err());
    }

    #[test]
    fn quasiequation_round_trip() {
        for r in ["Cut", "C", "Wk", "E", "c", "e"] {
            let q = q_of(&rule(r)).unwrap();
            let text = q.to_string();
            let back = Quasiequation::parse(&text).unwrap();
            assert_eq!(back.to_string(), text);
        }
        let q = Quasiequation::parse("(x & y <= z & 1 <= z) => x <= z").unwrap();
        assert_eq!(q.premises.len(), 2);
        assert_eq!(q.premises[0].0, f("x & y"));
    }

    #[test]
    fn equations_of_analytic_quasiequations() {
        let (l, r) = analytic_qe_to_equation(&q_a_of(&rule("C")).unwrap()).unwrap();
        assert_eq!((l, r), (f("x_Pi"), f("x_Pi . x_Pi")));
        let (l, r) = analytic_qe_to_equation(&q_a_of(&rule("Wk")).unwrap()).unwrap();
        assert_eq!((l, r), (f("x_Pi"), Formula::One));
        let two = Quasiequation::parse("(x <= y & x.x <= y) => x <= y").unwrap();
        assert_eq!(analytic_qe_to_equation(&two).unwrap().1, f("x | x . x"));
        let none = Quasiequation::parse("() => x <= y").unwrap();
        assert!(none.is_analytic());
        assert_eq!(analytic_qe_to_equation(&none), Err(RuleError::EmptyJoin));
    }

    #[test]
    fn ancestry_clauses() {
        let r = rule("&L0");
        let inst = Instantiation::new()
            .s("Gamma", vec![f("p")])
            .s("Delta", vec![])
            .f("alpha0", f("a"))
            .f("alpha1", f("b"))
            .f("beta", f("c"));
        let anc = ancestry(&r, &inst, 0).unwrap();
        use OccurrencePos::{Ante, Succ};
        assert!(anc.contains(&(Ante(1), Ante(1))));
        assert!(anc.contains(&(Ante(0), Ante(0))));
        assert!(anc.contains(&(Succ, Succ)));
        let c = rule("C");
        let inst = Instantiation::new()
            .s("Gamma", vec![])
            .s("Pi", vec![f("p"), f("q")])
            .s("Delta", vec![])
            .f("beta", f("r"));
        let anc = ancestry(&c, &inst, 0).unwrap();
        for pair in [(0, 0), (1, 1), (2, 0), (3, 1)] {
            assert!(anc.contains(&(Ante(pair.0), Ante(pair.1))));
        }
        let star = rule("*L");
        let inst = Instantiation::new()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .f("alpha", f("a"))
            .f("beta", f("a*"));
        let anc = ancestry(&star, &inst, 1).unwrap();
        assert!(anc.contains(&(Ante(0), Ante(0))));
        assert!(anc.contains(&(Ante(1), Ante(0))));
    }

    #[test]
    fn omega_premises() {
        let w = rule("*Lw");
        let inst = Instantiation::new()
            .s("Gamma", vec![f("c")])
            .s("Delta", vec![])
            .f("alpha", f("a"))
            .f("beta", f("b"));
        assert_eq!(w.premise_of(&inst, 0).unwrap(), seq("c |- b"));
        assert_eq!(w.premise_of(&inst, 2).unwrap(), seq("c, a, a |- b"));
        let m = rule("*Lw'");
        assert_eq!(m.premise_of(&inst, 0).unwrap(), seq("c |- b"));
        assert_eq!(m.premise_of(&inst, 1).unwrap(), seq("c, a, 1 |- b"));
        assert_eq!(m.premise_of(&inst, 3).unwrap(), seq("c, a, a . (a . 1) |- b"));
    }

    #[test]
    fn rule_files() {
        let text = "# exchange of blocks\nrule X:\n  Gamma, Pi, Sigma, Delta |- beta\n  ----\n  Gamma, Sigma, Pi, Delta |- beta\n\nrule K:\n  ----\n  Gamma, Delta |- beta\n";
        let rs = parse_rule_file(text).unwrap();
        assert_eq!(rs.len(), 2);
        assert!(classify(&rs[0]).analytic);
        assert_eq!(q_a_of(&rs[0]).unwrap(), q_a_of(&rule("E")).unwrap());
        let again = parse_rule_file(&print_rule_file(&rs)).unwrap();
        assert_eq!(again, rs);
        let bad = parse_rule_file("rule Y:\n  Gamma, a . b |- beta\n  ----\n  Gamma |- beta\n");
        assert!(matches!(bad, Err(RuleError::File { line: 1, .. })));
        assert!(parse_rule_file("Gamma |- beta").is_err());
    }
}
