// SPDX-License-Identifier: Apache-2.0

//! Proof objects: wellfounded proofs with ω-families, cyclic proofs, a lazy
//! expansion interface, local checking, heights and the admissible
//! transformations used by the translation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::rules::{
    builtin, MetaFormula, MetaItem, Premises, Rule, RuleError, RuleKind, Instantiation,
};
use crate::syntax::{power_seq, Formula, OccurrencePos, Sequent};

/// Default number of ω-premises inspected by bounded checks.
pub const DEFAULT_OMEGA_FUEL: usize = 5;

pub type Address = Vec<usize>;

pub fn format_address(a: &[usize]) -> String {
    if a.is_empty() {
        "ε".to_string()
    } else {
        a.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("invalid step at {}: {message}", format_address(address))]
    Violation {
        address: Address,
        premise: Option<usize>,
        expected: Option<Sequent>,
        message: String,
    },
    #[error("position {pos} of `{sequent}`: {message}")]
    Position {
        sequent: Sequent,
        pos: OccurrencePos,
        message: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

impl ProofError {
    pub fn is_resource(&self) -> bool {
        matches!(self, ProofError::Resource(_) | ProofError::Rule(RuleError::MatchCap(_)))
    }

    /// Prefix the violation address with `prefix`.
    pub fn under(self, prefix: &[usize]) -> ProofError {
        match self {
            ProofError::Violation {
                address,
                premise,
                expected,
                message,
            } => {
                let mut a = prefix.to_vec();
                a.extend(address);
                ProofError::Violation {
                    address: a,
                    premise,
                    expected,
                    message,
                }
            }
            other => other,
        }
    }
}

// ---------------------------------------------------------------------------
// Rule applications and local checking
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RuleApp {
    pub rule: Arc<Rule>,
    pub inst: Instantiation,
    pub principal: Option<OccurrencePos>,
}

impl PartialEq for RuleApp {
    fn eq(&self, other: &Self) -> bool {
        self.rule.name == other.rule.name
            && self.inst == other.inst
            && self.principal == other.principal
    }
}

impl Eq for RuleApp {}

impl RuleApp {
    /// Build an application, computing the principal occurrence.
    pub fn new(rule: Arc<Rule>, inst: Instantiation) -> Result<RuleApp, RuleError> {
        let principal = rule.principal_pos(&inst)?;
        rule.conclusion_of(&inst)?;
        Ok(RuleApp {
            rule,
            inst,
            principal,
        })
    }

    pub fn named(name: &str, inst: Instantiation) -> Result<RuleApp, RuleError> {
        RuleApp::new(builtin(name), inst)
    }

    pub fn name(&self) -> &str {
        &self.rule.name
    }

    pub fn conclusion(&self) -> Result<Sequent, RuleError> {
        self.rule.conclusion_of(&self.inst)
    }

    pub fn premise(&self, n: usize) -> Result<Sequent, RuleError> {
        self.rule.premise_of(&self.inst, n)
    }
}

/// Why a single step is not an instance of its rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalViolation {
    pub premise: Option<usize>,
    pub expected: Option<Sequent>,
    pub message: String,
}

impl fmt::Display for LocalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected `{e}`)")?;
        }
        Ok(())
    }
}

impl LocalViolation {
    fn at(self, address: &[usize]) -> ProofError {
        ProofError::Violation {
            address: address.to_vec(),
            premise: self.premise,
            expected: self.expected,
            message: self.message,
        }
    }
}

/// Check that `sequent` over `children` is an instance of `app`. For ω-rules
/// `children` lists the first premises in order.
pub fn check_local(
    sequent: &Sequent,
    app: &RuleApp,
    children: &[Sequent],
) -> Result<(), LocalViolation> {
    let v = |premise, expected, message: String| LocalViolation {
        premise,
        expected,
        message,
    };
    let concl = app
        .conclusion()
        .map_err(|e| v(None, None, format!("rule `{}`: {e}", app.name())))?;
    if &concl != sequent {
        return Err(v(
            None,
            Some(concl),
            format!("conclusion `{sequent}` does not match rule `{}`", app.name()),
        ));
    }
    let principal = app
        .rule
        .principal_pos(&app.inst)
        .map_err(|e| v(None, None, e.to_string()))?;
    if app.principal.is_some() && app.principal != principal {
        return Err(v(
            None,
            None,
            format!(
                "declared principal {} but rule `{}` is principal at {}",
                app.principal.map(|p| p.to_string()).unwrap_or_default(),
                app.name(),
                principal.map(|p| p.to_string()).unwrap_or_else(|| "none".into())
            ),
        ));
    }
    if let Some(n) = app.rule.arity() {
        if children.len() != n {
            return Err(v(
                None,
                None,
                format!(
                    "rule `{}` has {n} premises, node has {}",
                    app.name(),
                    children.len()
                ),
            ));
        }
    }
    for (i, c) in children.iter().enumerate() {
        let expected = app
            .premise(i)
            .map_err(|e| v(Some(i), None, e.to_string()))?;
        if &expected != c {
            return Err(v(
                Some(i),
                Some(expected),
                format!("premise {i} is `{c}`"),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Wellfounded proofs
// ---------------------------------------------------------------------------

type Generator = dyn Fn(usize) -> Result<WfProof, ProofError> + Send + Sync;

/// A named closed form for an ω-family, used for serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaSchema {
    pub name: String,
    pub params: serde_json::Value,
}

/// The premises of an ω-node: a total, memoized generator.
#[derive(Clone)]
pub struct OmegaFamily {
    gen: Arc<Generator>,
    cache: Arc<Mutex<HashMap<usize, Result<WfProof, ProofError>>>>,
    pub schema: Option<OmegaSchema>,
}

impl fmt::Debug for OmegaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OmegaFamily")
            .field("schema", &self.schema)
            .finish_non_exhaustive()
    }
}

impl OmegaFamily {
    pub fn new(
        gen: impl Fn(usize) -> Result<WfProof, ProofError> + Send + Sync + 'static,
    ) -> OmegaFamily {
        OmegaFamily {
            gen: Arc::new(gen),
            cache: Arc::new(Mutex::new(HashMap::new())),
            schema: None,
        }
    }

    pub fn with_schema(mut self, schema: OmegaSchema) -> OmegaFamily {
        self.schema = Some(schema);
        self
    }

    /// The `n`-th premise proof.
    pub fn get(&self, n: usize) -> Result<WfProof, ProofError> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&n) {
            return hit.clone();
        }
        let r = (self.gen)(n);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(n, r.clone());
        r
    }
}

#[derive(Clone, Debug)]
pub enum Children {
    Finite(Vec<WfProof>),
    Omega(OmegaFamily),
}

#[derive(Debug)]
pub struct WfNode {
    pub sequent: Sequent,
    pub app: RuleApp,
    pub children: Children,
}

/// A wellfounded proof; cheap to clone.
#[derive(Clone, Debug)]
pub struct WfProof(pub Arc<WfNode>);

impl WfProof {
    /// Node whose sequent is the rule's conclusion.
    pub fn by(app: RuleApp, children: Vec<WfProof>) -> Result<WfProof, ProofError> {
        let sequent = app.conclusion()?;
        Ok(WfProof::raw(sequent, app, Children::Finite(children)))
    }

    pub fn by_omega(app: RuleApp, family: OmegaFamily) -> Result<WfProof, ProofError> {
        let sequent = app.conclusion()?;
        Ok(WfProof::raw(sequent, app, Children::Omega(family)))
    }

    /// Node with an arbitrary label. Nothing is checked.
    pub fn raw(sequent: Sequent, app: RuleApp, children: Children) -> WfProof {
        WfProof(Arc::new(WfNode {
            sequent,
            app,
            children,
        }))
    }

    pub fn sequent(&self) -> &Sequent {
        &self.0.sequent
    }

    pub fn app(&self) -> &RuleApp {
        &self.0.app
    }

    pub fn children(&self) -> &Children {
        &self.0.children
    }

    pub fn rule_name(&self) -> &str {
        self.0.app.name()
    }

    pub fn has_omega(&self) -> bool {
        match &self.0.children {
            Children::Omega(_) => true,
            Children::Finite(cs) => cs.iter().any(|c| c.has_omega()),
        }
    }

    /// Child at `slot`. Finite children are reached through the rule's slot
    /// numbering; ω-children by their index.
    pub fn child(&self, slot: usize) -> Result<Option<WfProof>, ProofError> {
        match &self.0.children {
            Children::Finite(cs) => Ok(self
                .0
                .app
                .rule
                .premise_of_slot(slot)
                .and_then(|i| cs.get(i).cloned())),
            Children::Omega(fam) => fam.get(slot).map(Some),
        }
    }

    pub fn at(&self, address: &[usize]) -> Result<Option<WfProof>, ProofError> {
        let mut cur = self.clone();
        for &s in address {
            match cur.child(s)? {
                Some(c) => cur = c,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Child slots available at this node, with ω-children cut at `fuel`.
    pub fn slots(&self, omega_fuel: usize) -> Vec<usize> {
        match &self.0.children {
            Children::Finite(cs) => (0..cs.len()).map(|i| self.0.app.rule.slot(i)).collect(),
            Children::Omega(_) => (0..=omega_fuel).collect(),
        }
    }
}

/// Outcome of [`check_wf`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WfReport {
    pub nodes_checked: usize,
    pub omega_nodes: usize,
    pub bounded: bool,
    pub rules_used: BTreeSet<String>,
}

/// Check every finite node and the first `omega_fuel + 1` premises of every
/// ω-node. `*L` is not a rule of the wellfounded systems.
pub fn check_wf(p: &WfProof, omega_fuel: usize) -> Result<WfReport, ProofError> {
    let mut report = WfReport::default();
    let mut addr = Vec::new();
    check_wf_node(p, omega_fuel.max(1), &mut addr, &mut report)?;
    report.bounded = report.omega_nodes > 0;
    Ok(report)
}

fn check_wf_node(
    p: &WfProof,
    fuel: usize,
    addr: &mut Address,
    report: &mut WfReport,
) -> Result<(), ProofError> {
    report.nodes_checked += 1;
    let app = p.app();
    report.rules_used.insert(app.name().to_string());
    if app.name() == "*L" {
        return Err(ProofError::Violation {
            address: addr.clone(),
            premise: None,
            expected: None,
            message: "`*L` is not a rule of the wellfounded system".into(),
        });
    }
    match p.children() {
        Children::Finite(cs) => {
            if app.rule.is_omega() {
                return Err(ProofError::Violation {
                    address: addr.clone(),
                    premise: None,
                    expected: None,
                    message: format!("ω-rule `{}` with finitely many children", app.name()),
                });
            }
            let seqs: Vec<Sequent> = cs.iter().map(|c| c.sequent().clone()).collect();
            check_local(p.sequent(), app, &seqs).map_err(|v| v.at(addr))?;
            for (i, c) in cs.iter().enumerate() {
                addr.push(app.rule.slot(i));
                check_wf_node(c, fuel, addr, report)?;
                addr.pop();
            }
        }
        Children::Omega(fam) => {
            report.omega_nodes += 1;
            if !app.rule.is_omega() {
                return Err(ProofError::Violation {
                    address: addr.clone(),
                    premise: None,
                    expected: None,
                    message: format!("rule `{}` is not an ω-rule", app.name()),
                });
            }
            let mut kids = Vec::with_capacity(fuel + 1);
            for n in 0..=fuel {
                addr.push(n);
                let c = fam.get(n).map_err(|e| e.under(addr))?;
                addr.pop();
                kids.push(c);
            }
            let seqs: Vec<Sequent> = kids.iter().map(|c| c.sequent().clone()).collect();
            check_local(p.sequent(), app, &seqs).map_err(|v| v.at(addr))?;
            for (n, c) in kids.iter().enumerate() {
                addr.push(n);
                check_wf_node(c, fuel, addr, report)?;
                addr.pop();
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ordinals
// ---------------------------------------------------------------------------

/// An ordinal below `ω^ω` in Cantor normal form: `(exponent, coefficient)`
/// terms with strictly decreasing exponents and nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal::default()
    }

    pub fn finite(n: u64) -> Ordinal {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    /// `ω^e`.
    pub fn omega_pow(e: u32) -> Ordinal {
        Ordinal {
            terms: vec![(e, 1)],
        }
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(1)
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(&(lead, _)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .take_while(|&(e, _)| e >= lead)
            .collect();
        let mut rest = other.terms.iter().copied();
        if let Some(last) = terms.last_mut() {
            if last.0 == lead {
                last.1 += other.terms[0].1;
                rest.next();
            }
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::finite(1))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, c)| match (e, c) {
                (0, c) => c.to_string(),
                (1, 1) => "ω".to_string(),
                (1, c) => format!("ω·{c}"),
                (e, 1) => format!("ω^{e}"),
                (e, c) => format!("ω^{e}·{c}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Height {
    pub ordinal: Ordinal,
    /// Set when an ω-node was cut at the fuel, so the value is a bound.
    pub approx: bool,
}

/// Height of `p`: leaves are `0`, inner nodes one more than their highest
/// child. ω-nodes only look at their first `omega_fuel + 1` children.
pub fn height(p: &WfProof, omega_fuel: usize) -> Result<Height, ProofError> {
    let mut approx = false;
    let ordinal = height_rec(p, omega_fuel, &mut approx)?;
    Ok(Height { ordinal, approx })
}

fn height_rec(p: &WfProof, fuel: usize, approx: &mut bool) -> Result<Ordinal, ProofError> {
    let kids: Vec<WfProof> = match p.children() {
        Children::Finite(cs) => cs.clone(),
        Children::Omega(fam) => {
            *approx = true;
            (0..=fuel).map(|n| fam.get(n)).collect::<Result<_, _>>()?
        }
    };
    if kids.is_empty() {
        return Ok(Ordinal::zero());
    }
    let mut best = Ordinal::zero();
    for c in &kids {
        let h = height_rec(c, fuel, approx)?;
        if h > best {
            best = h;
        }
    }
    Ok(best.succ())
}

/// Number of nodes, with ω-nodes cut at `omega_fuel`.
pub fn node_count(p: &WfProof, omega_fuel: usize) -> Result<usize, ProofError> {
    let mut n = 1;
    for s in p.slots(omega_fuel) {
        if let Some(c) = p.child(s)? {
            n += node_count(&c, omega_fuel)?;
        }
    }
    Ok(n)
}

/// All addresses of the finite unfolding to `depth`, ω-children cut at
/// `omega_fuel`.
pub fn addresses(
    p: &WfProof,
    depth: usize,
    omega_fuel: usize,
) -> Result<BTreeSet<Address>, ProofError> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(p.clone(), Vec::new())];
    while let Some((node, addr)) = stack.pop() {
        if addr.len() < depth {
            for s in node.slots(omega_fuel) {
                if let Some(c) = node.child(s)? {
                    let mut a = addr.clone();
                    a.push(s);
                    stack.push((c, a));
                }
            }
        }
        out.insert(addr);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Identity expansion
// ---------------------------------------------------------------------------

fn app(name: &str, inst: Instantiation) -> RuleApp {
    RuleApp::named(name, inst).expect("well-formed built-in application")
}

fn node(name: &str, inst: Instantiation, children: Vec<WfProof>) -> WfProof {
    WfProof::by(app(name, inst), children).expect("well-formed built-in application")
}

/// Proof of `α ⇒ α` by recursion on `α`, with one ω-node per star.
pub fn id_expand(alpha: &Formula) -> WfProof {
    let e = Instantiation::new;
    match alpha {
        Formula::Var(_) => node("id", e().f("a", alpha.clone()), vec![]),
        Formula::Zero => node(
            "0L",
            e().s("Gamma", vec![]).s("Delta", vec![]).f("beta", Formula::Zero),
            vec![],
        ),
        Formula::One => node(
            "1L",
            e().s("Gamma", vec![]).s("Delta", vec![]).f("beta", Formula::One),
            vec![node("1R", e(), vec![])],
        ),
        Formula::Meet(a, b) => {
            let side = |name: &str, x: &Formula| {
                node(
                    name,
                    e().s("Gamma", vec![])
                        .s("Delta", vec![])
                        .f("alpha0", (**a).clone())
                        .f("alpha1", (**b).clone())
                        .f("beta", x.clone()),
                    vec![id_expand(x)],
                )
            };
            node(
                "&R",
                e().s("Gamma", vec![alpha.clone()])
                    .f("beta0", (**a).clone())
                    .f("beta1", (**b).clone()),
                vec![side("&L0", a), side("&L1", b)],
            )
        }
        Formula::Join(a, b) => {
            let side = |name: &str, x: &Formula| {
                node(
                    name,
                    e().s("Gamma", vec![x.clone()])
                        .f("beta0", (**a).clone())
                        .f("beta1", (**b).clone()),
                    vec![id_expand(x)],
                )
            };
            node(
                "|L",
                e().s("Gamma", vec![])
                    .s("Delta", vec![])
                    .f("alpha0", (**a).clone())
                    .f("alpha1", (**b).clone())
                    .f("beta", alpha.clone()),
                vec![side("|R0", a), side("|R1", b)],
            )
        }
        Formula::Prod(a, b) => {
            let r = node(
                ".R",
                e().s("Gamma", vec![(**a).clone()])
                    .s("Delta", vec![(**b).clone()])
                    .f("beta0", (**a).clone())
                    .f("beta1", (**b).clone()),
                vec![id_expand(a), id_expand(b)],
            );
            node(
                ".L",
                e().s("Gamma", vec![])
                    .s("Delta", vec![])
                    .f("alpha0", (**a).clone())
                    .f("alpha1", (**b).clone())
                    .f("beta", alpha.clone()),
                vec![r],
            )
        }
        Formula::LRes(a, b) => {
            let l = node(
                "\\L",
                e().s("Gamma", vec![])
                    .s("Delta", vec![(**a).clone()])
                    .s("Sigma", vec![])
                    .f("alpha0", (**a).clone())
                    .f("alpha1", (**b).clone())
                    .f("beta", (**b).clone()),
                vec![id_expand(a), id_expand(b)],
            );
            node(
                "\\R",
                e().s("Gamma", vec![alpha.clone()])
                    .f("beta0", (**a).clone())
                    .f("beta1", (**b).clone()),
                vec![l],
            )
        }
        Formula::RRes(b, a) => {
            // alpha = b / a
            let l = node(
                "/L",
                e().s("Gamma", vec![])
                    .s("Delta", vec![(**a).clone()])
                    .s("Sigma", vec![])
                    .f("alpha0", (**a).clone())
                    .f("alpha1", (**b).clone())
                    .f("beta", (**b).clone()),
                vec![id_expand(a), id_expand(b)],
            );
            node(
                "/R",
                e().s("Gamma", vec![alpha.clone()])
                    .f("beta0", (**a).clone())
                    .f("beta1", (**b).clone()),
                vec![l],
            )
        }
        Formula::Star(g) => star_identity(g),
    }
}

fn star_identity(gamma: &Formula) -> WfProof {
    let base = id_expand(gamma);
    let (g, b) = (gamma.clone(), base.clone());
    let fam = OmegaFamily::new(move |n| Ok(tau(&g, &b, n))).with_schema(OmegaSchema {
        name: "tau_n".into(),
        params: serde_json::json!({ "gamma": gamma.to_string() }),
    });
    let app = app(
        "*Lw",
        Instantiation::new()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .f("alpha", gamma.clone())
            .f("beta", Formula::star(gamma.clone())),
    );
    WfProof::by_omega(app, fam).expect("well-formed built-in application")
}

/// `τ_n ⊢ γ^(n) ⇒ γ*` from `n` applications of `*R1` over `*R0`, given a
/// proof `base` of `γ ⇒ γ`.
pub fn tau(gamma: &Formula, base: &WfProof, n: usize) -> WfProof {
    let mut acc = node("*R0", Instantiation::new().f("beta", gamma.clone()), vec![]);
    for k in 1..=n {
        acc = node(
            "*R1",
            Instantiation::new()
                .s("Gamma", vec![gamma.clone()])
                .s("Delta", power_seq(gamma, k - 1))
                .f("beta", gamma.clone()),
            vec![base.clone(), acc],
        );
    }
    acc
}

/// The ω-family of the identity expansion of `γ*`, as loaded from a schema.
pub fn tau_family(gamma: &Formula) -> OmegaFamily {
    match star_identity(gamma).children() {
        Children::Omega(f) => f.clone(),
        Children::Finite(_) => unreachable!("star identity is an ω-node"),
    }
}

// ---------------------------------------------------------------------------
// 0R admissibility
// ---------------------------------------------------------------------------

/// From `p ⊢ Γ ⇒ 0` build a proof of `Σl, Γ, Σr ⇒ β`.
pub fn zero_r_admit(
    p: &WfProof,
    sigma_l: &[Formula],
    sigma_r: &[Formula],
    beta: &Formula,
) -> Result<WfProof, ProofError> {
    if p.sequent().succedent != Formula::Zero {
        return Err(ProofError::Unsupported(format!(
            "`{}` does not have succedent 0",
            p.sequent()
        )));
    }
    zero_r_rec(p, sigma_l, sigma_r, beta)
}

enum PremiseRole {
    Widen,
    Keep,
}

fn zero_r_rec(
    p: &WfProof,
    sigma_l: &[Formula],
    sigma_r: &[Formula],
    beta: &Formula,
) -> Result<WfProof, ProofError> {
    let app = p.app();
    let rule = &app.rule;
    let unsupported = |why: &str| {
        ProofError::Unsupported(format!(
            "0R through rule `{}` at `{}`: {why}",
            rule.name,
            p.sequent()
        ))
    };
    if rule.kind == RuleKind::Identity {
        return Err(unsupported("identity cannot conclude 0"));
    }
    let concl = &rule.conclusion;
    let (first, last) = match (concl.lhs.first(), concl.lhs.last()) {
        (Some(MetaItem::SVar(a)), Some(MetaItem::SVar(b))) if a != b && concl.lhs.len() >= 2 => {
            (a.clone(), b.clone())
        }
        _ => return Err(unsupported("conclusion is not framed by two contexts")),
    };
    let Some(bname) = concl.rhs.is_fvar().map(str::to_string) else {
        return Err(unsupported("succedent is not a formula metavariable"));
    };
    let once = |m: &crate::rules::MetaSequent, name: &str| {
        m.lhs
            .iter()
            .filter(|i| matches!(i, MetaItem::SVar(s) if s == name))
            .count()
    };
    let lhs_has_beta = |m: &crate::rules::MetaSequent| {
        m.lhs.iter().any(|i| match i {
            MetaItem::Form(f) => {
                let mut s = BTreeSet::new();
                f.fvars(&mut s);
                s.contains(&bname)
            }
            MetaItem::SVar(_) => false,
        })
    };
    if once(concl, &first) != 1 || once(concl, &last) != 1 || lhs_has_beta(concl) {
        return Err(unsupported("contexts or succedent are repeated"));
    }
    let role = |i: usize| -> Result<PremiseRole, ProofError> {
        let m = rule.premise(i)?;
        let framed = matches!(m.lhs.first(), Some(MetaItem::SVar(s)) if *s == first)
            && matches!(m.lhs.last(), Some(MetaItem::SVar(s)) if *s == last)
            && m.lhs.len() >= 2
            && once(&m, &first) == 1
            && once(&m, &last) == 1
            && m.rhs == MetaFormula::FVar(bname.clone())
            && !lhs_has_beta(&m);
        let untouched = once(&m, &first) == 0
            && once(&m, &last) == 0
            && !m.fvars().contains(&bname);
        if framed {
            Ok(PremiseRole::Widen)
        } else if untouched {
            Ok(PremiseRole::Keep)
        } else {
            Err(unsupported("premise shares a context in an unsupported way"))
        }
    };
    let mut inst = app.inst.clone();
    let mut widened = sigma_l.to_vec();
    widened.extend(inst.smap.get(&first).cloned().unwrap_or_default());
    inst.smap.insert(first.clone(), widened);
    let mut widened = inst.smap.get(&last).cloned().unwrap_or_default();
    widened.extend(sigma_r.iter().cloned());
    inst.smap.insert(last.clone(), widened);
    inst.fmap.insert(bname.clone(), beta.clone());
    let new_app = RuleApp::new(rule.clone(), inst)?;
    match p.children() {
        Children::Finite(cs) => {
            let mut kids = Vec::with_capacity(cs.len());
            for (i, c) in cs.iter().enumerate() {
                kids.push(match role(i)? {
                    PremiseRole::Widen => zero_r_rec(c, sigma_l, sigma_r, beta)?,
                    PremiseRole::Keep => c.clone(),
                });
            }
            WfProof::by(new_app, kids)
        }
        Children::Omega(fam) => {
            for i in 0..2 {
                if !matches!(role(i)?, PremiseRole::Widen) {
                    return Err(unsupported("ω-premise is not widened"));
                }
            }
            let (fam, l, r, b) = (fam.clone(), sigma_l.to_vec(), sigma_r.to_vec(), beta.clone());
            let gen = OmegaFamily::new(move |n| zero_r_rec(&fam.get(n)?, &l, &r, &b));
            WfProof::by_omega(new_app, gen)
        }
    }
}

// ---------------------------------------------------------------------------
// Inversion of ·L and 1L
// ---------------------------------------------------------------------------

/// Rewrite the antecedent occurrence `pos` of the conclusion of `p` into
/// `repl`, peeling introductions recognized by `peel` and pushing the
/// rewrite through every context copy otherwise.
fn rewrite_at(
    p: &WfProof,
    pos: usize,
    repl: &Arc<Vec<Formula>>,
    peel: fn(&str) -> bool,
) -> Result<WfProof, ProofError> {
    let app = p.app();
    let position_error = |message: String| ProofError::Position {
        sequent: p.sequent().clone(),
        pos: OccurrencePos::Ante(pos),
        message,
    };
    if pos >= p.sequent().len() {
        return Err(position_error("no such occurrence".into()));
    }
    if app.principal == Some(OccurrencePos::Ante(pos)) && peel(app.name()) {
        return match p.children() {
            Children::Finite(cs) if cs.len() == 1 => Ok(cs[0].clone()),
            _ => Err(position_error("malformed introduction".into())),
        };
    }
    if app.rule.kind == RuleKind::Identity {
        return Err(position_error("occurrence is an identity axiom".into()));
    }
    let layout = app.rule.conclusion.layout(&app.inst)?;
    let (item, offset) = layout
        .iter()
        .enumerate()
        .find(|(_, &(start, len))| pos >= start && pos < start + len)
        .map(|(i, &(start, _))| (i, pos - start))
        .ok_or_else(|| position_error("occurrence outside the rule's items".into()))?;
    let MetaItem::SVar(svar) = &app.rule.conclusion.lhs[item] else {
        return Err(position_error(format!(
            "occurrence is an item of rule `{}` that cannot be inverted",
            app.name()
        )));
    };
    let svar = svar.clone();
    let mut inst = app.inst.clone();
    {
        let image = inst.smap.get_mut(&svar).expect("layout found the image");
        image.splice(offset..offset + 1, repl.iter().cloned());
    }
    let new_app = RuleApp::new(app.rule.clone(), inst)?;
    // Positions of every copy of the rewritten context in premise `n`,
    // rightmost first.
    let copies = {
        let rule = app.rule.clone();
        let old_inst = app.inst.clone();
        let svar = svar.clone();
        move |n: usize| -> Result<Vec<usize>, ProofError> {
            let m = rule.premise(n)?;
            let lay = m.layout(&old_inst)?;
            let mut v: Vec<usize> = m
                .lhs
                .iter()
                .zip(&lay)
                .filter(|(it, _)| matches!(it, MetaItem::SVar(s) if *s == svar))
                .map(|(_, &(start, _))| start + offset)
                .collect();
            v.reverse();
            Ok(v)
        }
    };
    match p.children() {
        Children::Finite(cs) => {
            let mut kids = Vec::with_capacity(cs.len());
            for (i, c) in cs.iter().enumerate() {
                let mut c = c.clone();
                for at in copies(i)? {
                    c = rewrite_at(&c, at, repl, peel)?;
                }
                kids.push(c);
            }
            WfProof::by(new_app, kids)
        }
        Children::Omega(fam) => {
            let (fam, repl) = (fam.clone(), repl.clone());
            let gen = OmegaFamily::new(move |n| {
                let mut c = fam.get(n)?;
                for at in copies(n)? {
                    c = rewrite_at(&c, at, &repl, peel)?;
                }
                Ok(c)
            });
            WfProof::by_omega(new_app, gen)
        }
    }
}

/// From `p ⊢ Γ, α·β, Δ ⇒ γ` with the product at `pos`, a proof of
/// `Γ, α, β, Δ ⇒ γ` that embeds into `p`.
pub fn dot_l_invert(p: &WfProof, pos: usize) -> Result<WfProof, ProofError> {
    match p.sequent().antecedent.get(pos) {
        Some(Formula::Prod(a, b)) => rewrite_at(
            p,
            pos,
            &Arc::new(vec![(**a).clone(), (**b).clone()]),
            |n| n == ".L" || n == ".L+1",
        ),
        _ => Err(ProofError::Position {
            sequent: p.sequent().clone(),
            pos: OccurrencePos::Ante(pos),
            message: "not a product".into(),
        }),
    }
}

/// From `p ⊢ Γ, 1, Δ ⇒ γ` with the unit at `pos`, a proof of `Γ, Δ ⇒ γ`.
pub fn one_l_invert(p: &WfProof, pos: usize) -> Result<WfProof, ProofError> {
    match p.sequent().antecedent.get(pos) {
        Some(Formula::One) => rewrite_at(p, pos, &Arc::new(vec![]), |n| n == "1L"),
        _ => Err(ProofError::Position {
            sequent: p.sequent().clone(),
            pos: OccurrencePos::Ante(pos),
            message: "not the unit".into(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Modified ω-rule to standard ω-rule
// ---------------------------------------------------------------------------

/// Replace `·L+1` by `·L` and every modified ω-node by a standard one.
pub fn to_standard_omega(p: &WfProof) -> Result<WfProof, ProofError> {
    let app = p.app();
    match p.children() {
        Children::Finite(cs) => {
            let kids = cs
                .iter()
                .map(to_standard_omega)
                .collect::<Result<Vec<_>, _>>()?;
            let new_app = if app.name() == ".L+1" {
                RuleApp::new(builtin(".L"), app.inst.clone())?
            } else {
                app.clone()
            };
            WfProof::by(new_app, kids)
        }
        Children::Omega(fam) => match &app.rule.premises {
            Premises::OmegaModified => {
                let g = app
                    .inst
                    .smap
                    .get(crate::rules::OMEGA_GAMMA)
                    .map(Vec::len)
                    .unwrap_or(0);
                let new_app = RuleApp::new(builtin("*Lw"), app.inst.clone())?;
                let fam = fam.clone();
                let schema = fam.schema.clone();
                let mut out = OmegaFamily::new(move |n| {
                    let mut c = to_standard_omega(&fam.get(n)?)?;
                    if n >= 1 {
                        for j in 0..n - 1 {
                            c = dot_l_invert(&c, g + 1 + j)?;
                        }
                        c = one_l_invert(&c, g + n)?;
                    }
                    Ok(c)
                });
                out.schema = schema;
                WfProof::by_omega(new_app, out)
            }
            _ => {
                let fam = fam.clone();
                let mut out = OmegaFamily::new(move |n| to_standard_omega(&fam.get(n)?));
                out.schema = fam_schema(p);
                WfProof::by_omega(app.clone(), out)
            }
        },
    }
}

fn fam_schema(p: &WfProof) -> Option<OmegaSchema> {
    match p.children() {
        Children::Omega(f) => f.schema.clone(),
        Children::Finite(_) => None,
    }
}

// ---------------------------------------------------------------------------
// Cyclic proofs
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicNode {
    pub sequent: Sequent,
    pub app: RuleApp,
    /// Children in premise order. For `·L+1` the single child is slot 1.
    pub children: Vec<String>,
}

/// A regular preproof: a finite graph of rule instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicProof {
    pub nodes: BTreeMap<String, CyclicNode>,
    pub root: String,
}

impl CyclicProof {
    pub fn node(&self, id: &str) -> Result<&CyclicNode, ProofError> {
        self.nodes
            .get(id)
            .ok_or_else(|| ProofError::Unsupported(format!("unknown node `{id}`")))
    }

    pub fn conclusion(&self) -> Result<&Sequent, ProofError> {
        Ok(&self.node(&self.root)?.sequent)
    }

    /// Child of `id` at `slot`.
    pub fn child_at_slot(&self, id: &str, slot: usize) -> Result<Option<&str>, ProofError> {
        let n = self.node(id)?;
        Ok(n.app
            .rule
            .premise_of_slot(slot)
            .and_then(|i| n.children.get(i))
            .map(String::as_str))
    }

    /// `(slot, child id)` pairs of `id`.
    pub fn edges(&self, id: &str) -> Result<Vec<(usize, String)>, ProofError> {
        let n = self.node(id)?;
        Ok(n.children
            .iter()
            .enumerate()
            .map(|(i, c)| (n.app.rule.slot(i), c.clone()))
            .collect())
    }

    pub fn reachable(&self) -> Result<BTreeSet<String>, ProofError> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.root.clone()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            for c in &self.node(&id)?.children {
                stack.push(c.clone());
            }
        }
        Ok(seen)
    }

    /// Every node is a local instance of a finitary rule and every node is
    /// reachable from the root.
    pub fn check_local_all(&self) -> Result<(), ProofError> {
        for (id, n) in &self.nodes {
            if n.app.rule.is_omega() {
                return Err(ProofError::Violation {
                    address: vec![],
                    premise: None,
                    expected: None,
                    message: format!("node `{id}` uses ω-rule `{}`", n.app.name()),
                });
            }
            let seqs = n
                .children
                .iter()
                .map(|c| self.node(c).map(|k| k.sequent.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            check_local(&n.sequent, &n.app, &seqs).map_err(|v| ProofError::Violation {
                address: vec![],
                premise: v.premise,
                expected: v.expected,
                message: format!("node `{id}`: {}", v.message),
            })?;
        }
        let reach = self.reachable()?;
        if let Some(id) = self.nodes.keys().find(|k| !reach.contains(*k)) {
            return Err(ProofError::Violation {
                address: vec![],
                premise: None,
                expected: None,
                message: format!("node `{id}` is unreachable from the root"),
            });
        }
        Ok(())
    }

    pub fn rules_used(&self) -> BTreeSet<String> {
        self.nodes.values().map(|n| n.app.name().to_string()).collect()
    }
}

// ---------------------------------------------------------------------------
// Lazy expansion
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arity {
    /// Available child slots.
    Finite(Vec<usize>),
    Omega,
}

/// On-demand view of a possibly infinite preproof.
pub trait LazyNode: Send + Sync {
    fn sequent(&self) -> Sequent;
    fn app(&self) -> RuleApp;
    fn arity(&self) -> Arity;
    fn child(&self, slot: usize) -> Result<LazyRef, ProofError>;
    /// A key identifying the subtree up to equality, when one is known.
    fn state_key(&self) -> Option<String> {
        None
    }
}

pub type LazyRef = Arc<dyn LazyNode>;

/// Follow `address` from `root`.
pub fn lazy_at(root: &LazyRef, address: &[usize]) -> Result<LazyRef, ProofError> {
    let mut cur = root.clone();
    for &s in address {
        cur = cur.child(s)?;
    }
    Ok(cur)
}

/// Slots to explore at `n`, cutting ω-nodes at `omega_fuel`.
pub fn lazy_slots(n: &LazyRef, omega_fuel: usize) -> Vec<usize> {
    match n.arity() {
        Arity::Finite(s) => s,
        Arity::Omega => (0..=omega_fuel).collect(),
    }
}

/// Addresses of the unfolding of `root` to `depth`.
pub fn lazy_addresses(
    root: &LazyRef,
    depth: usize,
    omega_fuel: usize,
) -> Result<BTreeSet<Address>, ProofError> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(root.clone(), Vec::new())];
    while let Some((n, addr)) = stack.pop() {
        if addr.len() < depth {
            for s in lazy_slots(&n, omega_fuel) {
                let mut a = addr.clone();
                a.push(s);
                stack.push((n.child(s)?, a));
            }
        }
        out.insert(addr);
    }
    Ok(out)
}

/// Check every node of the unfolding of `root` to `depth` locally.
pub fn check_lazy_local(
    root: &LazyRef,
    depth: usize,
    omega_fuel: usize,
) -> Result<usize, ProofError> {
    let mut count = 0;
    let mut stack = vec![(root.clone(), Vec::new())];
    while let Some((n, addr)) = stack.pop() {
        count += 1;
        let app = n.app();
        let slots = lazy_slots(&n, omega_fuel);
        let kids = slots
            .iter()
            .map(|&s| n.child(s))
            .collect::<Result<Vec<_>, _>>()?;
        let seqs: Vec<Sequent> = kids.iter().map(|k| k.sequent()).collect();
        check_local(&n.sequent(), &app, &seqs).map_err(|v| v.at(&addr))?;
        if addr.len() < depth {
            for (s, k) in slots.into_iter().zip(kids) {
                let mut a = addr.clone();
                a.push(s);
                stack.push((k, a));
            }
        }
    }
    Ok(count)
}

struct WfCursor(WfProof);

impl LazyNode for WfCursor {
    fn sequent(&self) -> Sequent {
        self.0.sequent().clone()
    }
    fn app(&self) -> RuleApp {
        self.0.app().clone()
    }
    fn arity(&self) -> Arity {
        match self.0.children() {
            Children::Finite(_) => Arity::Finite(self.0.slots(0)),
            Children::Omega(_) => Arity::Omega,
        }
    }
    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        match self.0.child(slot)? {
            Some(c) => Ok(Arc::new(WfCursor(c))),
            None => Err(ProofError::Unsupported(format!("no child at slot {slot}"))),
        }
    }
}

pub fn lazy_wf(p: &WfProof) -> LazyRef {
    Arc::new(WfCursor(p.clone()))
}

struct CyclicCursor {
    proof: Arc<CyclicProof>,
    id: String,
}

impl LazyNode for CyclicCursor {
    fn sequent(&self) -> Sequent {
        self.proof.nodes[&self.id].sequent.clone()
    }
    fn app(&self) -> RuleApp {
        self.proof.nodes[&self.id].app.clone()
    }
    fn arity(&self) -> Arity {
        let n = &self.proof.nodes[&self.id];
        Arity::Finite((0..n.children.len()).map(|i| n.app.rule.slot(i)).collect())
    }
    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        let id = self
            .proof
            .child_at_slot(&self.id, slot)?
            .ok_or_else(|| ProofError::Unsupported(format!("no child at slot {slot}")))?;
        Ok(Arc::new(CyclicCursor {
            proof: self.proof.clone(),
            id: id.to_string(),
        }))
    }
    fn state_key(&self) -> Option<String> {
        Some(self.id.clone())
    }
}

pub fn lazy_cyclic(p: &Arc<CyclicProof>) -> LazyRef {
    Arc::new(CyclicCursor {
        proof: p.clone(),
        id: p.root.clone(),
    })
}

/// Cursor on node `id` of `p`.
pub fn lazy_cyclic_at(p: &Arc<CyclicProof>, id: &str) -> LazyRef {
    Arc::new(CyclicCursor {
        proof: p.clone(),
        id: id.to_string(),
    })
}

/// Indented tree rendering, ω-nodes cut at `omega_fuel`.
pub fn render_tree(p: &WfProof, omega_fuel: usize, max_depth: usize) -> String {
    let mut out = String::new();
    render_rec(p, omega_fuel, max_depth, 0, None, &mut out);
    out
}

fn render_rec(
    p: &WfProof,
    fuel: usize,
    max_depth: usize,
    depth: usize,
    slot: Option<usize>,
    out: &mut String,
) {
    let indent = "  ".repeat(depth);
    let tag = slot.map(|s| format!("[{s}] ")).unwrap_or_default();
    out.push_str(&format!("{indent}{tag}{}   ({})\n", p.sequent(), p.rule_name()));
    if depth >= max_depth {
        if !p.slots(fuel).is_empty() {
            out.push_str(&format!("{indent}  ...\n"));
        }
        return;
    }
    let omega = matches!(p.children(), Children::Omega(_));
    for s in p.slots(fuel) {
        match p.child(s) {
            Ok(Some(c)) => render_rec(&c, fuel, max_depth, depth + 1, Some(s), out),
            Ok(None) => {}
            Err(e) => out.push_str(&format!("{indent}  [{s}] <error: {e}>\n")),
        }
    }
    if omega {
        out.push_str(&format!("{indent}  [{}..] ...\n", fuel + 1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{f, seq};

    #[test]
    fn local_examples() {
        let id = RuleApp::named("id", Instantiation::new().f("a", f("a"))).unwrap();
        assert!(check_local(&seq("a |- a"), &id, &[]).is_ok());
        assert!(RuleApp::named("id", Instantiation::new().f("a", f("a . b"))).is_err());
        let raw = RuleApp {
            rule: builtin("id"),
            inst: Instantiation::new().f("a", f("a . b")),
            principal: None,
        };
        assert!(check_local(&seq("a . b |- a . b"), &raw, &[]).is_err());
        let one = RuleApp::named(
            "1L",
            Instantiation::new()
                .s("Gamma", vec![f("p")])
                .s("Delta", vec![f("q")])
                .f("beta", f("r")),
        )
        .unwrap();
        assert!(check_local(&seq("p, 1, q |- r"), &one, &[seq("p, q |- r")]).is_ok());
        let err = check_local(&seq("p, 1, q |- r"), &one, &[seq("q, p |- r")]).unwrap_err();
        assert_eq!(err.premise, Some(0));
        assert_eq!(err.expected, Some(seq("p, q |- r")));
    }

    #[test]
    fn identity_expansion_checks() {
        let r = check_wf(&id_expand(&f("a")), 5).unwrap();
        assert!(!r.bounded);
        for t in ["a & b", "a | b", "a . b", "a \\ b", "b / a", "0", "1", "(a . b)* & c"] {
            let p = id_expand(&f(t));
            assert_eq!(p.sequent(), &Sequent::new(vec![f(t)], f(t)));
            check_wf(&p, 3).unwrap();
        }
        let r = check_wf(&id_expand(&f("a*")), 4).unwrap();
        assert!(r.bounded);
        assert!(r.rules_used.contains("*Lw"));
    }

    #[test]
    fn corrupted_tau_is_rejected() {
        let base = id_expand(&f("a"));
        let t1 = tau(&f("a"), &base, 1);
        let bad_app = RuleApp::named(
            "*R1",
            Instantiation::new()
                .s("Gamma", vec![f("a")])
                .s("Delta", vec![f("a")])
                .f("beta", f("a")),
        )
        .unwrap();
        let bad = WfProof::raw(
            seq("a, a |- a*"),
            bad_app,
            Children::Finite(vec![t1, base]),
        );
        match check_wf(&bad, 5) {
            Err(ProofError::Violation { address, premise, .. }) => {
                assert!(address.is_empty());
                assert_eq!(premise, Some(0));
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    /// Height counted independently: length of the longest root-to-leaf path.
    fn longest_path(p: &WfProof) -> u64 {
        let mut best = 0;
        let mut stack = vec![(p.clone(), 0u64)];
        while let Some((n, d)) = stack.pop() {
            best = best.max(d);
            if let Children::Finite(cs) = n.children() {
                for c in cs {
                    stack.push((c.clone(), d + 1));
                }
            }
        }
        best
    }

    #[test]
    fn heights() {
        let leaf = id_expand(&f("a"));
        assert_eq!(height(&leaf, 5).unwrap().ordinal, Ordinal::zero());
        let one = node(
            "1L",
            Instantiation::new()
                .s("Gamma", vec![f("a")])
                .s("Delta", vec![])
                .f("beta", f("a")),
            vec![leaf.clone()],
        );
        check_wf(&one, 1).unwrap();
        assert_eq!(height(&one, 5).unwrap().ordinal, Ordinal::finite(1));
        let t3 = tau(&f("a"), &leaf, 3);
        let h = height(&t3, 5).unwrap();
        assert!(!h.approx);
        assert_eq!(h.ordinal, Ordinal::finite(longest_path(&t3)));
        assert_eq!(h.ordinal, Ordinal::finite(3));
        let hs = height(&id_expand(&f("a*")), 4).unwrap();
        assert!(hs.approx);
        assert_eq!(hs.ordinal, Ordinal::finite(5));
    }

    #[test]
    fn ordinal_arithmetic() {
        let w = Ordinal::omega();
        assert!(Ordinal::finite(1000) < w);
        assert_eq!(Ordinal::finite(3).add(&w), w);
        assert_eq!(w.succ().to_string(), "ω + 1");
        assert_eq!(w.add(&w).to_string(), "ω·2");
        assert!(Ordinal::omega_pow(2) > w.add(&w).succ());
        assert_eq!(Ordinal::finite(2).as_finite(), Some(2));
    }

    #[test]
    fn zero_r_cases() {
        let z = node(
            "0L",
            Instantiation::new()
                .s("Gamma", vec![f("p")])
                .s("Delta", vec![f("q")])
                .f("beta", Formula::Zero),
            vec![],
        );
        let out = zero_r_admit(&z, &[f("c")], &[], &f("d")).unwrap();
        assert_eq!(out.sequent(), &seq("c, p, 0, q |- d"));
        assert_eq!(out.rule_name(), "0L");
        check_wf(&out, 3).unwrap();
        let slash = node(
            "/L",
            Instantiation::new()
                .s("Gamma", vec![])
                .s("Delta", vec![f("y")])
                .s("Sigma", vec![])
                .f("alpha0", f("y"))
                .f("alpha1", f("x . 0"))
                .f("beta", Formula::Zero),
            vec![id_expand(&f("y")), dot_zero(&f("x"))],
        );
        check_wf(&slash, 3).unwrap();
        let out = zero_r_admit(&slash, &[f("c")], &[f("e")], &f("d")).unwrap();
        assert_eq!(out.sequent(), &seq("c, x . 0 / y, y, e |- d"));
        check_wf(&out, 3).unwrap();
        assert!(Arc::ptr_eq(
            &out.child(0).unwrap().unwrap().0,
            &slash.child(0).unwrap().unwrap().0
        ));
    }

    fn dot_zero(x: &Formula) -> WfProof {
        let z = node(
            "0L",
            Instantiation::new()
                .s("Gamma", vec![x.clone()])
                .s("Delta", vec![])
                .f("beta", Formula::Zero),
            vec![],
        );
        node(
            ".L",
            Instantiation::new()
                .s("Gamma", vec![])
                .s("Delta", vec![])
                .f("alpha0", x.clone())
                .f("alpha1", Formula::Zero)
                .f("beta", Formula::Zero),
            vec![z],
        )
    }

    #[test]
    fn dot_inversion() {
        let p = id_expand(&f("a . b"));
        let q = dot_l_invert(&p, 0).unwrap();
        assert_eq!(q.sequent(), &seq("a, b |- a . b"));
        assert_eq!(q.rule_name(), ".R");
        // product inside the context of a 1L step
        let one = node(
            "1L",
            Instantiation::new()
                .s("Gamma", vec![f("a . b")])
                .s("Delta", vec![])
                .f("beta", f("a . b")),
            vec![p.clone()],
        );
        let q = dot_l_invert(&one, 0).unwrap();
        assert_eq!(q.sequent(), &seq("a, b, 1 |- a . b"));
        check_wf(&q, 3).unwrap();
        assert!(height(&q, 3).unwrap().ordinal <= height(&one, 3).unwrap().ordinal);
        assert!(dot_l_invert(&one, 1).is_err());
        let back = one_l_invert(&one, 1).unwrap();
        assert_eq!(back.sequent(), &seq("a . b |- a . b"));
    }

    #[test]
    fn inversion_through_contraction() {
        let c = builtin("C");
        let prem = node(
            "0L",
            Instantiation::new()
                .s("Gamma", vec![f("p . q"), f("p . q")])
                .s("Delta", vec![])
                .f("beta", f("r")),
            vec![],
        );
        let top = WfProof::by(
            RuleApp::new(
                c,
                Instantiation::new()
                    .s("Gamma", vec![])
                    .s("Pi", vec![f("p . q")])
                    .s("Delta", vec![f("0")])
                    .f("beta", f("r")),
            )
            .unwrap(),
            vec![prem],
        )
        .unwrap();
        check_wf(&top, 3).unwrap();
        let q = dot_l_invert(&top, 0).unwrap();
        assert_eq!(q.sequent(), &seq("p, q, 0 |- r"));
        assert_eq!(
            q.child(0).unwrap().unwrap().sequent(),
            &seq("p, q, p, q, 0 |- r")
        );
        check_wf(&q, 3).unwrap();
    }

    #[test]
    fn node_addresses() {
        let p = id_expand(&f("a & b"));
        let a = addresses(&p, 8, 3).unwrap();
        assert!(a.contains(&vec![]));
        assert!(a.contains(&vec![0, 0]));
        assert!(a.contains(&vec![1, 0]));
        assert_eq!(a.len(), node_count(&p, 3).unwrap());
        let lazy = lazy_wf(&p);
        assert_eq!(lazy_addresses(&lazy, 8, 3).unwrap(), a);
        assert_eq!(check_lazy_local(&lazy, 8, 3).unwrap(), a.len());
    }
}
