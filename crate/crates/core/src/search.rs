// SPDX-License-Identifier: Apache-2.0

//! Bounded backward proof search producing cyclic proofs, and
//! counter-model search in finite models.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::models::{holds_quasieq, refute_sequent, FiniteActionLattice, ModelError, Valuation};
use crate::proof::{CyclicNode, CyclicProof, ProofError, RuleApp};
use crate::progress::{check_cyclic, edge_relation, ProgressVerdict, TraceRel};
use crate::rules::{
    builtin, classify, match_conclusion_capped, q_a_of, q_of, Rule, RuleError, RuleKind, RuleSet,
    SchemaPos,
};
use crate::syntax::{Formula, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search bounds must be positive")]
    BadConfig,
    #[error("rule `{0}` is not linear")]
    NotLinear(String),
    #[error("rule `{0}` is not analytic")]
    NotAnalytic(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest proof depth tried by iterative deepening.
    pub depth: usize,
    /// How many ancestors are compared for back-edges.
    pub window: usize,
    /// Total goal visits.
    pub visit_cap: usize,
    /// Visits to any single sequent.
    pub goal_visit_cap: usize,
    pub with_cut: bool,
    /// Cap on instantiations per rule and goal.
    pub match_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            depth: 40,
            window: 40,
            visit_cap: 200_000,
            goal_visit_cap: 20_000,
            with_cut: false,
            match_cap: 10_000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let all = [
            self.depth,
            self.window,
            self.visit_cap,
            self.goal_visit_cap,
            self.match_cap,
        ];
        if all.contains(&0) {
            return Err(SearchError::BadConfig);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    /// Every candidate up to the depth bound failed.
    Exhausted,
    Budget,
    /// A candidate closed locally but failed the branch condition.
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(CyclicProof),
    Unknown(UnknownReason),
}

impl SearchOutcome {
    pub fn proof(&self) -> Option<&CyclicProof> {
        match self {
            SearchOutcome::Found(p) => Some(p),
            SearchOutcome::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub visits: usize,
}

/// Rule names never tried by the search.
const EXCLUDED: [&str; 3] = ["*Lw", "*Lw'", ".L+1"];

const INVERTIBLE: [&str; 6] = [".L", "1L", "\\R", "/R", "&R", "|L"];

struct Order {
    axioms: Vec<Arc<Rule>>,
    invertible: Vec<Arc<Rule>>,
    right: Vec<Arc<Rule>>,
    left: Vec<Arc<Rule>>,
    star: Option<Arc<Rule>>,
    structural: Vec<Arc<Rule>>,
    cut: Option<Arc<Rule>>,
}

fn order(rules: &RuleSet, cfg: &SearchConfig) -> Result<Order, SearchError> {
    let mut o = Order {
        axioms: vec![],
        invertible: vec![],
        right: vec![],
        left: vec![],
        star: None,
        structural: vec![],
        cut: None,
    };
    for name in rules.names() {
        let r = rules.require(&name)?;
        if EXCLUDED.contains(&name.as_str()) || r.kind == RuleKind::Structural {
            continue;
        }
        if r.arity() == Some(0) {
            o.axioms.push(r);
        } else if INVERTIBLE.contains(&name.as_str()) {
            o.invertible.push(r);
        } else if name == "*L" {
            o.star = Some(r);
        } else if r.principal == Some(SchemaPos::Succ) {
            o.right.push(r);
        } else {
            o.left.push(r);
        }
    }
    for r in rules.extra_rules() {
        if r.kind != RuleKind::Structural {
            continue;
        }
        if r.name == "Cut" {
            continue;
        }
        if !classify(&r).linear {
            return Err(SearchError::NotLinear(r.name.clone()));
        }
        o.structural.push(r);
    }
    if cfg.with_cut {
        o.cut = Some(rules.get("Cut").unwrap_or_else(|| builtin("Cut")));
    }
    Ok(o)
}

struct PathEntry {
    sequent: Sequent,
    id: usize,
    /// Trace relation of the edge to the next entry or the current goal.
    edge: TraceRel,
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    order: Order,
    cut_formulas: Vec<Formula>,
    arena: Vec<Option<CyclicNode>>,
    path: Vec<PathEntry>,
    visits: usize,
    per_goal: HashMap<Sequent, usize>,
    out_of_budget: bool,
}

/// The unique idempotent power of `r` has a progressing loop.
fn single_cycle_progresses(r: &TraceRel) -> bool {
    let mut p = r.clone();
    let mut seen = BTreeSet::new();
    for _ in 0..128 {
        if p.is_idempotent() {
            return p.has_progressing_loop();
        }
        if !seen.insert(format!("{p:?}")) {
            break;
        }
        p = p.compose(r);
    }
    // The powers of a finite relation reach an idempotent; if not found in
    // range, refuse the back-edge.
    false
}

impl<'a> Searcher<'a> {
    fn candidates(&self, goal: &Sequent) -> Vec<RuleApp> {
        let cap = self.cfg.match_cap;
        let apps = |r: &Arc<Rule>| -> Vec<RuleApp> {
            match_conclusion_capped(r, goal, cap)
                .unwrap_or_default()
                .into_iter()
                .filter_map(|i| RuleApp::new(r.clone(), i).ok())
                .collect()
        };
        let mut out = Vec::new();
        for r in &self.order.axioms {
            out.extend(apps(r));
        }
        if !out.is_empty() {
            out.truncate(1);
            return out;
        }
        for r in &self.order.invertible {
            if let Some(a) = apps(r).into_iter().next() {
                return vec![a];
            }
        }
        for r in &self.order.right {
            out.extend(apps(r));
        }
        for r in &self.order.left {
            out.extend(apps(r));
        }
        if let Some(r) = &self.order.star {
            out.extend(apps(r));
        }
        for r in &self.order.structural {
            out.extend(apps(r).into_iter().filter(|a| {
                (0..a.rule.arity().unwrap_or(0)).all(|n| a.premise(n).is_ok_and(|p| &p != goal))
            }));
        }
        if let Some(r) = &self.order.cut {
            for inst in match_conclusion_capped(r, goal, cap).unwrap_or_default() {
                for c in &self.cut_formulas {
                    let mut i = inst.clone();
                    i.fmap.insert("alpha".into(), c.clone());
                    if let Ok(a) = RuleApp::new(r.clone(), i) {
                        out.push(a);
                    }
                }
            }
        }
        out
    }

    fn back_edge(&self, goal: &Sequent) -> Option<usize> {
        let lo = self.path.len().saturating_sub(self.cfg.window);
        for j in (lo..self.path.len()).rev() {
            if &self.path[j].sequent != goal {
                continue;
            }
            let mut r = self.path[j].edge.clone();
            for e in &self.path[j + 1..] {
                r = r.compose(&e.edge);
            }
            if single_cycle_progresses(&r) {
                return Some(self.path[j].id);
            }
        }
        None
    }

    fn prove(&mut self, goal: &Sequent, depth: usize) -> Option<usize> {
        self.visits += 1;
        if self.visits > self.cfg.visit_cap {
            self.out_of_budget = true;
            return None;
        }
        if let Some(id) = self.back_edge(goal) {
            return Some(id);
        }
        if depth == 0 {
            return None;
        }
        let count = self.per_goal.entry(goal.clone()).or_insert(0);
        *count += 1;
        if *count > self.cfg.goal_visit_cap {
            self.out_of_budget = true;
            return None;
        }
        for app in self.candidates(goal) {
            let arity = app.rule.arity().unwrap_or(0);
            let Ok(premises) = (0..arity).map(|n| app.premise(n)).collect::<Result<Vec<_>, _>>()
            else {
                continue;
            };
            let id = self.arena.len();
            self.arena.push(None);
            let mut children = Vec::with_capacity(arity);
            let mut ok = true;
            for (n, p) in premises.iter().enumerate() {
                let Ok(edge) = edge_relation(goal, &app, n, p) else {
                    ok = false;
                    break;
                };
                self.path.push(PathEntry {
                    sequent: goal.clone(),
                    id,
                    edge,
                });
                let r = self.prove(p, depth - 1);
                self.path.pop();
                match r {
                    Some(c) => children.push(c),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.arena[id] = Some(CyclicNode {
                    sequent: goal.clone(),
                    app,
                    children: children.iter().map(|c| format!("n{c}")).collect(),
                });
                return Some(id);
            }
            self.arena.truncate(id);
            if self.out_of_budget {
                return None;
            }
        }
        None
    }
}

fn collect_subformulas(s: &Sequent) -> Vec<Formula> {
    let mut set: BTreeSet<Formula> = BTreeSet::new();
    for f in s.antecedent.iter().chain([&s.succedent]) {
        set.extend(f.subformulas());
    }
    let mut v: Vec<Formula> = set.into_iter().collect();
    v.sort_by_key(Formula::size);
    v
}

/// Search for a cyclic proof of `goal`. Depths are tried in doubling steps
/// up to `cfg.depth`; a closed candidate is returned only if it passes
/// [`check_cyclic`].
pub fn prove(goal: &Sequent, rules: &RuleSet, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let mut s = Searcher {
        cfg,
        order: order(rules, cfg)?,
        cut_formulas: collect_subformulas(goal),
        arena: Vec::new(),
        path: Vec::new(),
        visits: 0,
        per_goal: HashMap::new(),
        out_of_budget: false,
    };
    let mut rejected = false;
    let mut depth = 4.min(cfg.depth);
    loop {
        s.arena.clear();
        s.per_goal.clear();
        if let Some(root) = s.prove(goal, depth) {
            let proof = CyclicProof {
                nodes: s
                    .arena
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (format!("n{i}"), n.clone().expect("closed node")))
                    .collect::<BTreeMap<_, _>>(),
                root: format!("n{root}"),
            };
            match check_cyclic(&proof) {
                Ok(r) if matches!(r.verdict, ProgressVerdict::Accepted { .. }) => {
                    return Ok(SearchResult {
                        outcome: SearchOutcome::Found(proof),
                        visits: s.visits,
                    });
                }
                Err(ProofError::Resource(_)) => s.out_of_budget = true,
                _ => rejected = true,
            }
        }
        if s.out_of_budget || depth >= cfg.depth {
            break;
        }
        depth = (depth * 2).min(cfg.depth);
    }
    let reason = if s.out_of_budget {
        UnknownReason::Budget
    } else if rejected {
        UnknownReason::Rejected
    } else {
        UnknownReason::Exhausted
    };
    Ok(SearchResult {
        outcome: SearchOutcome::Unknown(reason),
        visits: s.visits,
    })
}

/// Search several goals on separate threads; results are in goal order.
pub fn prove_all(
    goals: &[Sequent],
    rules: &RuleSet,
    cfg: &SearchConfig,
) -> Vec<Result<SearchResult, SearchError>> {
    std::thread::scope(|sc| {
        let handles: Vec<_> = goals
            .iter()
            .map(|g| sc.spawn(move || prove(g, rules, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search thread panicked"))
            .collect()
    })
}

// ---------------------------------------------------------------------------
// Refutation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefuteOutcome {
    Refuted { model: String, valuation: Valuation },
    Unknown,
}

/// Models among `models` satisfying the quasiequation of every non-cut
/// structural rule in `rules`.
pub fn admissible_models<'m>(
    rules: &RuleSet,
    models: &'m [FiniteActionLattice],
) -> Result<Vec<&'m FiniteActionLattice>, SearchError> {
    let qs = rules
        .extra_rules()
        .iter()
        .filter(|r| r.kind == RuleKind::Structural && r.name != "Cut")
        .map(|r| q_a_of(r).or_else(|_| q_of(r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for m in models {
        let mut ok = true;
        for q in &qs {
            ok &= holds_quasieq(m, q)?;
        }
        if ok {
            out.push(m);
        }
    }
    Ok(out)
}

/// A falsifying valuation in the first model that has one.
pub fn refute(
    goal: &Sequent,
    rules: &RuleSet,
    models: &[FiniteActionLattice],
    budget: u64,
) -> Result<RefuteOutcome, SearchError> {
    for m in admissible_models(rules, models)? {
        match refute_sequent(m, goal, budget) {
            Ok(Some(v)) => {
                return Ok(RefuteOutcome::Refuted {
                    model: m.name.clone(),
                    valuation: v,
                })
            }
            Ok(None) | Err(ModelError::Budget { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(RefuteOutcome::Unknown)
}

// ---------------------------------------------------------------------------
// Syntactic frame
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Proved,
    Unknown,
}

/// `Γ N (Σl, Σr, α)` in the syntactic frame: a bounded search for
/// `Σl, Γ, Σr ⇒ α`.
pub fn syntactic_n(
    rules: &RuleSet,
    gamma: &[Formula],
    ctx: (&[Formula], &[Formula], &Formula),
    cfg: &SearchConfig,
) -> Result<Membership, SearchError> {
    for r in rules.extra_rules() {
        if r.kind == RuleKind::Structural && !classify(&r).analytic {
            return Err(SearchError::NotAnalytic(r.name.clone()));
        }
    }
    let (sl, sr, alpha) = ctx;
    let ante: Vec<Formula> = sl.iter().chain(gamma).chain(sr).cloned().collect();
    let goal = Sequent::new(ante, alpha.clone());
    Ok(match prove(&goal, rules, cfg)?.outcome {
        SearchOutcome::Found(_) => Membership::Proved,
        SearchOutcome::Unknown(_) => Membership::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{library, rel_algebra, two_chain, DEFAULT_VALUATION_BUDGET};
    use crate::syntax::{parse_formula, parse_sequent};

    fn found(goal: &str, rules: &RuleSet) -> Option<CyclicProof> {
        let g = parse_sequent(goal).unwrap();
        let r = prove(&g, rules, &SearchConfig::default()).unwrap();
        r.outcome.proof().cloned()
    }

    #[test]
    fn identity_and_star_goals() {
        let rs = RuleSet::builtin();
        let p = found("a |- a", &rs).unwrap();
        assert_eq!(p.nodes.len(), 1);
        for g in ["a* |- a*", "a*, a* |- a*", "(a | b)* |- (a | b)*", "a* |- a* . a*"] {
            let p = found(g, &rs).unwrap_or_else(|| panic!("{g}"));
            assert!(check_cyclic(&p).unwrap().verdict.is_accepted());
            assert_eq!(p.conclusion().unwrap().to_string(), parse_sequent(g).unwrap().to_string());
        }
    }

    #[test]
    fn exchange_needs_a_rule() {
        let g = parse_sequent("a . b |- b . a").unwrap();
        let cfg = SearchConfig::default();
        let plain = prove(&g, &RuleSet::builtin(), &cfg).unwrap();
        assert!(plain.outcome.proof().is_none());
        let rs = RuleSet::with_structural(&["E"]).unwrap();
        assert!(prove(&g, &rs, &cfg).unwrap().outcome.proof().is_some());
    }

    #[test]
    fn refutations() {
        let rs = RuleSet::builtin();
        let models = library();
        let out = refute(&parse_sequent("a |- b").unwrap(), &rs, &[two_chain()], DEFAULT_VALUATION_BUDGET)
            .unwrap();
        assert!(matches!(out, RefuteOutcome::Refuted { ref model, .. } if model == "two-chain"));
        let out = refute(
            &parse_sequent("a . b |- b . a").unwrap(),
            &rs,
            &[rel_algebra(2).unwrap()],
            DEFAULT_VALUATION_BUDGET,
        )
        .unwrap();
        assert!(matches!(out, RefuteOutcome::Refuted { .. }));
        let out = refute(&parse_sequent("a |- a").unwrap(), &rs, &models, DEFAULT_VALUATION_BUDGET).unwrap();
        assert_eq!(out, RefuteOutcome::Unknown);
    }

    #[test]
    fn contraction_filters_models() {
        let rs = RuleSet::with_structural(&["C"]).unwrap();
        let models = library();
        let names: Vec<&str> = admissible_models(&rs, &models)
            .unwrap()
            .iter()
            .map(|m| m.name.as_str())
            .collect();
        assert!(names.contains(&"two-chain"));
        assert!(!names.iter().any(|n| n.starts_with("rel") && *n != "rel_algebra(1)"));
    }

    #[test]
    fn syntactic_frame_examples() {
        let rs = RuleSet::builtin();
        let cfg = SearchConfig::default();
        let a = parse_formula("a").unwrap();
        let b = parse_formula("b").unwrap();
        let ab = parse_formula("a . b").unwrap();
        let n = |g: &[Formula], t: &Formula| syntactic_n(&rs, g, (&[], &[], t), &cfg).unwrap();
        assert_eq!(n(std::slice::from_ref(&a), &a), Membership::Proved);
        assert_eq!(n(&[a.clone(), b.clone()], &ab), Membership::Proved);
        assert_eq!(n(std::slice::from_ref(&a), &b), Membership::Unknown);
    }

    #[test]
    fn zero_bounds_are_rejected() {
        let cfg = SearchConfig {
            depth: 0,
            ..SearchConfig::default()
        };
        let g = parse_sequent("a |- a").unwrap();
        assert_eq!(prove(&g, &RuleSet::builtin(), &cfg), Err(SearchError::BadConfig));
    }
}
