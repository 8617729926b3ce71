// SPDX-License-Identifier: Apache-2.0

//! Translations between the cyclic and the ω-rule systems.
//!
//! Everything here works on [`LazyNode`] trees. A projection `P^f(π)` is a
//! lazy view of `π` in which the star occurrences assigned by `f` are
//! unfolded into finite powers; `om` turns every `*L` into a modified ω-node
//! whose premises are projections. Materialization then builds a
//! [`WfProof`] whose ω-families stay generators.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use serde_json::json;

use crate::progress::{check_cyclic, BranchWord, ProgressVerdict, StarAssignment};
use crate::proof::{
    format_address, lazy_cyclic, to_standard_omega, Address, Arity, Children, CyclicNode,
    CyclicProof, LazyNode, LazyRef, OmegaFamily, OmegaSchema, ProofError, RuleApp, WfProof,
};
use crate::rules::{ancestry, builtin, Instantiation, MetaFormula, MetaItem, Premises, RuleInstance};
use crate::syntax::{power_formula, power_seq, Formula, OccurrencePos, Sequent};

/// Default node budget of a single materialization.
pub const DEFAULT_FUEL: usize = 100_000;
/// Default depth budget of a single materialization.
pub const DEFAULT_DEPTH: usize = 2_000;

fn invalid(s: &Sequent, k: usize, message: &str) -> ProofError {
    ProofError::Position {
        sequent: s.clone(),
        pos: OccurrencePos::Ante(k),
        message: message.into(),
    }
}

/// `S^f`: each assigned `β*` becomes the power `β^n`.
pub fn project_sequent(s: &Sequent, f: &StarAssignment) -> Result<Sequent, ProofError> {
    let mut out = s.clone();
    for (&k, &n) in &f.0 {
        match s.antecedent.get(k) {
            Some(Formula::Star(b)) => out.antecedent[k] = power_formula(b, n),
            _ => return Err(invalid(s, k, "assignment on a non-star position")),
        }
    }
    Ok(out)
}

/// `f_i`: the assignment inherited by premise `premise` through immediate
/// ancestry.
pub fn evolve_assignment(
    f: &StarAssignment,
    app: &RuleApp,
    premise: usize,
) -> Result<StarAssignment, ProofError> {
    if let Some(OccurrencePos::Ante(k)) = app.principal {
        if f.get(k).is_some() {
            let s = app.conclusion()?;
            return Err(invalid(&s, k, "principal position is assigned"));
        }
    }
    let mut out = BTreeMap::new();
    for (q, q2) in ancestry(&app.rule, &app.inst, premise)? {
        if let (OccurrencePos::Ante(q), OccurrencePos::Ante(q2)) = (q, q2) {
            if let Some(n) = f.get(q2) {
                out.insert(q, n);
            }
        }
    }
    Ok(StarAssignment(out))
}

/// The projected instance of `app` under `f`, checked to instantiate the
/// same rule. Finite rules only.
pub fn check_rule_uniformity(
    app: &RuleApp,
    f: &StarAssignment,
) -> Result<(RuleApp, RuleInstance), ProofError> {
    let concl = app.conclusion()?;
    let target = project_sequent(&concl, f)?;
    let inst = project_instantiation(app, &target)?;
    let new_app = RuleApp::new(app.rule.clone(), inst)?;
    let n = app.rule.arity().ok_or_else(|| {
        ProofError::Unsupported(format!("uniformity of the ω-rule {}", app.name()))
    })?;
    let mut premises = Vec::with_capacity(n);
    for i in 0..n {
        let fi = evolve_assignment(f, app, i)?;
        let want = project_sequent(&app.premise(i)?, &fi)?;
        let got = new_app.premise(i)?;
        if got != want {
            return Err(ProofError::Violation {
                address: vec![],
                premise: Some(i),
                expected: Some(want),
                message: format!("projection of {} is not uniform", app.name()),
            });
        }
        premises.push(got);
    }
    let got = new_app.conclusion()?;
    if got != target {
        return Err(ProofError::Violation {
            address: vec![],
            premise: None,
            expected: Some(target),
            message: format!("projection of {} changes the conclusion", app.name()),
        });
    }
    Ok((
        new_app,
        RuleInstance {
            premises,
            conclusion: got,
        },
    ))
}

/// Rewrite the bindings of `app` so that its conclusion reads `target`,
/// which differs from the original only at assigned positions.
fn project_instantiation(app: &RuleApp, target: &Sequent) -> Result<Instantiation, ProofError> {
    let mut inst = app.inst.clone();
    let layout = app.rule.conclusion.layout(&app.inst)?;
    for (item, &(start, len)) in app.rule.conclusion.lhs.iter().zip(&layout) {
        match item {
            MetaItem::SVar(s) => {
                inst.smap
                    .insert(s.clone(), target.antecedent[start..start + len].to_vec());
            }
            MetaItem::Form(MetaFormula::FVar(v)) => {
                inst.fmap.insert(v.clone(), target.antecedent[start].clone());
            }
            MetaItem::Form(_) => {}
        }
    }
    Ok(inst)
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// Where a projection node sits: the assignment in force and the address,
/// shared by the source and the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionContext {
    pub assignment: StarAssignment,
    pub address: Address,
}

enum Shape {
    /// `*L` on an assigned zero: `1L` over the left premise.
    Unit(RuleApp, StarAssignment),
    /// `*L` on an assigned `n > 0`: `·L+1` over the right premise.
    Step(RuleApp, StarAssignment),
    /// Any other step, projected uniformly.
    Copy(RuleApp),
}

struct ProjectionNode {
    inner: LazyRef,
    ctx: ProjectionContext,
    sequent: Sequent,
    shape: Shape,
}

/// `P^f(π)`.
pub fn project_proof(pi: &LazyRef, f: &StarAssignment) -> Result<LazyRef, ProofError> {
    project_at(
        pi.clone(),
        ProjectionContext {
            assignment: f.clone(),
            address: vec![],
        },
    )
}

/// `P^n_k(π)`.
pub fn project_single(pi: &LazyRef, k: usize, n: usize) -> Result<LazyRef, ProofError> {
    project_proof(pi, &StarAssignment::single(k, n))
}

fn project_at(inner: LazyRef, ctx: ProjectionContext) -> Result<LazyRef, ProofError> {
    if ctx.assignment.is_empty() {
        return Ok(inner);
    }
    let src = inner.sequent();
    let sequent = project_sequent(&src, &ctx.assignment).map_err(|e| e.under(&ctx.address))?;
    let app = inner.app();
    let f = &ctx.assignment;
    let shape = match (app.name(), app.principal) {
        ("*L", Some(OccurrencePos::Ante(k))) if f.get(k).is_some() => {
            let n = f.get(k).expect("checked");
            let g = sequent.antecedent[..k].to_vec();
            let d = sequent.antecedent[k + 1..].to_vec();
            let beta = sequent.succedent.clone();
            if n == 0 {
                let mut f2 = BTreeMap::new();
                for (&q, &m) in &f.0 {
                    if q < k {
                        f2.insert(q, m);
                    } else if q > k {
                        f2.insert(q - 1, m);
                    }
                }
                let one = RuleApp::named(
                    "1L",
                    Instantiation::new()
                        .s("Gamma", g)
                        .s("Delta", d)
                        .f("beta", beta),
                )?;
                Shape::Unit(one, StarAssignment(f2))
            } else {
                let Formula::Star(alpha) = &src.antecedent[k] else {
                    unreachable!("*L principal is a star");
                };
                let mut f2 = BTreeMap::new();
                for (&q, &m) in &f.0 {
                    if q < k {
                        f2.insert(q, m);
                    } else if q > k {
                        f2.insert(q + 1, m);
                    }
                }
                f2.insert(k + 1, n - 1);
                let step = RuleApp::named(
                    ".L+1",
                    Instantiation::new()
                        .s("Gamma", g)
                        .s("Delta", d)
                        .f("alpha0", (**alpha).clone())
                        .f("alpha1", power_formula(alpha, n - 1))
                        .f("beta", beta),
                )?;
                Shape::Step(step, StarAssignment(f2))
            }
        }
        _ => match app.rule.premises {
            Premises::Finite(_) => {
                let (a, _) = check_rule_uniformity(&app, f).map_err(|e| e.under(&ctx.address))?;
                Shape::Copy(a)
            }
            _ => {
                return Err(ProofError::Unsupported(format!(
                    "projection through the ω-rule {} at {}",
                    app.name(),
                    format_address(&ctx.address)
                )))
            }
        },
    };
    Ok(Arc::new(ProjectionNode {
        inner,
        ctx,
        sequent,
        shape,
    }))
}

impl LazyNode for ProjectionNode {
    fn sequent(&self) -> Sequent {
        self.sequent.clone()
    }

    fn app(&self) -> RuleApp {
        match &self.shape {
            Shape::Unit(a, _) | Shape::Step(a, _) | Shape::Copy(a) => a.clone(),
        }
    }

    fn arity(&self) -> Arity {
        match &self.shape {
            Shape::Unit(..) => Arity::Finite(vec![0]),
            Shape::Step(..) => Arity::Finite(vec![1]),
            Shape::Copy(_) => self.inner.arity(),
        }
    }

    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        let mut address = self.ctx.address.clone();
        address.push(slot);
        let (next, assignment) = match &self.shape {
            Shape::Unit(_, f2) if slot == 0 => (self.inner.child(0)?, f2.clone()),
            Shape::Step(_, f2) if slot == 1 => (self.inner.child(1)?, f2.clone()),
            Shape::Unit(..) | Shape::Step(..) => {
                return Err(ProofError::Unsupported(format!("no child at slot {slot}")))
            }
            Shape::Copy(_) => {
                let src = self.inner.app();
                let premise = src.rule.premise_of_slot(slot).ok_or_else(|| {
                    ProofError::Unsupported(format!("no child at slot {slot}"))
                })?;
                let fi = evolve_assignment(&self.ctx.assignment, &src, premise)?;
                (self.inner.child(slot)?, fi)
            }
        };
        project_at(
            next,
            ProjectionContext {
                assignment,
                address,
            },
        )
    }

    fn state_key(&self) -> Option<String> {
        self.inner
            .state_key()
            .map(|k| format!("P{}({k})", self.ctx.assignment))
    }
}

// ---------------------------------------------------------------------------
// Om
// ---------------------------------------------------------------------------

struct OmNode {
    inner: LazyRef,
    /// Modified ω-node when the inner step is `*L` on position `k`.
    star: Option<(RuleApp, usize)>,
    memo: Mutex<HashMap<usize, LazyRef>>,
}

/// `Om(π)`. Requires `π` to satisfy the branch condition for the result to
/// be wellfounded.
pub fn om(pi: &LazyRef) -> Result<LazyRef, ProofError> {
    let app = pi.app();
    let star = match (app.name(), app.principal) {
        ("*L", Some(OccurrencePos::Ante(k))) => {
            Some((RuleApp::new(builtin("*Lw'"), app.inst.clone())?, k))
        }
        _ => None,
    };
    Ok(Arc::new(OmNode {
        inner: pi.clone(),
        star,
        memo: Mutex::new(HashMap::new()),
    }))
}

impl LazyNode for OmNode {
    fn sequent(&self) -> Sequent {
        self.inner.sequent()
    }

    fn app(&self) -> RuleApp {
        match &self.star {
            Some((a, _)) => a.clone(),
            None => self.inner.app(),
        }
    }

    fn arity(&self) -> Arity {
        match &self.star {
            Some(_) => Arity::Omega,
            None => self.inner.arity(),
        }
    }

    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&slot) {
            return Ok(hit.clone());
        }
        let c = match &self.star {
            None => om(&self.inner.child(slot)?)?,
            Some(_) if slot == 0 => om(&self.inner.child(0)?)?,
            Some((_, k)) => om(&project_single(&self.inner.child(1)?, k + 1, slot - 1)?)?,
        };
        self.memo
            .lock()
            .expect("memo lock")
            .insert(slot, c.clone());
        Ok(c)
    }
}

// ---------------------------------------------------------------------------
// Materialization
// ---------------------------------------------------------------------------

/// Budget of one materialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub nodes: usize,
    pub depth: usize,
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel {
            nodes: DEFAULT_FUEL,
            depth: DEFAULT_DEPTH,
        }
    }
}

struct Frame {
    node: LazyRef,
    address: Address,
    slots: Vec<usize>,
    kids: Vec<WfProof>,
}

/// Build a [`WfProof`] from a lazy tree with finite descents. ω-nodes become
/// generators, each member materialized on demand with a fresh budget.
pub fn materialize(root: &LazyRef, fuel: Fuel) -> Result<WfProof, ProofError> {
    let mut count = 0usize;
    let mut stack: Vec<Frame> = Vec::new();
    let open = |node: LazyRef, address: Address, count: &mut usize| -> Result<Frame, ProofError> {
        *count += 1;
        if *count > fuel.nodes {
            return Err(ProofError::Resource(format!(
                "materialization exceeded {} nodes at {}",
                fuel.nodes,
                format_address(&address)
            )));
        }
        if address.len() > fuel.depth {
            return Err(ProofError::Resource(format!(
                "materialization exceeded depth {} at {}",
                fuel.depth,
                format_address(&address)
            )));
        }
        let slots = match node.arity() {
            Arity::Finite(s) => s,
            Arity::Omega => vec![],
        };
        Ok(Frame {
            node,
            address,
            slots,
            kids: vec![],
        })
    };
    stack.push(open(root.clone(), vec![], &mut count)?);
    loop {
        let top = stack.last_mut().expect("nonempty stack");
        if top.kids.len() < top.slots.len() {
            let slot = top.slots[top.kids.len()];
            let child = top.node.child(slot)?;
            let mut a = top.address.clone();
            a.push(slot);
            let frame = open(child, a, &mut count)?;
            stack.push(frame);
            continue;
        }
        let done = stack.pop().expect("nonempty stack");
        let built = finish(done, fuel);
        match stack.last_mut() {
            Some(parent) => parent.kids.push(built),
            None => return Ok(built),
        }
    }
}

fn finish(frame: Frame, fuel: Fuel) -> WfProof {
    let Frame {
        node,
        address,
        kids,
        ..
    } = frame;
    let children = match node.arity() {
        Arity::Finite(_) => Children::Finite(kids),
        Arity::Omega => {
            let n2 = node.clone();
            let fam = OmegaFamily::new(move |i| {
                let c = n2.child(i)?;
                materialize(&c, fuel).map_err(|e| match e {
                    ProofError::Resource(m) => {
                        ProofError::Resource(format!("premise {i} of {}: {m}", format_address(&address)))
                    }
                    other => other,
                })
            })
            .with_schema(OmegaSchema {
                name: "projected".into(),
                params: json!({}),
            });
            Children::Omega(fam)
        }
    };
    WfProof::raw(node.sequent(), node.app(), children)
}

/// From an accepted cyclic proof, an ω-rule proof of the same sequent.
pub fn nwf_to_wf(p: &CyclicProof, fuel: Fuel) -> Result<WfProof, ProofError> {
    let report = check_cyclic(p)?;
    if let ProgressVerdict::Rejected(c) = report.verdict {
        return Err(ProofError::Unsupported(format!(
            "preproof fails the branch condition: {c}"
        )));
    }
    nwf_to_wf_unchecked(&lazy_cyclic(&Arc::new(p.clone())), fuel)
}

/// The pipeline without the progress check. The caller guarantees the
/// branch condition.
pub fn nwf_to_wf_unchecked(p: &LazyRef, fuel: Fuel) -> Result<WfProof, ProofError> {
    let wf = materialize(&om(p)?, fuel)?;
    to_standard_omega(&wf)
}

// ---------------------------------------------------------------------------
// Wellfounded to non-wellfounded
// ---------------------------------------------------------------------------

struct WfView(WfProof);

struct Ladder {
    /// The standard ω-node being unfolded.
    node: WfProof,
    depth: usize,
    app: RuleApp,
    sequent: Sequent,
}

/// Replace every `*Lω` node by the infinite `*L` ladder. Every infinite
/// branch of the result follows a ladder's unique star thread.
pub fn wf_to_nwf(p: &WfProof) -> Result<LazyRef, ProofError> {
    lift(p.clone())
}

fn lift(p: WfProof) -> Result<LazyRef, ProofError> {
    match p.children() {
        Children::Finite(_) => Ok(Arc::new(WfView(p))),
        Children::Omega(_) => {
            if p.rule_name() != "*Lw" {
                return Err(ProofError::Unsupported(format!(
                    "lifting the ω-rule {}",
                    p.rule_name()
                )));
            }
            Ok(Arc::new(ladder(p, 0)?))
        }
    }
}

fn ladder(node: WfProof, depth: usize) -> Result<Ladder, ProofError> {
    let inst = &node.app().inst;
    let alpha = inst.fmap["alpha"].clone();
    let mut gamma = inst.smap["Gamma"].clone();
    gamma.extend(power_seq(&alpha, depth));
    let app = RuleApp::named(
        "*L",
        Instantiation::new()
            .s("Gamma", gamma)
            .s("Delta", inst.smap["Delta"].clone())
            .f("alpha", alpha)
            .f("beta", inst.fmap["beta"].clone()),
    )?;
    let sequent = app.conclusion()?;
    Ok(Ladder {
        node,
        depth,
        app,
        sequent,
    })
}

impl LazyNode for WfView {
    fn sequent(&self) -> Sequent {
        self.0.sequent().clone()
    }
    fn app(&self) -> RuleApp {
        self.0.app().clone()
    }
    fn arity(&self) -> Arity {
        Arity::Finite(self.0.slots(0))
    }
    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        match self.0.child(slot)? {
            Some(c) => lift(c),
            None => Err(ProofError::Unsupported(format!("no child at slot {slot}"))),
        }
    }
    fn state_key(&self) -> Option<String> {
        Some(format!("wf{:p}", Arc::as_ptr(&self.0 .0)))
    }
}

impl LazyNode for Ladder {
    fn sequent(&self) -> Sequent {
        self.sequent.clone()
    }
    fn app(&self) -> RuleApp {
        self.app.clone()
    }
    fn arity(&self) -> Arity {
        Arity::Finite(vec![0, 1])
    }
    fn child(&self, slot: usize) -> Result<LazyRef, ProofError> {
        match slot {
            0 => match self.node.child(self.depth)? {
                Some(c) => lift(c),
                None => Err(ProofError::Unsupported("missing ω-premise".into())),
            },
            1 => Ok(Arc::new(ladder(self.node.clone(), self.depth + 1)?)),
            _ => Err(ProofError::Unsupported(format!("no child at slot {slot}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// path and folding
// ---------------------------------------------------------------------------

/// `path(π, b)` on the first `len` steps of `b`: an ω-step becomes 0 or 1.
pub fn path(pi: &LazyRef, b: &BranchWord, len: usize) -> Result<Vec<usize>, ProofError> {
    let mut out = Vec::with_capacity(len);
    let mut cur = pi.clone();
    for i in 0..len {
        let Some(s) = b.slot(i) else { break };
        let omega = matches!(cur.arity(), Arity::Omega);
        out.push(if omega { usize::from(s > 0) } else { s });
        cur = cur.child(s).map_err(|_| {
            ProofError::Unsupported(format!("branch leaves the proof at step {i}"))
        })?;
    }
    Ok(out)
}

/// Identify nodes of a lazy tree by their state keys and return the finite
/// graph, when there are at most `cap` states.
pub fn fold_to_cyclic(root: &LazyRef, cap: usize) -> Result<CyclicProof, ProofError> {
    let key = |n: &LazyRef| {
        n.state_key()
            .ok_or_else(|| ProofError::Unsupported("node without a state key".into()))
    };
    let mut ids: HashMap<String, String> = HashMap::new();
    let mut nodes = BTreeMap::new();
    let mut queue = VecDeque::new();
    ids.insert(key(root)?, "n0".into());
    queue.push_back((root.clone(), "n0".to_string()));
    while let Some((n, id)) = queue.pop_front() {
        let Arity::Finite(slots) = n.arity() else {
            return Err(ProofError::Unsupported("cannot fold an ω-node".into()));
        };
        let mut children = Vec::new();
        for s in slots {
            let c = n.child(s)?;
            let k = key(&c)?;
            let cid = match ids.get(&k) {
                Some(x) => x.clone(),
                None => {
                    if ids.len() >= cap {
                        return Err(ProofError::Resource(format!("more than {cap} states")));
                    }
                    let x = format!("n{}", ids.len());
                    ids.insert(k, x.clone());
                    queue.push_back((c, x.clone()));
                    x
                }
            };
            children.push(cid);
        }
        nodes.insert(
            id,
            CyclicNode {
                sequent: n.sequent(),
                app: n.app(),
                children,
            },
        );
    }
    Ok(CyclicProof {
        nodes,
        root: "n0".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{canonical_cyclic, canonical_double_star, canonical_star_identity};
    use crate::proof::{check_lazy_local, check_wf, id_expand, lazy_addresses};
    use crate::syntax::{f, seq};

    fn star() -> LazyRef {
        lazy_cyclic(&Arc::new(canonical_star_identity()))
    }

    #[test]
    fn sequent_projection() {
        let s = seq("a*, b |- c");
        assert_eq!(
            project_sequent(&s, &StarAssignment::single(0, 0)).unwrap(),
            seq("1, b |- c")
        );
        assert_eq!(project_sequent(&s, &StarAssignment::empty()).unwrap(), s);
        assert_eq!(
            project_sequent(&seq("a*, a* |- c"), &StarAssignment::single(1, 2)).unwrap(),
            seq("a*, a . (a . 1) |- c")
        );
        assert!(project_sequent(&s, &StarAssignment::single(1, 0)).is_err());
    }

    #[test]
    fn evolution_through_contraction() {
        let app = RuleApp::named(
            "C",
            Instantiation::new()
                .s("Gamma", vec![f("b")])
                .s("Pi", vec![f("a*")])
                .s("Delta", vec![])
                .f("beta", f("c")),
        )
        .unwrap();
        let f1 = evolve_assignment(&StarAssignment::single(1, 3), &app, 0).unwrap();
        assert_eq!(f1, StarAssignment(BTreeMap::from([(1, 3), (2, 3)])));
        let (_, ri) = check_rule_uniformity(&app, &StarAssignment::single(1, 3)).unwrap();
        assert_eq!(ri.conclusion, seq("b, a . (a . (a . 1)) |- c"));
    }

    #[test]
    fn principal_assignment_rejected() {
        let p = canonical_star_identity();
        let app = p.nodes["n0"].app.clone();
        assert!(evolve_assignment(&StarAssignment::single(0, 1), &app, 1).is_err());
    }

    #[test]
    fn zero_projection_of_star_identity() {
        let p = project_single(&star(), 0, 0).unwrap();
        assert_eq!(p.sequent(), seq("1 |- a*"));
        assert_eq!(p.app().name(), "1L");
        let wf = materialize(&p, Fuel::default()).unwrap();
        check_wf(&wf, 3).unwrap();
        assert_eq!(wf.child(0).unwrap().unwrap().rule_name(), "*R0");
    }

    #[test]
    fn step_projection_of_star_identity() {
        let p = project_single(&star(), 0, 2).unwrap();
        assert_eq!(p.app().name(), ".L+1");
        let wf = materialize(&p, Fuel::default()).unwrap();
        check_wf(&wf, 3).unwrap();
        assert_eq!(wf.sequent(), &seq("a . (a . 1) |- a*"));
        let addrs = lazy_addresses(&p, 8, 3).unwrap();
        let src = lazy_addresses(&star(), 8, 3).unwrap();
        assert!(addrs.is_subset(&src));
    }

    #[test]
    fn empty_projection_is_the_identity() {
        let p = project_proof(&star(), &StarAssignment::empty()).unwrap();
        assert_eq!(
            lazy_addresses(&p, 6, 2).unwrap(),
            lazy_addresses(&star(), 6, 2).unwrap()
        );
    }

    #[test]
    fn om_of_star_identity() {
        let o = om(&star()).unwrap();
        assert!(matches!(o.arity(), Arity::Omega));
        for n in 0..=3 {
            let c = o.child(n + 1).unwrap();
            let mut want = vec![f("a")];
            want.push(power_formula(&f("a"), n));
            assert_eq!(c.sequent(), Sequent::new(want, f("a*")));
            check_wf(&materialize(&c, Fuel::default()).unwrap(), 3).unwrap();
        }
    }

    #[test]
    fn pipeline_on_canonical_proofs() {
        for (goal, p) in canonical_cyclic() {
            let wf = nwf_to_wf(&p, Fuel::default()).unwrap();
            assert_eq!(wf.sequent(), &goal);
            check_wf(&wf, 5).unwrap_or_else(|e| panic!("{goal}: {e}"));
            assert_eq!(wf.rule_name(), "*Lw");
        }
    }

    #[test]
    fn nested_om() {
        let o = om(&lazy_cyclic(&Arc::new(canonical_double_star()))).unwrap();
        for n in 0..=2 {
            let c = o.child(n).unwrap();
            if n == 0 {
                assert!(matches!(c.arity(), Arity::Omega));
                for m in 0..=2 {
                    check_wf(&materialize(&c.child(m).unwrap(), Fuel::default()).unwrap(), 2)
                        .unwrap();
                }
            } else {
                check_wf(&materialize(&c, Fuel::default()).unwrap(), 2).unwrap();
            }
        }
    }

    #[test]
    fn fuel_exhaustion_is_a_resource_error() {
        let c = project_single(&star(), 0, 50).unwrap();
        let e = materialize(
            &c,
            Fuel {
                nodes: 10,
                depth: 100,
            },
        )
        .unwrap_err();
        assert!(e.is_resource());
    }

    #[test]
    fn ladder_prefix_is_locally_valid() {
        let wf = id_expand(&f("a*"));
        let l = wf_to_nwf(&wf).unwrap();
        assert!(check_lazy_local(&l, 4, 2).unwrap() > 4);
        let mut cur = l.clone();
        for n in 0..4 {
            let mut want = power_seq(&f("a"), n);
            want.push(f("a*"));
            assert_eq!(cur.sequent(), Sequent::new(want, f("a*")));
            cur = cur.child(1).unwrap();
        }
    }

    #[test]
    fn path_cases() {
        let wf = nwf_to_wf(&canonical_star_identity(), Fuel::default()).unwrap();
        let l = crate::proof::lazy_wf(&wf);
        let b = BranchWord {
            stem: vec![3, 0],
            cycle: vec![],
        };
        assert_eq!(path(&l, &b, 2).unwrap(), vec![1, 0]);
        let b0 = BranchWord {
            stem: vec![0],
            cycle: vec![],
        };
        assert_eq!(path(&l, &b0, 1).unwrap(), vec![0]);
    }

    #[test]
    fn folding_a_projection() {
        let p = project_single(&star(), 0, 2).unwrap();
        let c = fold_to_cyclic(&p, 100).unwrap();
        c.check_local_all().unwrap();
        assert_eq!(c.conclusion().unwrap(), &seq("a . (a . 1) |- a*"));
    }
}
