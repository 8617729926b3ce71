// SPDX-License-Identifier: Apache-2.0

//! Threads, progress points, critical heights and the global branch
//! condition on cyclic proofs.
//!
//! The branch condition is decided by saturating trace relations along paths
//! of the proof graph: a cyclic proof is accepted iff every idempotent
//! relation looping a node to itself has a progressing self-pair.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::Rng;

use crate::proof::{CyclicProof, ProofError, RuleApp};
use crate::rules::ancestry;
use crate::syntax::{Formula, OccurrencePos, Sequent};

/// Default cap on the number of proof nodes the checker accepts.
pub const DEFAULT_NODE_CAP: usize = 500;
/// Default cap on the number of distinct path relations in the closure.
pub const DEFAULT_CLOSURE_CAP: usize = 200_000;

// ---------------------------------------------------------------------------
// Threads and assignments
// ---------------------------------------------------------------------------

/// A thread along a branch, starting at branch index `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    pub start: usize,
    pub positions: Vec<OccurrencePos>,
}

/// One step of a branch: the node's sequent, its rule application and the
/// child slot taken.
#[derive(Clone, Debug)]
pub struct BranchStep {
    pub sequent: Sequent,
    pub app: RuleApp,
    pub slot: usize,
}

/// Consecutive positions of `t` are immediate ancestors along `branch`.
pub fn is_thread(t: &Thread, branch: &[BranchStep]) -> bool {
    if t.positions.is_empty() || t.start + t.positions.len() > branch.len() {
        return false;
    }
    for (j, w) in t.positions.windows(2).enumerate() {
        let step = &branch[t.start + j];
        let Some(premise) = step.app.rule.premise_of_slot(step.slot) else {
            return false;
        };
        match ancestry(&step.app.rule, &step.app.inst, premise) {
            Ok(pairs) => {
                if !pairs.contains(&(w[1], w[0])) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    t.positions
        .iter()
        .enumerate()
        .all(|(j, p)| branch[t.start + j].sequent.get(*p).is_some())
}

/// `t` always denotes one `α*` on the left.
pub fn is_star_thread(t: &Thread, sequents: &[Sequent]) -> bool {
    let mut formula: Option<&Formula> = None;
    for (j, p) in t.positions.iter().enumerate() {
        let OccurrencePos::Ante(i) = p else {
            return false;
        };
        let Some(s) = sequents.get(t.start + j) else {
            return false;
        };
        let Some(f) = s.antecedent.get(*i) else {
            return false;
        };
        if !f.is_star() {
            return false;
        }
        match formula {
            None => formula = Some(f),
            Some(g) if g != f => return false,
            Some(_) => {}
        }
    }
    !t.positions.is_empty()
}

/// A partial map from antecedent positions to naturals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarAssignment(pub BTreeMap<usize, usize>);

impl StarAssignment {
    pub fn empty() -> StarAssignment {
        StarAssignment::default()
    }

    pub fn single(pos: usize, n: usize) -> StarAssignment {
        StarAssignment(BTreeMap::from([(pos, n)]))
    }

    pub fn get(&self, pos: usize) -> Option<usize> {
        self.0.get(&pos).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every assigned position holds a star formula of `s`.
    pub fn is_valid_for(&self, s: &Sequent) -> bool {
        self.0
            .keys()
            .all(|&k| s.antecedent.get(k).is_some_and(Formula::is_star))
    }
}

impl fmt::Display for StarAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

// ---------------------------------------------------------------------------
// Trace relations
// ---------------------------------------------------------------------------

/// Relation from star positions of a source sequent to star positions of a
/// target sequent; `prog` marks the pairs whose trace passed a principal
/// step. Positions are antecedent indices below 64.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceRel {
    rel: Vec<u64>,
    prog: Vec<u64>,
}

impl TraceRel {
    pub fn empty(n_src: usize) -> TraceRel {
        TraceRel {
            rel: vec![0; n_src],
            prog: vec![0; n_src],
        }
    }

    pub fn insert(&mut self, src: usize, dst: usize, progressing: bool) {
        self.rel[src] |= 1 << dst;
        if progressing {
            self.prog[src] |= 1 << dst;
        }
    }

    pub fn contains(&self, src: usize, dst: usize) -> Option<bool> {
        let bit = 1u64 << dst;
        if self.rel.get(src)? & bit == 0 {
            None
        } else {
            Some(self.prog[src] & bit != 0)
        }
    }

    pub fn pairs(&self) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for (s, &row) in self.rel.iter().enumerate() {
            for d in 0..64 {
                if row & (1 << d) != 0 {
                    out.push((s, d, self.prog[s] & (1 << d) != 0));
                }
            }
        }
        out
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &TraceRel) -> TraceRel {
        let mut out = TraceRel::empty(self.rel.len());
        for s in 0..self.rel.len() {
            let row = self.rel[s];
            let prow = self.prog[s];
            let mut bits = row;
            while bits != 0 {
                let m = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let (r2, p2) = match (other.rel.get(m), other.prog.get(m)) {
                    (Some(&r), Some(&p)) => (r, p),
                    _ => continue,
                };
                out.rel[s] |= r2;
                if prow & (1 << m) != 0 {
                    out.prog[s] |= r2;
                } else {
                    out.prog[s] |= p2;
                }
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        &self.compose(self) == self
    }

    /// Some position is related to itself through a progressing trace.
    pub fn has_progressing_loop(&self) -> bool {
        (0..self.rel.len()).any(|s| self.prog[s] & (1 << s) != 0)
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.rel.len()).filter(|&s| self.rel[s] != 0).collect()
    }
}

/// Trace relation of the edge from a node to its `premise`-th child.
pub fn edge_relation(
    parent: &Sequent,
    app: &RuleApp,
    premise: usize,
    child: &Sequent,
) -> Result<TraceRel, ProofError> {
    if parent.len() > 64 || child.len() > 64 {
        return Err(ProofError::Resource(
            "sequents with more than 64 antecedent formulas".into(),
        ));
    }
    let mut r = TraceRel::empty(parent.len());
    for (pp, cp) in ancestry(&app.rule, &app.inst, premise)? {
        let (OccurrencePos::Ante(p), OccurrencePos::Ante(c)) = (pp, cp) else {
            continue;
        };
        let (Some(cf), Some(pf)) = (parent.antecedent.get(c), child.antecedent.get(p)) else {
            continue;
        };
        if cf.is_star() && cf == pf {
            r.insert(c, p, app.principal == Some(cp));
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Global condition
// ---------------------------------------------------------------------------

/// A cycle witnessing a failure of the branch condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Path from the root to the first cycle node, as child slots.
    pub stem: Vec<usize>,
    /// Node ids of the cycle, starting and ending at the same node.
    pub cycle: Vec<String>,
    /// Child slots taken along the cycle.
    pub slots: Vec<usize>,
    /// Star positions of the cycle's first node considered by the idempotent.
    pub positions: Vec<usize>,
}

impl Counterexample {
    pub fn word(&self) -> BranchWord {
        BranchWord {
            stem: self.stem.clone(),
            cycle: self.slots.clone(),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cycle {} (slots {:?}), star positions {:?}",
            self.cycle.join(" -> "),
            self.slots,
            self.positions
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProgressVerdict {
    Accepted { closure_size: usize },
    Rejected(Counterexample),
}

impl ProgressVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProgressVerdict::Accepted { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProgressLimits {
    pub node_cap: usize,
    pub closure_cap: usize,
}

impl Default for ProgressLimits {
    fn default() -> Self {
        ProgressLimits {
            node_cap: DEFAULT_NODE_CAP,
            closure_cap: DEFAULT_CLOSURE_CAP,
        }
    }
}

struct Graph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    /// (slot, target, relation)
    edges: Vec<Vec<(usize, usize, TraceRel)>>,
}

fn build_graph(p: &CyclicProof) -> Result<Graph, ProofError> {
    let ids: Vec<String> = p.nodes.keys().cloned().collect();
    let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut edges = Vec::with_capacity(ids.len());
    for id in &ids {
        let n = &p.nodes[id];
        let mut out = Vec::new();
        for (i, c) in n.children.iter().enumerate() {
            let target = *index
                .get(c)
                .ok_or_else(|| ProofError::Unsupported(format!("unknown node `{c}`")))?;
            let rel = edge_relation(&n.sequent, &n.app, i, &p.nodes[c].sequent)?;
            out.push((n.app.rule.slot(i), target, rel));
        }
        edges.push(out);
    }
    Ok(Graph { ids, index, edges })
}

fn shortest_stem(g: &Graph, root: usize, target: usize) -> Vec<usize> {
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([root]);
    let mut seen = BTreeSet::from([root]);
    while let Some(u) = queue.pop_front() {
        if u == target {
            break;
        }
        for (slot, v, _) in &g.edges[u] {
            if seen.insert(*v) {
                prev.insert(*v, (u, *slot));
                queue.push_back(*v);
            }
        }
    }
    let mut stem = Vec::new();
    let mut cur = target;
    while cur != root {
        let Some(&(u, slot)) = prev.get(&cur) else {
            break;
        };
        stem.push(slot);
        cur = u;
    }
    stem.reverse();
    stem
}

/// Decide the branch condition of a cyclic preproof.
pub fn check_progress(p: &CyclicProof) -> Result<ProgressVerdict, ProofError> {
    check_progress_with(p, ProgressLimits::default())
}

pub fn check_progress_with(
    p: &CyclicProof,
    limits: ProgressLimits,
) -> Result<ProgressVerdict, ProofError> {
    if p.nodes.len() > limits.node_cap {
        return Err(ProofError::Resource(format!(
            "{} nodes exceed the cap of {}",
            p.nodes.len(),
            limits.node_cap
        )));
    }
    let g = build_graph(p)?;
    // Closure entries: (source, target, relation), with a back pointer to
    // the entry they extend and the edge used.
    let mut entries: Vec<(usize, usize, TraceRel)> = Vec::new();
    let mut back: Vec<Option<(usize, usize)>> = Vec::new();
    let mut seen: HashMap<(usize, usize, TraceRel), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for (u, es) in g.edges.iter().enumerate() {
        for (ei, (_, v, rel)) in es.iter().enumerate() {
            let key = (u, *v, rel.clone());
            if !seen.contains_key(&key) {
                seen.insert(key.clone(), entries.len());
                queue.push_back(entries.len());
                entries.push(key);
                back.push(None);
                let _ = ei;
            }
        }
    }
    // Edge index used to create a first-level entry, for path recovery.
    let first_edge: Vec<(usize, usize)> = entries
        .iter()
        .map(|(u, v, rel)| {
            let ei = g.edges[*u]
                .iter()
                .position(|(_, t, r)| t == v && r == rel)
                .expect("entry built from an edge");
            (*u, ei)
        })
        .collect();
    while let Some(e) = queue.pop_front() {
        let (u, v, rel) = entries[e].clone();
        if u == v && rel.is_idempotent() && !rel.has_progressing_loop() {
            // Recover the cycle.
            let mut steps = Vec::new();
            let mut cur = e;
            loop {
                match back[cur] {
                    Some((prev, edge)) => {
                        let from = entries[prev].1;
                        steps.push((from, edge));
                        cur = prev;
                    }
                    None => {
                        let (from, edge) = first_edge[cur];
                        steps.push((from, edge));
                        break;
                    }
                }
            }
            steps.reverse();
            let mut cycle = vec![g.ids[u].clone()];
            let mut slots = Vec::new();
            for (from, edge) in steps {
                let (slot, to, _) = &g.edges[from][edge];
                slots.push(*slot);
                cycle.push(g.ids[*to].clone());
            }
            let root = g.index[&p.root];
            return Ok(ProgressVerdict::Rejected(Counterexample {
                stem: shortest_stem(&g, root, u),
                cycle,
                slots,
                positions: rel.domain(),
            }));
        }
        for (ei, (_, w, erel)) in g.edges[v].iter().enumerate() {
            let comp = rel.compose(erel);
            let key = (u, *w, comp);
            if !seen.contains_key(&key) {
                if entries.len() >= limits.closure_cap {
                    return Err(ProofError::Resource(format!(
                        "trace closure exceeds {} relations",
                        limits.closure_cap
                    )));
                }
                seen.insert(key.clone(), entries.len());
                queue.push_back(entries.len());
                entries.push(key);
                back.push(Some((e, ei)));
            }
        }
    }
    Ok(ProgressVerdict::Accepted {
        closure_size: entries.len(),
    })
}

/// Report of [`check_cyclic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReport {
    pub nodes: usize,
    pub rules_used: BTreeSet<String>,
    pub verdict: ProgressVerdict,
}

/// Local validity, reachability and the branch condition. `*L` is the only
/// star-left rule allowed.
pub fn check_cyclic(p: &CyclicProof) -> Result<CyclicReport, ProofError> {
    check_cyclic_with(p, ProgressLimits::default())
}

pub fn check_cyclic_with(
    p: &CyclicProof,
    limits: ProgressLimits,
) -> Result<CyclicReport, ProofError> {
    p.check_local_all()?;
    let verdict = check_progress_with(p, limits)?;
    Ok(CyclicReport {
        nodes: p.nodes.len(),
        rules_used: p.rules_used(),
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Progress points along eventually periodic branches
// ---------------------------------------------------------------------------

/// The branch `stem · cycle^ω` of child slots; an empty cycle denotes the
/// finite branch `stem`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchWord {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl BranchWord {
    pub fn slot(&self, i: usize) -> Option<usize> {
        if i < self.stem.len() {
            Some(self.stem[i])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(self.cycle[(i - self.stem.len()) % self.cycle.len()])
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<usize> {
        (0..n).map_while(|i| self.slot(i)).collect()
    }

    /// The branch after its first step.
    pub fn tail(&self) -> BranchWord {
        if let Some((_, rest)) = self.stem.split_first() {
            BranchWord {
                stem: rest.to_vec(),
                cycle: self.cycle.clone(),
            }
        } else if self.cycle.is_empty() {
            self.clone()
        } else {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            BranchWord {
                stem: vec![],
                cycle: c,
            }
        }
    }

    /// Prepend one step.
    pub fn cons(&self, slot: usize) -> BranchWord {
        let mut stem = vec![slot];
        stem.extend(self.stem.iter().copied());
        BranchWord {
            stem,
            cycle: self.cycle.clone(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        !self.cycle.is_empty()
    }
}

impl fmt::Display for BranchWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.stem.iter().map(|x| x.to_string()).collect();
        let c: Vec<String> = self.cycle.iter().map(|x| x.to_string()).collect();
        write!(f, "{}({})^w", s.join(""), c.join(""))
    }
}

/// Branch given as a lasso of node ids: `nodes[i]` takes `slots[i]`, and the
/// step after the last one returns to `nodes[loop_start]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub nodes: Vec<String>,
    pub slots: Vec<usize>,
    pub loop_start: usize,
}

impl Lasso {
    fn state(&self, i: usize) -> usize {
        if i < self.nodes.len() {
            i
        } else {
            let period = self.nodes.len() - self.loop_start;
            self.loop_start + (i - self.loop_start) % period
        }
    }
}

/// Follow `word` through `p`. `Ok(None)` when the word leaves the proof or
/// is finite (no infinite branch).
pub fn lasso_of(p: &CyclicProof, word: &BranchWord) -> Result<Option<Lasso>, ProofError> {
    if !word.is_infinite() {
        return Ok(None);
    }
    let mut states: HashMap<(String, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut slots = Vec::new();
    let mut cur = p.root.clone();
    let mut i = 0usize;
    loop {
        let phase = if i < word.stem.len() {
            usize::MAX - i
        } else {
            (i - word.stem.len()) % word.cycle.len()
        };
        if let Some(&start) = states.get(&(cur.clone(), phase)) {
            return Ok(Some(Lasso {
                nodes,
                slots,
                loop_start: start,
            }));
        }
        states.insert((cur.clone(), phase), nodes.len());
        let slot = word.slot(i).expect("infinite word");
        let Some(next) = p.child_at_slot(&cur, slot)? else {
            return Ok(None);
        };
        let next = next.to_string();
        nodes.push(cur);
        slots.push(slot);
        cur = next;
        i += 1;
    }
}

/// Progress points `i < fuel` of the branch `word` of `p`.
pub fn progress_points(
    p: &CyclicProof,
    word: &BranchWord,
    fuel: usize,
) -> Result<BTreeSet<usize>, ProofError> {
    let Some(lasso) = lasso_of(p, word)? else {
        return Ok(BTreeSet::new());
    };
    let good = good_states(p, &lasso)?;
    let mut out = BTreeSet::new();
    for i in 0..fuel {
        let s = lasso.state(i);
        let node = &p.nodes[&lasso.nodes[s]];
        if let Some(OccurrencePos::Ante(k)) = node.app.principal {
            if node.sequent.antecedent[k].is_star() && good.contains(&(s, k)) {
                out.insert(i);
            }
        }
    }
    Ok(out)
}

/// States `(lasso index, position)` from which a star thread continues for
/// ever and is principal infinitely often.
fn good_states(
    p: &CyclicProof,
    lasso: &Lasso,
) -> Result<BTreeSet<(usize, usize)>, ProofError> {
    let m = lasso.nodes.len();
    // Trace graph over (state, pos) with flagged edges.
    let mut succ: BTreeMap<(usize, usize), Vec<((usize, usize), bool)>> = BTreeMap::new();
    for s in 0..m {
        let id = &lasso.nodes[s];
        let node = &p.nodes[id];
        let premise = node
            .app
            .rule
            .premise_of_slot(lasso.slots[s])
            .expect("lasso follows existing slots");
        let child_id = &node.children[premise];
        let rel = edge_relation(&node.sequent, &node.app, premise, &p.nodes[child_id].sequent)?;
        let t = if s + 1 < m { s + 1 } else { lasso.loop_start };
        for (a, b, flag) in rel.pairs() {
            succ.entry((s, a)).or_default().push(((t, b), flag));
        }
    }
    // Tarjan-free SCC: Kosaraju on the small trace graph.
    let verts: Vec<(usize, usize)> = {
        let mut v: BTreeSet<(usize, usize)> = succ.keys().copied().collect();
        for es in succ.values() {
            for (t, _) in es {
                v.insert(*t);
            }
        }
        v.into_iter().collect()
    };
    let comp = scc(&verts, &succ);
    let mut live_comps = BTreeSet::new();
    for (u, es) in &succ {
        for (v, flag) in es {
            if *flag && comp[u] == comp[v] {
                live_comps.insert(comp[u]);
            }
        }
    }
    let mut good: BTreeSet<(usize, usize)> = verts
        .iter()
        .filter(|v| live_comps.contains(&comp[*v]))
        .copied()
        .collect();
    // Backward closure.
    let mut changed = true;
    while changed {
        changed = false;
        for (u, es) in &succ {
            if !good.contains(u) && es.iter().any(|(v, _)| good.contains(v)) {
                good.insert(*u);
                changed = true;
            }
        }
    }
    Ok(good)
}

fn scc(
    verts: &[(usize, usize)],
    succ: &BTreeMap<(usize, usize), Vec<((usize, usize), bool)>>,
) -> BTreeMap<(usize, usize), usize> {
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    for &v in verts {
        if seen.contains(&v) {
            continue;
        }
        // Iterative post-order DFS.
        let mut stack = vec![(v, 0usize)];
        seen.insert(v);
        while let Some((u, i)) = stack.pop() {
            let es = succ.get(&u).map(Vec::as_slice).unwrap_or(&[]);
            if i < es.len() {
                stack.push((u, i + 1));
                let w = es[i].0;
                if seen.insert(w) {
                    stack.push((w, 0));
                }
            } else {
                order.push(u);
            }
        }
    }
    let mut pred: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (u, es) in succ {
        for (w, _) in es {
            pred.entry(*w).or_default().push(*u);
        }
    }
    let mut comp = BTreeMap::new();
    let mut c = 0;
    for &v in order.iter().rev() {
        if comp.contains_key(&v) {
            continue;
        }
        let mut stack = vec![v];
        comp.insert(v, c);
        while let Some(u) = stack.pop() {
            for &w in pred.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::btree_map::Entry::Vacant(e) = comp.entry(w) {
                    e.insert(c);
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CriticalHeight {
    Finite(usize),
    /// No progress point below the fuel.
    InfinityUpToFuel,
}

impl fmt::Display for CriticalHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalHeight::Finite(n) => write!(f, "{n}"),
            CriticalHeight::InfinityUpToFuel => f.write_str("inf"),
        }
    }
}

pub fn critical_height(
    p: &CyclicProof,
    word: &BranchWord,
    fuel: usize,
) -> Result<CriticalHeight, ProofError> {
    Ok(progress_points(p, word, fuel)?
        .into_iter()
        .next()
        .map(CriticalHeight::Finite)
        .unwrap_or(CriticalHeight::InfinityUpToFuel))
}

/// The proof rooted at the child reached by the first slot of `word`.
pub fn subproof_along(p: &CyclicProof, slot: usize) -> Result<Option<CyclicProof>, ProofError> {
    Ok(p.child_at_slot(&p.root, slot)?.map(|c| CyclicProof {
        nodes: p.nodes.clone(),
        root: c.to_string(),
    }))
}

// ---------------------------------------------------------------------------
// Branch enumeration
// ---------------------------------------------------------------------------

/// Simple lassos: a simple path from the root followed by an edge back into
/// the path. At most `cap` words.
pub fn enumerate_lassos(p: &CyclicProof, cap: usize) -> Result<Vec<BranchWord>, ProofError> {
    let mut out = Vec::new();
    let mut path: Vec<String> = vec![p.root.clone()];
    let mut slots: Vec<usize> = Vec::new();
    lasso_dfs(p, &mut path, &mut slots, &mut out, cap)?;
    Ok(out)
}

fn lasso_dfs(
    p: &CyclicProof,
    path: &mut Vec<String>,
    slots: &mut Vec<usize>,
    out: &mut Vec<BranchWord>,
    cap: usize,
) -> Result<(), ProofError> {
    if out.len() >= cap {
        return Ok(());
    }
    let cur = path.last().expect("nonempty path").clone();
    for (slot, child) in p.edges(&cur)? {
        if out.len() >= cap {
            return Ok(());
        }
        if let Some(j) = path.iter().position(|n| *n == child) {
            let mut cycle = slots[j..].to_vec();
            cycle.push(slot);
            out.push(BranchWord {
                stem: slots[..j].to_vec(),
                cycle,
            });
        } else {
            path.push(child);
            slots.push(slot);
            lasso_dfs(p, path, slots, out, cap)?;
            path.pop();
            slots.pop();
        }
    }
    Ok(())
}

/// A random walk from the root cut into a lasso at the first repeated node,
/// or `None` if it reaches a leaf.
pub fn random_lasso(
    p: &CyclicProof,
    rng: &mut impl Rng,
    max_steps: usize,
) -> Result<Option<BranchWord>, ProofError> {
    let mut path = vec![p.root.clone()];
    let mut slots = Vec::new();
    for _ in 0..max_steps {
        let cur = path.last().expect("nonempty").clone();
        let es = p.edges(&cur)?;
        if es.is_empty() {
            return Ok(None);
        }
        let (slot, child) = es[rng.gen_range(0..es.len())].clone();
        if let Some(j) = path.iter().position(|n| *n == child) {
            let mut cycle = slots[j..].to_vec();
            cycle.push(slot);
            return Ok(Some(BranchWord {
                stem: slots[..j].to_vec(),
                cycle,
            }));
        }
        path.push(child);
        slots.push(slot);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::syntax::{f, seq};

    #[test]
    fn trace_relation_algebra() {
        let mut a = TraceRel::empty(3);
        a.insert(0, 1, false);
        a.insert(1, 2, true);
        let mut b = TraceRel::empty(3);
        b.insert(1, 0, false);
        b.insert(2, 2, false);
        let ab = a.compose(&b);
        assert_eq!(ab.contains(0, 0), Some(false));
        assert_eq!(ab.contains(1, 2), Some(true));
        assert_eq!(ab.contains(0, 2), None);
        let c = b.compose(&a);
        assert_eq!(a.compose(&b).compose(&a), a.compose(&c));
    }

    #[test]
    fn star_threads() {
        let seqs = vec![seq("a*, 1 |- b"), seq("a* |- b"), seq("a, a* |- b")];
        let t = Thread {
            start: 0,
            positions: vec![OccurrencePos::Ante(0), OccurrencePos::Ante(0)],
        };
        assert!(is_star_thread(&t, &seqs));
        let succ = Thread {
            start: 0,
            positions: vec![OccurrencePos::Succ],
        };
        assert!(!is_star_thread(&succ, &seqs));
        let changes = Thread {
            start: 1,
            positions: vec![OccurrencePos::Ante(0), OccurrencePos::Ante(0)],
        };
        assert!(!is_star_thread(&changes, &seqs));
        assert!(StarAssignment::single(0, 3).is_valid_for(&seqs[0]));
        assert!(!StarAssignment::single(1, 3).is_valid_for(&seqs[0]));
        let _ = f("a");
    }

    #[test]
    fn canonical_proofs_accepted() {
        for (goal, p) in corpus::canonical_cyclic() {
            let r = check_cyclic(&p).unwrap();
            assert!(r.verdict.is_accepted(), "{goal}: {:?}", r.verdict);
        }
    }

    #[test]
    fn corrupted_proofs_rejected() {
        for (name, p) in corpus::corrupted_cyclic() {
            let r = check_cyclic(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            match r.verdict {
                ProgressVerdict::Rejected(cx) => {
                    assert_eq!(cx.cycle.first(), cx.cycle.last(), "{name}");
                    let pp = progress_points(&p, &cx.word(), 12).unwrap();
                    assert!(pp.is_empty(), "{name}: {pp:?}");
                }
                other => panic!("{name} accepted: {other:?}"),
            }
        }
    }

    #[test]
    fn progress_points_on_the_star_cycle() {
        let p = corpus::canonical_star_identity();
        // root *L, right premise *R1, right premise back to root
        let word = BranchWord {
            stem: vec![],
            cycle: vec![1, 1],
        };
        let pp = progress_points(&p, &word, 12).unwrap();
        assert_eq!(pp, (0..12).step_by(2).collect());
        assert_eq!(critical_height(&p, &word, 12).unwrap(), CriticalHeight::Finite(0));
        let tail = subproof_along(&p, 1).unwrap().unwrap();
        let pt = progress_points(&tail, &word.tail(), 11).unwrap();
        let shifted: BTreeSet<usize> = pp.iter().filter(|&&i| i > 0).map(|i| i - 1).collect();
        assert_eq!(pt, shifted);
        let finite = BranchWord {
            stem: vec![0],
            cycle: vec![],
        };
        assert!(progress_points(&p, &finite, 12).unwrap().is_empty());
        assert_eq!(
            critical_height(&p, &finite, 12).unwrap(),
            CriticalHeight::InfinityUpToFuel
        );
    }

    #[test]
    fn lasso_enumeration() {
        let p = corpus::canonical_star_identity();
        let ls = enumerate_lassos(&p, 100).unwrap();
        assert!(!ls.is_empty());
        for w in ls {
            assert!(lasso_of(&p, &w).unwrap().is_some());
        }
    }
}
