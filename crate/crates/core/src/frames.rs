// SPDX-License-Identifier: Apache-2.0

//! Finite residuated frames, their dual algebras, and the Gentzen-frame
//! checks relating a frame to an algebra.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{refute_quasieq, validate_algebra, FiniteActionLattice, ModelError, ModelFile};
use crate::rules::Quasiequation;
use crate::syntax::Formula;

/// Largest number of closed sets a dual algebra may have.
pub const CLOSED_SET_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("more than {0} closed sets")]
    TooManyClosedSets(usize),
    #[error("bad frame: {0}")]
    Shape(String),
    #[error("quasiequation is not analytic: {0}")]
    NotAnalytic(String),
    #[error("{needed} valuations exceed the budget of {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `(W, W′, N, ∘, ε)` with residual witnesses in `W′`. Tables are row-major:
/// `comp[x * |W| + y]`, `lres[x * |W′| + z]` is `x⫮z`, `rres[z * |W| + y]`
/// is `z⫯y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduatedFrame {
    pub name: String,
    pub w: Vec<String>,
    pub wp: Vec<String>,
    /// `rows[x]` is `{z | x N z}`.
    pub rows: Vec<FixedBitSet>,
    /// `cols[z]` is `{x | x N z}`.
    pub cols: Vec<FixedBitSet>,
    pub comp: Vec<usize>,
    pub eps: usize,
    pub lres: Vec<usize>,
    pub rres: Vec<usize>,
}

impl ResiduatedFrame {
    pub fn build(
        name: &str,
        w: Vec<String>,
        wp: Vec<String>,
        n: &dyn Fn(usize, usize) -> bool,
        comp: Vec<usize>,
        eps: usize,
        lres: Vec<usize>,
        rres: Vec<usize>,
    ) -> Result<ResiduatedFrame, FrameError> {
        let (nw, nwp) = (w.len(), wp.len());
        if comp.len() != nw * nw || lres.len() != nw * nwp || rres.len() != nwp * nw || eps >= nw {
            return Err(FrameError::Shape("table sizes do not match".into()));
        }
        if comp.iter().any(|&x| x >= nw) || lres.iter().chain(&rres).any(|&z| z >= nwp) {
            return Err(FrameError::Shape("table entry out of range".into()));
        }
        let mut rows = vec![FixedBitSet::with_capacity(nwp); nw];
        let mut cols = vec![FixedBitSet::with_capacity(nw); nwp];
        for x in 0..nw {
            for z in 0..nwp {
                if n(x, z) {
                    rows[x].insert(z);
                    cols[z].insert(x);
                }
            }
        }
        Ok(ResiduatedFrame {
            name: name.to_string(),
            w,
            wp,
            rows,
            cols,
            comp,
            eps,
            lres,
            rres,
        })
    }

    pub fn nw(&self) -> usize {
        self.w.len()
    }

    pub fn nwp(&self) -> usize {
        self.wp.len()
    }

    #[inline]
    pub fn n(&self, x: usize, z: usize) -> bool {
        self.rows[x].contains(z)
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.comp[x * self.nw() + y]
    }

    /// `x⫮z`.
    #[inline]
    pub fn under(&self, x: usize, z: usize) -> usize {
        self.lres[x * self.nwp() + z]
    }

    /// `z⫯y`.
    #[inline]
    pub fn over(&self, z: usize, y: usize) -> usize {
        self.rres[z * self.nw() + y]
    }

    /// `X^▷`.
    pub fn rhd(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.nwp());
        out.insert_range(..);
        for i in x.ones() {
            out.intersect_with(&self.rows[i]);
        }
        out
    }

    /// `Z^◁`.
    pub fn lhd(&self, z: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.nw());
        out.insert_range(..);
        for i in z.ones() {
            out.intersect_with(&self.cols[i]);
        }
        out
    }

    /// `γ(X) = X^▷◁`.
    pub fn gamma(&self, x: &FixedBitSet) -> FixedBitSet {
        self.lhd(&self.rhd(x))
    }

    pub fn set_of(&self, xs: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.nw());
        s.extend(xs);
        s
    }

    /// `X ∘ Y`.
    pub fn set_op(&self, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.nw());
        for a in x.ones() {
            for b in y.ones() {
                s.insert(self.op(a, b));
            }
        }
        s
    }

    /// The submonoid generated by `X`.
    pub fn submonoid(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut s = self.set_of([self.eps]);
        let mut todo = vec![self.eps];
        while let Some(u) = todo.pop() {
            for g in x.ones() {
                let v = self.op(u, g);
                if !s.contains(v) {
                    s.insert(v);
                    todo.push(v);
                }
            }
        }
        s
    }
}

/// The frame `W_A = (A, A, ≤, ·, 1)` with the residuals of `A` as
/// witnesses.
pub fn w_a(a: &FiniteActionLattice) -> ResiduatedFrame {
    ResiduatedFrame::build(
        &format!("W({})", a.name),
        a.names.clone(),
        a.names.clone(),
        &|x, z| a.le(x, z),
        a.prod.clone(),
        a.one,
        a.lres.clone(),
        a.rres.clone(),
    )
    .expect("model tables have matching sizes")
}

/// The frame of a finite monoid `M` and a subset `D`: `W = M`,
/// `W′ = M × M`, and `x N (u, v)` iff `u∘x∘v ∈ D`.
pub fn context_frame(
    name: &str,
    monoid: &[usize],
    eps: usize,
    d: &BTreeSet<usize>,
) -> Result<ResiduatedFrame, FrameError> {
    let m = (1..=monoid.len())
        .find(|k| k * k == monoid.len())
        .filter(|&m| eps < m)
        .ok_or_else(|| FrameError::Shape("monoid table is not square".into()))?;
    let op = |x: usize, y: usize| monoid[x * m + y];
    let w: Vec<String> = (0..m).map(|i| format!("m{i}")).collect();
    let wp: Vec<String> = (0..m * m)
        .map(|i| format!("(m{},m{})", i / m, i % m))
        .collect();
    let mut lres = vec![0; m * m * m];
    let mut rres = vec![0; m * m * m];
    for x in 0..m {
        for z in 0..m * m {
            let (u, v) = (z / m, z % m);
            lres[x * m * m + z] = op(u, x) * m + v;
            rres[z * m + x] = u * m + op(x, v);
        }
    }
    ResiduatedFrame::build(
        name,
        w,
        wp,
        &|x, z| d.contains(&op(op(z / m, x), z % m)),
        monoid.to_vec(),
        eps,
        lres,
        rres,
    )
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameViolation {
    pub rule: String,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameReport {
    pub checks: u64,
    pub violations: Vec<FrameViolation>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, rule: &str, witness: Vec<usize>) {
        if self.violations.iter().filter(|v| v.rule == rule).count() < 4 {
            self.violations.push(FrameViolation {
                rule: rule.to_string(),
                witness,
            });
        }
    }

    fn check(&mut self, ok: bool, rule: &str, witness: impl FnOnce() -> Vec<usize>) {
        self.checks += 1;
        if !ok {
            self.fail(rule, witness());
        }
    }
}

impl fmt::Display for FrameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "pass ({} checks)", self.checks);
        }
        for v in &self.violations {
            writeln!(f, "{} fails at {:?}", v.rule, v.witness)?;
        }
        Ok(())
    }
}

/// `x∘y N z ⟺ y N x⫮z ⟺ x N z⫯y` for all triples.
pub fn check_nuclear(fr: &ResiduatedFrame) -> FrameReport {
    let mut r = FrameReport::default();
    for x in 0..fr.nw() {
        for y in 0..fr.nw() {
            let xy = fr.op(x, y);
            for z in 0..fr.nwp() {
                let a = fr.n(xy, z);
                r.check(
                    a == fr.n(y, fr.under(x, z)) && a == fr.n(x, fr.over(z, y)),
                    "nuclearity",
                    || vec![x, y, z],
                );
            }
        }
    }
    for x in 0..fr.nw() {
        r.check(
            fr.op(x, fr.eps) == x && fr.op(fr.eps, x) == x,
            "unit",
            || vec![x],
        );
        for y in 0..fr.nw() {
            for z in 0..fr.nw() {
                r.check(
                    fr.op(fr.op(x, y), z) == fr.op(x, fr.op(y, z)),
                    "associativity",
                    || vec![x, y, z],
                );
            }
        }
    }
    r
}

// ---------------------------------------------------------------------------
// Dual algebra
// ---------------------------------------------------------------------------

/// `W⁺` with its closed sets and their generators.
#[derive(Clone, Debug)]
pub struct DualAlgebra {
    pub sets: Vec<FixedBitSet>,
    /// A set whose closure is the corresponding closed set.
    pub gens: Vec<Vec<usize>>,
    pub algebra: FiniteActionLattice,
    index: HashMap<FixedBitSet, usize>,
}

impl DualAlgebra {
    pub fn index_of(&self, s: &FixedBitSet) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// All γ-closed subsets of `W`: the intersections of the sets `{z}^◁`.
pub fn closed_sets(fr: &ResiduatedFrame, cap: usize) -> Result<Vec<FixedBitSet>, FrameError> {
    let mut full = FixedBitSet::with_capacity(fr.nw());
    full.insert_range(..);
    let mut seen: HashMap<FixedBitSet, ()> = HashMap::from([(full.clone(), ())]);
    let mut out = vec![full];
    for z in 0..fr.nwp() {
        let col = &fr.cols[z];
        let snapshot = out.len();
        for i in 0..snapshot {
            let mut t = out[i].clone();
            t.intersect_with(col);
            if !seen.contains_key(&t) {
                if out.len() >= cap {
                    return Err(FrameError::TooManyClosedSets(cap));
                }
                seen.insert(t.clone(), ());
                out.push(t);
            }
        }
    }
    out.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| a.ones().collect::<Vec<_>>().cmp(&b.ones().collect::<Vec<_>>()))
    });
    Ok(out)
}

fn generators(fr: &ResiduatedFrame, x: &FixedBitSet) -> Vec<usize> {
    let mut g = Vec::new();
    let mut cur = fr.gamma(&FixedBitSet::with_capacity(fr.nw()));
    let mut elems: Vec<usize> = x.ones().collect();
    elems.reverse();
    for e in elems {
        if cur == *x {
            break;
        }
        if !cur.contains(e) {
            g.push(e);
            cur = fr.gamma(&fr.set_of(g.iter().copied()));
        }
    }
    g
}

/// The dual algebra. The bottom is `0^◁` when `zero` names an element of
/// `W′`, and `γ(∅)` otherwise.
pub fn dual_algebra(fr: &ResiduatedFrame, zero: Option<usize>) -> Result<DualAlgebra, FrameError> {
    let sets = closed_sets(fr, CLOSED_SET_CAP)?;
    let n = sets.len();
    let index: HashMap<FixedBitSet, usize> =
        sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let gens: Vec<Vec<usize>> = sets.iter().map(|s| generators(fr, s)).collect();
    let look = |s: &FixedBitSet, what: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| FrameError::Shape(format!("{what} is not closed")))
    };
    let gset: Vec<FixedBitSet> = gens.iter().map(|g| fr.set_of(g.iter().copied())).collect();
    let mut leq = vec![false; n * n];
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    let mut prod = vec![0; n * n];
    let mut lres = vec![0; n * n];
    let mut rres = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            leq[i * n + j] = sets[i].is_subset(&sets[j]);
            let mut m = sets[i].clone();
            m.intersect_with(&sets[j]);
            meet[i * n + j] = look(&m, "an intersection")?;
            let mut u = gset[i].clone();
            u.union_with(&gset[j]);
            join[i * n + j] = look(&fr.gamma(&u), "a join")?;
            prod[i * n + j] = look(&fr.gamma(&fr.set_op(&gset[i], &gset[j])), "a product")?;
            // X\Y = {y | X∘{y} ⊆ Y} and Y/X = {y | {y}∘X ⊆ Y}, with X = sets[i]
            // and Y = sets[j]; testing generators of X suffices as Y is closed.
            let mut l = FixedBitSet::with_capacity(fr.nw());
            let mut r = FixedBitSet::with_capacity(fr.nw());
            for y in 0..fr.nw() {
                if gens[i].iter().all(|&g| sets[j].contains(fr.op(g, y))) {
                    l.insert(y);
                }
                if gens[i].iter().all(|&g| sets[j].contains(fr.op(y, g))) {
                    r.insert(y);
                }
            }
            lres[i * n + j] = look(&l, "a left residual")?;
            rres[j * n + i] = look(&r, "a right residual")?;
        }
    }
    let star = (0..n)
        .map(|i| look(&fr.gamma(&fr.submonoid(&gset[i])), "a star"))
        .collect::<Result<Vec<_>, _>>()?;
    let bottom = match zero {
        Some(z) => {
            let mut s = FixedBitSet::with_capacity(fr.nwp());
            s.insert(z);
            fr.lhd(&s)
        }
        None => fr.gamma(&FixedBitSet::with_capacity(fr.nw())),
    };
    let names = gens
        .iter()
        .map(|g| {
            let parts: Vec<&str> = g.iter().map(|&x| fr.w[x].as_str()).collect();
            format!("γ{{{}}}", parts.join(","))
        })
        .collect();
    let algebra = FiniteActionLattice {
        name: format!("{}+", fr.name),
        names,
        leq,
        meet,
        join,
        prod,
        lres,
        rres,
        star,
        zero: look(&bottom, "the bottom")?,
        one: look(&fr.gamma(&fr.set_of([fr.eps])), "the unit")?,
    };
    Ok(DualAlgebra {
        sets,
        gens,
        algebra,
        index,
    })
}

// ---------------------------------------------------------------------------
// Gentzen frames
// ---------------------------------------------------------------------------

/// A frame with an algebra injected into both `W` and `W′`.
#[derive(Clone, Debug)]
pub struct GentzenFrame {
    pub frame: ResiduatedFrame,
    pub algebra: FiniteActionLattice,
    pub in_w: Vec<usize>,
    pub in_wp: Vec<usize>,
}

impl GentzenFrame {
    /// `(W_A, A)`.
    pub fn of_model(a: &FiniteActionLattice) -> GentzenFrame {
        GentzenFrame {
            frame: w_a(a),
            algebra: a.clone(),
            in_w: (0..a.size()).collect(),
            in_wp: (0..a.size()).collect(),
        }
    }

    fn nn(&self, x: usize, a: usize) -> bool {
        self.frame.n(x, self.in_wp[a])
    }
}

/// Whether the check includes `(Cut)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GentzenKind {
    CutFree,
    WithCut,
}

/// The frame rules for `· \ / ∧ ∨ 1`, and `(Cut)` when asked.
pub fn check_gentzen(g: &GentzenFrame, kind: GentzenKind) -> FrameReport {
    let fr = &g.frame;
    let al = &g.algebra;
    let (na, nw, nwp) = (al.size(), fr.nw(), fr.nwp());
    let (iw, iwp) = (&g.in_w, &g.in_wp);
    let mut r = FrameReport::default();
    // Pairs (x, a) with x N a and (b, z) with b N z.
    let xa: Vec<(usize, usize)> = (0..nw)
        .flat_map(|x| (0..na).map(move |a| (x, a)))
        .filter(|&(x, a)| g.nn(x, a))
        .collect();
    let bz: Vec<(usize, usize)> = (0..na)
        .flat_map(|b| (0..nwp).map(move |z| (b, z)))
        .filter(|&(b, z)| fr.n(iw[b], z))
        .collect();
    for a in 0..na {
        r.check(fr.n(iw[a], iwp[a]), "(Id)", || vec![a]);
    }
    if kind == GentzenKind::WithCut {
        for &(x, a) in &xa {
            for z in 0..nwp {
                if fr.n(iw[a], z) {
                    r.check(fr.n(x, z), "(Cut)", || vec![x, a, z]);
                }
            }
        }
    }
    for &(x, a) in &xa {
        for &(b, z) in &bz {
            r.check(
                fr.n(iw[al.under(a, b)], fr.under(x, z)),
                "(\\L)",
                || vec![x, a, b, z],
            );
            r.check(
                fr.n(iw[al.over(b, a)], fr.over(z, x)),
                "(/L)",
                || vec![x, a, b, z],
            );
        }
    }
    for x in 0..nw {
        for a in 0..na {
            for b in 0..na {
                if fr.n(x, fr.under(iw[a], iwp[b])) {
                    r.check(g.nn(x, al.under(a, b)), "(\\R)", || vec![x, a, b]);
                }
                if fr.n(x, fr.over(iwp[b], iw[a])) {
                    r.check(g.nn(x, al.over(b, a)), "(/R)", || vec![x, a, b]);
                }
                if g.nn(x, a) && g.nn(x, b) {
                    r.check(g.nn(x, al.meet(a, b)), "(&R)", || vec![x, a, b]);
                }
                if g.nn(x, a) || g.nn(x, b) {
                    r.check(g.nn(x, al.join(a, b)), "(|R)", || vec![x, a, b]);
                }
            }
        }
    }
    for a in 0..na {
        for b in 0..na {
            for z in 0..nwp {
                if fr.n(fr.op(iw[a], iw[b]), z) {
                    r.check(fr.n(iw[al.mul(a, b)], z), "(.L)", || vec![a, b, z]);
                }
                let m = iw[al.meet(a, b)];
                if fr.n(iw[a], z) || fr.n(iw[b], z) {
                    r.check(fr.n(m, z), "(&L)", || vec![a, b, z]);
                }
                if fr.n(iw[a], z) && fr.n(iw[b], z) {
                    r.check(fr.n(iw[al.join(a, b)], z), "(|L)", || vec![a, b, z]);
                }
            }
        }
    }
    for &(x, a) in &xa {
        for &(y, b) in &xa {
            r.check(
                g.nn(fr.op(x, y), al.mul(a, b)),
                "(.R)",
                || vec![x, y, a, b],
            );
        }
    }
    for z in 0..nwp {
        if fr.n(fr.eps, z) {
            r.check(fr.n(iw[al.one], z), "(1L)", || vec![z]);
        }
    }
    r.check(g.nn(fr.eps, al.one), "(1R)", Vec::new);
    r
}

/// The additional rules for `0` and `*`. The premise family of `(*L)` is
/// checked over the distinct `∘`-powers, which cycle on a finite frame.
pub fn check_star_gentzen(g: &GentzenFrame) -> FrameReport {
    let fr = &g.frame;
    let al = &g.algebra;
    let (na, nw, nwp) = (al.size(), fr.nw(), fr.nwp());
    let mut r = FrameReport::default();
    for x in 0..nw {
        if g.nn(x, al.zero) {
            for z in 0..nwp {
                r.check(fr.n(x, z), "(0L)", || vec![x, z]);
            }
        }
    }
    for a in 0..na {
        let mut powers = BTreeSet::new();
        let mut p = fr.eps;
        while powers.insert(p) {
            p = fr.op(p, g.in_w[a]);
        }
        let star = g.in_w[al.star[a]];
        for z in 0..nwp {
            if powers.iter().all(|&p| fr.n(p, z)) {
                r.check(fr.n(star, z), "(*L)", || vec![a, z]);
            }
        }
        r.check(g.nn(fr.eps, al.star[a]), "(*R0)", || vec![a]);
        for x in 0..nw {
            if !g.nn(x, a) {
                continue;
            }
            for y in 0..nw {
                if g.nn(y, al.star[a]) {
                    r.check(
                        g.nn(fr.op(x, y), al.star[a]),
                        "(*R1)",
                        || vec![x, y, a],
                    );
                }
            }
        }
    }
    r
}

/// `F(a) = {X ∈ W⁺ | a ∈ X ⊆ a^◁}` and the quasimorphism inclusions.
pub fn quasimorphism_check(g: &GentzenFrame, d: &DualAlgebra) -> FrameReport {
    let al = &g.algebra;
    let dal = &d.algebra;
    let na = al.size();
    let mut r = FrameReport::default();
    let fam: Vec<Vec<usize>> = (0..na)
        .map(|a| {
            let mut s = FixedBitSet::with_capacity(g.frame.nwp());
            s.insert(g.in_wp[a]);
            let down = g.frame.lhd(&s);
            (0..d.sets.len())
                .filter(|&i| d.sets[i].contains(g.in_w[a]) && d.sets[i].is_subset(&down))
                .collect()
        })
        .collect();
    r.check(fam[al.one].contains(&dal.one), "1 in F(1)", Vec::new);
    r.check(fam[al.zero].contains(&dal.zero), "0 in F(0)", Vec::new);
    for a in 0..na {
        for &x in &fam[a] {
            r.check(fam[al.star[a]].contains(&dal.star[x]), "F(a)* in F(a*)", || {
                vec![a, x]
            });
        }
        for b in 0..na {
            for &x in &fam[a] {
                for &y in &fam[b] {
                    let cases = [
                        ("F(a)&F(b) in F(a&b)", al.meet(a, b), dal.meet(x, y)),
                        ("F(a)|F(b) in F(a|b)", al.join(a, b), dal.join(x, y)),
                        ("F(a).F(b) in F(a.b)", al.mul(a, b), dal.mul(x, y)),
                        ("F(a)\\F(b) in F(a\\b)", al.under(a, b), dal.under(x, y)),
                        ("F(a)/F(b) in F(a/b)", al.over(a, b), dal.over(x, y)),
                    ];
                    for (law, c, v) in cases {
                        r.check(fam[c].contains(&v), law, || vec![a, b, x, y]);
                    }
                }
            }
        }
    }
    r
}

/// Outcome of [`embedding_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub report: FrameReport,
    /// `f(a)` as an index into the dual algebra.
    pub map: Vec<usize>,
    pub antisymmetric: bool,
    pub injective: bool,
    pub surjective: bool,
}

/// `f(a) = a^◁` is a homomorphism; injective when `N` is antisymmetric on
/// the image of the algebra.
pub fn embedding_check(g: &GentzenFrame, d: &DualAlgebra) -> EmbeddingReport {
    let al = &g.algebra;
    let dal = &d.algebra;
    let na = al.size();
    let mut r = FrameReport::default();
    let mut map = Vec::with_capacity(na);
    for a in 0..na {
        let mut s = FixedBitSet::with_capacity(g.frame.nwp());
        s.insert(g.in_wp[a]);
        match d.index_of(&g.frame.lhd(&s)) {
            Some(i) => map.push(i),
            None => {
                r.fail("a^◁ is closed", vec![a]);
                map.push(usize::MAX);
            }
        }
    }
    if r.passed() {
        r.check(map[al.one] == dal.one, "f(1) = 1", Vec::new);
        r.check(map[al.zero] == dal.zero, "f(0) = 0", Vec::new);
        for a in 0..na {
            r.check(map[al.star[a]] == dal.star[map[a]], "f(a*) = f(a)*", || vec![a]);
            for b in 0..na {
                let (x, y) = (map[a], map[b]);
                r.check(map[al.meet(a, b)] == dal.meet(x, y), "f(a&b)", || vec![a, b]);
                r.check(map[al.join(a, b)] == dal.join(x, y), "f(a|b)", || vec![a, b]);
                r.check(map[al.mul(a, b)] == dal.mul(x, y), "f(a.b)", || vec![a, b]);
                r.check(map[al.under(a, b)] == dal.under(x, y), "f(a\\b)", || vec![a, b]);
                r.check(map[al.over(a, b)] == dal.over(x, y), "f(a/b)", || vec![a, b]);
            }
        }
    }
    let antisymmetric = (0..na).all(|a| {
        (0..na).all(|b| a == b || !(g.nn(g.in_w[a], b) && g.nn(g.in_w[b], a)))
    });
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    let injective = distinct.len() == na;
    if antisymmetric {
        r.check(injective, "f is injective", Vec::new);
    }
    EmbeddingReport {
        surjective: distinct.len() == d.sets.len(),
        report: r,
        map,
        antisymmetric,
        injective,
    }
}

// ---------------------------------------------------------------------------
// Quasiequations on frames
// ---------------------------------------------------------------------------

fn product_vars(f: &Formula, out: &mut Vec<String>) -> bool {
    match f {
        Formula::One => true,
        Formula::Var(v) => {
            out.push(v.clone());
            true
        }
        Formula::Prod(a, b) => product_vars(a, out) && product_vars(b, out),
        _ => false,
    }
}

/// Frame satisfaction of an analytic quasiequation: products of variables
/// range over `W` through `∘`, the right-hand variable over `W′`.
pub fn frame_satisfies_q(
    fr: &ResiduatedFrame,
    q: &Quasiequation,
    budget: u64,
) -> Result<bool, FrameError> {
    if !q.is_analytic() {
        return Err(FrameError::NotAnalytic(q.to_string()));
    }
    let Formula::Var(beta) = &q.conclusion.1 else {
        return Err(FrameError::NotAnalytic(q.to_string()));
    };
    let mut xs: Vec<String> = Vec::new();
    let mut lhs = Vec::new();
    for f in q.premises.iter().map(|p| &p.0).chain([&q.conclusion.0]) {
        let mut v = Vec::new();
        if !product_vars(f, &mut v) || v.contains(beta) {
            return Err(FrameError::NotAnalytic(q.to_string()));
        }
        for x in &v {
            if !xs.contains(x) {
                xs.push(x.clone());
            }
        }
        lhs.push(v);
    }
    let idx: Vec<Vec<usize>> = lhs
        .iter()
        .map(|v| v.iter().map(|x| xs.iter().position(|y| y == x).expect("collected")).collect())
        .collect();
    let (nw, k) = (fr.nw(), xs.len());
    // Each valuation of the left-hand variables covers all of W′ at once.
    let needed = (nw as u128).pow(k as u32);
    if needed > budget as u128 {
        return Err(FrameError::Budget { needed, budget });
    }
    let mut vals = vec![0usize; k];
    let total = (nw as u128).pow(k as u32) as usize;
    for mut i in 0..total {
        for s in vals.iter_mut() {
            *s = i % nw;
            i /= nw;
        }
        let elems: Vec<usize> = idx
            .iter()
            .map(|p| p.iter().fold(fr.eps, |acc, &j| fr.op(acc, vals[j])))
            .collect();
        let (concl, prem) = elems.split_last().expect("conclusion present");
        // z ranges over W′: premises hold iff z is in every row.
        let mut ok = FixedBitSet::with_capacity(fr.nwp());
        ok.insert_range(..);
        for &p in prem {
            ok.intersect_with(&fr.rows[p]);
        }
        ok.difference_with(&fr.rows[*concl]);
        if ok.count_ones(..) > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Satisfaction of one quasiequation in a frame and in its dual algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReport {
    pub frame_side: bool,
    pub dual_side: bool,
}

impl TransferReport {
    pub fn agrees(&self) -> bool {
        self.frame_side == self.dual_side
    }
}

pub fn verify_transfer(
    fr: &ResiduatedFrame,
    d: &DualAlgebra,
    q: &Quasiequation,
    budget: u64,
) -> Result<TransferReport, FrameError> {
    Ok(TransferReport {
        frame_side: frame_satisfies_q(fr, q, budget)?,
        dual_side: refute_quasieq(&d.algebra, q, budget)?.is_none(),
    })
}

// ---------------------------------------------------------------------------
// MacNeille completion
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MacNeille {
    pub dual: DualAlgebra,
    pub embedding: EmbeddingReport,
    /// The four implications making `(W_A, A)` a star-Gentzen frame.
    pub facts: FrameReport,
}

impl MacNeille {
    pub fn is_isomorphism(&self) -> bool {
        self.embedding.report.passed() && self.embedding.injective && self.embedding.surjective
    }
}

/// `(W_A)⁺` with the embedding `a ↦ a^◁`.
pub fn macneille(a: &FiniteActionLattice) -> Result<MacNeille, FrameError> {
    let v = validate_algebra(a);
    if !v.is_valid() {
        return Err(FrameError::Shape(format!("{} is not an action lattice: {v}", a.name)));
    }
    let g = GentzenFrame::of_model(a);
    let dual = dual_algebra(&g.frame, Some(a.zero))?;
    let embedding = embedding_check(&g, &dual);
    let n = a.size();
    let mut facts = FrameReport::default();
    for x in 0..n {
        let s = a.star[x];
        facts.check(a.le(a.one, s), "1 <= a*", || vec![x]);
        for y in 0..n {
            if a.le(x, a.zero) {
                facts.check(x == a.zero && a.le(a.zero, y), "a <= 0 implies a = 0 <= b", || {
                    vec![x, y]
                });
            }
            let mut pow = a.one;
            let mut all = true;
            let mut seen = BTreeSet::new();
            while seen.insert(pow) {
                all &= a.le(pow, y);
                pow = a.mul(pow, x);
            }
            if all {
                facts.check(a.le(s, y), "all a^n <= b implies a* <= b", || vec![x, y]);
            }
            if a.le(y, x) {
                for c in 0..n {
                    if a.le(c, s) {
                        facts.check(a.le(a.mul(y, c), s), "b <= a, c <= a* implies bc <= a*", || {
                            vec![x, y, c]
                        });
                    }
                }
            }
        }
    }
    Ok(MacNeille {
        dual,
        embedding,
        facts,
    })
}

// ---------------------------------------------------------------------------
// Frame files
// ---------------------------------------------------------------------------

/// JSON form of a frame, optionally with an algebra and its injections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameFile {
    pub name: String,
    pub w: Vec<String>,
    pub wp: Vec<String>,
    /// Pairs `[x, z]` of element indices with `x N z`.
    pub n: Vec<[usize; 2]>,
    pub comp: Vec<Vec<usize>>,
    pub eps: usize,
    pub lres: Vec<Vec<usize>>,
    pub rres: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<ModelFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_w: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_wp: Option<Vec<usize>>,
}

impl FrameFile {
    pub fn from_frame(fr: &ResiduatedFrame) -> FrameFile {
        let (nw, nwp) = (fr.nw(), fr.nwp());
        FrameFile {
            name: fr.name.clone(),
            w: fr.w.clone(),
            wp: fr.wp.clone(),
            n: (0..nw)
                .flat_map(|x| fr.rows[x].ones().map(move |z| [x, z]))
                .collect(),
            comp: fr.comp.chunks(nw).map(<[usize]>::to_vec).collect(),
            eps: fr.eps,
            lres: fr.lres.chunks(nwp).map(<[usize]>::to_vec).collect(),
            rres: fr.rres.chunks(nw).map(<[usize]>::to_vec).collect(),
            algebra: None,
            in_w: None,
            in_wp: None,
        }
    }

    pub fn from_gentzen(g: &GentzenFrame) -> FrameFile {
        FrameFile {
            algebra: Some(ModelFile::from_model(&g.algebra)),
            in_w: Some(g.in_w.clone()),
            in_wp: Some(g.in_wp.clone()),
            ..FrameFile::from_frame(&g.frame)
        }
    }

    pub fn to_frame(&self) -> Result<ResiduatedFrame, FrameError> {
        let pairs: BTreeSet<(usize, usize)> = self.n.iter().map(|p| (p[0], p[1])).collect();
        ResiduatedFrame::build(
            &self.name,
            self.w.clone(),
            self.wp.clone(),
            &|x, z| pairs.contains(&(x, z)),
            self.comp.concat(),
            self.eps,
            self.lres.concat(),
            self.rres.concat(),
        )
    }

    pub fn to_gentzen(&self) -> Result<Option<GentzenFrame>, FrameError> {
        let frame = self.to_frame()?;
        match (&self.algebra, &self.in_w, &self.in_wp) {
            (Some(a), Some(iw), Some(iwp)) => {
                let algebra = a.to_model()?;
                if iw.len() != algebra.size()
                    || iwp.len() != algebra.size()
                    || iw.iter().any(|&x| x >= frame.nw())
                    || iwp.iter().any(|&z| z >= frame.nwp())
                {
                    return Err(FrameError::Shape("injections do not fit".into()));
                }
                Ok(Some(GentzenFrame {
                    frame,
                    algebra,
                    in_w: iw.clone(),
                    in_wp: iwp.clone(),
                }))
            }
            (None, None, None) => Ok(None),
            _ => Err(FrameError::Shape("algebra and injections go together".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{rel_algebra, rule_quasieqs, three_chain, two_chain, DEFAULT_VALUATION_BUDGET};

    fn mod_monoid(k: usize) -> Vec<usize> {
        (0..k * k).map(|i| (i / k + i % k) % k).collect()
    }

    #[test]
    fn galois_edge_cases() {
        let fr = w_a(&three_chain());
        let empty = FixedBitSet::with_capacity(3);
        assert_eq!(fr.rhd(&empty).count_ones(..), 3);
        let full = fr.set_of(0..3);
        assert_eq!(fr.rhd(&full).ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(fr.gamma(&empty), fr.lhd(&fr.rhd(&empty)));
    }

    #[test]
    fn degenerate_frame_has_one_closed_set() {
        let fr = context_frame("all", &mod_monoid(2), 0, &BTreeSet::from([0, 1])).unwrap();
        assert!(check_nuclear(&fr).passed());
        let d = dual_algebra(&fr, None).unwrap();
        assert_eq!(d.sets.len(), 1);
        assert!(validate_algebra(&d.algebra).is_valid());
    }

    #[test]
    fn context_frames_are_nuclear_and_dualize() {
        for k in 1..=4 {
            let fr = context_frame("z", &mod_monoid(k), 0, &BTreeSet::from([0])).unwrap();
            assert!(check_nuclear(&fr).passed());
            let d = dual_algebra(&fr, None).unwrap();
            let v = validate_algebra(&d.algebra);
            assert!(v.is_valid(), "Z{k}: {v}");
        }
    }

    #[test]
    fn w_a_duals_are_isomorphic() {
        for a in [two_chain(), three_chain(), rel_algebra(2).unwrap()] {
            let m = macneille(&a).unwrap();
            assert!(m.is_isomorphism(), "{}: {}", a.name, m.embedding.report);
            assert!(m.facts.passed());
            assert!(validate_algebra(&m.dual.algebra).is_valid());
        }
    }

    #[test]
    fn gentzen_rules_on_w_a() {
        for a in [two_chain(), rel_algebra(2).unwrap()] {
            let g = GentzenFrame::of_model(&a);
            assert!(check_gentzen(&g, GentzenKind::WithCut).passed());
            assert!(check_star_gentzen(&g).passed());
            let d = dual_algebra(&g.frame, Some(a.zero)).unwrap();
            assert!(quasimorphism_check(&g, &d).passed());
        }
    }

    #[test]
    fn removing_a_pair_breaks_a_rule() {
        let a = three_chain();
        let mut g = GentzenFrame::of_model(&a);
        g.frame.rows[1].set(1, false);
        g.frame.cols[1].set(1, false);
        let r = check_gentzen(&g, GentzenKind::WithCut);
        assert!(r.violations.iter().any(|v| v.rule == "(Id)"));
    }

    #[test]
    fn transfer_examples() {
        let qs = rule_quasieqs(&["C", "Wk"]).unwrap();
        let two = w_a(&two_chain());
        let d2 = dual_algebra(&two, Some(0)).unwrap();
        let wk = verify_transfer(&two, &d2, &qs[1], DEFAULT_VALUATION_BUDGET).unwrap();
        assert_eq!(wk, TransferReport { frame_side: true, dual_side: true });
        let rel = rel_algebra(2).unwrap();
        let fr = w_a(&rel);
        let d = dual_algebra(&fr, Some(rel.zero)).unwrap();
        let c = verify_transfer(&fr, &d, &qs[0], DEFAULT_VALUATION_BUDGET).unwrap();
        assert_eq!(c, TransferReport { frame_side: false, dual_side: false });
    }

    #[test]
    fn frame_file_round_trip() {
        let g = GentzenFrame::of_model(&three_chain());
        let text = serde_json::to_string(&FrameFile::from_gentzen(&g)).unwrap();
        let back: FrameFile = serde_json::from_str(&text).unwrap();
        let g2 = back.to_gentzen().unwrap().unwrap();
        assert_eq!(g2.frame, g.frame);
        assert_eq!(g2.algebra, g.algebra);
    }
}
