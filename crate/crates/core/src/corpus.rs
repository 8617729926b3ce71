// SPDX-License-Identifier: Apache-2.0

//! Fixed test material: the goal corpus, hand-built cyclic proofs and their
//! corrupted variants, and seeded generators of formulas and `Γ ⇒ 0` proofs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::proof::{id_expand, Children, CyclicNode, CyclicProof, OmegaFamily, RuleApp, WfProof};
use crate::rules::{builtin, Instantiation, Quasiequation};
use crate::syntax::{f, power_seq, seq, Formula, Sequent};

/// Incremental construction of cyclic proofs with computed sequents.
#[derive(Default)]
pub struct CyclicBuilder {
    nodes: BTreeMap<String, CyclicNode>,
}

impl CyclicBuilder {
    pub fn new() -> CyclicBuilder {
        CyclicBuilder::default()
    }

    /// Add node `id`. Panics if the instantiation does not fit the rule.
    pub fn node(&mut self, id: &str, rule: &str, inst: Instantiation, children: &[&str]) -> &mut Self {
        let app = RuleApp::new(builtin(rule), inst)
            .unwrap_or_else(|e| panic!("node {id}: {e}"));
        let sequent = app.conclusion().expect("checked by RuleApp::new");
        self.nodes.insert(
            id.to_string(),
            CyclicNode {
                sequent,
                app,
                children: children.iter().map(|c| c.to_string()).collect(),
            },
        );
        self
    }

    /// A finite identity subproof of `α ⇒ α` for star-free `α`, with ids
    /// prefixed by `prefix`. Returns the root id.
    pub fn identity(&mut self, prefix: &str, alpha: &Formula) -> String {
        let mut counter = 0;
        self.copy_finite(prefix, &id_expand(alpha), &mut counter)
    }

    fn copy_finite(&mut self, prefix: &str, p: &WfProof, counter: &mut usize) -> String {
        let id = format!("{prefix}{counter}");
        *counter += 1;
        let Children::Finite(cs) = p.children() else {
            panic!("identity subproofs must be star free");
        };
        let kids: Vec<String> = cs
            .iter()
            .map(|c| self.copy_finite(prefix, c, counter))
            .collect();
        self.nodes.insert(
            id.clone(),
            CyclicNode {
                sequent: p.sequent().clone(),
                app: p.app().clone(),
                children: kids,
            },
        );
        id
    }

    pub fn build(&self, root: &str) -> CyclicProof {
        CyclicProof {
            nodes: self.nodes.clone(),
            root: root.to_string(),
        }
    }
}

fn inst() -> Instantiation {
    Instantiation::new()
}

/// `a* ⇒ a*` by `*L` with the right branch closed by `*R1` and a back-edge.
pub fn canonical_star_identity() -> CyclicProof {
    let mut b = CyclicBuilder::new();
    star_loop(&mut b, "", &f("a"));
    b.build("n0")
}

/// Nodes `{p}n0..{p}n3` proving `α* ⇒ α*` for star-free `α`.
fn star_loop(b: &mut CyclicBuilder, p: &str, alpha: &Formula) {
    let star = Formula::star(alpha.clone());
    let id = b.identity(&format!("{p}i"), alpha);
    b.node(
        &format!("{p}n0"),
        "*L",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .f("alpha", alpha.clone())
            .f("beta", star.clone()),
        &[&format!("{p}n1"), &format!("{p}n2")],
    );
    b.node(&format!("{p}n1"), "*R0", inst().f("beta", alpha.clone()), &[]);
    b.node(
        &format!("{p}n2"),
        "*R1",
        inst()
            .s("Gamma", vec![alpha.clone()])
            .s("Delta", vec![star])
            .f("beta", alpha.clone()),
        &[&id, &format!("{p}n0")],
    );
}

/// `a*, a* ⇒ a*`.
pub fn canonical_double_star() -> CyclicProof {
    let mut b = CyclicBuilder::new();
    double_star(&mut b, "n0");
    b.build("n0")
}

fn double_star(b: &mut CyclicBuilder, back: &str) {
    let a = f("a");
    let s = f("a*");
    star_loop(b, "m", &a);
    b.node(
        "n0",
        "*L",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![s.clone()])
            .f("alpha", a.clone())
            .f("beta", s.clone()),
        &["mn0", "n1"],
    );
    b.node(
        "n1",
        "*R1",
        inst()
            .s("Gamma", vec![a.clone()])
            .s("Delta", vec![s.clone(), s.clone()])
            .f("beta", a.clone()),
        &["i0", back],
    );
    b.identity("i", &a);
}

/// `(a | b)* ⇒ (a | b)*`.
pub fn canonical_join_star() -> CyclicProof {
    let mut b = CyclicBuilder::new();
    star_loop(&mut b, "", &f("a | b"));
    b.build("n0")
}

/// The three canonical accepted proofs with their goals.
pub fn canonical_cyclic() -> Vec<(Sequent, CyclicProof)> {
    let mut v = vec![
        (seq("a* |- a*"), canonical_star_identity()),
        (seq("a*, a* |- a*"), canonical_double_star()),
        (seq("(a | b)* |- (a | b)*"), canonical_join_star()),
    ];
    for (g, p) in &mut v {
        assert_eq!(p.conclusion().expect("root exists"), g);
    }
    v
}

fn wk_loop(b: &mut CyclicBuilder, id: &str, concl: &[Formula], succ: &Formula) {
    b.node(
        id,
        "Wk",
        inst()
            .s("Gamma", vec![])
            .s("Pi", vec![])
            .s("Delta", concl.to_vec())
            .f("beta", succ.clone()),
        &[id],
    );
}

/// Ten locally valid preproofs whose progress threads were cut.
pub fn corrupted_cyclic() -> Vec<(&'static str, CyclicProof)> {
    let a = f("a");
    let s = f("a*");
    let mut out = Vec::new();

    let mut b = CyclicBuilder::new();
    wk_loop(&mut b, "w", std::slice::from_ref(&s), &s);
    out.push(("weakening self-loop", b.build("w")));

    let mut b = CyclicBuilder::new();
    b.node(
        "c",
        "C",
        inst()
            .s("Gamma", vec![s.clone(), s.clone()])
            .s("Pi", vec![])
            .s("Delta", vec![])
            .f("beta", s.clone()),
        &["c"],
    );
    out.push(("contraction self-loop", b.build("c")));

    let mut b = CyclicBuilder::new();
    b.node(
        "e",
        "e",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .f("alpha", s.clone())
            .f("beta", s.clone())
            .f("gamma", s.clone()),
        &["e"],
    );
    out.push(("exchange self-loop", b.build("e")));

    let mut b = CyclicBuilder::new();
    b.node(
        "cut",
        "Cut",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![s.clone()])
            .s("Pi", vec![])
            .f("alpha", s.clone())
            .f("beta", s.clone()),
        &["cut", "cut"],
    );
    out.push(("cut loop", b.build("cut")));

    let mut b = CyclicBuilder::new();
    b.node(
        "u",
        "1L",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![s.clone()])
            .f("beta", s.clone()),
        &["cut"],
    );
    b.node(
        "cut",
        "Cut",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .s("Pi", vec![s.clone()])
            .f("alpha", Formula::One)
            .f("beta", s.clone()),
        &["one", "u"],
    );
    b.node("one", "1R", inst(), &[]);
    out.push(("unit cut loop", b.build("u")));

    let mut b = CyclicBuilder::new();
    b.node(
        "n0",
        "*L",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![])
            .f("alpha", a.clone())
            .f("beta", s.clone()),
        &["n1", "cut"],
    );
    b.node("n1", "*R0", inst().f("beta", a.clone()), &[]);
    b.node(
        "cut",
        "Cut",
        inst()
            .s("Gamma", vec![])
            .s("Delta", vec![a.clone(), s.clone()])
            .s("Pi", vec![])
            .f("alpha", s.clone())
            .f("beta", s.clone()),
        &["r1", "n0"],
    );
    b.node(
        "r1",
        "*R1",
        inst()
            .s("Gamma", vec![a.clone()])
            .s("Delta", vec![s.clone()])
            .f("beta", a.clone()),
        &["i0", "n0"],
    );
    b.identity("i", &a);
    out.push(("star step through a cut formula", b.build("n0")));

    let mut b = CyclicBuilder::new();
    star_loop(&mut b, "", &a);
    wk_loop(&mut b, "w", std::slice::from_ref(&s), &s);
    b.nodes.get_mut("n2").expect("built").children[1] = "w".into();
    out.push(("star identity into a weakening loop", b.build("n0")));

    let mut b = CyclicBuilder::new();
    double_star(&mut b, "c");
    b.node(
        "c",
        "C",
        inst()
            .s("Gamma", vec![s.clone(), s.clone()])
            .s("Pi", vec![])
            .s("Delta", vec![])
            .f("beta", s.clone()),
        &["c"],
    );
    out.push(("double star into a contraction loop", b.build("n0")));

    let ab = f("a | b");
    let abs = Formula::star(ab.clone());
    let mut b = CyclicBuilder::new();
    star_loop(&mut b, "", &ab);
    wk_loop(&mut b, "w", std::slice::from_ref(&abs), &abs);
    b.nodes.get_mut("n2").expect("built").children[1] = "w".into();
    out.push(("join star into a weakening loop", b.build("n0")));

    let bs = f("b*");
    let mut b = CyclicBuilder::new();
    b.node(
        "x",
        "E",
        inst()
            .s("Gamma", vec![])
            .s("Pi", vec![s.clone()])
            .s("Sigma", vec![bs.clone()])
            .s("Delta", vec![])
            .f("beta", abs.clone()),
        &["y"],
    );
    b.node(
        "y",
        "E",
        inst()
            .s("Gamma", vec![])
            .s("Pi", vec![bs.clone()])
            .s("Sigma", vec![s.clone()])
            .s("Delta", vec![])
            .f("beta", abs.clone()),
        &["x"],
    );
    out.push(("double block exchange", b.build("x")));
    out
}

// ---------------------------------------------------------------------------
// Goal corpus
// ---------------------------------------------------------------------------

/// A provability goal and the structural rules active for it.
#[derive(Clone, Debug)]
pub struct Goal {
    pub sequent: Sequent,
    pub rules: Vec<&'static str>,
}

/// The 25 goals used by the translation, projection and cut suites.
pub fn goals() -> Vec<Goal> {
    let plain: &[&str] = &[
        "a |- a",
        "a* |- a*",
        "a*, a* |- a*",
        "(a | b)* |- (a | b)*",
        "a |- a*",
        "a* . a* |- a*",
        "1 |- a*",
        "a, a* |- a*",
        "a*, a |- a*",
        "a & b |- a",
        "a |- a | b",
        "a . b |- a . b",
        "a, a \\ b |- b",
        "b / a, a |- b",
        "a* |- (a | b)*",
        "(a . a)* |- a*",
        "0 |- a",
        "a . 1 |- a",
        "a** |- a*",
        "(a | b)* |- (b | a)*",
    ];
    let mut out: Vec<Goal> = plain
        .iter()
        .map(|s| Goal {
            sequent: seq(s),
            rules: vec![],
        })
        .collect();
    for (s, r) in [
        ("a |- a . a", "C"),
        ("a & b |- a . b", "C"),
        ("a, b |- a", "Wk"),
        ("a*, b |- a*", "Wk"),
        ("a . b |- b . a", "E"),
    ] {
        out.push(Goal {
            sequent: seq(s),
            rules: vec![r],
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Random material
// ---------------------------------------------------------------------------

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random formula of size at most `max_size` and star depth at most
/// `max_star`, over `vars`.
pub fn random_formula(
    rng: &mut impl Rng,
    max_size: usize,
    max_star: usize,
    vars: &[&str],
) -> Formula {
    let target = rng.gen_range(1..=max_size.max(1));
    gen_formula(rng, target, max_star, vars)
}

fn gen_formula(rng: &mut impl Rng, size: usize, stars: usize, vars: &[&str]) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..10) {
            0 => Formula::Zero,
            1 => Formula::One,
            _ => Formula::var(*vars.choose(rng).expect("nonempty variable list")),
        };
    }
    if size == 2 || (stars > 0 && rng.gen_bool(0.2)) {
        if stars > 0 {
            return Formula::star(gen_formula(rng, size - 1, stars - 1, vars));
        }
        return gen_formula(rng, 1, 0, vars);
    }
    let left = rng.gen_range(1..size - 1);
    let l = gen_formula(rng, left, stars, vars);
    let r = gen_formula(rng, size - 1 - left, stars, vars);
    match rng.gen_range(0..5) {
        0 => Formula::meet(l, r),
        1 => Formula::join(l, r),
        2 => Formula::prod(l, r),
        3 => Formula::lres(l, r),
        _ => Formula::rres(l, r),
    }
}

fn zero_leaf(gamma: Vec<Formula>, delta: Vec<Formula>) -> WfProof {
    WfProof::by(
        RuleApp::named(
            "0L",
            inst()
                .s("Gamma", gamma)
                .s("Delta", delta)
                .f("beta", Formula::Zero),
        )
        .expect("0L instance"),
        vec![],
    )
    .expect("0L instance")
}

fn wrap(rule: &str, i: Instantiation, kids: Vec<WfProof>) -> WfProof {
    WfProof::by(RuleApp::named(rule, i).expect("wrapper instance"), kids).expect("wrapper instance")
}

/// A random analytic quasiequation with at most `max_vars` variables,
/// counting the right-hand one.
pub fn random_analytic_quasieq(rng: &mut impl Rng, max_vars: usize) -> Quasiequation {
    let names = ["x", "z", "w"];
    let k = rng.gen_range(1..=max_vars.saturating_sub(1).clamp(1, names.len()));
    let mut xs: Vec<&str> = names[..k].to_vec();
    xs.shuffle(rng);
    let product = |vs: &[&str]| {
        vs.iter()
            .map(|v| Formula::var(*v))
            .reduce(Formula::prod)
            .unwrap_or(Formula::One)
    };
    let y = Formula::var("u");
    let premises = (0..rng.gen_range(1..=2))
        .map(|_| {
            let len = rng.gen_range(0..=3);
            let vs: Vec<&str> = (0..len)
                .map(|_| *xs.choose(rng).expect("nonempty"))
                .collect();
            (product(&vs), y.clone())
        })
        .collect();
    Quasiequation {
        premises,
        conclusion: (product(&xs), y),
    }
}

/// Which shapes a generated `Γ ⇒ 0` proof ends in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroShape {
    Axiom,
    RightResidual,
    Analytic,
    Mixed,
}

/// `count` seeded proofs of sequents `Γ ⇒ 0`. The first three end in `0L`,
/// `/L` and `C`; the rest stack random wrappers on a `0L` leaf. Uses `C` and
/// `Wk` besides the principal rules.
pub fn zero_r_inputs(seed: u64, count: usize) -> Vec<(ZeroShape, WfProof)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let vars = ["p", "q", "r"];
    out.push((ZeroShape::Axiom, zero_leaf(vec![f("p")], vec![f("q")])));
    let right = WfProof::by(
        RuleApp::named(
            ".L",
            inst()
                .s("Gamma", vec![])
                .s("Delta", vec![])
                .f("alpha0", f("p"))
                .f("alpha1", Formula::Zero)
                .f("beta", Formula::Zero),
        )
        .expect(".L"),
        vec![zero_leaf(vec![f("p")], vec![])],
    )
    .expect(".L");
    out.push((
        ZeroShape::RightResidual,
        wrap(
            "/L",
            inst()
                .s("Gamma", vec![])
                .s("Delta", vec![f("q")])
                .s("Sigma", vec![])
                .f("alpha0", f("q"))
                .f("alpha1", f("p . 0"))
                .f("beta", Formula::Zero),
            vec![id_expand(&f("q")), right],
        ),
    ));
    out.push((
        ZeroShape::Analytic,
        wrap(
            "C",
            inst()
                .s("Gamma", vec![])
                .s("Pi", vec![f("p"), f("q")])
                .s("Delta", vec![Formula::Zero])
                .f("beta", Formula::Zero),
            vec![zero_leaf(vec![f("p"), f("q"), f("p"), f("q")], vec![])],
        ),
    ));
    while out.len() < count {
        let g: Vec<Formula> = (0..r.gen_range(0..3))
            .map(|_| random_formula(&mut r, 3, 1, &vars))
            .collect();
        let d: Vec<Formula> = (0..r.gen_range(0..3))
            .map(|_| random_formula(&mut r, 3, 1, &vars))
            .collect();
        let mut p = zero_leaf(g, d);
        for _ in 0..r.gen_range(1..5) {
            p = random_wrapper(&mut r, p, &vars);
        }
        out.push((ZeroShape::Mixed, p));
    }
    out
}

fn random_wrapper(r: &mut impl Rng, p: WfProof, vars: &[&str]) -> WfProof {
    let ante = p.sequent().antecedent.clone();
    let n = ante.len();
    let split = |k: usize| (ante[..k].to_vec(), ante[k..].to_vec());
    match r.gen_range(0..9) {
        0 => {
            let (g, d) = split(r.gen_range(0..=n));
            wrap(
                "1L",
                inst().s("Gamma", g).s("Delta", d).f("beta", Formula::Zero),
                vec![p],
            )
        }
        1 if n >= 2 => {
            let k = r.gen_range(0..n - 1);
            wrap(
                ".L",
                inst()
                    .s("Gamma", ante[..k].to_vec())
                    .s("Delta", ante[k + 2..].to_vec())
                    .f("alpha0", ante[k].clone())
                    .f("alpha1", ante[k + 1].clone())
                    .f("beta", Formula::Zero),
                vec![p],
            )
        }
        2 | 3 if n >= 1 => {
            let k = r.gen_range(0..n);
            let x = random_formula(r, 3, 1, vars);
            let name = if r.gen_bool(0.5) { "/L" } else { "\\L" };
            wrap(
                name,
                inst()
                    .s("Gamma", ante[..k].to_vec())
                    .s("Delta", vec![x.clone()])
                    .s("Sigma", ante[k + 1..].to_vec())
                    .f("alpha0", x.clone())
                    .f("alpha1", ante[k].clone())
                    .f("beta", Formula::Zero),
                vec![id_expand(&x), p],
            )
        }
        4 if n >= 1 => {
            let k = r.gen_range(0..n);
            wrap(
                "|L",
                inst()
                    .s("Gamma", ante[..k].to_vec())
                    .s("Delta", ante[k + 1..].to_vec())
                    .f("alpha0", ante[k].clone())
                    .f("alpha1", ante[k].clone())
                    .f("beta", Formula::Zero),
                vec![p.clone(), p],
            )
        }
        5 if n >= 1 => {
            let k = r.gen_range(0..n);
            wrap(
                "&L0",
                inst()
                    .s("Gamma", ante[..k].to_vec())
                    .s("Delta", ante[k + 1..].to_vec())
                    .f("alpha0", ante[k].clone())
                    .f("alpha1", random_formula(r, 3, 1, vars))
                    .f("beta", Formula::Zero),
                vec![p],
            )
        }
        6 => {
            let k = r.gen_range(0..=n);
            let pi: Vec<Formula> = (0..r.gen_range(1..3))
                .map(|_| random_formula(r, 2, 1, vars))
                .collect();
            wrap(
                "Wk",
                inst()
                    .s("Gamma", ante[..k].to_vec())
                    .s("Pi", pi)
                    .s("Delta", ante[k..].to_vec())
                    .f("beta", Formula::Zero),
                vec![p],
            )
        }
        7 => {
            // Contract an adjacent repeated block if there is one.
            for len in 1..=n / 2 {
                for k in 0..=n - 2 * len {
                    if ante[k..k + len] == ante[k + len..k + 2 * len] {
                        return wrap(
                            "C",
                            inst()
                                .s("Gamma", ante[..k].to_vec())
                                .s("Pi", ante[k..k + len].to_vec())
                                .s("Delta", ante[k + 2 * len..].to_vec())
                                .f("beta", Formula::Zero),
                            vec![p],
                        );
                    }
                }
            }
            p
        }
        8 => {
            // Replace a 0L leaf by a star-left ω-node of 0L leaves.
            if p.rule_name() != "0L" {
                return p;
            }
            let zero = ante.iter().position(|x| *x == Formula::Zero).expect("0L leaf");
            let k = r.gen_range(0..=n);
            let alpha = Formula::var(*vars.choose(r).expect("vars"));
            let (g, d) = (ante[..k].to_vec(), ante[k..].to_vec());
            let (g2, d2, a2) = (g.clone(), d.clone(), alpha.clone());
            let fam = OmegaFamily::new(move |m| {
                let mut full = g2.clone();
                full.extend(power_seq(&a2, m));
                full.extend(d2.iter().cloned());
                let z = if k <= zero { zero + m } else { zero };
                Ok(zero_leaf(full[..z].to_vec(), full[z + 1..].to_vec()))
            });
            WfProof::by_omega(
                RuleApp::named(
                    "*Lw",
                    inst()
                        .s("Gamma", g)
                        .s("Delta", d)
                        .f("alpha", alpha)
                        .f("beta", Formula::Zero),
                )
                .expect("*Lw instance"),
                fam,
            )
            .expect("*Lw instance")
        }
        _ => p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_wf;

    #[test]
    fn canonical_proofs_are_locally_valid() {
        for (_, p) in canonical_cyclic() {
            p.check_local_all().unwrap();
        }
        for (name, p) in corrupted_cyclic() {
            p.check_local_all().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert_eq!(corrupted_cyclic().len(), 10);
    }

    #[test]
    fn generated_zero_proofs_check() {
        for (shape, p) in zero_r_inputs(7, 50) {
            assert_eq!(p.sequent().succedent, Formula::Zero);
            check_wf(&p, 3).unwrap_or_else(|e| panic!("{shape:?} {}: {e}", p.sequent()));
        }
    }

    #[test]
    fn random_formulas_respect_bounds() {
        let mut r = rng(1);
        for _ in 0..200 {
            let x = random_formula(&mut r, 12, 2, &["a", "b"]);
            assert!(x.size() <= 12 && x.star_depth() <= 2, "{x}");
        }
    }

    #[test]
    fn corpus_has_25_goals() {
        assert_eq!(goals().len(), 25);
    }
}
