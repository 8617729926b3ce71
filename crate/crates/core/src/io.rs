// SPDX-License-Identifier: Apache-2.0

//! JSON proof files.
//!
//! ```text
//! {"system": "womega" | "cyclic", "rules": [...], "root": id,
//!  "nodes": {id: {"sequent", "rule", "principal", "inst", "children"}}}
//! ```
//!
//! An ω-node has a single child entry `{"omega_schema", "params"}`. The
//! `tau_n` schema takes `{"gamma": formula}`. The `projected` schema takes
//! `{"address": [..]}` and refers to the translation of the cyclic proof
//! embedded under `"source"`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::proof::{
    tau_family, Children, CyclicNode, CyclicProof, OmegaFamily, ProofError, RuleApp, WfProof,
};
use crate::rules::{lookup, Instantiation, Rule, RuleError, RuleKind, RuleSet};
use crate::syntax::{parse_formula, parse_sequent, OccurrencePos, ParseError, Sequent};
use crate::translate::{nwf_to_wf, Fuel};

#[derive(Debug, Clone, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(String),
    #[error("parse error in {context}: {error}")]
    Parse { context: String, error: ParseError },
    #[error("bad proof file: {0}")]
    Format(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> IoError {
        IoError::Json(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstValue {
    Formula(String),
    Sequence(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChildRef {
    Id(String),
    Omega {
        omega_schema: String,
        params: serde_json::Value,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeFile {
    pub sequent: String,
    pub rule: String,
    /// Antecedent index, `-1` for the succedent.
    pub principal: Option<i64>,
    pub inst: BTreeMap<String, InstValue>,
    pub children: Vec<ChildRef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuelFile {
    pub nodes: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofFile {
    pub system: String,
    #[serde(default)]
    pub rules: Vec<String>,
    pub nodes: BTreeMap<String, NodeFile>,
    pub root: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<ProofFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel: Option<FuelFile>,
}

/// A loaded proof.
#[derive(Clone, Debug)]
pub enum LoadedProof {
    Wf(WfProof),
    Cyclic(CyclicProof),
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

fn principal_index(p: Option<OccurrencePos>) -> Option<i64> {
    p.map(|p| match p {
        OccurrencePos::Succ => -1,
        OccurrencePos::Ante(i) => i as i64,
    })
}

fn inst_file(inst: &Instantiation) -> BTreeMap<String, InstValue> {
    let mut out: BTreeMap<String, InstValue> = inst
        .fmap
        .iter()
        .map(|(k, v)| (k.clone(), InstValue::Formula(v.to_string())))
        .collect();
    for (k, v) in &inst.smap {
        out.insert(
            k.clone(),
            InstValue::Sequence(v.iter().map(ToString::to_string).collect()),
        );
    }
    out
}

fn node_file(sequent: &Sequent, app: &RuleApp, children: Vec<ChildRef>) -> NodeFile {
    NodeFile {
        sequent: sequent.to_string(),
        rule: app.name().to_string(),
        principal: principal_index(app.principal),
        inst: inst_file(&app.inst),
        children,
    }
}

fn user_rules<'a>(apps: impl Iterator<Item = &'a RuleApp>) -> Vec<String> {
    let names: BTreeSet<String> = apps
        .filter(|a| a.rule.kind == RuleKind::Structural)
        .map(|a| a.name().to_string())
        .collect();
    names.into_iter().collect()
}

pub fn cyclic_to_file(p: &CyclicProof) -> ProofFile {
    ProofFile {
        system: "cyclic".into(),
        rules: user_rules(p.nodes.values().map(|n| &n.app)),
        nodes: p
            .nodes
            .iter()
            .map(|(id, n)| {
                let kids = n.children.iter().cloned().map(ChildRef::Id).collect();
                (id.clone(), node_file(&n.sequent, &n.app, kids))
            })
            .collect(),
        root: p.root.clone(),
        source: None,
        fuel: None,
    }
}

/// Serialize a wellfounded proof. Families with the `projected` schema
/// need the cyclic proof and fuel they were translated from.
pub fn wf_to_file(p: &WfProof, source: Option<(&CyclicProof, Fuel)>) -> Result<ProofFile, IoError> {
    let mut nodes = BTreeMap::new();
    let mut apps = Vec::new();
    let mut stack: Vec<(WfProof, Vec<usize>, String)> = vec![(p.clone(), vec![], "n0".into())];
    let mut next = 1usize;
    while let Some((n, addr, id)) = stack.pop() {
        apps.push(n.app().clone());
        let kids = match n.children() {
            Children::Finite(cs) => {
                let mut ids = Vec::with_capacity(cs.len());
                let mut pending = Vec::new();
                for (i, c) in cs.iter().enumerate() {
                    let cid = format!("n{next}");
                    next += 1;
                    ids.push(ChildRef::Id(cid.clone()));
                    let mut a = addr.clone();
                    a.push(n.app().rule.slot(i));
                    pending.push((c.clone(), a, cid));
                }
                stack.extend(pending.into_iter().rev());
                ids
            }
            Children::Omega(fam) => {
                let schema = fam.schema.as_ref().ok_or_else(|| {
                    IoError::Format("ω-family without a named schema".into())
                })?;
                let params = match schema.name.as_str() {
                    "tau_n" => schema.params.clone(),
                    "projected" => {
                        if source.is_none() {
                            return Err(IoError::Format(
                                "projected family without its source proof".into(),
                            ));
                        }
                        json!({ "address": addr })
                    }
                    other => return Err(IoError::Format(format!("unknown schema `{other}`"))),
                };
                vec![ChildRef::Omega {
                    omega_schema: schema.name.clone(),
                    params,
                }]
            }
        };
        nodes.insert(id, node_file(n.sequent(), n.app(), kids));
    }
    let uses_projected = nodes.values().any(|n| {
        n.children
            .iter()
            .any(|c| matches!(c, ChildRef::Omega { omega_schema, .. } if omega_schema == "projected"))
    });
    let (source, fuel) = match source {
        Some((c, f)) if uses_projected => (
            Some(Box::new(cyclic_to_file(c))),
            Some(FuelFile {
                nodes: f.nodes,
                depth: f.depth,
            }),
        ),
        _ => (None, None),
    };
    Ok(ProofFile {
        system: "womega".into(),
        rules: user_rules(apps.iter()),
        nodes,
        root: "n0".into(),
        source,
        fuel,
    })
}

pub fn to_json(f: &ProofFile) -> String {
    serde_json::to_string_pretty(f).expect("proof files serialize")
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

fn parse_ctx<T>(r: Result<T, ParseError>, context: &str) -> Result<T, IoError> {
    r.map_err(|error| IoError::Parse {
        context: context.to_string(),
        error,
    })
}

fn resolve_rule(name: &str, rules: &RuleSet) -> Result<Arc<Rule>, IoError> {
    if let Some(r) = rules.get(name) {
        return Ok(r);
    }
    lookup(name)
        .map(Arc::new)
        .ok_or_else(|| IoError::Rule(RuleError::UnknownRule(name.to_string())))
}

fn load_app(id: &str, n: &NodeFile, rules: &RuleSet) -> Result<(Sequent, RuleApp), IoError> {
    let sequent = parse_ctx(parse_sequent(&n.sequent), &format!("node `{id}`"))?;
    let rule = resolve_rule(&n.rule, rules)?;
    let mut inst = Instantiation::new();
    for (k, v) in &n.inst {
        let ctx = format!("node `{id}`, `{k}`");
        match v {
            InstValue::Formula(t) => {
                inst.fmap.insert(k.clone(), parse_ctx(parse_formula(t), &ctx)?);
            }
            InstValue::Sequence(ts) => {
                let fs = ts
                    .iter()
                    .map(|t| parse_ctx(parse_formula(t), &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                inst.smap.insert(k.clone(), fs);
            }
        }
    }
    let app = RuleApp::new(rule, inst)?;
    if n.principal.is_some() && n.principal != principal_index(app.principal) {
        return Err(IoError::Format(format!(
            "node `{id}`: principal {:?} does not match the instantiation",
            n.principal
        )));
    }
    Ok((sequent, app))
}

pub fn from_json(text: &str) -> Result<ProofFile, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Load a proof file. `system` selects the proof kind.
pub fn load(f: &ProofFile, rules: &RuleSet) -> Result<LoadedProof, IoError> {
    for r in &f.rules {
        resolve_rule(r, rules)?;
    }
    match f.system.as_str() {
        "cyclic" => Ok(LoadedProof::Cyclic(load_cyclic(f, rules)?)),
        "womega" => Ok(LoadedProof::Wf(load_wf(f, rules)?)),
        other => Err(IoError::Format(format!("unknown system `{other}`"))),
    }
}

pub fn load_cyclic(f: &ProofFile, rules: &RuleSet) -> Result<CyclicProof, IoError> {
    if f.system != "cyclic" {
        return Err(IoError::Format(format!("expected a cyclic proof, got `{}`", f.system)));
    }
    let mut nodes = BTreeMap::new();
    for (id, n) in &f.nodes {
        let (sequent, app) = load_app(id, n, rules)?;
        let children = n
            .children
            .iter()
            .map(|c| match c {
                ChildRef::Id(c) if f.nodes.contains_key(c) => Ok(c.clone()),
                ChildRef::Id(c) => Err(IoError::Format(format!("node `{id}`: unknown child `{c}`"))),
                ChildRef::Omega { .. } => Err(IoError::Format(format!(
                    "node `{id}`: ω-families are not allowed in cyclic proofs"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        nodes.insert(
            id.clone(),
            CyclicNode {
                sequent,
                app,
                children,
            },
        );
    }
    if !nodes.contains_key(&f.root) {
        return Err(IoError::Format(format!("unknown root `{}`", f.root)));
    }
    Ok(CyclicProof {
        nodes,
        root: f.root.clone(),
    })
}

struct WfLoader<'a> {
    file: &'a ProofFile,
    rules: &'a RuleSet,
    done: HashMap<String, WfProof>,
    translated: Option<WfProof>,
}

impl<'a> WfLoader<'a> {
    fn family(&mut self, id: &str, schema: &str, params: &serde_json::Value) -> Result<OmegaFamily, IoError> {
        match schema {
            "tau_n" => {
                let g = params
                    .get("gamma")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| IoError::Format(format!("node `{id}`: tau_n needs `gamma`")))?;
                Ok(tau_family(&parse_ctx(parse_formula(g), &format!("node `{id}`"))?))
            }
            "projected" => {
                let addr: Vec<usize> = params
                    .get("address")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()?
                    .ok_or_else(|| IoError::Format(format!("node `{id}`: projected needs `address`")))?;
                if self.translated.is_none() {
                    let src = self.file.source.as_ref().ok_or_else(|| {
                        IoError::Format("projected family without a `source` proof".into())
                    })?;
                    let fuel = self
                        .file
                        .fuel
                        .as_ref()
                        .map(|f| Fuel {
                            nodes: f.nodes,
                            depth: f.depth,
                        })
                        .unwrap_or_default();
                    let cyc = load_cyclic(src, self.rules)?;
                    self.translated = Some(nwf_to_wf(&cyc, fuel)?);
                }
                let root = self.translated.as_ref().expect("translated above");
                let node = root.at(&addr)?.ok_or_else(|| {
                    IoError::Format(format!("node `{id}`: no node at the projected address"))
                })?;
                match node.children() {
                    Children::Omega(f) => Ok(f.clone()),
                    Children::Finite(_) => Err(IoError::Format(format!(
                        "node `{id}`: the projected address is not an ω-node"
                    ))),
                }
            }
            other => Err(IoError::Format(format!("node `{id}`: unknown schema `{other}`"))),
        }
    }

    fn build(&mut self, root: &str) -> Result<WfProof, IoError> {
        // Post-order with an explicit stack; `open` detects cycles.
        let mut open: BTreeSet<String> = BTreeSet::new();
        let mut stack: Vec<(String, bool)> = vec![(root.to_string(), false)];
        while let Some((id, expanded)) = stack.pop() {
            if self.done.contains_key(&id) {
                continue;
            }
            let n = self
                .file
                .nodes
                .get(&id)
                .ok_or_else(|| IoError::Format(format!("unknown node `{id}`")))?;
            if !expanded {
                if !open.insert(id.clone()) {
                    return Err(IoError::Format(format!("node `{id}` lies on a cycle")));
                }
                stack.push((id.clone(), true));
                for c in n.children.iter().rev() {
                    if let ChildRef::Id(c) = c {
                        if open.contains(c) && !self.done.contains_key(c) {
                            return Err(IoError::Format(format!("node `{c}` lies on a cycle")));
                        }
                        stack.push((c.clone(), false));
                    }
                }
                continue;
            }
            let (sequent, app) = load_app(&id, n, self.rules)?;
            let children = match n.children.as_slice() {
                [ChildRef::Omega {
                    omega_schema,
                    params,
                }] => Children::Omega(self.family(&id, omega_schema, params)?),
                cs => Children::Finite(
                    cs.iter()
                        .map(|c| match c {
                            ChildRef::Id(c) => self
                                .done
                                .get(c)
                                .cloned()
                                .ok_or_else(|| IoError::Format(format!("unknown node `{c}`"))),
                            ChildRef::Omega { .. } => Err(IoError::Format(format!(
                                "node `{id}`: an ω-family must be the only child"
                            ))),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            open.remove(&id);
            self.done.insert(id, WfProof::raw(sequent, app, children));
        }
        Ok(self.done[root].clone())
    }
}

pub fn load_wf(f: &ProofFile, rules: &RuleSet) -> Result<WfProof, IoError> {
    if f.system != "womega" {
        return Err(IoError::Format(format!("expected a womega proof, got `{}`", f.system)));
    }
    let mut l = WfLoader {
        file: f,
        rules,
        done: HashMap::new(),
        translated: None,
    };
    l.build(&f.root)
}

/// Parse and load in one step.
pub fn read_proof(text: &str, rules: &RuleSet) -> Result<LoadedProof, IoError> {
    load(&from_json(text)?, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{canonical_cyclic, corrupted_cyclic};
    use crate::proof::{check_wf, id_expand, DEFAULT_OMEGA_FUEL};
    use crate::progress::check_cyclic;
    use crate::syntax::parse_formula;

    #[test]
    fn cyclic_round_trip() {
        let rs = RuleSet::builtin();
        let proofs = canonical_cyclic()
            .into_iter()
            .map(|(_, p)| p)
            .chain(corrupted_cyclic().into_iter().map(|(_, p)| p));
        for p in proofs {
            let text = to_json(&cyclic_to_file(&p));
            let LoadedProof::Cyclic(q) = read_proof(&text, &rs).unwrap() else {
                panic!("kind changed")
            };
            assert_eq!(p, q);
        }
    }

    #[test]
    fn tau_family_round_trip() {
        let p = id_expand(&parse_formula("(a . b)*").unwrap());
        let text = to_json(&wf_to_file(&p, None).unwrap());
        assert!(text.contains("tau_n"));
        let LoadedProof::Wf(q) = read_proof(&text, &RuleSet::builtin()).unwrap() else {
            panic!("kind changed")
        };
        assert_eq!(q.sequent(), p.sequent());
        check_wf(&q, DEFAULT_OMEGA_FUEL).unwrap();
    }

    #[test]
    fn projected_family_round_trip() {
        let (_, cyc) = canonical_cyclic().remove(0);
        let fuel = Fuel::default();
        let wf = nwf_to_wf(&cyc, fuel).unwrap();
        assert!(wf_to_file(&wf, None).is_err());
        let file = wf_to_file(&wf, Some((&cyc, fuel))).unwrap();
        assert!(file.source.is_some());
        let text = to_json(&file);
        let LoadedProof::Wf(q) = read_proof(&text, &RuleSet::builtin()).unwrap() else {
            panic!("kind changed")
        };
        check_wf(&q, DEFAULT_OMEGA_FUEL).unwrap();
        assert!(check_cyclic(&cyc).unwrap().verdict.is_accepted());
    }

    #[test]
    fn structural_rules_are_listed() {
        let rs = RuleSet::with_structural(&["Wk"]).unwrap();
        let goal = parse_sequent("a, b |- a").unwrap();
        let r = crate::search::prove(&goal, &rs, &Default::default()).unwrap();
        let f = cyclic_to_file(r.outcome.proof().unwrap());
        assert_eq!(f.rules, vec!["Wk".to_string()]);
        let LoadedProof::Cyclic(q) = load(&f, &RuleSet::builtin()).unwrap() else {
            panic!("kind changed")
        };
        assert!(check_cyclic(&q).unwrap().verdict.is_accepted());
    }

    #[test]
    fn malformed_files() {
        let rs = RuleSet::builtin();
        assert!(matches!(read_proof("{", &rs), Err(IoError::Json(_))));
        let bad = r#"{"system":"cyclic","rules":[],"root":"n0","nodes":{"n0":{"sequent":"a |-","rule":"id","principal":null,"inst":{"a":"a"},"children":[]}}}"#;
        assert!(matches!(read_proof(bad, &rs), Err(IoError::Parse { .. })));
        let unknown = bad.replace("a |-", "a |- a").replace("\"id\"", "\"nope\"");
        assert!(matches!(read_proof(&unknown, &rs), Err(IoError::Rule(_))));
        let cyc = r#"{"system":"womega","rules":[],"root":"n0","nodes":{"n0":{"sequent":"1 |- 1","rule":"1L","principal":0,"inst":{"Gamma":[],"Delta":[],"beta":"1"},"children":["n0"]}}}"#;
        assert!(matches!(read_proof(cyc, &rs), Err(IoError::Format(_))));
    }
}
