//! Model records and JSON ingestion.
//!
//! One JSON document describes one model. State identifiers are strings in
//! the file; the engine assigns dense indices in file order so valuations
//! are arrays. The target `✓` is spelled `"__target__"` and is not a state.

use crate::util::fmt_sig;
use serde::Deserialize;
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

pub const TARGET_KEY: &str = "__target__";

/// Probability mass must balance per state within this slack.
pub const DIST_TOLERANCE: f64 = 1e-9;

/// Successor of a probabilistic or deterministic step: a state or `✓`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Next {
    State(usize),
    Target,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    pub states: Vec<String>,
    /// Per state: `(successor, probability)` with targets ordered state-index
    /// first, `✓` last.
    pub transitions: Vec<Vec<(Next, f64)>>,
    pub rewards: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub dist: Vec<(Next, f64)>,
    pub reward: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    pub states: Vec<String>,
    pub choices: Vec<Vec<Choice>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Nfa {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    /// `delta[s][a]`: ascending successor indices (possibly empty).
    pub delta: Vec<Vec<Vec<usize>>>,
    pub accepting: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dlts {
    pub states: Vec<String>,
    pub labels: Vec<String>,
    /// `step[s][a]`: the unique successor, total over states × labels.
    pub step: Vec<Vec<Next>>,
    pub safe: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResourceNode {
    Target,
    Inner { succ: Vec<usize>, resource: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceGraph {
    pub states: Vec<String>,
    pub nodes: Vec<ResourceNode>,
    pub bound: u32,
}

/// A finite presentation `u · v^ω` of an infinite word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

impl LassoWord {
    pub fn new(prefix: Vec<String>, cycle: Vec<String>) -> Result<LassoWord, ModelError> {
        if cycle.is_empty() {
            return Err(ModelError::Validation(
                "lasso loop must be non-empty".to_string(),
            ));
        }
        Ok(LassoWord { prefix, cycle })
    }

    /// First letter of the word.
    pub fn head(&self) -> &str {
        self.prefix.first().unwrap_or(&self.cycle[0])
    }

    /// The suffix after one letter: the prefix shrinks, or the loop rotates.
    pub fn tail(&self) -> LassoWord {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            LassoWord {
                prefix: Vec::new(),
                cycle,
            }
        } else {
            LassoWord {
                prefix: self.prefix[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }

    pub fn render(&self) -> String {
        format!("{}({})", self.prefix.join(""), self.cycle.join(""))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Mc(MarkovChain),
    Mdp(Mdp),
    Nfa(Nfa),
    Dlts(Dlts),
    Resource(ResourceGraph),
}

impl Model {
    pub fn type_name(&self) -> &'static str {
        match self {
            Model::Mc(_) => "mc",
            Model::Mdp(_) => "mdp",
            Model::Nfa(_) => "nfa",
            Model::Dlts(_) => "dlts",
            Model::Resource(_) => "resource",
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

// File-shape structs mirroring the external JSON schema.

#[derive(Deserialize)]
struct Header {
    #[serde(rename = "type")]
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct McFile {
    #[serde(rename = "type")]
    _kind: String,
    states: Vec<String>,
    transitions: BTreeMap<String, BTreeMap<String, f64>>,
    rewards: BTreeMap<String, u32>,
}

#[derive(Deserialize)]
struct ChoiceFile {
    dist: BTreeMap<String, f64>,
    reward: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MdpFile {
    #[serde(rename = "type")]
    _kind: String,
    states: Vec<String>,
    choices: BTreeMap<String, Vec<ChoiceFile>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NfaFile {
    #[serde(rename = "type")]
    _kind: String,
    states: Vec<String>,
    alphabet: Vec<String>,
    delta: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    accepting: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DltsFile {
    #[serde(rename = "type")]
    _kind: String,
    states: Vec<String>,
    labels: Vec<String>,
    step: BTreeMap<String, BTreeMap<String, String>>,
    safe: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ResourceNodeFile {
    Target(String),
    Inner { succ: Vec<String>, resource: u32 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResourceFile {
    #[serde(rename = "type")]
    _kind: String,
    states: Vec<String>,
    bound: u32,
    nodes: BTreeMap<String, ResourceNodeFile>,
}

struct StateTable<'a> {
    order: &'a [String],
    lookup: BTreeMap<&'a str, usize>,
}

impl<'a> StateTable<'a> {
    fn new(states: &'a [String]) -> Result<StateTable<'a>, ModelError> {
        let mut lookup = BTreeMap::new();
        for (i, s) in states.iter().enumerate() {
            if s == TARGET_KEY {
                return Err(ModelError::Validation(format!(
                    "\"{TARGET_KEY}\" is not a state and may not appear in states"
                )));
            }
            if lookup.insert(s.as_str(), i).is_some() {
                return Err(ModelError::Validation(format!("duplicate state {s}")));
            }
        }
        if states.is_empty() {
            return Err(ModelError::Validation("states must be non-empty".into()));
        }
        Ok(StateTable {
            order: states,
            lookup,
        })
    }

    fn resolve(&self, name: &str, context: &str) -> Result<usize, ModelError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::Validation(format!("unknown state {name} in {context}")))
    }
}

fn parse_distribution(
    table: &StateTable,
    dist: &BTreeMap<String, f64>,
    context: &str,
) -> Result<Vec<(Next, f64)>, ModelError> {
    let mut entries: Vec<(Next, f64)> = Vec::new();
    let mut target_prob: Option<f64> = None;
    let mut sum = 0.0;
    for (name, &p) in dist {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(ModelError::Validation(format!(
                "probability {p} at {context} is outside [0,1]"
            )));
        }
        sum += p;
        if name == TARGET_KEY {
            target_prob = Some(p);
        } else {
            let idx = table.resolve(name, context)?;
            if p > 0.0 {
                entries.push((Next::State(idx), p));
            }
        }
    }
    if (sum - 1.0).abs() > DIST_TOLERANCE {
        return Err(ModelError::Validation(format!(
            "distribution at {context} sums to {}",
            fmt_sig(sum)
        )));
    }
    entries.sort_by_key(|(n, _)| match n {
        Next::State(i) => *i,
        Next::Target => usize::MAX,
    });
    if let Some(p) = target_prob {
        if p > 0.0 {
            entries.push((Next::Target, p));
        }
    }
    Ok(entries)
}

/// Parses and validates one UTF-8 JSON model document.
pub fn load_model(text: &str) -> Result<Model, ModelError> {
    let header: Header = serde_json::from_str(text)?;
    match header.kind.as_str() {
        "mc" => load_mc(text).map(Model::Mc),
        "mdp" => load_mdp(text).map(Model::Mdp),
        "nfa" => load_nfa(text).map(Model::Nfa),
        "dlts" => load_dlts(text).map(Model::Dlts),
        "resource" => load_resource(text).map(Model::Resource),
        other => Err(ModelError::Validation(format!(
            "unknown model type {other}"
        ))),
    }
}

fn load_mc(text: &str) -> Result<MarkovChain, ModelError> {
    let file: McFile = serde_json::from_str(text)?;
    let table = StateTable::new(&file.states)?;
    let mut transitions = Vec::with_capacity(file.states.len());
    let mut rewards = Vec::with_capacity(file.states.len());
    for s in table.order {
        let dist = file
            .transitions
            .get(s)
            .ok_or_else(|| ModelError::Validation(format!("missing transitions for state {s}")))?;
        transitions.push(parse_distribution(&table, dist, s)?);
        let r = file
            .rewards
            .get(s)
            .ok_or_else(|| ModelError::Validation(format!("missing reward for state {s}")))?;
        rewards.push(*r);
    }
    for name in file.transitions.keys() {
        table.resolve(name, "transitions")?;
    }
    for name in file.rewards.keys() {
        table.resolve(name, "rewards")?;
    }
    Ok(MarkovChain {
        states: file.states,
        transitions,
        rewards,
    })
}

fn load_mdp(text: &str) -> Result<Mdp, ModelError> {
    let file: MdpFile = serde_json::from_str(text)?;
    let table = StateTable::new(&file.states)?;
    let mut choices = Vec::with_capacity(file.states.len());
    for s in table.order {
        let list = file
            .choices
            .get(s)
            .ok_or_else(|| ModelError::Validation(format!("missing choices for state {s}")))?;
        if list.is_empty() {
            return Err(ModelError::Validation(format!("c({s}) must be non-empty")));
        }
        let mut parsed = Vec::with_capacity(list.len());
        for (i, c) in list.iter().enumerate() {
            let context = format!("{s} choice {i}");
            parsed.push(Choice {
                dist: parse_distribution(&table, &c.dist, &context)?,
                reward: c.reward,
            });
        }
        choices.push(parsed);
    }
    for name in file.choices.keys() {
        table.resolve(name, "choices")?;
    }
    Ok(Mdp {
        states: file.states,
        choices,
    })
}

fn load_nfa(text: &str) -> Result<Nfa, ModelError> {
    let file: NfaFile = serde_json::from_str(text)?;
    let table = StateTable::new(&file.states)?;
    let mut letters: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, a) in file.alphabet.iter().enumerate() {
        if letters.insert(a.as_str(), i).is_some() {
            return Err(ModelError::Validation(format!("duplicate letter {a}")));
        }
    }
    let mut delta = vec![vec![Vec::new(); file.alphabet.len()]; file.states.len()];
    for (s, by_letter) in &file.delta {
        let si = table.resolve(s, "delta")?;
        for (a, succs) in by_letter {
            let ai = *letters.get(a.as_str()).ok_or_else(|| {
                ModelError::Validation(format!("unknown letter {a} in delta at {s}"))
            })?;
            let mut ids = succs
                .iter()
                .map(|t| table.resolve(t, &format!("delta at {s} on {a}")))
                .collect::<Result<Vec<_>, _>>()?;
            ids.sort_unstable();
            ids.dedup();
            delta[si][ai] = ids;
        }
    }
    let mut accepting = vec![false; file.states.len()];
    for s in &file.accepting {
        accepting[table.resolve(s, "accepting")?] = true;
    }
    Ok(Nfa {
        states: file.states,
        alphabet: file.alphabet,
        delta,
        accepting,
    })
}

fn load_dlts(text: &str) -> Result<Dlts, ModelError> {
    let file: DltsFile = serde_json::from_str(text)?;
    let table = StateTable::new(&file.states)?;
    let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, a) in file.labels.iter().enumerate() {
        if labels.insert(a.as_str(), i).is_some() {
            return Err(ModelError::Validation(format!("duplicate label {a}")));
        }
    }
    let mut step = vec![vec![None; file.labels.len()]; file.states.len()];
    for (s, by_label) in &file.step {
        let si = table.resolve(s, "step")?;
        for (a, t) in by_label {
            let ai = *labels.get(a.as_str()).ok_or_else(|| {
                ModelError::Validation(format!("unknown label {a} in step at {s}"))
            })?;
            let next = if t == TARGET_KEY {
                Next::Target
            } else {
                Next::State(table.resolve(t, &format!("step at {s} on {a}"))?)
            };
            step[si][ai] = Some(next);
        }
    }
    let mut total = Vec::with_capacity(file.states.len());
    for (si, row) in step.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (ai, cell) in row.into_iter().enumerate() {
            out.push(cell.ok_or_else(|| {
                ModelError::Validation(format!(
                    "step must be total: missing {} on {}",
                    file.states[si], file.labels[ai]
                ))
            })?);
        }
        total.push(out);
    }
    let mut safe = vec![false; file.states.len()];
    for s in &file.safe {
        safe[table.resolve(s, "safe")?] = true;
    }
    Ok(Dlts {
        states: file.states,
        labels: file.labels,
        step: total,
        safe,
    })
}

fn load_resource(text: &str) -> Result<ResourceGraph, ModelError> {
    let file: ResourceFile = serde_json::from_str(text)?;
    let table = StateTable::new(&file.states)?;
    if file.bound < 1 {
        return Err(ModelError::Validation("bound M must be at least 1".into()));
    }
    let mut nodes = Vec::with_capacity(file.states.len());
    for s in table.order {
        let node = file
            .nodes
            .get(s)
            .ok_or_else(|| ModelError::Validation(format!("missing node for state {s}")))?;
        nodes.push(match node {
            ResourceNodeFile::Target(tag) => {
                if tag != TARGET_KEY {
                    return Err(ModelError::Validation(format!(
                        "node at {s} must be \"{TARGET_KEY}\" or an object"
                    )));
                }
                ResourceNode::Target
            }
            ResourceNodeFile::Inner { succ, resource } => {
                let mut ids = succ
                    .iter()
                    .map(|t| table.resolve(t, &format!("succ of {s}")))
                    .collect::<Result<Vec<_>, _>>()?;
                ids.sort_unstable();
                ids.dedup();
                ResourceNode::Inner {
                    succ: ids,
                    resource: *resource,
                }
            }
        });
    }
    for name in file.nodes.keys() {
        table.resolve(name, "nodes")?;
    }
    Ok(ResourceGraph {
        states: file.states,
        nodes,
        bound: file.bound,
    })
}

fn next_name(states: &[String], n: &Next) -> String {
    match n {
        Next::State(i) => states[*i].clone(),
        Next::Target => TARGET_KEY.to_string(),
    }
}

/// Canonical re-serialization; `load_model(to_json(m)) == m`.
pub fn to_json(model: &Model) -> String {
    let value = match model {
        Model::Mc(mc) => {
            let transitions: BTreeMap<String, BTreeMap<String, f64>> = mc
                .states
                .iter()
                .zip(&mc.transitions)
                .map(|(s, row)| {
                    let dist: BTreeMap<String, f64> = row
                        .iter()
                        .map(|(n, p)| (next_name(&mc.states, n), *p))
                        .collect();
                    (s.clone(), dist)
                })
                .collect();
            let rewards: BTreeMap<String, u32> = mc
                .states
                .iter()
                .zip(&mc.rewards)
                .map(|(s, r)| (s.clone(), *r))
                .collect();
            json!({"type": "mc", "states": mc.states, "transitions": transitions, "rewards": rewards})
        }
        Model::Mdp(m) => {
            let choices: BTreeMap<String, Vec<serde_json::Value>> = m
                .states
                .iter()
                .zip(&m.choices)
                .map(|(s, list)| {
                    let cs = list
                        .iter()
                        .map(|c| {
                            let dist: BTreeMap<String, f64> = c
                                .dist
                                .iter()
                                .map(|(n, p)| (next_name(&m.states, n), *p))
                                .collect();
                            json!({"dist": dist, "reward": c.reward})
                        })
                        .collect();
                    (s.clone(), cs)
                })
                .collect();
            json!({"type": "mdp", "states": m.states, "choices": choices})
        }
        Model::Nfa(n) => {
            let delta: BTreeMap<String, BTreeMap<String, Vec<String>>> = n
                .states
                .iter()
                .enumerate()
                .map(|(si, s)| {
                    let by_letter: BTreeMap<String, Vec<String>> = n
                        .alphabet
                        .iter()
                        .enumerate()
                        .filter(|(ai, _)| !n.delta[si][*ai].is_empty())
                        .map(|(ai, a)| {
                            let succs = n.delta[si][ai]
                                .iter()
                                .map(|&t| n.states[t].clone())
                                .collect();
                            (a.clone(), succs)
                        })
                        .collect();
                    (s.clone(), by_letter)
                })
                .collect();
            let accepting: Vec<String> = n
                .states
                .iter()
                .zip(&n.accepting)
                .filter(|(_, &acc)| acc)
                .map(|(s, _)| s.clone())
                .collect();
            json!({"type": "nfa", "states": n.states, "alphabet": n.alphabet, "delta": delta, "accepting": accepting})
        }
        Model::Dlts(d) => {
            let step: BTreeMap<String, BTreeMap<String, String>> = d
                .states
                .iter()
                .enumerate()
                .map(|(si, s)| {
                    let by_label: BTreeMap<String, String> = d
                        .labels
                        .iter()
                        .enumerate()
                        .map(|(ai, a)| (a.clone(), next_name(&d.states, &d.step[si][ai])))
                        .collect();
                    (s.clone(), by_label)
                })
                .collect();
            let safe: Vec<String> = d
                .states
                .iter()
                .zip(&d.safe)
                .filter(|(_, &ok)| ok)
                .map(|(s, _)| s.clone())
                .collect();
            json!({"type": "dlts", "states": d.states, "labels": d.labels, "step": step, "safe": safe})
        }
        Model::Resource(g) => {
            let nodes: BTreeMap<String, serde_json::Value> = g
                .states
                .iter()
                .zip(&g.nodes)
                .map(|(s, node)| {
                    let v = match node {
                        ResourceNode::Target => json!(TARGET_KEY),
                        ResourceNode::Inner { succ, resource } => {
                            let names: Vec<String> =
                                succ.iter().map(|&t| g.states[t].clone()).collect();
                            json!({"succ": names, "resource": resource})
                        }
                    };
                    (s.clone(), v)
                })
                .collect();
            json!({"type": "resource", "states": g.states, "bound": g.bound, "nodes": nodes})
        }
    };
    serde_json::to_string_pretty(&value).expect("model serialization cannot fail")
}

/// Singleton-choice embedding of an MC into the MDP format, preserving state
/// order, distributions and rewards.
pub fn embed_mc_as_mdp(mc: &MarkovChain) -> Mdp {
    Mdp {
        states: mc.states.clone(),
        choices: mc
            .transitions
            .iter()
            .zip(&mc.rewards)
            .map(|(dist, &reward)| {
                vec![Choice {
                    dist: dist.clone(),
                    reward,
                }]
            })
            .collect(),
    }
}

/// Parses a lasso-word file: `[{"prefix": ["a"], "loop": ["b","a"]}, ...]`.
pub fn parse_lasso_file(text: &str) -> Result<Vec<LassoWord>, ModelError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct LassoFile {
        #[serde(default)]
        prefix: Vec<String>,
        #[serde(rename = "loop")]
        cycle: Vec<String>,
    }
    let raw: Vec<LassoFile> = serde_json::from_str(text)?;
    raw.into_iter()
        .map(|l| LassoWord::new(l.prefix, l.cycle))
        .collect()
}
