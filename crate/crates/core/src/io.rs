//! JSON and DIMACS formats.
//!
//! Serialized output is canonical: object keys sorted, state lists and
//! transitions sorted by name, alphabet kept in declaration order (it fixes the
//! witness order), pretty-printed with two-space indentation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automaton::{Automaton, Event, StateSet};
use crate::error::{Error, Result};
use crate::reductions::{CnfFormula, Dag};
use crate::verify::{CsoInstance, IfsoInstance, IsoInstance, LboInstance, StatePair};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonJson {
    alphabet: Vec<Event>,
    states: Vec<String>,
    initial: Vec<String>,
    marked: Vec<String>,
    transitions: Vec<(String, String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CsoJson {
    automaton: AutomatonJson,
    secret: Vec<String>,
    nonsecret: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsoJson {
    automaton: AutomatonJson,
    secret_initial: Vec<String>,
    nonsecret_initial: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsoJson {
    automaton: AutomatonJson,
    secret_pairs: Vec<(String, String)>,
    nonsecret_pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LboJson {
    secret_automaton: AutomatonJson,
    nonsecret_automaton: AutomatonJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DagJson {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    s: usize,
    t: usize,
}

/// A parsed instance with its optional free-form `metadata` block.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub instance: T,
    pub metadata: Option<Value>,
}

fn sorted_names(a: &Automaton, set: &StateSet) -> Vec<String> {
    let names: BTreeSet<&str> = set.iter().map(|&q| a.state_name(q)).collect();
    names.into_iter().map(str::to_string).collect()
}

fn to_json(a: &Automaton) -> AutomatonJson {
    let states: BTreeSet<&String> = a.states().iter().collect();
    let transitions: BTreeSet<(String, String, String)> = a
        .transitions()
        .iter()
        .map(|t| {
            (a.state_name(t.source).to_string(), a.label_name(t.label).to_string(), a.state_name(t.target).to_string())
        })
        .collect();
    AutomatonJson {
        alphabet: a.alphabet().to_vec(),
        states: states.into_iter().cloned().collect(),
        initial: sorted_names(a, a.initial()),
        marked: sorted_names(a, a.marked()),
        transitions: transitions.into_iter().collect(),
    }
}

fn from_json(j: AutomatonJson) -> Result<Automaton> {
    if j.initial.is_empty() {
        return Err(Error::NoInitialState);
    }
    Automaton::from_names(&j.states, j.alphabet, &j.transitions, &j.initial, &j.marked)
}

fn pairs_from_names(a: &Automaton, pairs: &[(String, String)]) -> Result<BTreeSet<StatePair>> {
    let id = |n: &str| a.state_id(n).ok_or_else(|| Error::UnknownState(n.to_string()));
    pairs.iter().map(|(i, f)| Ok((id(i)?, id(f)?))).collect()
}

fn pairs_to_names(a: &Automaton, pairs: &BTreeSet<StatePair>) -> Vec<(String, String)> {
    let named: BTreeSet<(String, String)> =
        pairs.iter().map(|&(i, f)| (a.state_name(i).to_string(), a.state_name(f).to_string())).collect();
    named.into_iter().collect()
}

/// Pretty-prints with sorted object keys.
pub fn canonical<T: Serialize>(value: &T) -> String {
    // Value's map type is ordered, so a round trip through it sorts keys.
    let value = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&value).expect("serializable") + "\n"
}

pub fn read_automaton(text: &str) -> Result<Automaton> {
    from_json(serde_json::from_str(text)?)
}

/// Accepts either one automaton object or an array of them.
pub fn read_automata(text: &str) -> Result<Vec<Automaton>> {
    let value: Value = serde_json::from_str(text)?;
    match value {
        Value::Array(items) => items.into_iter().map(|v| from_json(serde_json::from_value(v)?)).collect(),
        other => Ok(vec![from_json(serde_json::from_value(other)?)?]),
    }
}

pub fn write_automaton(a: &Automaton) -> String {
    canonical(&to_json(a))
}

pub fn read_cso(text: &str) -> Result<Parsed<CsoInstance>> {
    let j: CsoJson = serde_json::from_str(text)?;
    let instance = CsoInstance::from_names(from_json(j.automaton)?, &j.secret, &j.nonsecret)?;
    Ok(Parsed { instance, metadata: j.metadata })
}

pub fn write_cso(inst: &CsoInstance, metadata: Option<&Value>) -> String {
    let a = inst.automaton();
    canonical(&CsoJson {
        automaton: to_json(a),
        secret: sorted_names(a, inst.secret()),
        nonsecret: sorted_names(a, inst.nonsecret()),
        metadata: metadata.cloned(),
    })
}

pub fn read_iso(text: &str) -> Result<Parsed<IsoInstance>> {
    let j: IsoJson = serde_json::from_str(text)?;
    let a = from_json(j.automaton)?;
    let secret = a.state_set(&j.secret_initial)?;
    let nonsecret = a.state_set(&j.nonsecret_initial)?;
    Ok(Parsed { instance: IsoInstance::new(a, secret, nonsecret)?, metadata: j.metadata })
}

pub fn write_iso(inst: &IsoInstance, metadata: Option<&Value>) -> String {
    let a = inst.automaton();
    canonical(&IsoJson {
        automaton: to_json(a),
        secret_initial: sorted_names(a, inst.secret_initial()),
        nonsecret_initial: sorted_names(a, inst.nonsecret_initial()),
        metadata: metadata.cloned(),
    })
}

pub fn read_ifso(text: &str) -> Result<Parsed<IfsoInstance>> {
    let j: IfsoJson = serde_json::from_str(text)?;
    let a = from_json(j.automaton)?;
    let secret = pairs_from_names(&a, &j.secret_pairs)?;
    let nonsecret = pairs_from_names(&a, &j.nonsecret_pairs)?;
    Ok(Parsed { instance: IfsoInstance::new(a, secret, nonsecret)?, metadata: j.metadata })
}

pub fn write_ifso(inst: &IfsoInstance, metadata: Option<&Value>) -> String {
    let a = inst.automaton();
    canonical(&IfsoJson {
        automaton: to_json(a),
        secret_pairs: pairs_to_names(a, inst.secret_pairs()),
        nonsecret_pairs: pairs_to_names(a, inst.nonsecret_pairs()),
        metadata: metadata.cloned(),
    })
}

pub fn read_lbo(text: &str) -> Result<Parsed<LboInstance>> {
    let j: LboJson = serde_json::from_str(text)?;
    let instance = LboInstance::new(from_json(j.secret_automaton)?, from_json(j.nonsecret_automaton)?)?;
    Ok(Parsed { instance, metadata: j.metadata })
}

pub fn write_lbo(inst: &LboInstance, metadata: Option<&Value>) -> String {
    canonical(&LboJson {
        secret_automaton: to_json(inst.secret_automaton()),
        nonsecret_automaton: to_json(inst.nonsecret_automaton()),
        metadata: metadata.cloned(),
    })
}

pub fn read_dag(text: &str) -> Result<Dag> {
    let j: DagJson = serde_json::from_str(text)?;
    Dag::new(j.vertices, j.edges, j.s, j.t)
}

pub fn write_dag(dag: &Dag) -> String {
    canonical(&DagJson {
        vertices: dag.vertex_count(),
        edges: dag.edges().iter().copied().collect(),
        s: dag.source(),
        t: dag.target(),
    })
}

/// Parses DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then literals with every clause terminated by `0`. A clause may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: &str| Error::Dimacs { line, message: message.to_string() };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed == "%" {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(err(line, "duplicate header"));
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let [_, "cnf", n, m] = fields.as_slice() else {
                return Err(err(line, "expected `p cnf <variables> <clauses>`"));
            };
            let n = n.parse().map_err(|_| err(line, "invalid variable count"))?;
            let m = m.parse().map_err(|_| err(line, "invalid clause count"))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(err(line, "clause before the `p cnf` header"));
        };
        for token in trimmed.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| err(line, &format!("invalid literal `{token}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(err(line, &format!("literal {lit} exceeds the declared {n} variables")));
            } else {
                current.push(lit);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| err(last_line, "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(err(last_line, &format!("header declares {m} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(n, clauses)
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.variable_count(), formula.clauses().len());
    for clause in formula.clauses() {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "automaton": {
            "alphabet": [{"name": "o", "observable": true}, {"name": "u", "observable": false}],
            "states": ["q1", "q0"],
            "initial": ["q0"],
            "marked": [],
            "transitions": [["q0", "u", "q1"], ["q0", "o", "q0"]]
        },
        "secret": ["q1"],
        "nonsecret": ["q0"]
    }"#;

    #[test]
    fn cso_round_trip_is_stable() {
        let first = write_cso(&read_cso(SAMPLE).unwrap().instance, None);
        let second = write_cso(&read_cso(&first).unwrap().instance, None);
        assert_eq!(first, second);
        let states = first.find("\"states\"").unwrap();
        assert!(first[states..].find("\"q0\"").unwrap() < first[states..].find("\"q1\"").unwrap());
    }

    #[test]
    fn metadata_survives() {
        let meta = serde_json::json!({"z": 1, "a": [2]});
        let inst = read_cso(SAMPLE).unwrap().instance;
        let text = write_cso(&inst, Some(&meta));
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
        assert_eq!(read_cso(&text).unwrap().metadata, Some(meta));
    }

    #[test]
    fn rejects_bad_input() {
        let unknown_key = SAMPLE.replace("\"nonsecret\"", "\"public\"");
        assert!(read_cso(&unknown_key).is_err());
        let unknown_state = SAMPLE.replace("\"secret\": [\"q1\"]", "\"secret\": [\"q9\"]");
        assert!(matches!(read_cso(&unknown_state), Err(Error::UnknownState(_))));
        let no_initial = SAMPLE.replace("\"initial\": [\"q0\"]", "\"initial\": []");
        assert!(matches!(read_cso(&no_initial), Err(Error::NoInitialState)));
        let bad_event = SAMPLE.replace("[\"q0\", \"o\", \"q0\"]", "[\"q0\", \"k\", \"q0\"]");
        assert!(matches!(read_cso(&bad_event), Err(Error::UnknownEvent(_))));
    }

    #[test]
    fn dimacs_parsing() {
        let f = parse_dimacs("c two clauses\np cnf 3 2\n1 2 3 0\n-1 2\n3 0\n").unwrap();
        assert_eq!(f, CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, 2, 3]]).unwrap());
        assert_eq!(parse_dimacs(&write_dimacs(&f)).unwrap(), f);
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 -1 0\n"), Err(Error::MalformedFormula(_))));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(Error::Dimacs { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 3 0\n"), Err(Error::Dimacs { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 0\n"), Err(Error::Dimacs { .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(Error::Dimacs { .. })));
        assert_eq!(parse_dimacs("p cnf 1 1\n0\n").unwrap().clauses().len(), 1);
    }

    #[test]
    fn dag_round_trip() {
        let dag = read_dag(r#"{"vertices": 3, "edges": [[1, 2], [0, 1]], "s": 0, "t": 2}"#).unwrap();
        assert_eq!(read_dag(&write_dag(&dag)).unwrap(), dag);
        assert!(read_dag(r#"{"vertices": 2, "edges": [[0, 1], [1, 0]], "s": 0, "t": 1}"#).is_err());
    }
}
