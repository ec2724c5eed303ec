//! Seeded random instance generators for tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::{Automaton, Event, Label, StateSet, Transition};
use crate::reductions::{CnfFormula, Dag};
use crate::verify::{CsoInstance, LboInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Any,
    Acyclic,
    /// Acyclic apart from self-loops.
    PartiallyOrdered,
}

#[derive(Clone, Debug)]
pub struct AutomatonParams {
    pub states: usize,
    pub alphabet: Vec<Event>,
    pub structure: Structure,
    /// Probability of each possible (source, event, target) transition.
    pub density: f64,
    pub max_initial: usize,
    pub marked_probability: f64,
}

impl AutomatonParams {
    pub fn new(states: usize, alphabet: Vec<Event>, structure: Structure) -> Self {
        AutomatonParams { states, alphabet, structure, density: 0.25, max_initial: 2, marked_probability: 0.3 }
    }
}

fn subset<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> StateSet {
    (0..n).filter(|_| rng.random_bool(p)).collect()
}

pub fn automaton<R: Rng + ?Sized>(rng: &mut R, params: &AutomatonParams) -> Automaton {
    let n = params.states.max(1);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    for p in 0..n {
        for e in 0..params.alphabet.len() {
            for q in 0..n {
                let allowed = match params.structure {
                    Structure::Any => true,
                    Structure::Acyclic => q > p,
                    Structure::PartiallyOrdered => q >= p,
                };
                if allowed && rng.random_bool(params.density) {
                    transitions.push(Transition { source: p, label: Label::Event(e), target: q });
                }
            }
        }
    }
    let initial_count = rng.random_range(1..=params.max_initial.clamp(1, n));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let initial: StateSet = order[..initial_count].iter().copied().collect();
    let marked = subset(rng, n, params.marked_probability);
    Automaton::from_parts(states, params.alphabet.clone(), transitions, initial, marked).expect("well-formed")
}

/// Secret and non-secret sets drawn independently, so they may overlap.
pub fn cso<R: Rng + ?Sized>(rng: &mut R, automaton: Automaton) -> CsoInstance {
    let n = automaton.state_count();
    let secret = subset(rng, n, 0.35);
    let nonsecret = subset(rng, n, 0.35);
    CsoInstance::new(automaton, secret, nonsecret).expect("valid state sets")
}

/// `n` in `1..=max_variables`, `m` in `0..=max_clauses`, widths in `widths`,
/// distinct variables within a clause.
pub fn cnf<R: Rng + ?Sized>(
    rng: &mut R,
    max_variables: usize,
    max_clauses: usize,
    widths: std::ops::RangeInclusive<usize>,
) -> CnfFormula {
    let n = rng.random_range(1..=max_variables.max(1));
    let m = rng.random_range(0..=max_clauses);
    let mut vars: Vec<i64> = (1..=n as i64).collect();
    let clauses = (0..m)
        .map(|_| {
            let width = rng.random_range(widths.clone()).min(n);
            vars.shuffle(rng);
            vars[..width].iter().map(|&v| if rng.random_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    CnfFormula::new(n, clauses).expect("no complementary literals")
}

/// Edges respect a random topological order; source and target are uniform.
pub fn dag<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> Dag {
    let n = rng.random_range(1..=max_vertices.max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let density = rng.random_range(0.05..0.4);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(n, edges, rng.random_range(0..n), rng.random_range(0..n)).expect("acyclic by construction")
}

/// A possibly partial DFA with `1..=max_states` states.
pub fn dfa<R: Rng + ?Sized>(rng: &mut R, max_states: usize, alphabet: &[Event]) -> Automaton {
    let n = rng.random_range(1..=max_states.max(1));
    let states: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    let mut transitions = Vec::new();
    for p in 0..n {
        for e in 0..alphabet.len() {
            if rng.random_bool(0.85) {
                transitions.push(Transition { source: p, label: Label::Event(e), target: rng.random_range(0..n) });
            }
        }
    }
    let marked = subset(rng, n, 0.4);
    Automaton::from_parts(states, alphabet.to_vec(), transitions, [0].into(), marked).expect("well-formed")
}

/// Two trim automata over one alphabet; retries until both keep an initial state.
pub fn trim_lbo<R: Rng + ?Sized>(rng: &mut R, max_states: usize, alphabet: &[Event]) -> LboInstance {
    let side = |rng: &mut R| loop {
        let mut params = AutomatonParams::new(rng.random_range(1..=max_states.max(1)), alphabet.to_vec(), Structure::Any);
        params.density = 0.3;
        params.marked_probability = 0.4;
        let a = automaton(rng, &params).trim();
        if !a.initial().is_empty() {
            return a;
        }
    };
    let secret = side(rng);
    let nonsecret = side(rng);
    LboInstance::new(secret, nonsecret).expect("shared alphabet")
}
