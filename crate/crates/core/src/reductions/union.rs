use std::collections::HashSet;

use crate::automaton::{fresh_name, Automaton, Event, Label, StateId, StateSet, Transition};
use crate::error::{Error, Result};
use crate::verify::CsoInstance;

/// Deterministic current-state opacity instance encoding universality of a
/// union of DFAs.
#[derive(Clone, Debug)]
pub struct UnionCso {
    pub instance: CsoInstance,
    /// Unobservable event linking the component initial states, if more than
    /// one component was given.
    pub chain_event: Option<String>,
    /// Initial state of every component in the output, in input order.
    pub component_initials: Vec<String>,
    /// Components that received a fresh initial copy.
    pub copied_initials: Vec<usize>,
    /// Components that were completed with a sink state.
    pub completed: Vec<usize>,
}

struct Component {
    states: Vec<String>,
    transitions: Vec<(StateId, usize, StateId)>,
    initial: StateId,
    marked: StateSet,
}

/// Completes `dfa` with a non-marked sink and, if its initial state has an
/// incoming transition, gives it a fresh initial copy. Events are indexed in
/// the order of `alphabet`.
fn prepare(dfa: &Automaton, alphabet: &[Event]) -> (Component, bool, bool) {
    let event_of = |label: Label| match label {
        Label::Event(e) => alphabet.iter().position(|a| a.name == dfa.event(e).name).expect("shared alphabet"),
        Label::Epsilon => unreachable!("deterministic automata have no epsilon moves"),
    };
    let mut c = Component {
        states: dfa.states().to_vec(),
        transitions: dfa.transitions().iter().map(|t| (t.source, event_of(t.label), t.target)).collect(),
        initial: *dfa.initial().iter().next().expect("deterministic automata have one initial state"),
        marked: dfa.marked().clone(),
    };
    let mut taken: HashSet<String> = c.states.iter().cloned().collect();

    let mut defined = vec![vec![false; alphabet.len()]; c.states.len()];
    for &(p, e, _) in &c.transitions {
        defined[p][e] = true;
    }
    let complete = defined.iter().all(|row| row.iter().all(|&d| d));
    if !complete {
        let sink_name = fresh_name("sink", |n| taken.contains(n));
        taken.insert(sink_name.clone());
        c.states.push(sink_name);
        let sink = c.states.len() - 1;
        for (p, row) in defined.iter().enumerate() {
            for (e, &d) in row.iter().enumerate() {
                if !d {
                    c.transitions.push((p, e, sink));
                }
            }
        }
        for e in 0..alphabet.len() {
            c.transitions.push((sink, e, sink));
        }
    }

    let reentrant = c.transitions.iter().any(|&(_, _, q)| q == c.initial);
    if reentrant {
        let old = c.initial;
        let name = fresh_name(&format!("{}'", c.states[old]), |n| taken.contains(n));
        c.states.push(name);
        let copy = c.states.len() - 1;
        let outgoing: Vec<_> = c.transitions.iter().filter(|t| t.0 == old).map(|&(_, e, q)| (copy, e, q)).collect();
        c.transitions.extend(outgoing);
        if c.marked.contains(&old) {
            c.marked.insert(copy);
        }
        c.initial = copy;
    }
    (c, !complete, reentrant)
}

/// Builds a DFA with one unobservable event that is current-state opaque with
/// respect to `Q_S = Q \ F`, `Q_NS = F` iff the union of the input languages
/// is universal.
///
/// Each component is completed with a sink when partial, so that a rejected
/// string always leaves a secret state in the estimate. Components whose
/// initial state can be re-entered get a fresh initial copy first; then the
/// component initial states are linked by an unobservable chain starting in
/// the first one. Component `i`'s states are named `<i>/<name>` (1-based).
pub fn gen_union_universality_cso(dfas: &[Automaton]) -> Result<UnionCso> {
    let first = dfas.first().ok_or_else(|| Error::PreconditionViolated("at least one DFA is required".into()))?;
    let alphabet: Vec<Event> = first.alphabet().to_vec();
    if alphabet.iter().any(|e| !e.observable) {
        return Err(Error::PreconditionViolated("all events of the input DFAs must be observable".into()));
    }
    let mut sorted = alphabet.clone();
    sorted.sort();
    for (i, dfa) in dfas.iter().enumerate() {
        if !dfa.classify().deterministic {
            return Err(Error::InputNotDeterministic(i));
        }
        let mut other = dfa.alphabet().to_vec();
        other.sort();
        if other != sorted {
            return Err(Error::AlphabetMismatch(format!("DFA #{i} differs from DFA #0")));
        }
    }

    let mut states = Vec::new();
    let mut transitions = Vec::new();
    let mut marked = StateSet::new();
    let mut initials = Vec::new();
    let mut copied_initials = Vec::new();
    let mut completed = Vec::new();
    for (i, dfa) in dfas.iter().enumerate() {
        let (c, was_completed, was_copied) = prepare(dfa, &alphabet);
        if was_completed {
            completed.push(i);
        }
        if was_copied {
            copied_initials.push(i);
        }
        let offset = states.len();
        states.extend(c.states.iter().map(|s| format!("{}/{s}", i + 1)));
        transitions.extend(c.transitions.iter().map(|&(p, e, q)| Transition {
            source: p + offset,
            label: Label::Event(e),
            target: q + offset,
        }));
        marked.extend(c.marked.iter().map(|&q| q + offset));
        initials.push(c.initial + offset);
    }

    let mut full_alphabet = alphabet.clone();
    let chain_event = (dfas.len() > 1).then(|| {
        let name = fresh_name("a", |n| alphabet.iter().any(|e| e.name == n));
        full_alphabet.push(Event::unobservable(name.clone()));
        name
    });
    if chain_event.is_some() {
        let a = Label::Event(full_alphabet.len() - 1);
        for w in initials.windows(2) {
            transitions.push(Transition { source: w[0], label: a, target: w[1] });
        }
    }

    let component_initials = initials.iter().map(|&q| states[q].clone()).collect();
    let all: StateSet = (0..states.len()).collect();
    let secret = all.difference(&marked).copied().collect();
    let automaton = Automaton::from_parts(states, full_alphabet, transitions, [initials[0]].into(), marked.clone())?;
    let instance = CsoInstance::new(automaton, secret, marked)?;
    Ok(UnionCso { instance, chain_event, component_initials, copied_initials, completed })
}
