//! Determinization of partially ordered NFAs that preserves current-state
//! opacity, using a fresh unobservable event.
//!
//! 1. Every state with several `x`-successors keeps one of them and reaches
//!    each other one `q` through a fresh event `x'` and a fresh state `p'`:
//!    `p -x'-> p' -x-> q`. A self-loop, if present, is the one kept.
//! 2. Fresh events are numbered `1..=m` in creation order and the `k`-th is
//!    encoded as `a^k`. All codes leaving one state share a single `a`-path,
//!    whose `k`-th state is the fresh state of the `k`-th fresh event.
//! 3. Several initial states `q1..qn` are replaced by a single one through an
//!    `a`-chain `q'0 .. q'n` with `q'i -c-> qi` for the chain event `c`.
//!
//! States introduced by any stage carry no secret status. Original states keep
//! their indices and names.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::automaton::{fresh_name, Automaton, Event, EventId, Label, StateId, StateSet, Transition};
use crate::error::{Error, Result};

/// One replaced nondeterministic transition `source -event-> target`, now
/// reached by `a^code` from `source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodingEntry {
    pub fresh_event: String,
    pub code: usize,
    pub source: String,
    pub event: String,
    pub target: String,
}

#[derive(Clone, Debug)]
pub struct PoDeterminized {
    pub automaton: Automaton,
    /// Name of the unobservable encoding event, when one was needed.
    pub encoding_event: Option<String>,
    pub encoding: Vec<EncodingEntry>,
    /// Fresh states of the initial chain, in chain order.
    pub initial_chain: Vec<String>,
}

struct Names {
    taken: HashSet<String>,
}

impl Names {
    fn fresh(&mut self, base: &str) -> String {
        let name = fresh_name(base, |n| self.taken.contains(n));
        self.taken.insert(name.clone());
        name
    }
}

pub fn po_determinize(automaton: &Automaton, chain_event: &str) -> Result<PoDeterminized> {
    let report = automaton.classify();
    if !report.partially_ordered {
        return Err(Error::PreconditionViolated("automaton is not partially ordered".into()));
    }
    let chain = automaton
        .event_id(chain_event)
        .filter(|&e| automaton.event(e).observable)
        .ok_or_else(|| Error::PreconditionViolated(format!("chain event `{chain_event}` is not observable")))?;
    if automaton.transitions().iter().any(|t| t.label == Label::Epsilon) {
        return Err(Error::PreconditionViolated("epsilon transitions are not supported".into()));
    }

    let mut states: Vec<String> = automaton.states().to_vec();
    let mut names = Names { taken: states.iter().cloned().collect() };
    let mut transitions: Vec<Transition> = Vec::new();
    let add_state = |states: &mut Vec<String>, name: String| -> StateId {
        states.push(name);
        states.len() - 1
    };

    // stage 1: split nondeterministic choices
    let mut groups: BTreeMap<(StateId, EventId), Vec<StateId>> = BTreeMap::new();
    for t in automaton.transitions() {
        let Label::Event(e) = t.label else { unreachable!() };
        groups.entry((t.source, e)).or_default().push(t.target);
    }
    // (source, fresh state) per fresh event, indexed by code - 1
    let mut fresh: Vec<(StateId, StateId)> = Vec::new();
    let mut encoding = Vec::new();
    for (&(p, e), targets) in &groups {
        let kept = if targets.contains(&p) { p } else { targets[0] };
        transitions.push(Transition { source: p, label: Label::Event(e), target: kept });
        for &q in targets.iter().filter(|&&q| q != kept) {
            let code = fresh.len() + 1;
            let p_prime = add_state(&mut states, names.fresh(&format!("{}'", automaton.state_name(p))));
            transitions.push(Transition { source: p_prime, label: Label::Event(e), target: q });
            fresh.push((p, p_prime));
            encoding.push(EncodingEntry {
                fresh_event: format!("x'{code}"),
                code,
                source: automaton.state_name(p).to_string(),
                event: automaton.event(e).name.clone(),
                target: automaton.state_name(q).to_string(),
            });
        }
    }

    let needs_chain = automaton.initial().len() > 1;
    let mut alphabet = automaton.alphabet().to_vec();
    let encoding_event = if fresh.is_empty() && !needs_chain {
        None
    } else {
        let name = fresh_name("a", |n| automaton.event_id(n).is_some());
        alphabet.push(Event::unobservable(name.clone()));
        Some(name)
    };
    let a = Label::Event(alphabet.len() - 1);

    // stage 2: shared unary paths, one per state with fresh events
    let mut by_source: BTreeMap<StateId, BTreeMap<usize, StateId>> = BTreeMap::new();
    for (idx, &(p, p_prime)) in fresh.iter().enumerate() {
        by_source.entry(p).or_default().insert(idx + 1, p_prime);
    }
    for (p, exits) in by_source {
        let longest = *exits.keys().next_back().expect("non-empty");
        let mut prev = p;
        for depth in 1..=longest {
            let here = match exits.get(&depth) {
                Some(&p_prime) => p_prime,
                None => add_state(&mut states, names.fresh(&format!("{}~{depth}", automaton.state_name(p)))),
            };
            transitions.push(Transition { source: prev, label: a, target: here });
            prev = here;
        }
    }

    // stage 3: single initial state
    let mut initial_chain = Vec::new();
    let initial: StateSet = if needs_chain {
        let mut prev = add_state(&mut states, names.fresh("init'0"));
        initial_chain.push(states[prev].clone());
        let start = prev;
        for (i, &q) in automaton.initial().iter().enumerate() {
            let here = add_state(&mut states, names.fresh(&format!("init'{}", i + 1)));
            initial_chain.push(states[here].clone());
            transitions.push(Transition { source: prev, label: a, target: here });
            transitions.push(Transition { source: here, label: Label::Event(chain), target: q });
            prev = here;
        }
        [start].into()
    } else {
        automaton.initial().clone()
    };

    let automaton = Automaton::from_parts(states, alphabet, transitions, initial, automaton.marked().clone())?;
    Ok(PoDeterminized { automaton, encoding_event, encoding, initial_chain })
}
