//! Finite automata over a partitioned alphabet.
//!
//! An [`Automaton`] is immutable once built. States and events are addressed by
//! dense indices in declaration order; names are kept for I/O and witnesses.
//! Transitions may carry the reserved [`Label::Epsilon`] marker, which is what
//! [`Automaton::project`] relabels unobservable transitions to.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type StateId = usize;
pub type EventId = usize;
pub type StateSet = BTreeSet<StateId>;

/// Name under which epsilon transitions are written out.
pub const EPSILON: &str = "ε";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub name: String,
    pub observable: bool,
}

impl Event {
    pub fn observable(name: impl Into<String>) -> Self {
        Event { name: name.into(), observable: true }
    }

    pub fn unobservable(name: impl Into<String>) -> Self {
        Event { name: name.into(), observable: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Event(EventId),
    Epsilon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub source: StateId,
    pub label: Label,
    pub target: StateId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub deterministic: bool,
    pub acyclic: bool,
    pub partially_ordered: bool,
    pub observable_event_count: usize,
    pub unobservable_event_count: usize,
}

#[derive(Clone, Debug)]
pub struct Automaton {
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    alphabet: Vec<Event>,
    event_index: HashMap<String, EventId>,
    transitions: Vec<Transition>,
    initial: StateSet,
    marked: StateSet,
    successors: Vec<Vec<(Label, StateId)>>,
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.alphabet == other.alphabet
            && self.transitions == other.transitions
            && self.initial == other.initial
            && self.marked == other.marked
    }
}

impl Eq for Automaton {}

/// Incremental constructor; all validation happens in [`AutomatonBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    states: Vec<String>,
    alphabet: Vec<Event>,
    transitions: Vec<Transition>,
    initial: StateSet,
    marked: StateSet,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn event(&mut self, event: Event) -> EventId {
        self.alphabet.push(event);
        self.alphabet.len() - 1
    }

    pub fn transition(&mut self, source: StateId, label: Label, target: StateId) -> &mut Self {
        self.transitions.push(Transition { source, label, target });
        self
    }

    pub fn initial(&mut self, state: StateId) -> &mut Self {
        self.initial.insert(state);
        self
    }

    pub fn marked(&mut self, state: StateId) -> &mut Self {
        self.marked.insert(state);
        self
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn build(self) -> Result<Automaton> {
        Automaton::from_parts(self.states, self.alphabet, self.transitions, self.initial, self.marked)
    }
}

impl Automaton {
    pub fn builder() -> AutomatonBuilder {
        AutomatonBuilder::new()
    }

    /// Builds an automaton from index-based parts, validating every invariant.
    pub fn from_parts(
        states: Vec<String>,
        alphabet: Vec<Event>,
        mut transitions: Vec<Transition>,
        initial: StateSet,
        marked: StateSet,
    ) -> Result<Self> {
        let mut state_index = HashMap::with_capacity(states.len());
        for (id, name) in states.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidStateName(name.clone()));
            }
            if state_index.insert(name.clone(), id).is_some() {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        let mut event_index = HashMap::with_capacity(alphabet.len());
        for (id, event) in alphabet.iter().enumerate() {
            if event.name.is_empty() || event.name == EPSILON {
                return Err(Error::InvalidEventName(event.name.clone()));
            }
            if event_index.insert(event.name.clone(), id).is_some() {
                return Err(Error::DuplicateEvent(event.name.clone()));
            }
        }
        let n = states.len();
        let check_state = |q: StateId| {
            if q < n {
                Ok(())
            } else {
                Err(Error::UnknownState(format!("#{q}")))
            }
        };
        for t in &transitions {
            check_state(t.source)?;
            check_state(t.target)?;
            if let Label::Event(e) = t.label {
                if e >= alphabet.len() {
                    return Err(Error::UnknownEvent(format!("#{e}")));
                }
            }
        }
        for &q in initial.iter().chain(marked.iter()) {
            check_state(q)?;
        }
        transitions.sort_unstable();
        transitions.dedup();
        let mut successors = vec![Vec::new(); n];
        for t in &transitions {
            successors[t.source].push((t.label, t.target));
        }
        Ok(Automaton { states, state_index, alphabet, event_index, transitions, initial, marked, successors })
    }

    /// Builds an automaton from names. Transition labels equal to [`EPSILON`]
    /// denote epsilon transitions.
    pub fn from_names<S: AsRef<str>>(
        states: &[S],
        alphabet: Vec<Event>,
        transitions: &[(S, S, S)],
        initial: &[S],
        marked: &[S],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let index: HashMap<&str, StateId> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let events: HashMap<&str, EventId> =
            alphabet.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
        let lookup = |name: &S| {
            index.get(name.as_ref()).copied().ok_or_else(|| Error::UnknownState(name.as_ref().to_string()))
        };
        let mut ts = Vec::with_capacity(transitions.len());
        for (src, ev, dst) in transitions {
            let label = if ev.as_ref() == EPSILON {
                Label::Epsilon
            } else {
                Label::Event(*events.get(ev.as_ref()).ok_or_else(|| Error::UnknownEvent(ev.as_ref().to_string()))?)
            };
            ts.push(Transition { source: lookup(src)?, label, target: lookup(dst)? });
        }
        let initial = initial.iter().map(lookup).collect::<Result<StateSet>>()?;
        let marked = marked.iter().map(lookup).collect::<Result<StateSet>>()?;
        Self::from_parts(states, alphabet, ts, initial, marked)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    /// Resolves a list of state names, failing on the first unknown one.
    pub fn state_set<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet> {
        names
            .iter()
            .map(|n| self.state_id(n.as_ref()).ok_or_else(|| Error::UnknownState(n.as_ref().to_string())))
            .collect()
    }

    pub fn alphabet(&self) -> &[Event] {
        &self.alphabet
    }

    pub fn event(&self, e: EventId) -> &Event {
        &self.alphabet[e]
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn successors(&self, q: StateId) -> &[(Label, StateId)] {
        &self.successors[q]
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn marked(&self) -> &StateSet {
        &self.marked
    }

    pub fn label_name(&self, label: Label) -> &str {
        match label {
            Label::Event(e) => &self.alphabet[e].name,
            Label::Epsilon => EPSILON,
        }
    }

    /// True for observable events; epsilon is never observable.
    pub fn is_observable(&self, label: Label) -> bool {
        match label {
            Label::Event(e) => self.alphabet[e].observable,
            Label::Epsilon => false,
        }
    }

    /// Observable events in declaration order.
    pub fn observable_events(&self) -> Vec<EventId> {
        (0..self.alphabet.len()).filter(|&e| self.alphabet[e].observable).collect()
    }

    pub fn with_initial(&self, initial: StateSet) -> Self {
        let mut a = self.clone();
        a.initial = initial;
        a
    }

    pub fn with_marked(&self, marked: StateSet) -> Self {
        let mut a = self.clone();
        a.marked = marked;
        a
    }

    /// Least superset of `from` closed under unobservable and epsilon transitions.
    pub fn unobservable_reach(&self, from: &StateSet) -> StateSet {
        let mut seen = from.clone();
        let mut stack: Vec<StateId> = from.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(label, r) in &self.successors[q] {
                if !self.is_observable(label) && seen.insert(r) {
                    stack.push(r);
                }
            }
        }
        seen
    }

    /// Natural projection onto the observable alphabet. Unobservable transitions
    /// are relabeled to epsilon so that state identities are preserved.
    pub fn project(&self) -> Automaton {
        let mut remap = vec![None; self.alphabet.len()];
        let mut alphabet = Vec::new();
        for (e, event) in self.alphabet.iter().enumerate() {
            if event.observable {
                remap[e] = Some(alphabet.len());
                alphabet.push(event.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .map(|t| {
                let label = match t.label {
                    Label::Event(e) => remap[e].map_or(Label::Epsilon, Label::Event),
                    Label::Epsilon => Label::Epsilon,
                };
                Transition { label, ..*t }
            })
            .collect();
        Automaton::from_parts(self.states.clone(), alphabet, transitions, self.initial.clone(), self.marked.clone())
            .expect("projection preserves well-formedness")
    }

    pub fn classify(&self) -> StructureReport {
        let mut deterministic = self.initial.len() == 1;
        if deterministic {
            let mut seen = BTreeSet::new();
            for t in &self.transitions {
                if t.label == Label::Epsilon || !seen.insert((t.source, t.label)) {
                    deterministic = false;
                    break;
                }
            }
        }
        let has_self_loop = self.transitions.iter().any(|t| t.source == t.target);
        let partially_ordered = self.sccs_are_trivial();
        let observable_event_count = self.alphabet.iter().filter(|e| e.observable).count();
        StructureReport {
            deterministic,
            acyclic: partially_ordered && !has_self_loop,
            partially_ordered,
            observable_event_count,
            unobservable_event_count: self.alphabet.len() - observable_event_count,
        }
    }

    fn state_graph(&self, skip_self_loops: bool) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.states.len(), self.transitions.len());
        let nodes: Vec<_> = (0..self.states.len()).map(|_| g.add_node(())).collect();
        for t in &self.transitions {
            if !(skip_self_loops && t.source == t.target) {
                g.add_edge(nodes[t.source], nodes[t.target], ());
            }
        }
        g
    }

    fn sccs_are_trivial(&self) -> bool {
        tarjan_scc(&self.state_graph(true)).iter().all(|c| c.len() == 1)
    }

    /// Topological order of the states ignoring self-loops, or `None` when some
    /// cycle is longer than a self-loop.
    pub fn topological_order(&self) -> Option<Vec<StateId>> {
        let sccs = tarjan_scc(&self.state_graph(true));
        if sccs.iter().any(|c| c.len() != 1) {
            return None;
        }
        // tarjan_scc yields components in reverse topological order
        Some(sccs.into_iter().rev().map(|c| c[0].index()).collect())
    }

    /// Restriction to states that are reachable and co-reachable.
    pub fn trim(&self) -> Automaton {
        let n = self.states.len();
        let mut forward = vec![false; n];
        let mut stack: Vec<StateId> = self.initial.iter().copied().collect();
        for &q in &stack {
            forward[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &(_, r) in &self.successors[q] {
                if !forward[r] {
                    forward[r] = true;
                    stack.push(r);
                }
            }
        }
        let mut predecessors = vec![Vec::new(); n];
        for t in &self.transitions {
            predecessors[t.target].push(t.source);
        }
        let mut backward = vec![false; n];
        let mut stack: Vec<StateId> = self.marked.iter().copied().collect();
        for &q in &stack {
            backward[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &predecessors[q] {
                if !backward[p] {
                    backward[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|q| forward[q] && backward[q]).collect();
        self.restrict(&keep)
    }

    /// Keeps the states flagged in `keep`, preserving their relative order.
    pub(crate) fn restrict(&self, keep: &[bool]) -> Automaton {
        let mut remap = vec![None; self.states.len()];
        let mut states = Vec::new();
        for (q, name) in self.states.iter().enumerate() {
            if keep[q] {
                remap[q] = Some(states.len());
                states.push(name.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(Transition { source: remap[t.source]?, label: t.label, target: remap[t.target]? })
            })
            .collect();
        let keep_set = |s: &StateSet| s.iter().filter_map(|&q| remap[q]).collect();
        Automaton::from_parts(
            states,
            self.alphabet.clone(),
            transitions,
            keep_set(&self.initial),
            keep_set(&self.marked),
        )
        .expect("restriction preserves well-formedness")
    }

    /// Finds a shortest string of events leading from `sources` to `targets`
    /// whose projection is `observation`. Observation events are matched by name.
    pub fn find_run<S: AsRef<str>>(
        &self,
        sources: &StateSet,
        targets: &StateSet,
        observation: &[S],
    ) -> Option<Vec<EventId>> {
        let obs: Vec<Option<EventId>> = observation
            .iter()
            .map(|name| self.event_id(name.as_ref()).filter(|&e| self.alphabet[e].observable))
            .collect();
        if obs.iter().any(Option::is_none) {
            return None;
        }
        let width = obs.len() + 1;
        let key = |q: StateId, pos: usize| q * width + pos;
        let mut parent: HashMap<usize, Option<(usize, Label)>> = HashMap::new();
        let mut queue = VecDeque::new();
        for &q in sources {
            parent.insert(key(q, 0), None);
            queue.push_back((q, 0));
        }
        while let Some((q, pos)) = queue.pop_front() {
            if pos == obs.len() && targets.contains(&q) {
                let mut run = Vec::new();
                let mut cur = key(q, pos);
                while let Some(Some((prev, label))) = parent.get(&cur) {
                    if let Label::Event(e) = label {
                        run.push(*e);
                    }
                    cur = *prev;
                }
                run.reverse();
                return Some(run);
            }
            for &(label, r) in &self.successors[q] {
                let next_pos = if self.is_observable(label) {
                    match label {
                        Label::Event(e) if pos < obs.len() && obs[pos] == Some(e) => pos + 1,
                        _ => continue,
                    }
                } else {
                    pos
                };
                let k = key(r, next_pos);
                if let Entry::Vacant(slot) = parent.entry(k) {
                    slot.insert(Some((key(q, pos), label)));
                    queue.push_back((r, next_pos));
                }
            }
        }
        None
    }

    /// Event names of a run, as produced by [`Automaton::find_run`].
    pub fn event_names(&self, run: &[EventId]) -> Vec<String> {
        run.iter().map(|&e| self.alphabet[e].name.clone()).collect()
    }

    /// Projection of a string of event names; unknown names are dropped.
    pub fn project_names<S: AsRef<str>>(&self, word: &[S]) -> Vec<String> {
        word.iter()
            .filter(|n| self.event_id(n.as_ref()).is_some_and(|e| self.alphabet[e].observable))
            .map(|n| n.as_ref().to_string())
            .collect()
    }
}

/// Returns `base` if unused, otherwise `base` followed by the smallest numeric
/// suffix that is.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}{k}")).find(|c| !taken(c)).expect("unbounded suffix search")
}
