//! Observer (subset construction under partial observation), synchronous
//! product of projected automata, and the two language-level decision
//! procedures built from them.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::automaton::{Automaton, Event, EventId, Label, StateId, StateSet, Transition};
use crate::error::{Error, Result};
use crate::verdict::{Verdict, Witness};

/// Default bound on the number of materialized observer states.
pub const DEFAULT_OBSERVER_CAP: usize = 1 << 20;

/// Lazily materialized subsets of one automaton, reached by observable letters.
///
/// Letters are positions in a caller-chosen observable alphabet; a letter maps
/// to `None` when the automaton has no such observable event, so every step
/// on it leads to the empty set.
struct SubsetSpace<'a> {
    automaton: &'a Automaton,
    letters: Vec<Option<EventId>>,
    cap: usize,
    index: HashMap<FixedBitSet, usize>,
    sets: Vec<FixedBitSet>,
    memo: Vec<Vec<Option<Option<usize>>>>,
}

impl<'a> SubsetSpace<'a> {
    fn new(automaton: &'a Automaton, letters: Vec<Option<EventId>>, cap: usize) -> Self {
        SubsetSpace { automaton, letters, cap, index: HashMap::new(), sets: Vec::new(), memo: Vec::new() }
    }

    fn close(&self, set: &mut FixedBitSet) {
        let mut stack: Vec<StateId> = set.ones().collect();
        while let Some(q) = stack.pop() {
            for &(label, r) in self.automaton.successors(q) {
                if !self.automaton.is_observable(label) && !set.put(r) {
                    stack.push(r);
                }
            }
        }
    }

    fn intern(&mut self, set: FixedBitSet) -> Result<usize> {
        if let Some(&id) = self.index.get(&set) {
            return Ok(id);
        }
        if self.sets.len() >= self.cap {
            return Err(Error::ObserverBlowup { cap: self.cap });
        }
        let id = self.sets.len();
        self.index.insert(set.clone(), id);
        self.sets.push(set);
        self.memo.push(vec![None; self.letters.len()]);
        Ok(id)
    }

    /// Interns the closure of `states`; `None` when it is empty.
    fn start(&mut self, states: &StateSet) -> Result<Option<usize>> {
        let mut set = FixedBitSet::with_capacity(self.automaton.state_count());
        for &q in states {
            set.insert(q);
        }
        self.close(&mut set);
        if set.is_clear() {
            return Ok(None);
        }
        self.intern(set).map(Some)
    }

    fn step(&mut self, id: usize, letter: usize) -> Result<Option<usize>> {
        if let Some(done) = self.memo[id][letter] {
            return Ok(done);
        }
        let result = match self.letters[letter] {
            None => None,
            Some(event) => {
                let mut next = FixedBitSet::with_capacity(self.automaton.state_count());
                for q in self.sets[id].ones() {
                    for &(label, r) in self.automaton.successors(q) {
                        if label == Label::Event(event) {
                            next.insert(r);
                        }
                    }
                }
                self.close(&mut next);
                if next.is_clear() {
                    None
                } else {
                    Some(self.intern(next)?)
                }
            }
        };
        self.memo[id][letter] = Some(result);
        Ok(result)
    }
}

/// Deterministic observer over the observable events of its source automaton.
///
/// States are numbered in breadth-first discovery order with letters explored
/// in alphabet declaration order, so state `k`'s access word is the
/// shortest-then-lexicographically-least observation reaching it, and states
/// are sorted by that order.
#[derive(Clone, Debug)]
pub struct Observer {
    events: Vec<Event>,
    estimates: Vec<FixedBitSet>,
    delta: Vec<Vec<Option<usize>>>,
    marked: Vec<bool>,
    parent: Vec<Option<(usize, usize)>>,
}

/// Builds the reachable part of the observer of `automaton`. An estimate is
/// marked iff it meets `marking`.
pub fn observer(automaton: &Automaton, marking: &StateSet, cap: usize) -> Result<Observer> {
    let observable = automaton.observable_events();
    let events: Vec<Event> = observable.iter().map(|&e| automaton.event(e).clone()).collect();
    let mut space = SubsetSpace::new(automaton, observable.into_iter().map(Some).collect(), cap);
    let mut initial = FixedBitSet::with_capacity(automaton.state_count());
    for &q in automaton.initial() {
        initial.insert(q);
    }
    space.close(&mut initial);
    space.intern(initial)?;
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut parent = vec![None];
    let mut next = 0;
    while next < space.sets.len() {
        let mut row = Vec::with_capacity(events.len());
        for letter in 0..events.len() {
            let before = space.sets.len();
            let target = space.step(next, letter)?;
            if space.sets.len() > before {
                parent.push(Some((next, letter)));
            }
            row.push(target);
        }
        delta.push(row);
        next += 1;
    }
    let marked = space.sets.iter().map(|s| marking.iter().any(|&q| s.contains(q))).collect();
    Ok(Observer { events, estimates: space.sets, delta, marked, parent })
}

impl Observer {
    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn estimate(&self, state: usize) -> StateSet {
        self.estimates[state].ones().collect()
    }

    pub fn is_marked(&self, state: usize) -> bool {
        self.marked[state]
    }

    /// Successor on the `letter`-th observable event; `None` means the empty estimate.
    pub fn step(&self, state: usize, letter: usize) -> Option<usize> {
        self.delta[state][letter]
    }

    /// Runs an observation given by event names.
    pub fn run<S: AsRef<str>>(&self, observation: &[S]) -> Option<usize> {
        observation.iter().try_fold(self.initial(), |state, name| {
            let letter = self.events.iter().position(|e| e.name == name.as_ref())?;
            self.step(state, letter)
        })
    }

    /// Shortest, then least, observation reaching `state`.
    pub fn access_word(&self, mut state: usize) -> Vec<String> {
        let mut word = Vec::new();
        while let Some((prev, letter)) = self.parent[state] {
            word.push(self.events[letter].name.clone());
            state = prev;
        }
        word.reverse();
        word
    }

    /// The observer as an automaton; estimate `{p,q}` becomes state `"{p,q}"`.
    pub fn to_automaton(&self, source: &Automaton) -> Automaton {
        let states = self
            .estimates
            .iter()
            .map(|s| {
                let names: Vec<&str> = s.ones().map(|q| source.state_name(q)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        let mut transitions = Vec::new();
        for (x, row) in self.delta.iter().enumerate() {
            for (letter, target) in row.iter().enumerate() {
                if let Some(y) = *target {
                    transitions.push(Transition { source: x, label: Label::Event(letter), target: y });
                }
            }
        }
        let marked = (0..self.len()).filter(|&x| self.marked[x]).collect();
        Automaton::from_parts(states, self.events.clone(), transitions, [0].into(), marked)
            .expect("observer is well-formed")
    }
}

/// Graph with optional letters on edges (`None` is a silent move), used to
/// extract shortest-then-least words.
pub(crate) struct SearchGraph {
    pub succ: Vec<Vec<(Option<usize>, usize)>>,
    pub initial: Vec<usize>,
    pub goal: Vec<bool>,
}

impl SearchGraph {
    fn silent_closure(&self, seeds: impl IntoIterator<Item = usize>, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut seen = vec![false; self.succ.len()];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for v in seeds {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
        while let Some(v) = stack.pop() {
            if keep(v) {
                out.push(v);
            }
            for &(letter, w) in &self.succ[v] {
                if letter.is_none() && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out
    }

    /// Shortest word (silent moves free) from an initial node to a goal node,
    /// ties broken by the least letter sequence.
    pub fn shortest_lex_word(&self) -> Option<Vec<usize>> {
        let n = self.succ.len();
        let mut pred = vec![Vec::new(); n];
        for (v, edges) in self.succ.iter().enumerate() {
            for &(letter, w) in edges {
                pred[w].push((letter, v));
            }
        }
        let mut dist = vec![usize::MAX; n];
        let mut deque = VecDeque::new();
        for v in (0..n).filter(|&v| self.goal[v]) {
            dist[v] = 0;
            deque.push_back(v);
        }
        while let Some(v) = deque.pop_front() {
            for &(letter, u) in &pred[v] {
                let d = dist[v] + usize::from(letter.is_some());
                if d < dist[u] {
                    dist[u] = d;
                    if letter.is_some() {
                        deque.push_back(u);
                    } else {
                        deque.push_front(u);
                    }
                }
            }
        }
        let mut remaining = self.initial.iter().map(|&v| dist[v]).min().filter(|&d| d != usize::MAX)?;
        let mut frontier = self.silent_closure(self.initial.iter().copied(), |v| dist[v] == remaining);
        let mut word = Vec::with_capacity(remaining);
        while remaining > 0 {
            let mut by_letter: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &v in &frontier {
                for &(letter, w) in &self.succ[v] {
                    if let Some(letter) = letter {
                        if dist[w] == remaining - 1 {
                            by_letter.entry(letter).or_default().push(w);
                        }
                    }
                }
            }
            let (letter, next) = by_letter.into_iter().next().expect("distance labelling is consistent");
            word.push(letter);
            remaining -= 1;
            frontier = self.silent_closure(next, |v| dist[v] == remaining);
        }
        Some(word)
    }
}

/// Synchronous product of two (projected) automata over the observable
/// alphabet of `left`. Non-observable moves of either factor interleave; a
/// pair is marked iff both components are. Only reachable pairs are built.
pub fn product(left: &Automaton, right: &Automaton) -> Automaton {
    let letters: Vec<EventId> = left.observable_events();
    let events: Vec<Event> = letters.iter().map(|&e| left.event(e).clone()).collect();
    let right_letter: Vec<Option<EventId>> = letters
        .iter()
        .map(|&e| right.event_id(&left.event(e).name).filter(|&r| right.event(r).observable))
        .collect();
    let position: HashMap<EventId, usize> = letters.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut transitions = Vec::new();
    let mut intern = |pair: (StateId, StateId), pairs: &mut Vec<(StateId, StateId)>| {
        *index.entry(pair).or_insert_with(|| {
            pairs.push(pair);
            pairs.len() - 1
        })
    };
    let mut initial = StateSet::new();
    for &x in left.initial() {
        for &y in right.initial() {
            initial.insert(intern((x, y), &mut pairs));
        }
    }
    let mut next = 0;
    while next < pairs.len() {
        let (x, y) = pairs[next];
        for &(label, x2) in left.successors(x) {
            if !left.is_observable(label) {
                let to = intern((x2, y), &mut pairs);
                transitions.push(Transition { source: next, label: Label::Epsilon, target: to });
            }
        }
        for &(label, y2) in right.successors(y) {
            if !right.is_observable(label) {
                let to = intern((x, y2), &mut pairs);
                transitions.push(Transition { source: next, label: Label::Epsilon, target: to });
            }
        }
        for &(label, x2) in left.successors(x) {
            let Label::Event(e) = label else { continue };
            let Some(&letter) = position.get(&e) else { continue };
            let Some(re) = right_letter[letter] else { continue };
            for &(rlabel, y2) in right.successors(y) {
                if rlabel == Label::Event(re) {
                    let to = intern((x2, y2), &mut pairs);
                    transitions.push(Transition { source: next, label: Label::Event(letter), target: to });
                }
            }
        }
        next += 1;
    }
    let marked = pairs
        .iter()
        .enumerate()
        .filter(|(_, (x, y))| left.marked().contains(x) && right.marked().contains(y))
        .map(|(i, _)| i)
        .collect();
    let states = pairs.iter().map(|&(x, y)| format!("({},{})", left.state_name(x), right.state_name(y))).collect();
    Automaton::from_parts(states, events, transitions, initial, marked).expect("product is well-formed")
}

fn letter_names(automaton: &Automaton, letters: &[EventId], word: &[usize]) -> Vec<String> {
    word.iter().map(|&l| automaton.event(letters[l]).name.clone()).collect()
}

fn witness_for(automaton: &Automaton, from: &StateSet, to: &StateSet, observation: Vec<String>) -> Witness {
    let run = automaton
        .find_run(from, to, &observation)
        .expect("witness observation is produced by the automaton");
    Witness { run: automaton.event_names(&run), observation }
}

/// Decides `P(L_m(A1, M1)) ⊆ P(L_m(A2, M2))`.
///
/// On failure the witness is the shortest, then least, observation in the
/// difference together with a string of `a1` reaching `m1` that produces it.
pub fn inclusion_modulo_projection(
    a1: &Automaton,
    m1: &StateSet,
    a2: &Automaton,
    m2: &StateSet,
    cap: usize,
) -> Result<Verdict> {
    if m1.is_empty() || a1.initial().is_empty() {
        return Ok(Verdict::holds());
    }
    let letters = a1.observable_events();
    let mapped: Vec<Option<EventId>> = letters
        .iter()
        .map(|&e| a2.event_id(&a1.event(e).name).filter(|&r| a2.event(r).observable))
        .collect();
    let mut space = SubsetSpace::new(a2, mapped, cap);
    let start = space.start(a2.initial())?;
    let position: HashMap<EventId, usize> = letters.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    // nodes pair a state of a1 with an observer state of a2 (None = sink)
    let mut index: HashMap<(StateId, Option<usize>), usize> = HashMap::new();
    let mut nodes: Vec<(StateId, Option<usize>)> = Vec::new();
    let mut succ: Vec<Vec<(Option<usize>, usize)>> = Vec::new();
    let mut intern = |node, nodes: &mut Vec<_>, succ: &mut Vec<Vec<_>>| {
        *index.entry(node).or_insert_with(|| {
            nodes.push(node);
            succ.push(Vec::new());
            nodes.len() - 1
        })
    };
    let initial: Vec<usize> = a1.initial().iter().map(|&q| intern((q, start), &mut nodes, &mut succ)).collect();
    let mut next = 0;
    while next < nodes.len() {
        let (q, x) = nodes[next];
        for &(label, r) in a1.successors(q) {
            let edge = if !a1.is_observable(label) {
                (None, intern((r, x), &mut nodes, &mut succ))
            } else {
                let Label::Event(e) = label else { unreachable!() };
                let letter = position[&e];
                let y = match x {
                    Some(x) => space.step(x, letter)?,
                    None => None,
                };
                (Some(letter), intern((r, y), &mut nodes, &mut succ))
            };
            succ[next].push(edge);
        }
        next += 1;
    }
    let goal = nodes
        .iter()
        .map(|&(q, x)| m1.contains(&q) && x.is_none_or(|x| !m2.iter().any(|&s| space.sets[x].contains(s))))
        .collect();
    let graph = SearchGraph { succ, initial, goal };
    Ok(match graph.shortest_lex_word() {
        None => Verdict::holds(),
        Some(word) => Verdict::violated(witness_for(a1, a1.initial(), m1, letter_names(a1, &letters, &word))),
    })
}

/// Decides `P(L_m(A1, M1)) ∩ P(L_m(A2, M2)) ≠ ∅`; the witness is the shortest,
/// then least, common observation with a string of `a1` producing it.
pub fn intersection_nonempty_modulo_projection(
    a1: &Automaton,
    m1: &StateSet,
    a2: &Automaton,
    m2: &StateSet,
) -> Verdict {
    let left = a1.with_marked(m1.clone());
    let right = a2.with_marked(m2.clone());
    let prod = product(&left, &right);
    let n = prod.state_count();
    let mut succ = vec![Vec::new(); n];
    for t in prod.transitions() {
        let letter = match t.label {
            Label::Event(e) => Some(e),
            Label::Epsilon => None,
        };
        succ[t.source].push((letter, t.target));
    }
    let graph = SearchGraph {
        succ,
        initial: prod.initial().iter().copied().collect(),
        goal: (0..n).map(|v| prod.marked().contains(&v)).collect(),
    };
    match graph.shortest_lex_word() {
        None => Verdict { holds: false, witness: None },
        Some(word) => {
            let observation = word.iter().map(|&l| prod.event(l).name.clone()).collect();
            Verdict { holds: true, witness: Some(witness_for(a1, a1.initial(), m1, observation)) }
        }
    }
}
