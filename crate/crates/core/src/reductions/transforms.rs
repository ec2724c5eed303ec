use crate::automaton::{fresh_name, Automaton, Event, Label, StateSet, Transition};
use crate::verify::{CsoInstance, IsoInstance, LboInstance};

/// Secret language marked by the secret states, non-secret language by the
/// non-secret states, both over the same transition structure.
pub fn cso_to_lbo(inst: &CsoInstance) -> LboInstance {
    let a = inst.automaton();
    LboInstance::new(a.with_marked(inst.secret().clone()), a.with_marked(inst.nonsecret().clone()))
        .expect("same automaton, same alphabet")
}

#[derive(Clone, Debug)]
pub struct IsoReduction {
    pub instance: IsoInstance,
    /// Fresh observable event appended after every marked state.
    pub marker_event: String,
    pub secret_sink: String,
    pub nonsecret_sink: String,
    /// True when trimming removed states from either input.
    pub trimmed: bool,
}

/// Reduces language-based opacity to initial-state opacity.
///
/// Both automata are trimmed, then placed side by side (states prefixed with
/// `S/` and `N/`). Every marked state gets a transition on a fresh observable
/// marker event into a fresh sink, one sink per side, so the generated
/// language of each side is the prefix closure of its marked language plus the
/// marked language followed by the marker.
pub fn lbo_to_iso(inst: &LboInstance) -> IsoReduction {
    let secret = inst.secret_automaton().trim();
    let nonsecret = inst.nonsecret_automaton().trim();
    let trimmed = secret.state_count() != inst.secret_automaton().state_count()
        || nonsecret.state_count() != inst.nonsecret_automaton().state_count();

    let mut alphabet = inst.secret_automaton().alphabet().to_vec();
    let marker_event = fresh_name("@", |n| alphabet.iter().any(|e| e.name == n));
    alphabet.push(Event::observable(marker_event.clone()));
    let marker = Label::Event(alphabet.len() - 1);

    let mut states: Vec<String> = secret.states().iter().map(|s| format!("S/{s}")).collect();
    states.extend(nonsecret.states().iter().map(|s| format!("N/{s}")));
    let secret_sink = fresh_name("x_s", |n| states.iter().any(|s| s == n));
    let nonsecret_sink = fresh_name("x_ns", |n| n == secret_sink || states.iter().any(|s| s == n));
    let offset = secret.state_count();
    let xs = states.len();
    let xns = xs + 1;
    states.push(secret_sink.clone());
    states.push(nonsecret_sink.clone());

    let relabel = |source: &Automaton, label: Label| match label {
        Label::Event(e) => Label::Event(
            alphabet.iter().position(|a| a.name == source.event(e).name).expect("shared alphabet"),
        ),
        Label::Epsilon => Label::Epsilon,
    };
    let mut transitions = Vec::new();
    for t in secret.transitions() {
        transitions.push(Transition { label: relabel(&secret, t.label), ..*t });
    }
    for t in nonsecret.transitions() {
        transitions.push(Transition {
            source: t.source + offset,
            label: relabel(&nonsecret, t.label),
            target: t.target + offset,
        });
    }
    for &r in secret.marked() {
        transitions.push(Transition { source: r, label: marker, target: xs });
    }
    for &r in nonsecret.marked() {
        transitions.push(Transition { source: r + offset, label: marker, target: xns });
    }

    let secret_initial: StateSet = secret.initial().clone();
    let nonsecret_initial: StateSet = nonsecret.initial().iter().map(|&q| q + offset).collect();
    let initial = secret_initial.union(&nonsecret_initial).copied().collect();
    let all: StateSet = (0..states.len()).collect();
    let automaton = Automaton::from_parts(states, alphabet, transitions, initial, all).expect("well-formed");
    let instance = IsoInstance::new(automaton, secret_initial, nonsecret_initial).expect("initial subsets");
    IsoReduction { instance, marker_event, secret_sink, nonsecret_sink, trimmed }
}
