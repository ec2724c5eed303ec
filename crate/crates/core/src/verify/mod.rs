//! Decision procedures for current-state, language-based (and weak),
//! initial-state, and initial-and-final-state opacity.

mod instance;
pub mod unary;

use std::fmt;
use std::str::FromStr;

pub use instance::{CsoInstance, IfsoInstance, IsoInstance, LboInstance, StatePair};
pub use unary::{verify_cso_unary_acyclic, verify_cso_unary_po, LengthSet};

use crate::automaton::{Automaton, StateSet, Transition};
use crate::batch;
use crate::error::{Error, Result};
use crate::observer::{
    inclusion_modulo_projection, intersection_nonempty_modulo_projection, observer, DEFAULT_OBSERVER_CAP,
};
use crate::verdict::{shortlex_key, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub observer_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { observer_cap: DEFAULT_OBSERVER_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Algorithm {
    #[default]
    Auto,
    Observer,
    Inclusion,
    UnaryAcyclic,
    UnaryPo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Auto, Algorithm::Observer, Algorithm::Inclusion, Algorithm::UnaryAcyclic, Algorithm::UnaryPo];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Observer => "observer",
            Algorithm::Inclusion => "inclusion",
            Algorithm::UnaryAcyclic => "unary-acyclic",
            Algorithm::UnaryPo => "unary-po",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL.into_iter().find(|a| a.as_str() == s).ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Current-state opacity by exploring the observer: every reachable estimate
/// meeting the secret set must meet the non-secret set.
pub fn verify_cso_observer(inst: &CsoInstance, config: &Config) -> Result<Verdict> {
    let automaton = inst.automaton();
    if inst.secret().is_empty() {
        return Ok(Verdict::holds());
    }
    let obs = observer(automaton, inst.secret(), config.observer_cap)?;
    // observer states are numbered in shortlex order of their access words
    let violating = (0..obs.len()).find(|&x| {
        let estimate = obs.estimate(x);
        !estimate.is_disjoint(inst.secret()) && estimate.is_disjoint(inst.nonsecret())
    });
    Ok(match violating {
        None => Verdict::holds(),
        Some(x) => {
            let observation = obs.access_word(x);
            let run = automaton
                .find_run(automaton.initial(), inst.secret(), &observation)
                .expect("violating estimate contains a secret state");
            Verdict::violated(Witness { run: automaton.event_names(&run), observation })
        }
    })
}

/// Current-state opacity as inclusion of the projected languages marked by the
/// secret and the non-secret states.
pub fn verify_cso_inclusion(inst: &CsoInstance, config: &Config) -> Result<Verdict> {
    let automaton = inst.automaton();
    let secret_side = automaton.with_marked(inst.secret().clone());
    let nonsecret_side = automaton.with_marked(inst.nonsecret().clone());
    inclusion_modulo_projection(&secret_side, inst.secret(), &nonsecret_side, inst.nonsecret(), config.observer_cap)
}

/// Picks the algorithm `Auto` resolves to for this automaton.
pub fn select_algorithm(automaton: &Automaton) -> Algorithm {
    let report = automaton.classify();
    match (report.observable_event_count, report.acyclic, report.partially_ordered) {
        (1, true, _) => Algorithm::UnaryAcyclic,
        (1, false, true) => Algorithm::UnaryPo,
        _ => Algorithm::Observer,
    }
}

pub fn verify_cso(inst: &CsoInstance, algorithm: Algorithm, config: &Config) -> Result<Verdict> {
    let algorithm = match algorithm {
        Algorithm::Auto => select_algorithm(inst.automaton()),
        other => other,
    };
    match algorithm {
        Algorithm::Auto => unreachable!("auto is resolved above"),
        Algorithm::Observer => verify_cso_observer(inst, config),
        Algorithm::Inclusion => verify_cso_inclusion(inst, config),
        Algorithm::UnaryAcyclic => verify_cso_unary_acyclic(inst),
        Algorithm::UnaryPo => verify_cso_unary_po(inst),
    }
}

/// Language-based opacity: `P(L_S) ⊆ P(L_NS)`.
pub fn verify_lbo(inst: &LboInstance, config: &Config) -> Result<Verdict> {
    let s = inst.secret_automaton();
    let ns = inst.nonsecret_automaton();
    inclusion_modulo_projection(s, s.marked(), ns, ns.marked(), config.observer_cap)
}

/// Language-based weak opacity: `P(L_S) ∩ P(L_NS) ≠ ∅`. A witness accompanies
/// a positive verdict.
pub fn verify_lbo_weak(inst: &LboInstance) -> Verdict {
    let s = inst.secret_automaton();
    let ns = inst.nonsecret_automaton();
    intersection_nonempty_modulo_projection(s, s.marked(), ns, ns.marked())
}

/// Keeps the least witness (shortlex by `automaton`'s event order) among failed verdicts.
fn least_violation(automaton: &Automaton, verdicts: Vec<Result<Verdict>>) -> Result<Verdict> {
    let rank = |name: &str| automaton.event_id(name).unwrap_or(usize::MAX);
    let mut best: Option<Witness> = None;
    for verdict in verdicts {
        if let Some(w) = verdict?.witness {
            let better = best
                .as_ref()
                .is_none_or(|b| shortlex_key(&w.observation, rank) < shortlex_key(&b.observation, rank));
            if better {
                best = Some(w);
            }
        }
    }
    Ok(best.map_or_else(Verdict::holds, Verdict::violated))
}

/// Initial-state opacity over generated languages: for each secret initial
/// state `i`, `P(L(G, i))` must lie within the observations generated from the
/// non-secret initial states.
pub fn verify_iso(inst: &IsoInstance, config: &Config) -> Result<Verdict> {
    let automaton = inst.automaton();
    let all: StateSet = (0..automaton.state_count()).collect();
    let nonsecret = automaton.with_initial(inst.nonsecret_initial().clone()).with_marked(all.clone());
    let secret: Vec<_> = inst.secret_initial().iter().copied().collect();
    let verdicts = batch::map(&secret, |&i| {
        let from_i = automaton.with_initial([i].into()).with_marked(all.clone());
        inclusion_modulo_projection(&from_i, &all, &nonsecret, &all, config.observer_cap)
    });
    least_violation(automaton, verdicts)
}

/// Disjoint union of one copy of `automaton` per pair, copy `k` starting in the
/// pair's initial state and marking its final state. Copy `k`'s states are
/// named `k/<name>`.
pub fn pair_union(automaton: &Automaton, pairs: &[StatePair]) -> Automaton {
    let n = automaton.state_count();
    let mut states = Vec::with_capacity(n * pairs.len());
    let mut transitions = Vec::with_capacity(automaton.transitions().len() * pairs.len());
    let mut initial = StateSet::new();
    let mut marked = StateSet::new();
    for (k, &(i, f)) in pairs.iter().enumerate() {
        let offset = k * n;
        states.extend(automaton.states().iter().map(|s| format!("{k}/{s}")));
        transitions.extend(automaton.transitions().iter().map(|t| Transition {
            source: t.source + offset,
            label: t.label,
            target: t.target + offset,
        }));
        initial.insert(i + offset);
        marked.insert(f + offset);
    }
    Automaton::from_parts(states, automaton.alphabet().to_vec(), transitions, initial, marked)
        .expect("copies are well-formed")
}

/// Initial-and-final-state opacity: the union of the secret pair languages
/// must be observationally included in the union of the non-secret ones.
pub fn verify_ifso(inst: &IfsoInstance, config: &Config) -> Result<Verdict> {
    let automaton = inst.automaton();
    let nonsecret_pairs: Vec<StatePair> = inst.nonsecret_pairs().iter().copied().collect();
    let nonsecret = pair_union(automaton, &nonsecret_pairs);
    let secret: Vec<StatePair> = inst.secret_pairs().iter().copied().collect();
    let verdicts = batch::map(&secret, |&(i, f)| {
        let from_i = automaton.with_initial([i].into());
        inclusion_modulo_projection(&from_i, &[f].into(), &nonsecret, nonsecret.marked(), config.observer_cap)
    });
    least_violation(automaton, verdicts)
}

/// Fails unless the automaton has at least one initial state.
pub fn require_initial(automaton: &Automaton) -> Result<()> {
    if automaton.initial().is_empty() {
        Err(Error::NoInitialState)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Event;

    fn cfg() -> Config {
        Config::default()
    }

    fn observable_dfa() -> Automaton {
        Automaton::from_names(
            &["p", "q", "r"],
            vec![Event::observable("x"), Event::observable("y")],
            &[("p", "x", "q"), ("q", "y", "r"), ("p", "y", "p")],
            &["p"],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn empty_secret_is_opaque() {
        let inst = CsoInstance::from_names(observable_dfa(), &[] as &[&str], &[]).unwrap();
        for algorithm in [Algorithm::Auto, Algorithm::Observer, Algorithm::Inclusion] {
            assert!(verify_cso(&inst, algorithm, &cfg()).unwrap().holds);
        }
    }

    #[test]
    fn observable_dfa_reveals_secret() {
        let inst = CsoInstance::from_names(observable_dfa(), &["r"], &[]).unwrap();
        for algorithm in [Algorithm::Observer, Algorithm::Inclusion] {
            let v = verify_cso(&inst, algorithm, &cfg()).unwrap();
            assert!(!v.holds);
            let w = v.witness.unwrap();
            assert_eq!(w.observation, vec!["x", "y"]);
            assert_eq!(w.run, vec!["x", "y"]);
        }
    }

    #[test]
    fn everything_secret_and_nonsecret_is_opaque() {
        let a = observable_dfa();
        let inst = CsoInstance::from_names(a, &["p", "q", "r"], &["p", "q", "r"]).unwrap();
        assert!(verify_cso_inclusion(&inst, &cfg()).unwrap().holds);
        assert!(verify_cso_observer(&inst, &cfg()).unwrap().holds);
    }

    #[test]
    fn forced_unary_on_binary_alphabet_fails() {
        let inst = CsoInstance::from_names(observable_dfa(), &["r"], &[]).unwrap();
        assert!(matches!(verify_cso(&inst, Algorithm::UnaryPo, &cfg()), Err(Error::PreconditionViolated(_))));
        assert!(matches!(verify_cso(&inst, Algorithm::UnaryAcyclic, &cfg()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn auto_routes_by_structure() {
        let unary = Automaton::from_names(&["s", "t"], vec![Event::observable("a")], &[("s", "a", "t")], &["s"], &[])
            .unwrap();
        assert_eq!(select_algorithm(&unary), Algorithm::UnaryAcyclic);
        let looped = Automaton::from_names(
            &["s", "t"],
            vec![Event::observable("a")],
            &[("s", "a", "t"), ("t", "a", "t")],
            &["s"],
            &[],
        )
        .unwrap();
        assert_eq!(select_algorithm(&looped), Algorithm::UnaryPo);
        assert_eq!(select_algorithm(&observable_dfa()), Algorithm::Observer);
    }

    #[test]
    fn lbo_basic_cases() {
        let a = observable_dfa().with_marked([2].into());
        let empty = a.with_marked(StateSet::new());
        assert!(verify_lbo(&LboInstance::new(empty.clone(), a.clone()).unwrap(), &cfg()).unwrap().holds);
        assert!(verify_lbo(&LboInstance::new(a.clone(), a.clone()).unwrap(), &cfg()).unwrap().holds);
        assert!(!verify_lbo_weak(&LboInstance::new(empty, a.clone()).unwrap()).holds);
        let weak = verify_lbo_weak(&LboInstance::new(a.clone(), a).unwrap());
        assert!(weak.holds);
        assert_eq!(weak.observation().unwrap(), &["x", "y"]);
    }

    #[test]
    fn lbo_requires_shared_alphabet() {
        let a = observable_dfa();
        let b = Automaton::from_names(&["p"], vec![Event::observable("x")], &[], &["p"], &[]).unwrap();
        assert!(matches!(LboInstance::new(a, b), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn iso_cases() {
        // 1 loops on unobservable u, 2 loops on observable o
        let a = Automaton::from_names(
            &["1", "2"],
            vec![Event::unobservable("u"), Event::observable("o")],
            &[("1", "u", "1"), ("2", "o", "2")],
            &["1", "2"],
            &[],
        )
        .unwrap();
        let inst = IsoInstance::new(a.clone(), [0].into(), [1].into()).unwrap();
        assert!(verify_iso(&inst, &cfg()).unwrap().holds);
        let reversed = IsoInstance::new(a.clone(), [1].into(), [0].into()).unwrap();
        let v = verify_iso(&reversed, &cfg()).unwrap();
        assert_eq!(v.observation().unwrap(), &["o"]);
        let vacuous = IsoInstance::new(a.clone(), StateSet::new(), [0].into()).unwrap();
        assert!(verify_iso(&vacuous, &cfg()).unwrap().holds);
        assert!(IsoInstance::new(a.with_initial([0].into()), [1].into(), [0].into()).is_err());
    }

    #[test]
    fn ifso_cases() {
        let a = observable_dfa().with_initial([0, 1].into());
        let pairs = [(0, 2)].into();
        let same = IfsoInstance::new(a.clone(), [(0, 2)].into(), [(0, 2)].into()).unwrap();
        assert!(verify_ifso(&same, &cfg()).unwrap().holds);
        let none = IfsoInstance::new(a.clone(), Default::default(), pairs).unwrap();
        assert!(verify_ifso(&none, &cfg()).unwrap().holds);
        // (0,2) produces y*xy, (1,2) produces y only
        let inst = IfsoInstance::new(a.clone(), [(0, 2)].into(), [(1, 2)].into()).unwrap();
        let v = verify_ifso(&inst, &cfg()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.observation().unwrap(), &["x", "y"]);
        assert!(IfsoInstance::new(a, [(2, 2)].into(), Default::default()).is_err());
    }
}
