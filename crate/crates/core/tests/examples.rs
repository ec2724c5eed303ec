//! Small hand-checked instances.

use std::collections::BTreeSet;

use opacity::automaton::{Automaton, Event, Label, StateSet};
use opacity::io;
use opacity::observer::{
    inclusion_modulo_projection, intersection_nonempty_modulo_projection, observer, product, DEFAULT_OBSERVER_CAP,
};
use opacity::oracles::{self, SatResult};
use opacity::reductions::{
    cso_to_lbo, gen_cnf_cso, gen_dag_cso_unary, gen_dag_weak_lbo, lbo_to_iso, po_determinize, CnfFormula, Dag,
};
use opacity::verify::{
    verify_cso, verify_cso_inclusion, verify_cso_observer, verify_ifso, verify_iso, verify_lbo, verify_lbo_weak,
    LengthSet,
};
use opacity::{Algorithm, Config, CsoInstance, Error, IfsoInstance, IsoInstance, LboInstance, Witness};

fn cfg() -> Config {
    Config::default()
}

fn strs(w: &[&str]) -> Vec<String> {
    w.iter().map(|s| s.to_string()).collect()
}

fn two_clauses() -> CnfFormula {
    CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, 2, 3]]).unwrap()
}

fn bits(ws: &[&str]) -> BTreeSet<Vec<String>> {
    ws.iter().map(|w| w.chars().map(|c| c.to_string()).collect()).collect()
}

#[test]
fn unobservable_reach_cases() {
    let obs = Automaton::from_names(&["q", "r"], vec![Event::observable("x")], &[("q", "x", "r")], &["q"], &[]).unwrap();
    assert_eq!(obs.unobservable_reach(&[0].into()), [0].into());
    let chain = Automaton::from_names(
        &["q1", "q2", "q3"],
        vec![Event::unobservable("a")],
        &[("q1", "a", "q2"), ("q2", "a", "q3")],
        &["q1"],
        &[],
    )
    .unwrap();
    assert_eq!(chain.unobservable_reach(&[0].into()), [0, 1, 2].into());
}

#[test]
fn projection_cases() {
    let a = Automaton::from_names(
        &["s", "t", "u", "t'"],
        vec![Event::observable("a"), Event::unobservable("b")],
        &[("s", "a", "t"), ("t", "b", "t'"), ("t'", "a", "u")],
        &["s"],
        &["u"],
    )
    .unwrap();
    let p = a.project();
    let t = p.state_id("t").unwrap();
    assert!(p.successors(t).contains(&(Label::Epsilon, p.state_id("t'").unwrap())));
    let l = oracles::enum_languages_projected(&a, a.marked()).unwrap();
    assert_eq!(l, [strs(&["a", "a"])].into());
    assert_eq!(a.project_names(&["a", "b", "a"]), strs(&["a", "a"]));

    let full = Automaton::from_names(&["p", "q"], vec![Event::observable("x")], &[("p", "x", "q")], &["p"], &[]).unwrap();
    assert_eq!(full.project(), full);
}

#[test]
fn observer_cases() {
    let nfa = Automaton::from_names(
        &["p", "q", "r"],
        vec![Event::observable("x")],
        &[("p", "x", "q"), ("p", "x", "r")],
        &["p"],
        &[],
    )
    .unwrap();
    let o = observer(&nfa, &StateSet::new(), DEFAULT_OBSERVER_CAP).unwrap();
    assert_eq!(o.estimate(o.run(&["x"]).unwrap()), [1, 2].into());

    // deterministic and fully observable: one singleton estimate per reachable state
    let dfa = Automaton::from_names(
        &["a", "b", "c", "dead"],
        vec![Event::observable("0"), Event::observable("1")],
        &[("a", "0", "b"), ("b", "1", "c"), ("c", "0", "a"), ("dead", "0", "a")],
        &["a"],
        &[],
    )
    .unwrap();
    let o = observer(&dfa, &StateSet::new(), DEFAULT_OBSERVER_CAP).unwrap();
    assert_eq!(o.len(), 3);
    let singletons: BTreeSet<StateSet> = (0..o.len()).map(|s| o.estimate(s)).collect();
    assert_eq!(singletons, [[0].into(), [1].into(), [2].into()].into());
}

#[test]
fn multi_initial_and_chained_observers_agree() {
    let base = |extra: bool| {
        let mut events = vec![Event::observable("0")];
        let mut ts = vec![("q1", "0", "q2"), ("q3", "0", "q3")];
        if extra {
            events.push(Event::unobservable("a"));
            ts.extend([("q1", "a", "q2"), ("q2", "a", "q3")]);
        }
        let initial: &[&str] = if extra { &["q1"] } else { &["q1", "q2", "q3"] };
        Automaton::from_names(&["q1", "q2", "q3"], events, &ts, initial, &[]).unwrap()
    };
    let g = observer(&base(false), &StateSet::new(), DEFAULT_OBSERVER_CAP).unwrap();
    let chained = base(true);
    let h = observer(&chained, &StateSet::new(), DEFAULT_OBSERVER_CAP).unwrap();
    assert_eq!(g.estimate(0), h.estimate(0));
    assert_eq!(g.len(), h.len());
    assert!(chained.unobservable_reach(&[0].into()).is_superset(&[0, 1, 2].into()));
}

#[test]
fn product_cases() {
    let a = Automaton::from_names(
        &["p", "q"],
        vec![Event::observable("x"), Event::observable("y")],
        &[("p", "x", "q"), ("q", "y", "q")],
        &["p"],
        &["q"],
    )
    .unwrap();
    let empty = a.with_marked(StateSet::new());
    let p = product(&a, &empty);
    assert!(oracles::enum_languages_projected(&p.trim(), p.marked()).unwrap().is_empty());
    assert!(p.trim().state_count() == 0);
    let same = product(&a, &a);
    let o = observer(&same, same.marked(), DEFAULT_OBSERVER_CAP).unwrap();
    let oa = observer(&a, a.marked(), DEFAULT_OBSERVER_CAP).unwrap();
    for w in [vec![], vec!["x"], vec!["x", "y"], vec!["y"]] {
        let marked = |obs: &opacity::observer::Observer| obs.run(&w).is_some_and(|s| obs.is_marked(s));
        assert_eq!(marked(&o), marked(&oa), "{w:?}");
    }
}

#[test]
fn product_detects_reachability_in_the_weak_gadget() {
    for (edges, reachable) in [(vec![(0, 1), (1, 2)], true), (vec![(1, 2)], false)] {
        let inst = gen_dag_weak_lbo(&Dag::new(3, edges, 0, 2).unwrap());
        let p = product(&inst.secret_automaton().project(), &inst.nonsecret_automaton().project());
        assert_eq!(!p.trim().marked().is_empty(), reachable);
    }
}

#[test]
fn inclusion_cases() {
    let inst = gen_cnf_cso(&two_clauses());
    let a = inst.automaton();
    let v = inclusion_modulo_projection(a, inst.secret(), a, inst.nonsecret(), DEFAULT_OBSERVER_CAP).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["0", "0", "1"]).as_slice());
    assert!(inclusion_modulo_projection(a, inst.secret(), a, inst.secret(), DEFAULT_OBSERVER_CAP).unwrap().holds);
    assert!(inclusion_modulo_projection(a, &StateSet::new(), a, inst.nonsecret(), DEFAULT_OBSERVER_CAP).unwrap().holds);
}

#[test]
fn intersection_cases() {
    let a = Automaton::from_names(
        &["p", "q", "r"],
        vec![Event::observable("x"), Event::observable("y")],
        &[("p", "y", "q"), ("q", "x", "r"), ("p", "x", "r")],
        &["p"],
        &["r"],
    )
    .unwrap();
    assert!(!intersection_nonempty_modulo_projection(&a, &StateSet::new(), &a, a.marked()).holds);
    let v = intersection_nonempty_modulo_projection(&a, a.marked(), &a, a.marked());
    assert_eq!(v.observation().unwrap(), strs(&["x"]).as_slice());
    let path = Dag::new(4, [(0, 1), (1, 2), (2, 3)], 0, 3).unwrap();
    assert_eq!(verify_lbo_weak(&gen_dag_weak_lbo(&path)).observation().unwrap(), strs(&["a", "a", "a"]).as_slice());
}

#[test]
fn classification_cases() {
    let loop_ = Automaton::from_names(&["q"], vec![Event::observable("a")], &[("q", "a", "q")], &["q"], &[]).unwrap();
    let r = loop_.classify();
    assert!(r.deterministic && !r.acyclic && r.partially_ordered);
    let cycle = Automaton::from_names(
        &["p", "q"],
        vec![Event::observable("a")],
        &[("p", "a", "q"), ("q", "a", "p")],
        &["p"],
        &[],
    )
    .unwrap();
    assert!(!cycle.classify().partially_ordered);
    let r = gen_cnf_cso(&two_clauses()).automaton().classify();
    assert!(r.acyclic && !r.deterministic);
    assert_eq!((r.observable_event_count, r.unobservable_event_count), (2, 0));
}

#[test]
fn trim_cases() {
    let a = Automaton::from_names(
        &["p", "q", "island"],
        vec![Event::observable("a")],
        &[("p", "a", "q")],
        &["p"],
        &["q", "island"],
    )
    .unwrap();
    let t = a.trim();
    assert_eq!(t.states(), &strs(&["p", "q"]));
    assert_eq!(io::write_automaton(&t.trim()), io::write_automaton(&t));
    assert_eq!(a.with_marked(StateSet::new()).trim().state_count(), 0);
}

#[test]
fn current_state_opacity_cases() {
    let inst = gen_cnf_cso(&two_clauses());
    assert!(verify_cso(&CsoInstance::new(inst.automaton().clone(), StateSet::new(), StateSet::new()).unwrap(), Algorithm::Auto, &cfg()).unwrap().holds);
    for v in [verify_cso_observer(&inst, &cfg()).unwrap(), verify_cso_inclusion(&inst, &cfg()).unwrap()] {
        assert_eq!(v.observation().unwrap(), strs(&["0", "0", "1"]).as_slice());
    }
    // the assignment (0,1,0) is also a violating observation
    let other = Witness { observation: strs(&["0", "1", "0"]), run: strs(&["0", "1", "0"]) };
    assert!(oracles::replay_cso(&inst, &other));

    let all: StateSet = (0..inst.automaton().state_count()).collect();
    let everything = CsoInstance::new(inst.automaton().clone(), all.clone(), all).unwrap();
    assert!(verify_cso_observer(&everything, &cfg()).unwrap().holds);

    let dfa = Automaton::from_names(
        &["a", "b", "c"],
        vec![Event::observable("0"), Event::observable("1")],
        &[("a", "0", "b"), ("a", "1", "a"), ("b", "1", "c")],
        &["a"],
        &[],
    )
    .unwrap();
    let v = verify_cso(&CsoInstance::from_names(dfa, &["c"], &[]).unwrap(), Algorithm::Auto, &cfg()).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["0", "1"]).as_slice());
}

#[test]
fn unary_cases() {
    let dag = Dag::new(3, [(0, 1), (1, 2)], 0, 2).unwrap();
    let v = verify_cso(&gen_dag_cso_unary(&dag), Algorithm::UnaryAcyclic, &cfg()).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["a", "a"]).as_slice());
    let unreachable = Dag::new(3, [(0, 1)], 0, 2).unwrap();
    assert!(verify_cso(&gen_dag_cso_unary(&unreachable), Algorithm::UnaryAcyclic, &cfg()).unwrap().holds);

    let a = Automaton::from_names(
        &["s", "t", "r", "v"],
        vec![Event::observable("a")],
        &[("s", "a", "t"), ("s", "a", "r"), ("r", "a", "r"), ("r", "a", "v")],
        &["s"],
        &[],
    )
    .unwrap();
    let r = a.classify();
    assert!(!r.acyclic && r.partially_ordered);
    let inst = CsoInstance::from_names(a.clone(), &["t"], &["v"]).unwrap();
    let v = verify_cso(&inst, Algorithm::UnaryPo, &cfg()).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["a"]).as_slice());
    assert_eq!(verify_cso(&inst, Algorithm::Auto, &cfg()).unwrap(), v);
    let both = CsoInstance::from_names(a, &["t"], &["t"]).unwrap();
    assert!(verify_cso(&both, Algorithm::UnaryPo, &cfg()).unwrap().holds);

    let secret = LengthSet::new([1].into(), None);
    let nonsecret = LengthSet::new(BTreeSet::new(), Some(2));
    assert!(!secret.is_subset(&nonsecret));
    assert_eq!(secret.first_uncovered(&nonsecret), Some(1));

    let binary = gen_cnf_cso(&two_clauses());
    assert!(matches!(verify_cso(&binary, Algorithm::UnaryPo, &cfg()), Err(Error::PreconditionViolated(_))));
}

#[test]
fn language_based_cases() {
    let inst = gen_cnf_cso(&two_clauses());
    let a = inst.automaton();
    let lbo = LboInstance::new(a.with_marked(inst.secret().clone()), a.with_marked(inst.nonsecret().clone())).unwrap();
    assert!(!verify_lbo(&lbo, &cfg()).unwrap().holds);
    let same = LboInstance::new(lbo.secret_automaton().clone(), lbo.secret_automaton().clone()).unwrap();
    assert!(verify_lbo(&same, &cfg()).unwrap().holds);
    assert!(verify_lbo_weak(&same).holds);
    let empty = LboInstance::new(a.with_marked(StateSet::new()), lbo.nonsecret_automaton().clone()).unwrap();
    assert!(verify_lbo(&empty, &cfg()).unwrap().holds);
    assert!(!verify_lbo_weak(&empty).holds);
}

#[test]
fn initial_state_cases() {
    let a = Automaton::from_names(
        &["1", "2"],
        vec![Event::observable("o"), Event::unobservable("u")],
        &[("1", "u", "1"), ("2", "o", "2")],
        &["1", "2"],
        &[],
    )
    .unwrap();
    let inst = IsoInstance::new(a.clone(), [0].into(), [1].into()).unwrap();
    assert!(verify_iso(&inst, &cfg()).unwrap().holds);
    let swapped = IsoInstance::new(a.clone(), [1].into(), [0].into()).unwrap();
    let v = verify_iso(&swapped, &cfg()).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["o"]).as_slice());
    assert!(verify_iso(&IsoInstance::new(a, StateSet::new(), [1].into()).unwrap(), &cfg()).unwrap().holds);
}

#[test]
fn initial_and_final_state_cases() {
    let a = Automaton::from_names(
        &["i", "j", "f", "g"],
        vec![Event::observable("x"), Event::observable("y")],
        &[("i", "x", "f"), ("j", "y", "g"), ("j", "x", "g")],
        &["i", "j"],
        &[],
    )
    .unwrap();
    let pairs = |ps: &[(usize, usize)]| ps.iter().copied().collect::<BTreeSet<_>>();
    let empty = IfsoInstance::new(a.clone(), pairs(&[]), pairs(&[(1, 3)])).unwrap();
    assert!(verify_ifso(&empty, &cfg()).unwrap().holds);
    let mirror = IfsoInstance::new(a.clone(), pairs(&[(0, 2)]), pairs(&[(0, 2)])).unwrap();
    assert!(verify_ifso(&mirror, &cfg()).unwrap().holds);
    let covered = IfsoInstance::new(a.clone(), pairs(&[(0, 2)]), pairs(&[(1, 3)])).unwrap();
    assert!(verify_ifso(&covered, &cfg()).unwrap().holds);
    assert!(oracles::enum_ifso_acyclic(&covered).unwrap());
    let exposed = IfsoInstance::new(a, pairs(&[(1, 3)]), pairs(&[(0, 2)])).unwrap();
    let v = verify_ifso(&exposed, &cfg()).unwrap();
    assert!(!v.holds && !oracles::enum_ifso_acyclic(&exposed).unwrap());
    assert_eq!(v.observation().unwrap(), strs(&["y"]).as_slice());
    assert!(oracles::replay_ifso(&exposed, v.witness.as_ref().unwrap()));
}

#[test]
fn cnf_gadget_cases() {
    let inst = gen_cnf_cso(&two_clauses());
    let a = inst.automaton();
    assert_eq!(a.state_count(), 12);
    assert_eq!(oracles::enum_languages_projected(a, inst.nonsecret()).unwrap(), bits(&["000", "100"]));
    let cube = bits(&["000", "001", "010", "011", "100", "101", "110", "111"]);
    assert_eq!(oracles::enum_languages_projected(a, inst.secret()).unwrap(), cube);
    assert!(oracles::enum_languages_projected(a, &StateSet::new()).unwrap().is_empty());
    let v = oracles::enum_cso_acyclic(&inst).unwrap();
    assert_eq!(v.observation().unwrap(), strs(&["0", "0", "1"]).as_slice());

    let SatResult::Sat(first) = oracles::brute_sat(&two_clauses()).unwrap() else { panic!() };
    assert_eq!(first, vec![false, false, true]);

    let none = gen_cnf_cso(&CnfFormula::new(3, vec![]).unwrap());
    assert!(none.nonsecret().is_empty());
    assert!(!verify_cso(&none, Algorithm::Auto, &cfg()).unwrap().holds);
}

#[test]
fn dag_gadget_cases() {
    let edge = Dag::new(2, [(0, 1)], 0, 1).unwrap();
    assert_eq!(verify_lbo_weak(&gen_dag_weak_lbo(&edge)).observation().unwrap(), strs(&["a"]).as_slice());
    let isolated = Dag::new(2, [], 0, 1).unwrap();
    assert!(!verify_lbo_weak(&gen_dag_weak_lbo(&isolated)).holds);
    assert!(verify_cso(&gen_dag_cso_unary(&isolated), Algorithm::Auto, &cfg()).unwrap().holds);
    assert!(!oracles::dag_reachable(&isolated));
    let same = Dag::new(2, [(0, 1)], 1, 1).unwrap();
    assert!(oracles::dag_reachable(&same));
    assert!(verify_lbo_weak(&gen_dag_weak_lbo(&same)).observation().unwrap().is_empty());
    assert!(verify_cso(&gen_dag_cso_unary(&same), Algorithm::Auto, &cfg()).unwrap().observation().unwrap().is_empty());
}

#[test]
fn encoding_chain_is_shared() {
    // p has three x-targets and one y-pair; codes 1 and 2 go to p, code 3 to s
    let a = Automaton::from_names(
        &["s", "p", "q1", "q2", "q3"],
        vec![Event::observable("x"), Event::observable("y")],
        &[("s", "x", "q1"), ("s", "x", "q2"), ("p", "y", "q1"), ("p", "y", "q2"), ("p", "y", "q3")],
        &["s"],
        &[],
    )
    .unwrap();
    let out = po_determinize(&a, "x").unwrap();
    let d = &out.automaton;
    let codes: Vec<(String, usize)> = out.encoding.iter().map(|e| (e.source.clone(), e.code)).collect();
    assert_eq!(codes, vec![("s".to_string(), 1), ("p".to_string(), 2), ("p".to_string(), 3)]);
    // p -a-> filler -a-> exit for code 2 -a-> exit for code 3
    let a_id = Label::Event(d.event_id("a").unwrap());
    let mut state = d.state_id("p").unwrap();
    let mut path = Vec::new();
    while let Some(&(_, next)) = d.successors(state).iter().find(|(l, _)| *l == a_id) {
        path.push(d.state_name(next).to_string());
        state = next;
    }
    assert_eq!(path.len(), 3);
    assert!(path[0].starts_with("p~"));
    let exits: Vec<bool> = path.iter().map(|n| {
        let q = d.state_id(n).unwrap();
        d.successors(q).iter().any(|(l, _)| *l != a_id)
    }).collect();
    assert_eq!(exits, vec![false, true, true]);
    assert!(d.classify().deterministic);
}

#[test]
fn notion_transform_cases() {
    let inst = gen_cnf_cso(&two_clauses());
    assert!(!verify_lbo(&cso_to_lbo(&inst), &cfg()).unwrap().holds);
    let hidden = CsoInstance::new(inst.automaton().clone(), StateSet::new(), inst.nonsecret().clone()).unwrap();
    assert!(verify_lbo(&cso_to_lbo(&hidden), &cfg()).unwrap().holds);

    let path = Automaton::from_names(
        &["0", "1", "2"],
        vec![Event::observable("a")],
        &[("0", "a", "1"), ("1", "a", "2")],
        &["0"],
        &["2"],
    )
    .unwrap();
    let out = lbo_to_iso(&LboInstance::new(path.clone(), path.with_marked(StateSet::new())).unwrap());
    let d = out.instance.automaton();
    let at = Label::Event(d.event_id(&out.marker_event).unwrap());
    let into_secret: Vec<_> = d.transitions().iter().filter(|t| t.label == at).collect();
    assert_eq!(into_secret.len(), 1);
    assert_eq!(d.state_name(into_secret[0].target), out.secret_sink);

    let empty = LboInstance::new(path.with_marked(StateSet::new()), path.clone()).unwrap();
    assert!(verify_iso(&lbo_to_iso(&empty).instance, &cfg()).unwrap().holds);
}
