//! Brute-force reference implementations for testing.
//!
//! Nothing here uses the traversal machinery of [`crate::automaton`] or
//! [`crate::observer`]: automata are read through their raw transition lists
//! only, and every search is re-derived from the definitions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::automaton::{Automaton, StateId, StateSet, EPSILON};
use crate::error::{Error, Result};
use crate::reductions::{CnfFormula, Dag};
use crate::verdict::{Verdict, Witness};
use crate::verify::{CsoInstance, IfsoInstance, IsoInstance, LboInstance};

pub const MAX_SAT_VARIABLES: usize = 24;

/// Upper bound on the number of runs an enumeration oracle will visit.
pub const MAX_ENUMERATED_RUNS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Vec<bool>),
    Unsat,
}

/// Tries all assignments in lexicographic order (`x1` most significant,
/// false before true) and returns the first satisfying one.
pub fn brute_sat(formula: &CnfFormula) -> Result<SatResult> {
    let n = formula.variable_count();
    if n > MAX_SAT_VARIABLES {
        return Err(Error::TooLarge(format!("{n} variables exceed the limit of {MAX_SAT_VARIABLES}")));
    }
    for bits in 0u64..(1u64 << n) {
        let assignment: Vec<bool> = (0..n).map(|j| bits >> (n - 1 - j) & 1 == 1).collect();
        let satisfied = formula.clauses().iter().all(|clause| {
            clause.iter().any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0))
        });
        if satisfied {
            return Ok(SatResult::Sat(assignment));
        }
    }
    Ok(SatResult::Unsat)
}

pub fn dag_reachable(dag: &Dag) -> bool {
    let mut seen = vec![false; dag.vertex_count()];
    let mut stack = vec![dag.source()];
    seen[dag.source()] = true;
    while let Some(u) = stack.pop() {
        if u == dag.target() {
            return true;
        }
        for &(_, v) in dag.edges().range((u, 0)..(u + 1, 0)) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

type RunVisitor<'a> = dyn FnMut(&[String], &[String], StateId) + 'a;

/// Raw view of an automaton: outgoing (event name, observable, target) lists.
struct Raw {
    out: Vec<Vec<(String, bool, StateId)>>,
}

impl Raw {
    fn new(a: &Automaton) -> Self {
        let mut out = vec![Vec::new(); a.state_count()];
        for t in a.transitions() {
            let name = a.label_name(t.label).to_string();
            let observable = name != EPSILON && a.alphabet().iter().any(|e| e.name == name && e.observable);
            out[t.source].push((name, observable, t.target));
        }
        Raw { out }
    }

    fn has_cycle(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(raw: &Raw, q: StateId, color: &mut [u8]) -> bool {
            color[q] = 1;
            for (_, _, r) in &raw.out[q] {
                if color[*r] == 1 || (color[*r] == 0 && visit(raw, *r, color)) {
                    return true;
                }
            }
            color[q] = 2;
            false
        }
        let mut color = vec![0u8; self.out.len()];
        (0..self.out.len()).any(|q| color[q] == 0 && visit(self, q, &mut color))
    }

    /// Calls `f(run, observation, end)` for every path from `sources`,
    /// including the empty ones.
    fn for_each_run(
        &self,
        sources: &StateSet,
        mut f: impl FnMut(&[String], &[String], StateId),
    ) -> Result<()> {
        let mut budget = MAX_ENUMERATED_RUNS;
        let mut run = Vec::new();
        let mut obs = Vec::new();
        fn walk(
            raw: &Raw,
            q: StateId,
            run: &mut Vec<String>,
            obs: &mut Vec<String>,
            budget: &mut usize,
            f: &mut RunVisitor,
        ) -> Result<()> {
            if *budget == 0 {
                return Err(Error::TooLarge(format!("more than {MAX_ENUMERATED_RUNS} runs")));
            }
            *budget -= 1;
            f(run, obs, q);
            for (name, observable, r) in &raw.out[q] {
                run.push(name.clone());
                if *observable {
                    obs.push(name.clone());
                }
                walk(raw, *r, run, obs, budget, f)?;
                if *observable {
                    obs.pop();
                }
                run.pop();
            }
            Ok(())
        }
        for &q in sources {
            walk(self, q, &mut run, &mut obs, &mut budget, &mut f)?;
        }
        Ok(())
    }

    fn step_exact(&self, from: &BTreeSet<StateId>, event: &str) -> BTreeSet<StateId> {
        from.iter()
            .flat_map(|&q| self.out[q].iter().filter(|(n, _, _)| n == event).map(|&(_, _, r)| r))
            .collect()
    }

    fn silent_closure(&self, from: BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut seen = from;
        let mut queue: VecDeque<StateId> = seen.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for &(_, observable, r) in &self.out[q] {
                if !observable && seen.insert(r) {
                    queue.push_back(r);
                }
            }
        }
        seen
    }
}

fn require_acyclic(raw: &Raw) -> Result<()> {
    if raw.has_cycle() {
        Err(Error::PreconditionViolated("enumeration oracle needs an acyclic automaton".into()))
    } else {
        Ok(())
    }
}

fn shortlex(a: &Automaton, obs: &[String]) -> (usize, Vec<usize>) {
    (obs.len(), obs.iter().map(|n| a.alphabet().iter().position(|e| &e.name == n).unwrap_or(usize::MAX)).collect())
}

/// Current-state opacity checked literally on the finite set of runs of an
/// acyclic automaton. The witness is the least violating observation.
pub fn enum_cso_acyclic(inst: &CsoInstance) -> Result<Verdict> {
    let a = inst.automaton();
    let raw = Raw::new(a);
    require_acyclic(&raw)?;
    // observation -> (some secret run, some run ends in a non-secret state)
    let mut groups: HashMap<Vec<String>, (Option<Vec<String>>, bool)> = HashMap::new();
    raw.for_each_run(a.initial(), |run, obs, end| {
        let entry = groups.entry(obs.to_vec()).or_insert((None, false));
        if inst.secret().contains(&end) && entry.0.is_none() {
            entry.0 = Some(run.to_vec());
        }
        if inst.nonsecret().contains(&end) {
            entry.1 = true;
        }
    })?;
    let worst = groups
        .into_iter()
        .filter(|(_, (_, covered))| !covered)
        .filter_map(|(obs, (secret_run, _))| Some((obs, secret_run?)))
        .min_by_key(|(obs, _)| shortlex(a, obs));
    Ok(match worst {
        None => Verdict::holds(),
        Some((observation, run)) => Verdict::violated(Witness { observation, run }),
    })
}

/// The finite set `P(L_m(A, M))` of an acyclic automaton.
pub fn enum_languages_projected(a: &Automaton, marking: &StateSet) -> Result<BTreeSet<Vec<String>>> {
    let raw = Raw::new(a);
    require_acyclic(&raw)?;
    let mut out = BTreeSet::new();
    raw.for_each_run(a.initial(), |_, obs, end| {
        if marking.contains(&end) {
            out.insert(obs.to_vec());
        }
    })?;
    Ok(out)
}

/// Universality of the union of the marked languages of fully observable
/// DFAs over the alphabet of the first, by subset construction and a search
/// for a reachable subset without marked states.
pub fn union_universal(dfas: &[Automaton]) -> bool {
    let Some(first) = dfas.first() else { return false };
    let letters: Vec<String> = first.alphabet().iter().map(|e| e.name.clone()).collect();
    let raws: Vec<Raw> = dfas.iter().map(Raw::new).collect();
    type Subset = BTreeSet<(usize, StateId)>;
    let start: Subset = dfas.iter().enumerate().flat_map(|(i, d)| d.initial().iter().map(move |&q| (i, q))).collect();
    let mut seen: HashSet<Subset> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(set) = queue.pop_front() {
        if !set.iter().any(|&(i, q)| dfas[i].marked().contains(&q)) {
            return false;
        }
        for letter in &letters {
            let next: Subset = set
                .iter()
                .flat_map(|&(i, q)| raws[i].out[q].iter().filter(|(n, _, _)| n == letter).map(move |&(_, _, r)| (i, r)))
                .collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    true
}

/// States reachable from `sources` by some string whose projection is `observation`.
pub fn observation_reach(a: &Automaton, sources: &StateSet, observation: &[String]) -> StateSet {
    let raw = Raw::new(a);
    let mut current = raw.silent_closure(sources.clone());
    for event in observation {
        current = raw.silent_closure(raw.step_exact(&current, event));
    }
    current
}

/// States reachable from `sources` by exactly the string `run`.
pub fn run_reach(a: &Automaton, sources: &StateSet, run: &[String]) -> StateSet {
    let raw = Raw::new(a);
    run.iter().fold(sources.clone(), |current, event| raw.step_exact(&current, event))
}

pub fn projection(a: &Automaton, run: &[String]) -> Vec<String> {
    run.iter().filter(|n| a.alphabet().iter().any(|e| &e.name == *n && e.observable)).cloned().collect()
}

fn consistent(a: &Automaton, w: &Witness) -> bool {
    projection(a, &w.run) == w.observation
}

/// The run reaches a secret state and no string with the same observation
/// reaches a non-secret state.
pub fn replay_cso(inst: &CsoInstance, w: &Witness) -> bool {
    let a = inst.automaton();
    consistent(a, w)
        && !run_reach(a, a.initial(), &w.run).is_disjoint(inst.secret())
        && observation_reach(a, a.initial(), &w.observation).is_disjoint(inst.nonsecret())
}

pub fn replay_lbo(inst: &LboInstance, w: &Witness) -> bool {
    let s = inst.secret_automaton();
    let ns = inst.nonsecret_automaton();
    consistent(s, w)
        && !run_reach(s, s.initial(), &w.run).is_disjoint(s.marked())
        && observation_reach(ns, ns.initial(), &w.observation).is_disjoint(ns.marked())
}

/// For a positive weak-opacity verdict: both languages produce the observation.
pub fn replay_lbo_weak(inst: &LboInstance, w: &Witness) -> bool {
    let s = inst.secret_automaton();
    let ns = inst.nonsecret_automaton();
    consistent(s, w)
        && !run_reach(s, s.initial(), &w.run).is_disjoint(s.marked())
        && !observation_reach(ns, ns.initial(), &w.observation).is_disjoint(ns.marked())
}

pub fn replay_iso(inst: &IsoInstance, w: &Witness) -> bool {
    let a = inst.automaton();
    consistent(a, w)
        && !run_reach(a, inst.secret_initial(), &w.run).is_empty()
        && observation_reach(a, inst.nonsecret_initial(), &w.observation).is_empty()
}

pub fn replay_ifso(inst: &IfsoInstance, w: &Witness) -> bool {
    let a = inst.automaton();
    let secret_ok =
        inst.secret_pairs().iter().any(|&(i, f)| run_reach(a, &[i].into(), &w.run).contains(&f));
    let hidden = inst
        .nonsecret_pairs()
        .iter()
        .any(|&(i, f)| observation_reach(a, &[i].into(), &w.observation).contains(&f));
    consistent(a, w) && secret_ok && !hidden
}

/// IFSO checked literally on an acyclic automaton: every observation of a
/// secret pair must also be an observation of some non-secret pair.
pub fn enum_ifso_acyclic(inst: &IfsoInstance) -> Result<bool> {
    let a = inst.automaton();
    let raw = Raw::new(a);
    require_acyclic(&raw)?;
    let collect = |pairs: &BTreeSet<(StateId, StateId)>| -> Result<BTreeSet<Vec<String>>> {
        let mut out = BTreeSet::new();
        let by_initial: BTreeMap<StateId, Vec<StateId>> =
            pairs.iter().fold(BTreeMap::new(), |mut m, &(i, f)| {
                m.entry(i).or_insert_with(Vec::new).push(f);
                m
            });
        for (i, finals) in by_initial {
            raw.for_each_run(&[i].into(), |_, obs, end| {
                if finals.contains(&end) {
                    out.insert(obs.to_vec());
                }
            })?;
        }
        Ok(out)
    };
    Ok(collect(inst.secret_pairs())?.is_subset(&collect(inst.nonsecret_pairs())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Event;
    use crate::reductions::gen_cnf_cso;

    fn two_clauses() -> CnfFormula {
        CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, 2, 3]]).unwrap()
    }

    fn words(ws: &[&str]) -> BTreeSet<Vec<String>> {
        ws.iter().map(|w| w.chars().map(|c| c.to_string()).collect()).collect()
    }

    #[test]
    fn sat_cases() {
        let SatResult::Sat(first) = brute_sat(&two_clauses()).unwrap() else { panic!("satisfiable") };
        assert_eq!(first, vec![false, false, true]);
        let f = two_clauses();
        let satisfies = |x: &[bool]| {
            f.clauses().iter().all(|c| c.iter().any(|&l| x[l.unsigned_abs() as usize - 1] == (l > 0)))
        };
        assert!(satisfies(&[false, true, false]));
        let empty_clause = CnfFormula::new(2, vec![vec![1], vec![]]).unwrap();
        assert_eq!(brute_sat(&empty_clause).unwrap(), SatResult::Unsat);
        let none = CnfFormula::new(3, vec![]).unwrap();
        assert_eq!(brute_sat(&none).unwrap(), SatResult::Sat(vec![false; 3]));
        let big = CnfFormula::new(25, vec![]).unwrap();
        assert!(matches!(brute_sat(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn reachability_cases() {
        assert!(dag_reachable(&Dag::new(1, [], 0, 0).unwrap()));
        assert!(!dag_reachable(&Dag::new(2, [], 0, 1).unwrap()));
        assert!(dag_reachable(&Dag::new(3, [(0, 2), (2, 1)], 0, 1).unwrap()));
    }

    #[test]
    fn cnf_languages() {
        let inst = gen_cnf_cso(&two_clauses());
        let a = inst.automaton();
        assert_eq!(enum_languages_projected(a, inst.nonsecret()).unwrap(), words(&["000", "100"]));
        let all = words(&["000", "001", "010", "011", "100", "101", "110", "111"]);
        assert_eq!(enum_languages_projected(a, inst.secret()).unwrap(), all);
        assert!(enum_languages_projected(a, &StateSet::new()).unwrap().is_empty());
    }

    #[test]
    fn cnf_enumeration_verdict() {
        let inst = gen_cnf_cso(&two_clauses());
        let v = enum_cso_acyclic(&inst).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.observation, vec!["0", "0", "1"]);
        assert!(replay_cso(&inst, &w));
        let other = Witness { observation: vec!["0".into(), "1".into(), "0".into()], run: vec!["0".into(), "1".into(), "0".into()] };
        assert!(replay_cso(&inst, &other));
    }

    #[test]
    fn single_secret_state() {
        let a = Automaton::from_names(&["q"], vec![Event::observable("x")], &[], &["q"], &[]).unwrap();
        let inst = CsoInstance::from_names(a, &["q"], &[]).unwrap();
        let v = enum_cso_acyclic(&inst).unwrap();
        assert_eq!(v.observation().unwrap(), &[] as &[String]);
    }

    #[test]
    fn rejects_cycles() {
        let a = Automaton::from_names(&["q"], vec![Event::observable("x")], &[("q", "x", "q")], &["q"], &[]).unwrap();
        let inst = CsoInstance::from_names(a, &["q"], &[]).unwrap();
        assert!(matches!(enum_cso_acyclic(&inst), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn universality_of_parities() {
        let parity = |marked: &str| {
            Automaton::from_names(
                &["e", "o"],
                vec![Event::observable("0"), Event::observable("1")],
                &[("e", "0", "o"), ("e", "1", "o"), ("o", "0", "e"), ("o", "1", "e")],
                &["e"],
                &[marked],
            )
            .unwrap()
        };
        assert!(union_universal(&[parity("e"), parity("o")]));
        assert!(!union_universal(&[parity("e")]));
    }
}
