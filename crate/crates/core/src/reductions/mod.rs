//! Instance generators for the hardness constructions and the
//! notion-to-notion transformations.

mod podet;
mod transforms;
mod union;

use std::collections::BTreeSet;

pub use podet::{po_determinize, EncodingEntry, PoDeterminized};
pub use transforms::{cso_to_lbo, lbo_to_iso, IsoReduction};
pub use union::{gen_union_universality_cso, UnionCso};

use crate::automaton::{Automaton, Event, Label, StateSet, Transition};
use crate::error::{Error, Result};
use crate::verify::{CsoInstance, LboInstance};

/// A propositional formula in conjunctive normal form. Literals are signed,
/// 1-based variable indices as in DIMACS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<BTreeSet<i64>>,
}

impl CnfFormula {
    /// Rejects out-of-range literals and clauses containing a variable together
    /// with its negation.
    pub fn new(variable_count: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let mut checked = Vec::with_capacity(clauses.len());
        for (i, clause) in clauses.into_iter().enumerate() {
            let set: BTreeSet<i64> = clause.into_iter().collect();
            for &lit in &set {
                if lit == 0 || lit.unsigned_abs() as usize > variable_count {
                    return Err(Error::MalformedFormula(format!("clause {} has literal {lit} out of range", i + 1)));
                }
                if set.contains(&-lit) {
                    return Err(Error::MalformedFormula(format!(
                        "clause {} contains both x{} and its negation",
                        i + 1,
                        lit.abs()
                    )));
                }
            }
            checked.push(set);
        }
        Ok(CnfFormula { variable_count, clauses: checked })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[BTreeSet<i64>] {
        &self.clauses
    }
}

/// A directed acyclic graph with a source and a target vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    source: usize,
    target: usize,
}

impl Dag {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>, source: usize, target: usize) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if source >= vertex_count || target >= vertex_count {
            return Err(Error::MalformedGraph("source and target must be vertices".into()));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertex_count || v >= vertex_count) {
            return Err(Error::MalformedGraph(format!("edge ({u}, {v}) leaves the vertex range")));
        }
        let dag = Dag { vertex_count, edges, source, target };
        if !dag.as_automaton(&[]).classify().acyclic {
            return Err(Error::MalformedGraph("edge relation has a cycle".into()));
        }
        Ok(dag)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Vertices `v0..` with an observable `a`-transition per edge, plus any
    /// extra states; starts in the source vertex.
    fn as_automaton(&self, extra: &[&str]) -> Automaton {
        let mut states: Vec<String> = (0..self.vertex_count).map(|v| format!("v{v}")).collect();
        states.extend(extra.iter().map(|s| s.to_string()));
        let transitions =
            self.edges.iter().map(|&(u, v)| Transition { source: u, label: Label::Event(0), target: v }).collect();
        Automaton::from_parts(states, vec![Event::observable("a")], transitions, [self.source].into(), StateSet::new())
            .expect("dag automaton is well-formed")
    }
}

/// Acyclic NFA over observable `{0,1}` that is current-state opaque iff the
/// formula is unsatisfiable.
///
/// Clause `i` becomes a path `c{i}_0 .. c{i}_n` whose `j`-th step reads `0`
/// when `x_j` occurs in the clause, `1` when `¬x_j` does, and either symbol
/// otherwise; its end is non-secret. A free path `alpha0 .. alpha{n}` reads
/// every string of length `n` and ends in the only secret state.
pub fn gen_cnf_cso(formula: &CnfFormula) -> CsoInstance {
    let n = formula.variable_count();
    let m = formula.clauses().len();
    let mut b = Automaton::builder();
    let zero = b.event(Event::observable("0"));
    let one = b.event(Event::observable("1"));
    let alpha: Vec<_> = (0..=n).map(|l| b.state(format!("alpha{l}"))).collect();
    b.initial(alpha[0]);
    for l in 0..n {
        b.transition(alpha[l], Label::Event(zero), alpha[l + 1]);
        b.transition(alpha[l], Label::Event(one), alpha[l + 1]);
    }
    let mut nonsecret = StateSet::new();
    for (i, clause) in formula.clauses().iter().enumerate() {
        let path: Vec<_> = (0..=n).map(|j| b.state(format!("c{}_{j}", i + 1))).collect();
        b.initial(path[0]);
        for j in 1..=n {
            let var = j as i64;
            let from = path[j - 1];
            let to = path[j];
            if !clause.contains(&-var) {
                b.transition(from, Label::Event(zero), to);
            }
            if !clause.contains(&var) {
                b.transition(from, Label::Event(one), to);
            }
        }
        nonsecret.insert(path[n]);
    }
    debug_assert_eq!(b.state_count(), (m + 1) * (n + 1));
    let automaton = b.build().expect("cnf automaton is well-formed");
    CsoInstance::new(automaton, [alpha[n]].into(), nonsecret).expect("cnf instance is well-formed")
}

/// Weak-opacity instance: each edge is an observable `a`-transition and a
/// fresh state `t'` hangs off the target by an unobservable `b`. Weakly opaque
/// iff the target is reachable from the source.
pub fn gen_dag_weak_lbo(dag: &Dag) -> LboInstance {
    let base = dag.as_automaton(&["t'"]);
    let t_prime = dag.vertex_count();
    let mut transitions = base.transitions().to_vec();
    transitions.push(Transition { source: dag.target(), label: Label::Event(1), target: t_prime });
    let automaton = Automaton::from_parts(
        base.states().to_vec(),
        vec![Event::observable("a"), Event::unobservable("b")],
        transitions,
        [dag.source()].into(),
        StateSet::new(),
    )
    .expect("dag automaton is well-formed");
    LboInstance::new(automaton.with_marked([dag.target()].into()), automaton.with_marked([t_prime].into()))
        .expect("shared alphabet")
}

/// Unary acyclic current-state opacity instance with the target as the only
/// secret state and no non-secret states; opaque iff the target is unreachable.
pub fn gen_dag_cso_unary(dag: &Dag) -> CsoInstance {
    CsoInstance::new(dag.as_automaton(&[]), [dag.target()].into(), StateSet::new()).expect("well-formed")
}
