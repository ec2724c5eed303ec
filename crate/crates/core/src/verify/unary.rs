//! Polynomial current-state opacity checks for systems with exactly one
//! observable event. Over a unary observation alphabet an estimate depends
//! only on the observation length, so opacity reduces to containment of the
//! sets of observation lengths that reach the secret and non-secret states.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::automaton::{Automaton, StateId, StateSet};
use crate::error::{Error, Result};
use crate::verdict::{Verdict, Witness};
use crate::verify::CsoInstance;

/// A set of naturals of the form `finite ∪ [ray_start, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSet {
    finite: BTreeSet<usize>,
    ray_start: Option<usize>,
}

impl LengthSet {
    /// Normalizes so that no finite point lies on the ray and the ray cannot
    /// be extended downwards by finite points.
    pub fn new(mut finite: BTreeSet<usize>, mut ray_start: Option<usize>) -> Self {
        if let Some(start) = ray_start.as_mut() {
            finite.retain(|&k| k < *start);
            while *start > 0 && finite.remove(&(*start - 1)) {
                *start -= 1;
            }
        }
        LengthSet { finite, ray_start }
    }

    pub fn finite(&self) -> &BTreeSet<usize> {
        &self.finite
    }

    pub fn ray_start(&self) -> Option<usize> {
        self.ray_start
    }

    pub fn contains(&self, k: usize) -> bool {
        self.finite.contains(&k) || self.ray_start.is_some_and(|s| k >= s)
    }

    /// Semilinear containment: a ray is covered only by a ray starting no
    /// later, finite points by finite points or the ray.
    pub fn is_subset(&self, other: &LengthSet) -> bool {
        let ray_ok = match (self.ray_start, other.ray_start) {
            (None, _) => true,
            (Some(s), Some(t)) => t <= s,
            (Some(_), None) => false,
        };
        ray_ok && self.finite.iter().all(|&k| other.contains(k))
    }

    /// Smallest length in `self` but not in `other`.
    pub fn first_uncovered(&self, other: &LengthSet) -> Option<usize> {
        let bound = [
            self.finite.last().copied(),
            self.ray_start,
            other.finite.last().copied(),
            other.ray_start,
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(0)
            + 1;
        (0..=bound).find(|&k| self.contains(k) && !other.contains(k))
    }
}

fn single_observable(automaton: &Automaton) -> Result<String> {
    let observable = automaton.observable_events();
    match observable.as_slice() {
        [e] => Ok(automaton.event(*e).name.clone()),
        _ => Err(Error::PreconditionViolated(format!(
            "unary algorithm needs exactly one observable event, found {}",
            observable.len()
        ))),
    }
}

/// Observable-edge counts of loop-free runs from the initial states, per state.
fn loop_free_lengths(automaton: &Automaton, order: &[StateId]) -> Vec<FixedBitSet> {
    let n = automaton.state_count();
    let mut lengths = vec![FixedBitSet::with_capacity(n.max(1)); n];
    for &q in automaton.initial() {
        lengths[q].insert(0);
    }
    for &q in order {
        if lengths[q].is_clear() {
            continue;
        }
        let here = lengths[q].clone();
        for &(label, r) in automaton.successors(q) {
            if r == q {
                continue;
            }
            if automaton.is_observable(label) {
                for k in here.ones() {
                    lengths[r].insert(k + 1);
                }
            } else {
                lengths[r].union_with(&here);
            }
        }
    }
    lengths
}

fn collect(lengths: &[FixedBitSet], targets: &StateSet) -> BTreeSet<usize> {
    targets.iter().flat_map(|&q| lengths[q].ones()).collect()
}

/// Least number of observable edges from each state to `targets`.
fn distance_to(automaton: &Automaton, order: &[StateId], targets: &StateSet) -> Vec<Option<usize>> {
    let mut dist = vec![None; automaton.state_count()];
    for &q in order.iter().rev() {
        if targets.contains(&q) {
            dist[q] = Some(0);
            continue;
        }
        dist[q] = automaton
            .successors(q)
            .iter()
            .filter(|&&(_, r)| r != q)
            .filter_map(|&(label, r)| Some(dist[r]? + usize::from(automaton.is_observable(label))))
            .min();
    }
    dist
}

/// Exact length set of observations reaching `targets` in a partially ordered
/// automaton with a single observable event.
pub fn length_set(automaton: &Automaton, order: &[StateId], targets: &StateSet) -> LengthSet {
    let lengths = loop_free_lengths(automaton, order);
    let finite = collect(&lengths, targets);
    let to_target = distance_to(automaton, order, targets);
    let ray_start = (0..automaton.state_count())
        .filter(|&r| {
            automaton.successors(r).iter().any(|&(label, s)| s == r && automaton.is_observable(label))
        })
        .filter_map(|r| Some(lengths[r].minimum()? + to_target[r]?))
        .min();
    LengthSet::new(finite, ray_start)
}

fn unary_witness(inst: &CsoInstance, letter: &str, k: usize) -> Witness {
    let automaton = inst.automaton();
    let observation = vec![letter.to_string(); k];
    let run = automaton
        .find_run(automaton.initial(), inst.secret(), &observation)
        .expect("uncovered length is realized by a secret run");
    Witness { run: automaton.event_names(&run), observation }
}

pub fn verify_cso_unary_acyclic(inst: &CsoInstance) -> Result<Verdict> {
    let automaton = inst.automaton();
    let letter = single_observable(automaton)?;
    if !automaton.classify().acyclic {
        return Err(Error::PreconditionViolated("unary-acyclic algorithm needs an acyclic automaton".into()));
    }
    let order = automaton.topological_order().expect("acyclic automaton has a topological order");
    let lengths = loop_free_lengths(automaton, &order);
    let secret = collect(&lengths, inst.secret());
    let nonsecret = collect(&lengths, inst.nonsecret());
    Ok(match secret.difference(&nonsecret).next() {
        None => Verdict::holds(),
        Some(&k) => Verdict::violated(unary_witness(inst, &letter, k)),
    })
}

pub fn verify_cso_unary_po(inst: &CsoInstance) -> Result<Verdict> {
    let automaton = inst.automaton();
    let letter = single_observable(automaton)?;
    let Some(order) = automaton.topological_order() else {
        return Err(Error::PreconditionViolated(
            "unary-po algorithm needs a partially ordered automaton".into(),
        ));
    };
    let secret = length_set(automaton, &order, inst.secret());
    let nonsecret = length_set(automaton, &order, inst.nonsecret());
    if secret.is_subset(&nonsecret) {
        return Ok(Verdict::holds());
    }
    let k = secret.first_uncovered(&nonsecret).expect("non-containment has a smallest uncovered length");
    Ok(Verdict::violated(unary_witness(inst, &letter, k)))
}
