use std::collections::BTreeSet;

use crate::automaton::{Automaton, StateId, StateSet};
use crate::error::{Error, Result};

fn check_subset(automaton: &Automaton, set: &StateSet, what: &str) -> Result<()> {
    match set.iter().find(|&&q| q >= automaton.state_count()) {
        Some(q) => Err(Error::InvalidInstance(format!("{what} refers to unknown state #{q}"))),
        None => Ok(()),
    }
}

/// Current-state opacity instance. Secret and non-secret sets may overlap, and
/// states in neither set carry no status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsoInstance {
    automaton: Automaton,
    secret: StateSet,
    nonsecret: StateSet,
}

impl CsoInstance {
    pub fn new(automaton: Automaton, secret: StateSet, nonsecret: StateSet) -> Result<Self> {
        check_subset(&automaton, &secret, "secret set")?;
        check_subset(&automaton, &nonsecret, "non-secret set")?;
        Ok(CsoInstance { automaton, secret, nonsecret })
    }

    /// Convenience constructor from state names.
    pub fn from_names<S: AsRef<str>>(automaton: Automaton, secret: &[S], nonsecret: &[S]) -> Result<Self> {
        let secret = automaton.state_set(secret)?;
        let nonsecret = automaton.state_set(nonsecret)?;
        Self::new(automaton, secret, nonsecret)
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn secret(&self) -> &StateSet {
        &self.secret
    }

    pub fn nonsecret(&self) -> &StateSet {
        &self.nonsecret
    }

    pub fn overlapping(&self) -> bool {
        !self.secret.is_disjoint(&self.nonsecret)
    }
}

/// Language-based opacity instance: the marked languages of the two automata
/// are the secret and non-secret languages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LboInstance {
    secret_automaton: Automaton,
    nonsecret_automaton: Automaton,
}

impl LboInstance {
    pub fn new(secret_automaton: Automaton, nonsecret_automaton: Automaton) -> Result<Self> {
        let mut left = secret_automaton.alphabet().to_vec();
        let mut right = nonsecret_automaton.alphabet().to_vec();
        left.sort();
        right.sort();
        if left != right {
            return Err(Error::AlphabetMismatch(
                "secret and non-secret automata must share names and observability".into(),
            ));
        }
        Ok(LboInstance { secret_automaton, nonsecret_automaton })
    }

    pub fn secret_automaton(&self) -> &Automaton {
        &self.secret_automaton
    }

    pub fn nonsecret_automaton(&self) -> &Automaton {
        &self.nonsecret_automaton
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoInstance {
    automaton: Automaton,
    secret_initial: StateSet,
    nonsecret_initial: StateSet,
}

impl IsoInstance {
    pub fn new(automaton: Automaton, secret_initial: StateSet, nonsecret_initial: StateSet) -> Result<Self> {
        for (set, what) in [(&secret_initial, "secret_initial"), (&nonsecret_initial, "nonsecret_initial")] {
            if !set.is_subset(automaton.initial()) {
                return Err(Error::InvalidInstance(format!("{what} must be a subset of the initial states")));
            }
        }
        Ok(IsoInstance { automaton, secret_initial, nonsecret_initial })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn secret_initial(&self) -> &StateSet {
        &self.secret_initial
    }

    pub fn nonsecret_initial(&self) -> &StateSet {
        &self.nonsecret_initial
    }
}

pub type StatePair = (StateId, StateId);

/// Initial-and-final-state opacity instance; secrets are (initial, marked) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IfsoInstance {
    automaton: Automaton,
    secret_pairs: BTreeSet<StatePair>,
    nonsecret_pairs: BTreeSet<StatePair>,
}

impl IfsoInstance {
    pub fn new(
        automaton: Automaton,
        secret_pairs: BTreeSet<StatePair>,
        nonsecret_pairs: BTreeSet<StatePair>,
    ) -> Result<Self> {
        for (pairs, what) in [(&secret_pairs, "secret_pairs"), (&nonsecret_pairs, "nonsecret_pairs")] {
            for &(i, f) in pairs {
                if f >= automaton.state_count() {
                    return Err(Error::InvalidInstance(format!("{what} refers to unknown state #{f}")));
                }
                if !automaton.initial().contains(&i) {
                    return Err(Error::InvalidInstance(format!("{what}: first component must be initial")));
                }
            }
        }
        Ok(IfsoInstance { automaton, secret_pairs, nonsecret_pairs })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn secret_pairs(&self) -> &BTreeSet<StatePair> {
        &self.secret_pairs
    }

    pub fn nonsecret_pairs(&self) -> &BTreeSet<StatePair> {
        &self.nonsecret_pairs
    }
}
