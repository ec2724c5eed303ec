use serde::{Deserialize, Serialize};

/// An observation together with a concrete string of the system that produces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub observation: Vec<String>,
    pub run: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds() -> Self {
        Verdict { holds: true, witness: None }
    }

    pub fn violated(witness: Witness) -> Self {
        Verdict { holds: false, witness: Some(witness) }
    }

    pub fn observation(&self) -> Option<&[String]> {
        self.witness.as_ref().map(|w| w.observation.as_slice())
    }
}

/// Orders observations by length, then lexicographically by event rank.
pub(crate) fn shortlex_key(observation: &[String], rank: impl Fn(&str) -> usize) -> (usize, Vec<usize>) {
    (observation.len(), observation.iter().map(|e| rank(e)).collect())
}
