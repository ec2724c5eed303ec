//! Opacity verification for discrete-event systems under partial observation.

pub mod automaton;
pub mod batch;
pub mod error;
pub mod io;
pub mod observer;
pub mod oracles;
pub mod random;
pub mod reductions;
pub mod verdict;
pub mod verify;

pub use automaton::{Automaton, Event, Label, StateId, StateSet, StructureReport, Transition};
pub use error::{Error, Result};
pub use verdict::{Verdict, Witness};
pub use verify::{Algorithm, Config, CsoInstance, IfsoInstance, IsoInstance, LboInstance};
