//! Finite model theory toolkit: relational structures, first-order evaluation,
//! amalgamation classes, a finite-language tuple encoding, axiom generation,
//! layered vocabularies and a prime-indexed equivalence-relation gadget.

pub mod axioms;
pub mod encoder;
pub mod error;
pub mod fraisse;
pub mod gadget;
pub mod layered;
pub mod logic;
pub mod report;
pub mod structure;

pub use error::{Error, Position, Result};
pub use structure::{Structure, Vocabulary};
