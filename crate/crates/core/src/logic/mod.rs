//! Prenex first-order sentences over relational vocabularies with equality.

mod eval;
mod parse;
mod qftype;
mod sentence;

pub use eval::{counterexample_with, evaluate, evaluate_with, EvalOptions};
pub use parse::{emit_axiom_file, parse_axiom_file, parse_sentence, parse_sentence_for};
pub use qftype::{qf_type, qf_type_named, QfType};
pub use sentence::{Formula, Quantifier, SchemeTag, Sentence};
