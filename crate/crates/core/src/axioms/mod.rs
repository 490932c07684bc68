//! Axiom schemes for the generic structure of a class: forbidden configurations
//! (a), labelling and sort discipline (b), realisation of members (c) and
//! one-point extension (d).

mod generate;
mod verify;

pub use generate::{
    arity_cut, exists_sentence, extension_sentence, forbid_sentence, generate_axioms,
    minimal_non_members, rederive_scheme_d, scheme_a, scheme_b, scheme_c, scheme_d,
    structure_of_exists, AxiomBudget,
};
pub use verify::{of_scheme, verify_model_of, AxiomOutcome, ModelReport};
