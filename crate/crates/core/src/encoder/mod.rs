//! Encoding structures of an arbitrary relational vocabulary into the fixed
//! vocabulary `P Q lam rho H S` through labelled cycles ("n-pairs").

mod class;
mod codec;
mod dense;
mod language;
mod npair;

pub use class::{
    amalgamate_k, labelling_axioms, no_new_npairs, npair_formula, relativize, sort_axioms,
    AmalgamCase, EncodedClass,
};
pub use codec::{
    decode, encode, k_membership, label_all, p_part, Clause, EncodedStructure, Membership,
};
pub use dense::{check_dense_reduct, DenseReductReport};
pub use language::{Encoding, LIndex, TargetLanguage};
pub use npair::{scan_npairs, validate_npair, NPair, NPairCheck, Violation};
