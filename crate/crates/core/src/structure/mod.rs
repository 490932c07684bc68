//! Finite relational structures and the operations every other module builds on.

mod canon;
mod enumerate;
mod finite;
mod morphism;
mod text;
mod vocab;

pub use canon::{canonical_form, canonical_labeling, canonical_structure, CanonKey};
pub(crate) use enumerate::{candidate_tuples, unary_choices};
pub use enumerate::{
    enumerate_hereditary, enumerate_structures, one_point_extensions, DEFAULT_CANDIDATE_CAP,
};
pub use finite::{Elem, Structure, Tuple, TupleIter};
pub use morphism::{
    are_isomorphic, count_embeddings, enumerate_embeddings, extend_embedding, find_embedding,
    Matcher, Morphism,
};
pub use text::{
    emit_structure, emit_structure_with_comments, emit_structures, emit_vocab, parse_structure,
    parse_structures, StructureFile,
};
pub(crate) use vocab::is_identifier;
pub use vocab::{Symbol, Vocabulary};
