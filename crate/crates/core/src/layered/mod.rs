//! Increasing vocabulary chains with one amalgamation class per layer, their
//! encoded approximants, agreement between layers, stabilisation of sentences
//! along the chain, and back-and-forth over a shared P-part.

mod backforth;
mod chain;
mod classes;
mod presentation;

pub use backforth::{back_and_forth_over_p, BackForthReport};
pub use chain::{constants_example, ClassDef, ForbidDef, LayerDef, LayerSpec, LayeredVocabulary};
pub use classes::{SegmentedOrderClass, SortBounded};
pub use presentation::{
    build_layered_presentation, check_layer_agreement, compare_layer_classes, detect_stabilization,
    encode_approximant, AgreementReport, Layer, LayerOptions, LayerPresentation, Stabilization,
    StabilizationReport,
};
