//! Layers of a prime-indexed equivalence-relation theory: Cantor pairing, the
//! arity function, the classes `K_{m,D}`, code sets from enumeration tables,
//! per-sort type counts and horizon-relative categoricity verdicts.

mod arith;
mod axioms;
mod table;
mod theory;

pub use arith::{arity_a, code_pair, decode_pair, layer_bound, prime, ArityFunction};
pub use axioms::{
    assemble_gadget_axioms, atom_count, l_rewrite, GadgetAxiom, GadgetAxioms, Origin,
    DEFAULT_ATOM_CAP,
};
pub use table::{
    categoricity_verdict, compute_d, count_sort_types, sort_rendering, CategoricityReport,
    EnumerationTable, SortShadow,
};
pub use theory::{
    build_gadget_class, EqSymbol, GadgetClass, GadgetTheory, PredSymbol, MAX_LAYER_ARITY,
};
