//! Hereditary classes of finite structures, their amalgamation properties and
//! finite approximations of their generic limits.

mod builtin;
mod check;
mod class;
mod generic;
mod types;
mod wrap;

pub(crate) use builtin::is_linear_order;
pub use builtin::{
    builtin_class, EquivalenceClass, GraphClass, GraphFamily, OrderClass, SetClass, BUILTIN_CLASSES,
};
pub use check::{
    check_class_properties, enumerate_age, enumerate_age_upto, CheckOptions, ClassReport, Scope,
};
pub use class::{amalgamate_or_search, free_amalgam, search_amalgam, AgeClass, Amalgam};
pub use generic::{
    build_generic_approx, canonical_extension, check_homogeneity_level, demands,
    has_extension_property, Demand, GenericApproximation, GenericOptions, HomogeneityReport,
};
pub use types::{type_count, types_of};
pub use wrap::{EnumeratedClass, ExcludeMember, ForbiddenClass};
