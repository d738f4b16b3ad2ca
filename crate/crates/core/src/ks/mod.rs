//! Vector sets, orthogonal bases, KS-colourings and uncolourability search.

mod catalogue;
mod colouring;
mod operator;
mod structure;
mod vectors;

pub use catalogue::{
    builtin, builtin_names, certify, load_catalogue, parse_catalogue, CatalogueDocument, Certification,
    EXHAUSTIVE_CERTIFICATION_LIMIT,
};
pub(crate) use colouring::search_bases;
pub use colouring::{
    count_colourings_exhaustive, search_colouring, validate_ks_colouring, Colouring, KsVerdict, SearchOutcome,
    UncolourableCertificate, EXHAUSTIVE_LIMIT,
};
pub use operator::{validate_operator_colouring, OperatorVerdict, OperatorViolation, Rule};
pub use structure::{build_orthogonality, OrthogonalityStructure};
pub use vectors::VectorSet;
