//! Finite sub-models of non-contextual hidden-variable theories.
//!
//! A sub-model is an ordered list of decompositions `d⁰, d¹, …` in which no
//! operator belongs to two decompositions, plus a precision `epsilon`. An
//! intended measurement is answered by the first decomposition within
//! `epsilon` of it (max Frobenius distance under the best outcome alignment).
//! Because decompositions share no operators, a hidden state can assign each
//! one an outcome independently, drawn from the Born rule, and every reported
//! value is a function of the matched decomposition alone.

mod build;
mod hidden;
mod model;
mod precision;

pub use build::{build_submodel, PerturbationMagnitude, SubModelBuilder};
pub use hidden::{
    measure, measure_sequence, model_distribution, record_for, sample_hidden_state, HiddenState, HiddenStateSampler,
    MeasurementRecord,
};
pub use model::{best_alignment, FiniteSubModel, LookupMatch, DISJOINTNESS_TOL, EXHAUSTIVE_ALIGNMENT_LIMIT};
pub use precision::{
    breakdown_target, calibrate_precision, demonstrate_breakdown, BreakdownWitness, Calibration, Preparation,
};
