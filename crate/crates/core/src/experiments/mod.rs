//! The two-qubit φ+ experiment with five joint measurements.
//!
//! Each context measures a commuting pair of ±1 observables; the labels of a
//! joint eigenprojector give the pair's values and their product. Under the
//! Born oracle the state's perfect correlations admit no global valuation of
//! `Z1, X1, Z2, X2` obeying the product rule. Under a finite sub-model every
//! shot is answered by a single hidden state, yet the same correlations are
//! reproduced up to the model's precision.

mod contexts;
mod scenario;
mod valuation;

pub use contexts::{build_contexts, phi_plus, Context, Observable};
pub use scenario::{
    run_scenario, run_scenario_with_records, write_frequency_csv, ContextReport, CorrelationReport, Engine, Headline,
    ModelSummary, PhiPlusScenario, Protocol, ShotRecord, ValueTable,
};
pub use valuation::{extends_to_global, Constraint, CorrelationTable, GlobalValuation};
