//! The five-context experiment on |phi+> and its contradiction with any
//! global valuation.

use ncsim::experiments::{run_scenario, CorrelationTable, Engine, GlobalValuation, PhiPlusScenario, Protocol};

fn main() -> ncsim::Result<()> {
    let table = CorrelationTable::ideal();
    let consistent = table.consistent_valuations();
    println!(
        "{} global valuations, {} consistent with the ideal table",
        GlobalValuation::all().count(),
        consistent.len()
    );

    for (engine, protocol) in [
        (Engine::Oracle, Protocol::Full),
        (Engine::Ck { epsilon: 1e-3 }, Protocol::Full),
        (Engine::Ck { epsilon: 1e-3 }, Protocol::HlzpgReduced),
    ] {
        let r = run_scenario(&PhiPlusScenario::new(engine, 50_000, 7).protocol(protocol))?;
        let h = &r.headline;
        println!(
            "{engine:?} {protocol:?}: P(Z1=Z2) {:.4}  P(X1=X2) {:.4}  P(Z1X2=-X1Z2) {:.4}  witness {:.4}  globally consistent shots {}",
            h.p_z1_eq_z2, h.p_x1_eq_x2, h.p_z1x2_opposite_x1z2, h.witness, r.globally_consistent_shots
        );
    }
    Ok(())
}
