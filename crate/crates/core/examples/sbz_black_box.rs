//! Black-box contextuality test on the 18-vector catalogue.
//!
//! A box hiding a finite sub-model answers every round with a valid KS-colouring
//! of the chosen basis, so the non-standard fraction stays below 1/N and the
//! verdict is contextual. A box of independent fair bits cannot be certified.

use ncsim::ks::builtin;
use ncsim::quantum::QuantumState;
use ncsim::sbz::{cyclic_schedule, run_box, sbz_verdict, BlackBox, Interior};

fn main() -> ncsim::Result<()> {
    let catalogue = builtin("ceg-18-d4").expect("shipped entry");
    let boxes = [
        Interior::Ck { epsilon: 0.01, state: QuantumState::maximally_mixed(4) },
        Interior::Oracle { state: QuantumState::maximally_mixed(4) },
        Interior::Toy { p: 0.5 },
    ];
    for interior in boxes {
        let bx = BlackBox::new(interior, catalogue.clone(), 1e-4, 17)?;
        let schedule = cyclic_schedule(bx.family(), 20_000);
        let t = run_box(&bx, &schedule)?;
        let v = sbz_verdict(&t, 0.999)?;
        println!(
            "{:>6}: {} non-standard of {} rounds, upper bound {:.2e} vs 1/N = {:.4} -> {:?}",
            t.interior, v.non_standard, v.rounds, v.upper, v.threshold, v.verdict
        );
    }
    Ok(())
}
