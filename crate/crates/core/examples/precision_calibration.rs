//! Calibrate a sub-model: prepare eigenstates of a target and count how often
//! the expected outcome comes back.

use ncsim::ck::{calibrate_precision, PerturbationMagnitude, Preparation, SubModelBuilder};
use ncsim::quantum::{Decomposition, ProjectiveDecomposition, QuantumState};

fn main() -> ncsim::Result<()> {
    let target: Decomposition = ProjectiveDecomposition::computational(3).into();
    for delta in [0.01, 0.05, 0.1] {
        let model = SubModelBuilder::new(0.25, 11)
            .magnitude(PerturbationMagnitude::Exact(delta))
            .build(std::slice::from_ref(&target))?;
        let preps: Vec<Preparation> = (0..3)
            .map(|k| Preparation { state: QuantumState::basis(3, k), target: target.clone(), expected: k })
            .collect();
        let cal = calibrate_precision(&model, &preps, 200_000, 4)?;
        for (k, c) in cal.iter().enumerate() {
            println!(
                "delta {delta}: prep {k}  gap {:.5}  predicted {:.5}  bound delta^2/2 = {:.5}",
                c.gap,
                c.predicted_gap,
                delta * delta / 2.0
            );
        }
    }
    Ok(())
}
