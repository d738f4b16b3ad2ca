//! Beyond the sub-model's precision its predictions depart from quantum mechanics.

use ncsim::ck::{build_submodel, demonstrate_breakdown};
use ncsim::quantum::ProjectiveDecomposition;

fn main() -> ncsim::Result<()> {
    for epsilon in [0.05, 0.2, 0.5] {
        let model = build_submodel(&[ProjectiveDecomposition::computational(2).into()], epsilon, 1)?;
        let w = demonstrate_breakdown(&model, 100_000, 9)?;
        println!(
            "epsilon {epsilon}: angle {:.4} rad, distance {:.4}, predicted TV {:.4}, empirical TV {:.4} (sigma {:.1e})",
            w.angle, w.distance, w.predicted_tv, w.empirical_tv, w.sigma
        );
        println!(
            "  bounds: operator {:.4}, epsilon {:.4}; within 3 sigma: {}",
            w.operator_bound,
            w.epsilon_bound,
            w.agrees_within(3.0)
        );
    }
    Ok(())
}
