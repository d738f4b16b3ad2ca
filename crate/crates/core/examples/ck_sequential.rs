//! Sequential measurements with Lüders collapse inside a finite sub-model.

use ncsim::ck::{build_submodel, measure_sequence};
use ncsim::quantum::{Decomposition, ProjectiveDecomposition, QuantumState};

fn main() -> ncsim::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z: Decomposition = ProjectiveDecomposition::computational(2).into();
    let x: Decomposition = ProjectiveDecomposition::from_real_basis(&[vec![s, s], vec![s, -s]], None)?.into();
    let model = build_submodel(&[z.clone(), x.clone()], 1e-3, 3)?;
    let state = QuantumState::basis(2, 0);

    // Z, X, Z: the repeated Z agrees with the first only half of the time.
    let sequence = [z.clone(), x, z];
    let shots = 20_000;
    let mut repeat_agrees = 0;
    for shot in 0..shots {
        let recs = measure_sequence(&model, &state, &sequence, shot)?;
        if recs[0].outcome_index == recs[2].outcome_index {
            repeat_agrees += 1;
        }
    }
    println!("P(first Z = last Z) = {:.4}", repeat_agrees as f64 / shots as f64);

    let recs = measure_sequence(&model, &state, &sequence[..1], 0)?;
    println!("single record: {}", serde_json::to_string(&recs[0]).expect("serializable"));
    Ok(())
}
