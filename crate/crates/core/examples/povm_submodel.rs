//! Finite sub-models over POVMs: the trine measurement on a qubit.

use ncsim::ck::{build_submodel, measure, model_distribution, HiddenStateSampler};
use ncsim::quantum::Label;
use ncsim::quantum::{born_probabilities, ComplexMatrix, Decomposition, PovmDecomposition, QuantumState};

fn trine() -> ncsim::Result<PovmDecomposition> {
    let effects = (0..3)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let p = ComplexMatrix::projector_onto_real(&[(a / 2.0).cos(), (a / 2.0).sin()])?;
            Ok(p.scale((2.0 / 3.0).into()))
        })
        .collect::<ncsim::Result<Vec<_>>>()?;
    PovmDecomposition::new(effects, (0..3).map(|k| Label::Real(k as f64)).collect())
}

fn main() -> ncsim::Result<()> {
    let target: Decomposition = trine()?.into();
    let model = build_submodel(std::slice::from_ref(&target), 1e-3, 5)?;
    let state = QuantumState::pure_real(&[1.0, 0.0])?;
    let sampler = HiddenStateSampler::new(&model, &state)?;

    let shots = 50_000u64;
    let mut counts = [0u64; 3];
    for shot in 0..shots {
        let hidden = sampler.sample(shot);
        counts[measure(&model, &hidden, &target)?.outcome_index] += 1;
    }
    let (_, predicted) = model_distribution(&model, &state, &target)?;
    let born = born_probabilities(&state, &target)?;
    for k in 0..3 {
        println!(
            "effect {k}: freq {:.4}  model {:.4}  Born {:.4}",
            counts[k] as f64 / shots as f64,
            predicted[k],
            born[k]
        );
    }
    Ok(())
}
