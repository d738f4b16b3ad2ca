//! A finite sub-model with tight precision reproduces Born statistics.
//!
//! Builds a sub-model around the computational and Hadamard bases of a qubit,
//! then compares per-outcome frequencies over many hidden states with the
//! exact Born probabilities of the matched decomposition.

use ncsim::ck::{build_submodel, measure, model_distribution, HiddenStateSampler};
use ncsim::quantum::{born_probabilities, Decomposition, ProjectiveDecomposition, QuantumState, Resolution};
use ncsim::stats::binomial_sigma;

fn main() -> ncsim::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z: Decomposition = ProjectiveDecomposition::computational(2).into();
    let x: Decomposition = ProjectiveDecomposition::from_real_basis(&[vec![s, s], vec![s, -s]], None)?.into();
    let model = build_submodel(&[z.clone(), x.clone()], 1e-3, 42)?;
    let state = QuantumState::pure_real(&[0.8, 0.6])?;

    let shots = 100_000u64;
    let sampler = HiddenStateSampler::new(&model, &state)?;
    for target in [&z, &x] {
        let mut counts = vec![0u64; target.len()];
        for shot in 0..shots {
            let hidden = sampler.sample(ncsim::seeds::derive(7, ncsim::seeds::stream::SHOT, shot));
            counts[measure(&model, &hidden, target)?.outcome_index] += 1;
        }
        let (hit, predicted) = model_distribution(&model, &state, target)?;
        let born = born_probabilities(&state, target)?;
        println!("target matched decomposition {} at distance {:.2e}", hit.index, hit.distance);
        for k in 0..target.len() {
            let f = counts[k] as f64 / shots as f64;
            let z = (f - predicted[k]) / binomial_sigma(predicted[k], shots).max(f64::MIN_POSITIVE);
            println!("  outcome {k}: freq {f:.4}  model {:.4}  Born {:.4}  ({z:+.2} sigma)", predicted[k], born[k]);
        }
    }
    Ok(())
}
