use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{FiniteSubModel, LookupMatch};
use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, collapse_luders, Decomposition, Label, QuantumState, Resolution};
use crate::seeds::{self, stream};

/// One pre-assigned outcome per decomposition of a sub-model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenState {
    pub outcome_of: Vec<usize>,
    pub sample_seed: u64,
}

impl HiddenState {
    /// 0/1 values the hidden state induces on the operators of decomposition `index`.
    pub fn values_on(&self, model: &FiniteSubModel, index: usize) -> Vec<f64> {
        let n = model.decomposition(index).len();
        (0..n).map(|j| if j == self.outcome_of[index] { 1.0 } else { 0.0 }).collect()
    }
}

/// Cumulative Born tables for one state, reusable across many hidden-state draws.
#[derive(Clone, Debug)]
pub struct HiddenStateSampler {
    cumulative: Vec<Vec<f64>>,
    last_supported: Vec<usize>,
}

impl HiddenStateSampler {
    pub fn new(model: &FiniteSubModel, state: &QuantumState) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(model.len());
        let mut last_supported = Vec::with_capacity(model.len());
        for d in model.decompositions() {
            let p = born_probabilities(state, d)?;
            let mut acc = 0.0;
            cumulative.push(
                p.iter()
                    .map(|x| {
                        acc += x;
                        acc
                    })
                    .collect(),
            );
            last_supported.push(p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1));
        }
        Ok(Self { cumulative, last_supported })
    }

    /// Independent Born draws, one uniform per decomposition in model order.
    pub fn sample(&self, seed: u64) -> HiddenState {
        let mut rng = seeds::rng(seed);
        let outcome_of = self
            .cumulative
            .iter()
            .zip(&self.last_supported)
            .map(|(cum, &last)| {
                let u: f64 = rng.random();
                cum.iter().position(|&c| u < c).unwrap_or(last).min(last)
            })
            .collect();
        HiddenState { outcome_of, sample_seed: seed }
    }
}

pub fn sample_hidden_state(model: &FiniteSubModel, state: &QuantumState, seed: u64) -> Result<HiddenState> {
    Ok(HiddenStateSampler::new(model, state)?.sample(seed))
}

/// What the sub-model reports for one intended measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    #[serde(skip)]
    pub target: Decomposition,
    pub matched_index: usize,
    pub alignment: Vec<usize>,
    pub distance: f64,
    /// Outcome of the matched decomposition, in model labelling.
    pub model_outcome: usize,
    /// The same outcome in the target's labelling.
    pub outcome_index: usize,
    pub outcome_label: Label,
}

/// Reveals the hidden state's value for the decomposition matched by `target`.
pub fn measure(model: &FiniteSubModel, hidden: &HiddenState, target: &Decomposition) -> Result<MeasurementRecord> {
    let hit = model.lookup(target)?;
    record_for(model, hidden, target, &hit)
}

/// [`measure`] with a lookup already performed.
pub fn record_for(
    model: &FiniteSubModel,
    hidden: &HiddenState,
    target: &Decomposition,
    hit: &LookupMatch,
) -> Result<MeasurementRecord> {
    if hidden.outcome_of.len() != model.len() {
        return Err(Error::InvalidArgument(format!(
            "hidden state covers {} decompositions, model has {}",
            hidden.outcome_of.len(),
            model.len()
        )));
    }
    let model_outcome = hidden.outcome_of[hit.index];
    let outcome_index = hit
        .alignment
        .iter()
        .position(|&k| k == model_outcome)
        .ok_or(Error::OutcomeOutOfRange { index: model_outcome, len: hit.alignment.len() })?;
    Ok(MeasurementRecord {
        target: target.clone(),
        matched_index: hit.index,
        alignment: hit.alignment.clone(),
        distance: hit.distance,
        model_outcome,
        outcome_index,
        outcome_label: target.labels()[outcome_index].clone(),
    })
}

/// Exact distribution of reported outcomes (target labelling) over fresh hidden states.
pub fn model_distribution(
    model: &FiniteSubModel,
    state: &QuantumState,
    target: &Decomposition,
) -> Result<(LookupMatch, Vec<f64>)> {
    let hit = model.lookup(target)?;
    let p = born_probabilities(state, model.decomposition(hit.index))?;
    let dist = hit.alignment.iter().map(|&k| p[k]).collect();
    Ok((hit, dist))
}

/// Measures `targets` in order, collapsing on each matched decomposition and
/// resampling the hidden state before every step.
pub fn measure_sequence(
    model: &FiniteSubModel,
    state: &QuantumState,
    targets: &[Decomposition],
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    let mut state = state.clone();
    let mut out = Vec::with_capacity(targets.len());
    for (k, target) in targets.iter().enumerate() {
        let hidden = sample_hidden_state(model, &state, seeds::derive(seed, stream::SEQUENCE, k as u64))?;
        let rec = measure(model, &hidden, target)?;
        // Lüders equals projective collapse on projectors.
        state = collapse_luders(&state, model.decomposition(rec.matched_index), rec.model_outcome)?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ck::build_submodel;
    use crate::quantum::ProjectiveDecomposition;

    fn triad() -> Decomposition {
        ProjectiveDecomposition::computational(3).into()
    }

    #[test]
    fn certain_outcome_is_always_assigned() {
        let model = FiniteSubModel::from_decompositions(vec![triad()], 0.1, 0).unwrap();
        let s = QuantumState::basis(3, 0);
        for seed in 0..200 {
            assert_eq!(sample_hidden_state(&model, &s, seed).unwrap().outcome_of, vec![0]);
        }
    }

    #[test]
    fn measuring_twice_reveals_the_same_value() {
        let model = build_submodel(&[triad()], 0.2, 1).unwrap();
        let s = QuantumState::maximally_mixed(3);
        for seed in 0..50 {
            let h = sample_hidden_state(&model, &s, seed).unwrap();
            assert_eq!(measure(&model, &h, &triad()).unwrap(), measure(&model, &h, &triad()).unwrap());
        }
    }

    #[test]
    fn sequence_repeats_through_collapse() {
        let model = build_submodel(&[triad()], 0.2, 2).unwrap();
        let s = QuantumState::maximally_mixed(3);
        for seed in 0..100 {
            let recs = measure_sequence(&model, &s, &[triad(), triad()], seed).unwrap();
            assert_eq!(recs[0].outcome_index, recs[1].outcome_index);
        }
    }

    #[test]
    fn hidden_state_length_is_checked() {
        let model = FiniteSubModel::from_decompositions(vec![triad()], 0.1, 0).unwrap();
        let h = HiddenState { outcome_of: vec![], sample_seed: 0 };
        assert!(measure(&model, &h, &triad()).is_err());
    }
}
