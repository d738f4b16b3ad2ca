use serde::Serialize;

use super::hidden::{record_for, HiddenStateSampler};
use super::model::{best_alignment, FiniteSubModel};
use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, ComplexMatrix, Decomposition, QuantumState, Resolution, C64};
use crate::seeds::{self, stream};
use crate::stats::total_variation;
use crate::DEFAULT_TOL;

/// A state prepared so that `expected` is (ideally) certain for `target`.
#[derive(Clone, Debug)]
pub struct Preparation {
    pub state: QuantumState,
    pub target: Decomposition,
    pub expected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub matched_index: usize,
    pub runs: u64,
    pub hits: u64,
    /// `1 − hits/runs`.
    pub gap: f64,
    /// Born probability of the expected outcome on the target itself.
    pub target_probability: f64,
    /// Exact gap the sub-model implies, `1 − p_model(expected)`.
    pub predicted_gap: f64,
}

/// Empirical `1 − freq(expected)` per preparation over `runs` fresh hidden states.
///
/// The certainty precondition is reported through `target_probability`, not enforced.
pub fn calibrate_precision(
    model: &FiniteSubModel,
    preparations: &[Preparation],
    runs: u64,
    seed: u64,
) -> Result<Vec<Calibration>> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be positive".into()));
    }
    preparations
        .iter()
        .enumerate()
        .map(|(i, prep)| {
            if prep.expected >= prep.target.len() {
                return Err(Error::OutcomeOutOfRange { index: prep.expected, len: prep.target.len() });
            }
            let hit = model.lookup(&prep.target)?;
            let sampler = HiddenStateSampler::new(model, &prep.state)?;
            let stream_seed = seeds::derive(seed, stream::CALIBRATION, i as u64);
            let mut hits = 0u64;
            for r in 0..runs {
                let hidden = sampler.sample(seeds::derive(stream_seed, stream::SHOT, r));
                if record_for(model, &hidden, &prep.target, &hit)?.outcome_index == prep.expected {
                    hits += 1;
                }
            }
            let p_model = born_probabilities(&prep.state, model.decomposition(hit.index))?;
            Ok(Calibration {
                matched_index: hit.index,
                runs,
                hits,
                gap: 1.0 - hits as f64 / runs as f64,
                target_probability: born_probabilities(&prep.state, &prep.target)?[prep.expected],
                predicted_gap: 1.0 - p_model[hit.alignment[prep.expected]],
            })
        })
        .collect()
}

/// A measurement the sub-model answers with statistics visibly different
/// from quantum mechanics, because it lies inside epsilon of a modelled
/// decomposition without coinciding with it.
#[derive(Clone, Debug, Serialize)]
pub struct BreakdownWitness {
    pub matched_index: usize,
    /// Rotation angle in the plane of the two chosen outcomes.
    pub angle: f64,
    pub distance: f64,
    pub epsilon: f64,
    pub state: QuantumState,
    pub target: Decomposition,
    pub model_distribution: Vec<f64>,
    pub target_distribution: Vec<f64>,
    /// TV between the two exact distributions.
    pub predicted_tv: f64,
    pub shots: u64,
    pub empirical_frequencies: Vec<f64>,
    pub empirical_tv: f64,
    /// Binomial standard deviation of the empirical TV around the prediction.
    pub sigma: f64,
    /// `½ Σ_j ‖T_j − M_π(j)‖_op`, the perturbation bound for this matched pair.
    pub operator_bound: f64,
    /// `min(1, n ε / 2)`, the bound implied by epsilon alone.
    pub epsilon_bound: f64,
}

impl BreakdownWitness {
    /// Empirical TV within `k` sigma of the prediction (plus float noise).
    pub fn agrees_within(&self, k: f64) -> bool {
        (self.empirical_tv - self.predicted_tv).abs() <= k * self.sigma + DEFAULT_TOL
    }

    pub fn respects_bounds(&self) -> bool {
        self.predicted_tv <= self.operator_bound + DEFAULT_TOL
            && self.operator_bound <= self.epsilon_bound + DEFAULT_TOL
    }
}

/// Builds a target inside epsilon of the model's first decomposition by
/// rotating two of its outcomes into each other by the largest angle `phi`
/// that still matches, and prepares `cos(t) v + sin(t) w` with
/// `t = phi/2 - pi/4` in the rotation plane, where the two Born distributions
/// are furthest apart (total variation `sin(phi)` on a qubit).
pub fn breakdown_target(model: &FiniteSubModel) -> Result<(Decomposition, QuantumState, f64)> {
    let base = model.decompositions().first().ok_or(Error::Empty("sub-model"))?;
    if base.len() < 2 {
        return Err(Error::InvalidSubModel("first decomposition has a single outcome".into()));
    }
    let ops = base.operators();
    let v = ops[0].top_eigenvector();
    let w = orthonormal_to(&ops[1].top_eigenvector(), &v)?;
    let rotate = |phi: f64| base.conjugated(&plane_rotation(&v, &w, phi)).expect("same dimension");
    let reach = |phi: f64| best_alignment(rotate(phi).operators(), ops).1;

    let limit = model.epsilon() * (1.0 - 1e-6);
    let quarter = std::f64::consts::FRAC_PI_4;
    let phi = if reach(quarter) < limit {
        quarter
    } else {
        let (mut lo, mut hi) = (0.0, quarter);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reach(mid) < limit {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let target = rotate(phi);
    let t = 0.5 * phi - quarter;
    let psi: Vec<C64> = v.iter().zip(&w).map(|(a, b)| a * t.cos() + b * t.sin()).collect();
    Ok((target, QuantumState::pure_normalized(psi)?, phi))
}

pub fn demonstrate_breakdown(model: &FiniteSubModel, shots: u64, seed: u64) -> Result<BreakdownWitness> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let (target, state, angle) = breakdown_target(model)?;
    let hit = model.lookup(&target)?;
    let matched = model.decomposition(hit.index);
    let p_model = born_probabilities(&state, matched)?;
    let model_distribution: Vec<f64> = hit.alignment.iter().map(|&k| p_model[k]).collect();
    let target_distribution = born_probabilities(&state, &target)?;

    let sampler = HiddenStateSampler::new(model, &state)?;
    let mut counts = vec![0u64; target.len()];
    for s in 0..shots {
        let hidden = sampler.sample(seeds::derive(seed, stream::BREAKDOWN, s));
        counts[record_for(model, &hidden, &target, &hit)?.outcome_index] += 1;
    }
    let empirical_frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    let sigma = 0.5 * model_distribution.iter().map(|&p| crate::stats::binomial_sigma(p, shots)).sum::<f64>();
    let operator_bound = 0.5
        * target
            .operators()
            .iter()
            .zip(&hit.alignment)
            .map(|(t, &k)| t.sub(&matched.operators()[k]).map(|d| d.operator_norm_hermitian()))
            .sum::<Result<f64>>()?;
    Ok(BreakdownWitness {
        matched_index: hit.index,
        angle,
        distance: hit.distance,
        epsilon: model.epsilon(),
        predicted_tv: total_variation(&model_distribution, &target_distribution),
        empirical_tv: total_variation(&empirical_frequencies, &target_distribution),
        epsilon_bound: (target.len() as f64 * model.epsilon() / 2.0).min(1.0),
        state,
        target,
        model_distribution,
        target_distribution,
        shots,
        empirical_frequencies,
        sigma,
        operator_bound,
    })
}

fn orthonormal_to(w: &[C64], v: &[C64]) -> Result<Vec<C64>> {
    let overlap: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
    let r: Vec<C64> = w.iter().zip(v).map(|(b, a)| b - overlap * a).collect();
    let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-6 {
        return Err(Error::InvalidSubModel("first two operators share their leading eigenvector".into()));
    }
    Ok(r.into_iter().map(|z| z / n).collect())
}

/// Rotation by `phi` taking `v` towards `w`, identity on their orthocomplement.
fn plane_rotation(v: &[C64], w: &[C64], phi: f64) -> ComplexMatrix {
    let n = v.len();
    let (c, s) = (phi.cos(), phi.sin());
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        let proj = v[i] * v[j].conj() + w[i] * w[j].conj();
        let gen = w[i] * v[j].conj() - v[i] * w[j].conj();
        C64::new(id, 0.0) + proj * (c - 1.0) + gen * s
    });
    ComplexMatrix::new(m).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ck::{PerturbationMagnitude, SubModelBuilder};
    use crate::quantum::ProjectiveDecomposition;

    fn z_model(eps: f64) -> FiniteSubModel {
        FiniteSubModel::from_decompositions(vec![ProjectiveDecomposition::computational(2).into()], eps, 0).unwrap()
    }

    #[test]
    fn witness_matches_closed_form_on_a_qubit() {
        let w = demonstrate_breakdown(&z_model(0.5), 20_000, 1).unwrap();
        let phi = (0.5 / 2f64.sqrt()).asin();
        assert!((w.angle - phi).abs() < 1e-5);
        assert!((w.predicted_tv - phi.sin()).abs() < 1e-5);
        assert!(w.sigma > 0.0);
        assert!(w.agrees_within(3.0));
        assert!(w.respects_bounds());
        assert!(w.distance < 0.5);
    }

    #[test]
    fn mismatched_expectation_gives_gap_one() {
        let model = z_model(0.1);
        let prep = Preparation {
            state: QuantumState::basis(2, 0),
            target: ProjectiveDecomposition::computational(2).into(),
            expected: 1,
        };
        let c = calibrate_precision(&model, &[prep], 1000, 0).unwrap();
        assert_eq!(c[0].gap, 1.0);
        assert_eq!(c[0].target_probability, 0.0);
    }

    #[test]
    fn gap_follows_half_delta_squared() {
        let target: Decomposition = ProjectiveDecomposition::computational(3).into();
        for delta in [0.02, 0.1, 0.3] {
            let model = SubModelBuilder::new(1.0, 8)
                .magnitude(PerturbationMagnitude::Exact(delta))
                .build(std::slice::from_ref(&target))
                .unwrap();
            let prep = Preparation { state: QuantumState::basis(3, 0), target: target.clone(), expected: 0 };
            let c = &calibrate_precision(&model, &[prep], 10, 0).unwrap()[0];
            assert!(c.predicted_gap <= delta * delta / 2.0 + 1e-12);
        }
    }
}
