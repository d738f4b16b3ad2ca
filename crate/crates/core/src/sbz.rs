//! The knob-setting black-box test.
//!
//! A box has one knob per dimension of its catalogue. Each round the analyzer
//! sets the knobs to the directions of one basis from the catalogue's family
//! and receives one bit per knob. The analyzer only sees settings and bits.
//! If the family is KS-uncolourable and the fraction `ε` of rounds whose bits
//! are not "one 1, rest 0" is below `1/N` for `N` bases, no model in which each
//! knob's bit depends only on its own setting reproduces the statistics.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::ck::{build_submodel, record_for, FiniteSubModel, HiddenStateSampler};
use crate::error::{Error, Result};
use crate::ks::{build_orthogonality, search_bases, SearchOutcome, VectorSet};
use crate::quantum::{born_probabilities, ComplexMatrix, Decomposition, ProjectiveDecomposition, QuantumState};
use crate::seeds::{self, stream};
use crate::stats::{clopper_pearson_lower, clopper_pearson_upper};
use crate::DEFAULT_TOL;

/// What sits inside the box.
#[derive(Clone, Debug)]
pub enum Interior {
    /// Born sampling on the orthonormalized jittered directions.
    Oracle { state: QuantumState },
    /// A sub-model built from the family's bases; a fresh hidden state per round.
    Ck { epsilon: f64, state: QuantumState },
    /// Every knob independently reports 1 with probability `p`.
    Toy { p: f64 },
}

impl Interior {
    pub fn name(&self) -> &'static str {
        match self {
            Interior::Oracle { .. } => "oracle",
            Interior::Ck { .. } => "ck",
            Interior::Toy { .. } => "toy",
        }
    }
}

/// Directions for each knob, as indices into the box's catalogue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnobSetting {
    pub directions: Vec<usize>,
}

impl KnobSetting {
    pub fn new(directions: Vec<usize>) -> Self {
        Self { directions }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Round {
    pub setting: Vec<usize>,
    pub bits: Vec<u8>,
    /// `‖Q − M‖_F` between jittered directions `M` and their orthonormal replacement `Q`.
    pub correction: f64,
}

impl Round {
    pub fn is_standard(&self) -> bool {
        self.bits.iter().filter(|&&b| b == 1).count() == 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlackBoxTranscript {
    pub interior: &'static str,
    pub jitter_sigma: f64,
    pub seed: u64,
    pub catalogue: VectorSet,
    pub triad_list: Vec<Vec<usize>>,
    pub rounds: Vec<Round>,
}

/// Boxed measurement process over a catalogue's family of orthogonal bases.
pub struct BlackBox {
    interior: Interior,
    jitter_sigma: f64,
    seed: u64,
    /// Probability per round that a classical mechanism overrides the bits,
    /// putting the 1 on the knob with the lowest direction index.
    crosstalk: f64,
    catalogue: VectorSet,
    family: Vec<Vec<usize>>,
    ck: Option<(FiniteSubModel, HiddenStateSampler)>,
}

impl BlackBox {
    /// A box whose knob family is every orthogonal basis of `catalogue`.
    pub fn new(interior: Interior, catalogue: VectorSet, jitter_sigma: f64, seed: u64) -> Result<Self> {
        let family = build_orthogonality(&catalogue, DEFAULT_TOL).bases().to_vec();
        Self::with_family(interior, catalogue, family, jitter_sigma, seed)
    }

    pub fn with_family(
        interior: Interior,
        catalogue: VectorSet,
        family: Vec<Vec<usize>>,
        jitter_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Empty("knob family"));
        }
        if !(jitter_sigma >= 0.0 && jitter_sigma.is_finite()) {
            return Err(Error::InvalidArgument("jitter must be a finite non-negative number".into()));
        }
        let dim = catalogue.dim();
        for b in &family {
            if b.len() != dim || b.iter().any(|&i| i >= catalogue.len()) {
                return Err(Error::InvalidArgument(format!("family entry {b:?} is not a basis of the catalogue")));
            }
        }
        let ck = match &interior {
            Interior::Ck { epsilon, state } => {
                let targets = family.iter().map(|b| basis_decomposition(&catalogue, b)).collect::<Result<Vec<_>>>()?;
                let model = build_submodel(&targets, *epsilon, seeds::derive(seed, stream::BUILD, 0))?;
                let sampler = HiddenStateSampler::new(&model, state)?;
                Some((model, sampler))
            }
            Interior::Oracle { state } if state.dim() != dim => {
                return Err(Error::DimensionMismatch { expected: dim, found: state.dim() })
            }
            Interior::Toy { p } if !(0.0..=1.0).contains(p) => {
                return Err(Error::InvalidArgument(format!("toy probability {p} outside [0, 1]")))
            }
            _ => None,
        };
        Ok(Self { interior, jitter_sigma, seed, crosstalk: 0.0, catalogue, family, ck })
    }

    pub fn crosstalk(mut self, probability: f64) -> Self {
        self.crosstalk = probability;
        self
    }

    pub fn knobs(&self) -> usize {
        self.catalogue.dim()
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn catalogue(&self) -> &VectorSet {
        &self.catalogue
    }

    pub fn model(&self) -> Option<&FiniteSubModel> {
        self.ck.as_ref().map(|(m, _)| m)
    }

    fn check_setting(&self, s: &KnobSetting) -> Result<()> {
        if s.directions.len() != self.knobs() {
            return Err(Error::InvalidArgument(format!(
                "setting has {} directions for {} knobs",
                s.directions.len(),
                self.knobs()
            )));
        }
        for (k, &d) in s.directions.iter().enumerate() {
            if s.directions[..k].contains(&d) {
                return Err(Error::DegenerateSetting(d));
            }
        }
        let mut sorted = s.directions.clone();
        sorted.sort_unstable();
        if !self.family.iter().any(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b == sorted
        }) {
            return Err(Error::SettingNotInFamily(s.directions.clone()));
        }
        Ok(())
    }

    fn round(&self, index: u64, setting: &KnobSetting) -> Result<Round> {
        let mut rng = seeds::rng(seeds::derive(self.seed, stream::BOX, index));
        let (basis, correction) = self.jittered_basis(&setting.directions, &mut rng);
        let n = self.knobs();
        let mut bits = vec![0u8; n];
        match &self.interior {
            Interior::Toy { p } => bits.iter_mut().for_each(|b| *b = u8::from(rng.random::<f64>() < *p)),
            Interior::Oracle { state } => {
                let probs = born_probabilities(state, &basis)?;
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let last = probs.iter().rposition(|&x| x > 0.0).unwrap_or(n - 1);
                let k = probs.iter().position(|&x| {
                    acc += x;
                    u < acc
                });
                bits[k.unwrap_or(last).min(last)] = 1;
            }
            Interior::Ck { .. } => {
                let (model, sampler) = self.ck.as_ref().expect("built with the interior");
                let hidden = sampler.sample(rng.random());
                let target = Decomposition::from(basis);
                let hit = model.lookup(&target)?;
                bits[record_for(model, &hidden, &target, &hit)?.outcome_index] = 1;
            }
        }
        if self.crosstalk > 0.0 && rng.random::<f64>() < self.crosstalk {
            let k = (0..n).min_by_key(|&k| setting.directions[k]).expect("at least one knob");
            bits = (0..n).map(|j| u8::from(j == k)).collect();
        }
        Ok(Round { setting: setting.directions.clone(), bits, correction })
    }

    /// Jittered knob directions replaced by the nearest orthonormal set `U Vᵀ`.
    fn jittered_basis<R: Rng>(&self, directions: &[usize], rng: &mut R) -> (ProjectiveDecomposition, f64) {
        let n = self.knobs();
        let m = DMatrix::<f64>::from_fn(n, n, |i, k| {
            let v = self.catalogue.unit_vector(directions[k]);
            v[i]
        });
        let m = if self.jitter_sigma > 0.0 {
            let mut j = m.clone();
            for k in 0..n {
                let mut col = j.column_mut(k);
                for i in 0..n {
                    col[i] += self.jitter_sigma * rng.sample::<f64, _>(StandardNormal);
                }
                let norm = col.norm();
                col /= norm;
            }
            j
        } else {
            m
        };
        let q = nearest_orthonormal(&m);
        let correction = (&q - &m).norm();
        let vectors: Vec<Vec<f64>> = (0..n).map(|k| q.column(k).iter().copied().collect()).collect();
        let projectors = vectors.iter().map(|v| ComplexMatrix::projector_onto_real(v).expect("unit column")).collect();
        let labels = directions.iter().map(|&d| crate::quantum::Label::Real(d as f64)).collect();
        (ProjectiveDecomposition::from_parts_unchecked(projectors, labels), correction)
    }
}

/// Polar factor `U Vᵀ` of `M = U Σ Vᵀ`.
pub fn nearest_orthonormal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    u * v_t
}

fn basis_decomposition(catalogue: &VectorSet, basis: &[usize]) -> Result<Decomposition> {
    let vectors: Vec<Vec<f64>> = basis.iter().map(|&i| catalogue.unit_vector(i).to_vec()).collect();
    let labels = basis.iter().map(|&i| crate::quantum::Label::Real(i as f64)).collect();
    Ok(ProjectiveDecomposition::from_real_basis(&vectors, Some(labels))?.into())
}

/// Round `r` uses `family[r mod N]`, in the family's own knob order.
pub fn cyclic_schedule(family: &[Vec<usize>], rounds: usize) -> Vec<KnobSetting> {
    (0..rounds).map(|r| KnobSetting::new(family[r % family.len()].clone())).collect()
}

pub fn run_box(bx: &BlackBox, schedule: &[KnobSetting]) -> Result<BlackBoxTranscript> {
    if schedule.is_empty() {
        return Err(Error::Empty("settings schedule"));
    }
    for s in schedule {
        bx.check_setting(s)?;
    }
    let rounds = schedule.iter().enumerate().map(|(i, s)| bx.round(i as u64, s)).collect::<Result<Vec<_>>>()?;
    Ok(BlackBoxTranscript {
        interior: bx.interior.name(),
        jitter_sigma: bx.jitter_sigma,
        seed: bx.seed,
        catalogue: bx.catalogue.clone(),
        triad_list: bx.family.clone(),
        rounds,
    })
}

/// `(non-standard rounds, total rounds)`.
pub fn count_non_standard(t: &BlackBoxTranscript) -> (u64, u64) {
    let bad = t.rounds.iter().filter(|r| !r.is_standard()).count() as u64;
    (bad, t.rounds.len() as u64)
}

/// Fraction of rounds that are not exactly one 1 and the rest 0.
pub fn compute_epsilon(t: &BlackBoxTranscript) -> f64 {
    let (k, n) = count_non_standard(t);
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SbzContextual,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SbzVerdict {
    pub non_standard: u64,
    pub rounds: u64,
    pub epsilon_hat: f64,
    pub n_triads: usize,
    pub threshold: f64,
    pub confidence_level: f64,
    /// One-sided Clopper-Pearson bounds on ε at `confidence_level`.
    pub lower: f64,
    pub upper: f64,
    pub verdict: Verdict,
}

/// Verdict from counts alone; the family must already be known to be uncolourable.
pub fn verdict_from_counts(non_standard: u64, rounds: u64, n_triads: usize, level: f64) -> SbzVerdict {
    let threshold = 1.0 / n_triads as f64;
    let upper = clopper_pearson_upper(non_standard, rounds, level);
    SbzVerdict {
        non_standard,
        rounds,
        epsilon_hat: non_standard as f64 / rounds as f64,
        n_triads,
        threshold,
        confidence_level: level,
        lower: clopper_pearson_lower(non_standard, rounds, level),
        upper,
        verdict: if upper < threshold { Verdict::SbzContextual } else { Verdict::Inconclusive },
    }
}

pub fn sbz_verdict(t: &BlackBoxTranscript, level: f64) -> Result<SbzVerdict> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    if t.rounds.is_empty() {
        return Err(Error::Empty("transcript"));
    }
    if let SearchOutcome::Found { .. } = search_bases(t.catalogue.len(), &t.triad_list) {
        return Err(Error::VacuousFamily);
    }
    let (k, n) = count_non_standard(t);
    Ok(verdict_from_counts(k, n, t.triad_list.len(), level))
}
