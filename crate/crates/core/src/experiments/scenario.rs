use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contexts::{build_contexts, phi_plus, Context, Observable};
use super::valuation::extends_to_global;
use crate::ck::{build_submodel, record_for, FiniteSubModel, HiddenStateSampler, LookupMatch};
use crate::error::{Error, Result};
use crate::quantum::{
    born_probabilities, random_unitary_near_identity, Decomposition, Label, QuantumState, Resolution,
};
use crate::seeds::{self, stream};
use crate::stats::total_variation;

const CHUNK: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Engine {
    /// Direct Born sampling of each (possibly jittered) target.
    Oracle,
    /// A sub-model built from the five contexts with precision `epsilon`.
    Ck { epsilon: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// All five joint measurements.
    #[default]
    Full,
    /// Only `(X1,X2)` and `(Z1X2,X1Z2)`; the `Z1Z2` correlation is taken from the preparation.
    HlzpgReduced,
}

impl Protocol {
    pub fn context_indices(self) -> &'static [usize] {
        match self {
            Protocol::Full => &[0, 1, 2, 3, 4],
            Protocol::HlzpgReduced => &[3, 4],
        }
    }
}

/// The φ+ experiment: each shot measures every context of the protocol once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiPlusScenario {
    pub shots: u64,
    /// Scale of the per-shot apparatus unitary `cayley(σ H)`, `‖H‖_F = 1`.
    pub jitter_sigma: f64,
    pub engine: Engine,
    pub protocol: Protocol,
    pub seed: u64,
}

impl PhiPlusScenario {
    pub fn new(engine: Engine, shots: u64, seed: u64) -> Self {
        Self { shots, jitter_sigma: 0.0, engine, protocol: Protocol::Full, seed }
    }

    pub fn jitter(mut self, sigma: f64) -> Self {
        self.jitter_sigma = sigma;
        self
    }

    pub fn protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueTable {
    pub observable: Observable,
    pub plus: f64,
    pub minus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextReport {
    pub name: String,
    pub labels: Vec<Label>,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// Mean over shots of the engine's exact outcome distribution
    /// (Born on the matched decomposition for the sub-model).
    pub expected: Vec<f64>,
    /// Born distribution of the ideal, unjittered context.
    pub quantum: Vec<f64>,
    pub value_tables: Vec<ValueTable>,
    /// Shots whose product value differs from the product of its factors.
    pub within_context_violations: u64,
    pub tv_to_quantum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Headline {
    pub p_z1_eq_z2: f64,
    /// True when `(Z1,Z2)` was not measured and the value is the preparation's.
    pub z1z2_assumed: bool,
    pub p_x1_eq_x2: f64,
    pub p_z1x2_opposite_x1z2: f64,
    /// `E[Z1Z2] + E[X1X2] − E[Z1X2 · X1Z2]`; at most 1 for any global valuation, 3 for φ+.
    pub witness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSummary {
    pub epsilon_r: f64,
    pub build_seed: u64,
    pub decompositions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub scenario: PhiPlusScenario,
    pub model: Option<ModelSummary>,
    pub contexts: Vec<ContextReport>,
    pub headline: Headline,
    /// Shots where `V(Z1Z2) V(X1X2) ≠ V(Z1X2) V(X1Z2)` across contexts.
    pub cross_context_product_violations: u64,
    /// Shots whose outcomes in all measured contexts extend to one global valuation.
    pub globally_consistent_shots: u64,
    pub max_tv_to_quantum: f64,
}

/// Per-shot outcomes in the order of the protocol's contexts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: u64,
    pub outcomes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched: Option<Vec<usize>>,
}

pub fn run_scenario(s: &PhiPlusScenario) -> Result<CorrelationReport> {
    run_scenario_with_records(s).map(|(r, _)| r)
}

pub fn run_scenario_with_records(s: &PhiPlusScenario) -> Result<(CorrelationReport, Vec<ShotRecord>)> {
    let runner = Runner::new(s)?;
    let n_chunks = s.shots.div_ceil(CHUNK);
    let parts: Vec<(Tally, Vec<ShotRecord>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::new(&runner);
            let mut records = Vec::new();
            for shot in c * CHUNK..((c + 1) * CHUNK).min(s.shots) {
                records.push(runner.shot(shot, &mut tally)?);
            }
            Ok((tally, records))
        })
        .collect::<Result<_>>()?;
    let mut total = Tally::new(&runner);
    let mut records = Vec::with_capacity(s.shots as usize);
    for (t, r) in parts {
        total.merge(&t);
        records.extend(r);
    }
    Ok((runner.report(total), records))
}

struct Runner<'a> {
    scenario: &'a PhiPlusScenario,
    state: QuantumState,
    contexts: Vec<Context>,
    run: &'static [usize],
    quantum: Vec<Vec<f64>>,
    ck: Option<(FiniteSubModel, HiddenStateSampler)>,
    /// Lookups and exact engine distributions for unjittered targets.
    fixed: Vec<Option<(Option<LookupMatch>, Vec<f64>)>>,
}

impl<'a> Runner<'a> {
    fn new(scenario: &'a PhiPlusScenario) -> Result<Self> {
        if scenario.shots == 0 {
            return Err(Error::InvalidArgument("shots must be positive".into()));
        }
        if !(scenario.jitter_sigma >= 0.0 && scenario.jitter_sigma.is_finite()) {
            return Err(Error::InvalidArgument("jitter must be a finite non-negative number".into()));
        }
        let state = phi_plus();
        let contexts = build_contexts();
        let quantum =
            contexts.iter().map(|c| born_probabilities(&state, &c.decomposition)).collect::<Result<Vec<_>>>()?;
        let ck = match scenario.engine {
            Engine::Oracle => None,
            Engine::Ck { epsilon } => {
                let targets: Vec<Decomposition> = contexts.iter().map(|c| c.decomposition.clone().into()).collect();
                let model = build_submodel(&targets, epsilon, seeds::derive(scenario.seed, stream::BUILD, 0))?;
                let sampler = HiddenStateSampler::new(&model, &state)?;
                Some((model, sampler))
            }
        };
        let mut runner = Self {
            scenario,
            state,
            contexts,
            run: scenario.protocol.context_indices(),
            quantum,
            ck,
            fixed: Vec::new(),
        };
        if scenario.jitter_sigma == 0.0 {
            runner.fixed = (0..runner.contexts.len())
                .map(|ci| {
                    let target: Decomposition = runner.contexts[ci].decomposition.clone().into();
                    runner.distribution(&target).map(Some)
                })
                .collect::<Result<_>>()?;
        } else {
            runner.fixed = vec![None; runner.contexts.len()];
        }
        Ok(runner)
    }

    fn distribution(&self, target: &Decomposition) -> Result<(Option<LookupMatch>, Vec<f64>)> {
        match &self.ck {
            None => Ok((None, born_probabilities(&self.state, target)?)),
            Some((model, _)) => {
                let hit = model.lookup(target)?;
                let p = born_probabilities(&self.state, model.decomposition(hit.index))?;
                let dist = hit.alignment.iter().map(|&k| p[k]).collect();
                Ok((Some(hit), dist))
            }
        }
    }

    fn shot(&self, shot: u64, tally: &mut Tally) -> Result<ShotRecord> {
        let sigma = self.scenario.jitter_sigma;
        let mut jitter_rng = seeds::rng(seeds::derive(self.scenario.seed, stream::JITTER, shot));
        let mut shot_rng = seeds::rng(seeds::derive(self.scenario.seed, stream::SHOT, shot));
        let hidden =
            self.ck.as_ref().map(|(_, sampler)| sampler.sample(seeds::derive(self.scenario.seed, stream::SHOT, shot)));

        let mut outcomes = Vec::with_capacity(self.run.len());
        let mut matched = Vec::with_capacity(self.run.len());
        for (slot, &ci) in self.run.iter().enumerate() {
            let ctx = &self.contexts[ci];
            let jittered;
            let computed;
            let (target, (hit, dist)): (&Decomposition, &(Option<LookupMatch>, Vec<f64>)) = match &self.fixed[ci] {
                Some(f) if sigma == 0.0 => {
                    jittered = Decomposition::from(ctx.decomposition.clone());
                    (&jittered, f)
                }
                _ => {
                    let u = random_unitary_near_identity(4, sigma, &mut jitter_rng);
                    jittered = Decomposition::from(ctx.decomposition.clone()).conjugated(&u)?;
                    computed = self.distribution(&jittered)?;
                    (&jittered, &computed)
                }
            };
            let outcome = match (&self.ck, &hidden, hit) {
                (Some((model, _)), Some(h), Some(hit)) => {
                    let rec = record_for(model, h, target, hit)?;
                    matched.push(rec.matched_index);
                    rec.outcome_index
                }
                _ => sample_index(dist, shot_rng.random()),
            };
            tally.counts[slot][outcome] += 1;
            for (e, p) in tally.expected[slot].iter_mut().zip(dist) {
                *e += p;
            }
            if let [a, b, ab] = ctx.values[outcome][..] {
                if ab != a * b {
                    tally.within[slot] += 1;
                }
            }
            outcomes.push(outcome);
        }

        let per_context: Vec<Option<usize>> = (0..self.contexts.len())
            .map(|ci| self.run.iter().position(|&r| r == ci).map(|slot| outcomes[slot]))
            .collect();
        if extends_to_global(&self.contexts, &per_context) {
            tally.consistent += 1;
        }
        let value = |ci: usize, o: Observable| per_context[ci].and_then(|j| self.contexts[ci].value(j, o));
        let z1z2 = value(0, Observable::Z1Z2).unwrap_or(1);
        if let (Some(x1x2), Some(z1x2), Some(x1z2)) =
            (value(3, Observable::X1X2), value(4, Observable::Z1X2), value(4, Observable::X1Z2))
        {
            if z1z2 * x1x2 != z1x2 * x1z2 {
                tally.cross += 1;
            }
        }
        Ok(ShotRecord { shot, outcomes, matched: self.ck.as_ref().map(|_| matched) })
    }

    fn report(&self, t: Tally) -> CorrelationReport {
        let n = self.scenario.shots as f64;
        let contexts: Vec<ContextReport> = self
            .run
            .iter()
            .enumerate()
            .map(|(slot, &ci)| {
                let ctx = &self.contexts[ci];
                let frequencies: Vec<f64> = t.counts[slot].iter().map(|&c| c as f64 / n).collect();
                let value_tables = ctx
                    .observables
                    .iter()
                    .map(|&o| {
                        let plus: f64 =
                            (0..ctx.len()).filter(|&j| ctx.value(j, o) == Some(1)).map(|j| frequencies[j]).sum();
                        ValueTable { observable: o, plus, minus: 1.0 - plus }
                    })
                    .collect();
                ContextReport {
                    name: ctx.name.clone(),
                    labels: ctx.decomposition.labels().to_vec(),
                    counts: t.counts[slot].clone(),
                    tv_to_quantum: total_variation(&frequencies, &self.quantum[ci]),
                    frequencies,
                    expected: t.expected[slot].iter().map(|e| e / n).collect(),
                    quantum: self.quantum[ci].clone(),
                    value_tables,
                    within_context_violations: t.within[slot],
                }
            })
            .collect();

        let find = |ci: usize| self.run.iter().position(|&r| r == ci).map(|slot| &contexts[slot]);
        let prob = |ci: usize, pred: &dyn Fn(&[i8]) -> bool| {
            find(ci).map(|c| {
                (0..c.frequencies.len())
                    .filter(|&j| pred(&self.contexts[ci].values[j]))
                    .map(|j| c.frequencies[j])
                    .sum::<f64>()
            })
        };
        let p_zz = prob(0, &|v| v[0] == v[1]);
        let p_xx = prob(3, &|v| v[0] == v[1]).unwrap_or(f64::NAN);
        let p_opp = prob(4, &|v| v[0] == -v[1]).unwrap_or(f64::NAN);
        let corr = |p: f64| 2.0 * p - 1.0;
        let headline = Headline {
            p_z1_eq_z2: p_zz.unwrap_or(1.0),
            z1z2_assumed: p_zz.is_none(),
            p_x1_eq_x2: p_xx,
            p_z1x2_opposite_x1z2: p_opp,
            witness: corr(p_zz.unwrap_or(1.0)) + corr(p_xx) + corr(p_opp),
        };
        let max_tv = contexts.iter().map(|c| c.tv_to_quantum).fold(0.0, f64::max);
        CorrelationReport {
            scenario: self.scenario.clone(),
            model: self.ck.as_ref().map(|(m, _)| ModelSummary {
                epsilon_r: m.epsilon(),
                build_seed: m.build_seed(),
                decompositions: m.len(),
            }),
            contexts,
            headline,
            cross_context_product_violations: t.cross,
            globally_consistent_shots: t.consistent,
            max_tv_to_quantum: max_tv,
        }
    }
}

fn sample_index(p: &[f64], u: f64) -> usize {
    let last = p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1);
    let mut acc = 0.0;
    for (j, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return j.min(last);
        }
    }
    last
}

struct Tally {
    counts: Vec<Vec<u64>>,
    expected: Vec<Vec<f64>>,
    within: Vec<u64>,
    cross: u64,
    consistent: u64,
}

impl Tally {
    fn new(r: &Runner<'_>) -> Self {
        let k = r.run.len();
        Self {
            counts: vec![vec![0; 4]; k],
            expected: vec![vec![0.0; 4]; k],
            within: vec![0; k],
            cross: 0,
            consistent: 0,
        }
    }

    fn merge(&mut self, o: &Tally) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.expected.iter_mut().zip(&o.expected) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.within.iter_mut().zip(&o.within).for_each(|(x, y)| *x += y);
        self.cross += o.cross;
        self.consistent += o.consistent;
    }
}

/// Frequency table as CSV: `context,outcome,label,count,frequency,expected,quantum`.
pub fn write_frequency_csv<W: Write>(report: &CorrelationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
    w.write_record(["context", "outcome", "label", "count", "frequency", "expected", "quantum"]).map_err(io)?;
    for c in &report.contexts {
        for j in 0..c.counts.len() {
            w.write_record([
                c.name.clone(),
                j.to_string(),
                c.labels[j].to_string(),
                c.counts[j].to_string(),
                c.frequencies[j].to_string(),
                c.expected[j].to_string(),
                c.quantum[j].to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_without_jitter_has_perfect_correlations() {
        let r = run_scenario(&PhiPlusScenario::new(Engine::Oracle, 5000, 1)).unwrap();
        assert_eq!(r.headline.p_z1_eq_z2, 1.0);
        assert_eq!(r.headline.p_x1_eq_x2, 1.0);
        assert_eq!(r.headline.p_z1x2_opposite_x1z2, 1.0);
        assert_eq!(r.headline.witness, 3.0);
        assert_eq!(r.globally_consistent_shots, 0);
        assert_eq!(r.cross_context_product_violations, 5000);
        for c in &r.contexts {
            assert_eq!(c.within_context_violations, 0);
            assert!((c.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_protocol_assumes_z_correlation() {
        let s = PhiPlusScenario::new(Engine::Oracle, 1000, 1).protocol(Protocol::HlzpgReduced);
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.contexts.len(), 2);
        assert!(r.headline.z1z2_assumed);
        assert_eq!(r.headline.witness, 3.0);
    }

    #[test]
    fn same_seed_same_records() {
        let s = PhiPlusScenario::new(Engine::Ck { epsilon: 0.01 }, 3000, 5).jitter(1e-3);
        let (a, ra) = run_scenario_with_records(&s).unwrap();
        let (b, rb) = run_scenario_with_records(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn jitter_beyond_epsilon_is_refused() {
        let s = PhiPlusScenario::new(Engine::Ck { epsilon: 1e-3 }, 10, 5).jitter(0.5);
        assert!(matches!(run_scenario(&s), Err(Error::NoMatch { .. })));
    }

    #[test]
    fn csv_has_a_row_per_outcome() {
        let r = run_scenario(&PhiPlusScenario::new(Engine::Oracle, 100, 1)).unwrap();
        let mut buf = Vec::new();
        write_frequency_csv(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 5 * 4);
    }
}
