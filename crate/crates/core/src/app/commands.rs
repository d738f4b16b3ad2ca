use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CatalogueSource, Command, EngineKind, InteriorKind, RunConfig};
use crate::ck::{
    best_alignment, build_submodel, demonstrate_breakdown, measure_sequence, model_distribution, record_for,
    FiniteSubModel, HiddenStateSampler, MeasurementRecord,
};
use crate::error::{Error, Result};
use crate::experiments::{run_scenario_with_records, write_frequency_csv, Engine, PhiPlusScenario, Protocol};
use crate::gz::{gz_colour, parse_rational, reduce, verify};
use crate::ks::{builtin, certify, load_catalogue, validate_ks_colouring, Colouring, KsVerdict, VectorSet};
use crate::quantum::{
    born_probabilities, Decomposition, DecompositionDocument, ProjectiveDecomposition, QuantumState, Resolution,
    StateDocument,
};
use crate::sbz::{cyclic_schedule, run_box, sbz_verdict, BlackBox, Interior};
use crate::seeds::{self, stream};

/// Extra file written next to the run log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

/// Result of executing a [`RunConfig`]: a record stream, a summary and artifacts.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub records: Vec<String>,
    pub summary: Value,
    pub artifacts: Vec<Artifact>,
}

fn lines<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<Vec<String>> {
    items.into_iter().map(|x| Ok(serde_json::to_string(&x)?)).collect()
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e))
}

pub fn load_catalogue_source(src: &CatalogueSource, tol: f64) -> Result<VectorSet> {
    match src {
        CatalogueSource::Builtin(name) => {
            builtin(name).ok_or_else(|| Error::InvalidArgument(format!("no shipped catalogue named {name:?}")))
        }
        CatalogueSource::File(path) => load_catalogue(path, tol),
    }
}

pub fn load_targets(path: &Path, tol: f64) -> Result<Vec<Decomposition>> {
    let docs: Vec<DecompositionDocument> = parse_file(path)?;
    if docs.is_empty() {
        return Err(Error::Empty("targets file"));
    }
    docs.into_iter().map(|d| d.into_decomposition(tol)).collect()
}

pub fn load_state(path: &Path, tol: f64) -> Result<QuantumState> {
    parse_file::<StateDocument>(path)?.into_state(tol)
}

pub fn load_model(path: &Path) -> Result<FiniteSubModel> {
    parse_file(path)
}

pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let tol = config.tol;
    match &config.command {
        Command::KsSearch { catalogue } => ks_search(&load_catalogue_source(catalogue, tol)?, tol),
        Command::KsCheck { catalogue, colouring } => {
            let set = load_catalogue_source(catalogue, tol)?;
            let colouring: Colouring = parse_file(colouring)?;
            ks_check(&set, &colouring, tol)
        }
        Command::GzColour { components } => gz_colour_cmd(components),
        Command::GzVerify { max_component } => gz_verify(*max_component),
        Command::CkBuild { targets, epsilon, copies } => {
            ck_build(&load_targets(targets, tol)?, *epsilon, *copies, config.seed)
        }
        Command::CkRun { targets, state, model, epsilon, sequential } => {
            let targets = load_targets(targets, tol)?;
            let state = load_state(state, tol)?;
            let model = match model {
                Some(p) => load_model(p)?,
                None => build_submodel(&targets, *epsilon, config.seed)?,
            };
            ck_run(&model, &state, &targets, config.shots, config.seed, *sequential)
        }
        Command::CkBreakdown { model, epsilon } => {
            let model = match model {
                Some(p) => load_model(p)?,
                None => FiniteSubModel::from_decompositions(
                    vec![ProjectiveDecomposition::computational(2).into()],
                    *epsilon,
                    config.seed,
                )?,
            };
            ck_breakdown(&model, config.shots, config.seed)
        }
        Command::SbzRun { interior, catalogue, rounds, jitter, epsilon, confidence, crosstalk } => {
            let set = load_catalogue_source(catalogue, tol)?;
            let dim = set.dim();
            let interior = match interior {
                InteriorKind::Ck => Interior::Ck { epsilon: *epsilon, state: QuantumState::maximally_mixed(dim) },
                InteriorKind::Oracle => Interior::Oracle { state: QuantumState::maximally_mixed(dim) },
                InteriorKind::Toy => Interior::Toy { p: 0.5 },
            };
            let bx = BlackBox::new(interior, set, *jitter, config.seed)?.crosstalk(*crosstalk);
            sbz_run(&bx, *rounds, *confidence)
        }
        Command::ExpPhiplus { engine, jitter, epsilon, hlzpg_reduced } => {
            let engine = match engine {
                EngineKind::Oracle => Engine::Oracle,
                EngineKind::Ck => Engine::Ck { epsilon: *epsilon },
            };
            let protocol = if *hlzpg_reduced { Protocol::HlzpgReduced } else { Protocol::Full };
            let s = PhiPlusScenario::new(engine, config.shots, config.seed).jitter(*jitter).protocol(protocol);
            exp_phiplus(&s)
        }
    }
}

fn ks_search(set: &VectorSet, tol: f64) -> Result<RunOutput> {
    let (_, cert) = certify(set, tol)?;
    let summary = json!({
        "catalogue": cert.name,
        "dim": cert.dim,
        "vectors": cert.vectors,
        "bases": cert.bases,
        "verdict": if cert.is_uncolourable() { "uncolourable" } else { "colourable" },
        "explored_nodes": cert.search.explored_nodes(),
        "exhaustive_colourings": cert.exhaustive_colourings,
    });
    Ok(RunOutput { records: lines([&cert])?, summary, artifacts: vec![] })
}

fn ks_check(set: &VectorSet, colouring: &Colouring, tol: f64) -> Result<RunOutput> {
    let structure = crate::ks::build_orthogonality(set, tol);
    let verdict = validate_ks_colouring(&structure, colouring)?;
    let violated = match &verdict {
        KsVerdict::Valid => vec![],
        KsVerdict::Violations(v) => v.clone(),
    };
    let summary = json!({
        "catalogue": set.name(),
        "bases": structure.bases().len(),
        "valid": verdict.is_valid(),
        "violated_bases": violated.len(),
    });
    let records = lines(violated.iter().map(|b| json!({ "violated_basis": b })))?;
    Ok(RunOutput { records, summary, artifacts: vec![] })
}

fn gz_colour_cmd(components: &[String; 3]) -> Result<RunOutput> {
    let raw = [parse_rational(&components[0])?, parse_rational(&components[1])?, parse_rational(&components[2])?];
    let v = reduce(&raw)?;
    let rec = json!({
        "components": v.components(),
        "norm": v.norm(),
        "odd_position": v.odd_position(),
        "colour": gz_colour(&v),
    });
    Ok(RunOutput { records: lines([&rec])?, summary: rec, artifacts: vec![] })
}

fn gz_verify(max_component: i64) -> Result<RunOutput> {
    if !(1..=1000).contains(&max_component) {
        return Err(Error::InvalidArgument(format!("max component {max_component} outside 1..=1000")));
    }
    let v = verify(max_component);
    let summary = serde_json::to_value(&v)?;
    Ok(RunOutput { records: lines([&v])?, summary, artifacts: vec![] })
}

fn ck_build(targets: &[Decomposition], epsilon: f64, copies: usize, seed: u64) -> Result<RunOutput> {
    let model = crate::ck::SubModelBuilder::new(epsilon, seed).copies(copies).build(targets)?;
    let records = lines((0..model.len()).map(|i| {
        let target = i / copies;
        let (alignment, distance) = best_alignment(targets[target].operators(), model.decomposition(i).operators());
        json!({ "index": i, "target": target, "alignment": alignment, "distance": distance })
    }))?;
    let summary = json!({
        "dim": model.dim(),
        "kind": model.kind(),
        "decompositions": model.len(),
        "epsilon_r": model.epsilon(),
        "build_seed": model.build_seed(),
    });
    let mut bytes = serde_json::to_vec_pretty(&model)?;
    bytes.push(b'\n');
    Ok(RunOutput { records, summary, artifacts: vec![Artifact { name: "model.json", bytes }] })
}

#[derive(Serialize)]
struct CkRecord<'a> {
    shot: u64,
    target: usize,
    #[serde(flatten)]
    record: &'a MeasurementRecord,
}

fn ck_run(
    model: &FiniteSubModel,
    state: &QuantumState,
    targets: &[Decomposition],
    shots: u64,
    seed: u64,
    sequential: bool,
) -> Result<RunOutput> {
    let per_shot: Vec<Vec<MeasurementRecord>> = if sequential {
        (0..shots)
            .into_par_iter()
            .map(|s| measure_sequence(model, state, targets, seeds::derive(seed, stream::SHOT, s)))
            .collect::<Result<_>>()?
    } else {
        let hits = targets.iter().map(|t| model.lookup(t)).collect::<Result<Vec<_>>>()?;
        let sampler = HiddenStateSampler::new(model, state)?;
        (0..shots)
            .into_par_iter()
            .map(|s| {
                let hidden = sampler.sample(seeds::derive(seed, stream::SHOT, s));
                targets.iter().zip(&hits).map(|(t, h)| record_for(model, &hidden, t, h)).collect()
            })
            .collect::<Result<_>>()?
    };
    let mut records = Vec::with_capacity(per_shot.len() * targets.len());
    let mut counts: Vec<Vec<u64>> = targets.iter().map(|t| vec![0; t.len()]).collect();
    for (s, recs) in per_shot.iter().enumerate() {
        for (t, r) in recs.iter().enumerate() {
            counts[t][r.outcome_index] += 1;
            records.push(serde_json::to_string(&CkRecord { shot: s as u64, target: t, record: r })?);
        }
    }
    let per_target = targets
        .iter()
        .enumerate()
        .map(|(t, target)| {
            let freq: Vec<f64> = counts[t].iter().map(|&c| c as f64 / shots as f64).collect();
            let mut entry = json!({
                "target": t,
                "counts": counts[t],
                "frequencies": freq,
                "born_on_target": born_probabilities(state, target)?,
            });
            if !sequential || t == 0 {
                let (hit, dist) = model_distribution(model, state, target)?;
                entry["matched_index"] = json!(hit.index);
                entry["model_distribution"] = json!(dist);
            }
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = json!({
        "shots": shots,
        "sequential": sequential,
        "epsilon_r": model.epsilon(),
        "build_seed": model.build_seed(),
        "targets": per_target,
    });
    Ok(RunOutput { records, summary, artifacts: vec![] })
}

fn ck_breakdown(model: &FiniteSubModel, shots: u64, seed: u64) -> Result<RunOutput> {
    let w = demonstrate_breakdown(model, shots, seed)?;
    let summary = json!({
        "epsilon_r": w.epsilon,
        "matched_index": w.matched_index,
        "angle": w.angle,
        "distance": w.distance,
        "predicted_tv": w.predicted_tv,
        "empirical_tv": w.empirical_tv,
        "sigma": w.sigma,
        "operator_bound": w.operator_bound,
        "epsilon_bound": w.epsilon_bound,
        "agrees_within_3_sigma": w.agrees_within(3.0),
        "respects_bounds": w.respects_bounds(),
    });
    Ok(RunOutput { records: lines([&w])?, summary, artifacts: vec![] })
}

fn sbz_run(bx: &BlackBox, rounds: u64, confidence: f64) -> Result<RunOutput> {
    let schedule = cyclic_schedule(bx.family(), rounds as usize);
    let t = run_box(bx, &schedule)?;
    let verdict = sbz_verdict(&t, confidence)?;
    let summary = json!({
        "interior": t.interior,
        "catalogue": t.catalogue.name(),
        "knobs": bx.knobs(),
        "jitter_sigma": t.jitter_sigma,
        "model_epsilon_r": bx.model().map(|m| m.epsilon()),
        "triad_list": t.triad_list,
        "verdict": verdict,
    });
    Ok(RunOutput { records: lines(&t.rounds)?, summary, artifacts: vec![] })
}

fn exp_phiplus(s: &PhiPlusScenario) -> Result<RunOutput> {
    let (report, shots) = run_scenario_with_records(s)?;
    let mut csv = Vec::new();
    write_frequency_csv(&report, &mut csv)?;
    Ok(RunOutput {
        records: lines(&shots)?,
        summary: serde_json::to_value(&report)?,
        artifacts: vec![Artifact { name: "frequencies.csv", bytes: csv }],
    })
}
