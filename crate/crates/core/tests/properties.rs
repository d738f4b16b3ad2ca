use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;

use ncsim::ck::{best_alignment, build_submodel, measure, measure_sequence, HiddenStateSampler};
use ncsim::experiments::{run_scenario, Engine, PhiPlusScenario};
use ncsim::gz::{enumerate_rational_triads, gz_colour, reduce, RationalUnitVector};
use ncsim::ks::validate_operator_colouring;
use ncsim::quantum::{
    born_probabilities, random_unitary_near_identity, ComplexMatrix, Decomposition, ProjectiveDecomposition,
    QuantumState, Resolution, C64,
};
use ncsim::sbz::{verdict_from_counts, Verdict};
use ncsim::seeds;

fn random_basis(dim: usize, seed: u64) -> Decomposition {
    let u = random_unitary_near_identity(dim, 3.0, &mut seeds::rng(seed));
    Decomposition::from(ProjectiveDecomposition::computational(dim)).conjugated(&u).unwrap()
}

fn random_pure(dim: usize, seed: u64) -> QuantumState {
    use rand::Rng;
    let mut rng = seeds::rng(seed);
    let amps: Vec<C64> = (0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    QuantumState::pure_normalized(amps).unwrap()
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut seeds::rng(seed));
    p
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn isqrt_exact(n: i64) -> Option<i64> {
    let r = (n as f64).sqrt().round() as i64;
    (r * r == n).then_some(r)
}

/// Triple-loop oracle: primitive sign-normalized integer directions of rational length.
fn brute_vectors(m: i64) -> Vec<([i64; 3], i64)> {
    let mut out = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            for z in -m..=m {
                if (x, y, z) == (0, 0, 0) || gcd(gcd(x, y), z) != 1 {
                    continue;
                }
                let first = [x, y, z].into_iter().find(|&c| c != 0).unwrap();
                if first < 0 {
                    continue;
                }
                if let Some(n) = isqrt_exact(x * x + y * y + z * z) {
                    out.push(([x, y, z], n));
                }
            }
        }
    }
    out
}

fn brute_triads(m: i64) -> BTreeSet<[[i64; 3]; 3]> {
    let vs = brute_vectors(m);
    let dot = |a: &[i64; 3], b: &[i64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut out = BTreeSet::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if dot(&vs[i].0, &vs[j].0) != 0 {
                continue;
            }
            for k in j + 1..vs.len() {
                if dot(&vs[i].0, &vs[k].0) == 0 && dot(&vs[j].0, &vs[k].0) == 0 {
                    let mut t = [vs[i].0, vs[j].0, vs[k].0];
                    t.sort();
                    out.insert(t);
                }
            }
        }
    }
    out
}

#[test]
fn triad_enumeration_matches_triple_loop() {
    for m in 1..=6 {
        let lib: BTreeSet<[[i64; 3]; 3]> = enumerate_rational_triads(m)
            .iter()
            .map(|t| {
                let mut c = [t[0].components(), t[1].components(), t[2].components()];
                c.sort();
                c
            })
            .collect();
        assert_eq!(lib, brute_triads(m), "max component {m}");
    }
}

#[test]
fn parity_colouring_is_an_operator_colouring_on_every_triad() {
    for t in enumerate_rational_triads(9) {
        let p: Vec<ComplexMatrix> =
            t.iter().map(|v| ComplexMatrix::projector_onto_real(&v.to_f64()).unwrap()).collect();
        let c: Vec<f64> = t.iter().map(|v| gz_colour(v) as f64).collect();
        let pair = p[0].add(&p[1]).unwrap();
        let ops = vec![p[0].clone(), p[1].clone(), p[2].clone(), pair, ComplexMatrix::identity(3)];
        let values = vec![c[0], c[1], c[2], c[0] + c[1], 1.0];
        assert!(validate_operator_colouring(&ops, &values, 1e-9).unwrap().is_valid(), "triad {t:?}");
    }
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alignment_recovers_any_relabelling(dim in 2usize..6, seed in any::<u64>(), pseed in any::<u64>()) {
        let base = random_basis(dim, seed);
        let order = permutation(dim, pseed);
        let relabelled: Decomposition = base.as_projective().unwrap().permuted(&order).into();
        let (alignment, distance) = best_alignment(relabelled.operators(), base.operators());
        prop_assert!(distance < 1e-9);
        for (j, &k) in alignment.iter().enumerate() {
            prop_assert!(relabelled.operators()[j].approx_eq(&base.operators()[k], 1e-9));
        }
    }

    #[test]
    fn lookup_is_first_match_and_within_epsilon(seed in any::<u64>(), eps in 0.01f64..0.2) {
        let targets: Vec<Decomposition> = (0..4).map(|i| random_basis(3, seed.wrapping_add(i))).collect();
        let model = build_submodel(&targets, eps, seed).unwrap();
        for t in &targets {
            let hit = model.lookup(t).unwrap();
            prop_assert!(hit.distance < eps);
            for earlier in 0..hit.index {
                let (_, d) = best_alignment(t.operators(), model.decomposition(earlier).operators());
                prop_assert!(d >= eps);
            }
        }
    }

    #[test]
    fn relabelled_targets_report_the_same_operator(seed in any::<u64>(), pseed in any::<u64>(), shot in any::<u64>()) {
        let target = random_basis(4, seed);
        let model = build_submodel(std::slice::from_ref(&target), 0.05, seed).unwrap();
        let order = permutation(4, pseed);
        let relabelled: Decomposition = target.as_projective().unwrap().permuted(&order).into();
        let hidden = HiddenStateSampler::new(&model, &random_pure(4, seed)).unwrap().sample(shot);
        let a = measure(&model, &hidden, &target).unwrap();
        let b = measure(&model, &hidden, &relabelled).unwrap();
        prop_assert_eq!(a.model_outcome, b.model_outcome);
        prop_assert_eq!(order[b.outcome_index], a.outcome_index);
    }

    #[test]
    fn born_probabilities_form_a_distribution(dim in 2usize..7, seed in any::<u64>()) {
        let p = born_probabilities(&random_pure(dim, seed), &random_basis(dim, !seed)).unwrap();
        prop_assert!(p.iter().all(|&x| x >= -1e-12));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_measurement_after_collapse_agrees(seed in any::<u64>()) {
        let target = random_basis(3, seed);
        let model = build_submodel(std::slice::from_ref(&target), 1e-3, seed).unwrap();
        let recs = measure_sequence(&model, &random_pure(3, seed), &[target.clone(), target], seed).unwrap();
        prop_assert_eq!(recs[0].outcome_index, recs[1].outcome_index);
    }

    #[test]
    fn verdict_is_monotone_in_failures(rounds in 100u64..100_000, k in 0u64..100, n in 2usize..40) {
        let k = k.min(rounds - 1);
        let a = verdict_from_counts(k, rounds, n, 0.999);
        let b = verdict_from_counts(k + 1, rounds, n, 0.999);
        prop_assert!(a.upper <= b.upper);
        if b.verdict == Verdict::SbzContextual {
            prop_assert_eq!(a.verdict, Verdict::SbzContextual);
        }
        prop_assert!(a.lower <= a.epsilon_hat && a.epsilon_hat <= a.upper);
    }

    #[test]
    fn verdict_is_monotone_in_confidence(rounds in 100u64..100_000, k in 0u64..50) {
        let k = k.min(rounds);
        let lo = verdict_from_counts(k, rounds, 9, 0.9);
        let hi = verdict_from_counts(k, rounds, 9, 0.999);
        prop_assert!(lo.upper <= hi.upper + 1e-15);
    }

    #[test]
    fn gz_colour_ignores_sign_and_scale(
        idx in 0usize..1000,
        num in 1i64..50,
        den in 1i64..50,
        negate in any::<bool>(),
    ) {
        let triads = enumerate_rational_triads(12);
        let v: RationalUnitVector = triads[idx % triads.len()][idx % 3];
        let s = if negate { -num } else { num };
        let c = v.components();
        let scaled = [rational(c[0] * s, den), rational(c[1] * s, den), rational(c[2] * s, den)];
        let w = reduce(&scaled).unwrap();
        prop_assert_eq!(w, v);
        prop_assert_eq!(gz_colour(&w), gz_colour(&v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn same_seed_same_report(seed in any::<u64>()) {
        let s = PhiPlusScenario::new(Engine::Ck { epsilon: 1e-3 }, 2_000, seed).jitter(1e-4);
        prop_assert_eq!(run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
    }
}
