use rand::Rng;

use super::model::{shares_operator, FiniteSubModel};
use crate::error::{Error, Result};
use crate::quantum::{random_hermitian, ComplexMatrix, Decomposition, Resolution};
use crate::seeds::{self, stream};
use crate::DEFAULT_TOL;

/// How far each emitted decomposition sits from its target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationMagnitude {
    /// Drawn uniformly from `[0, epsilon/2)` per emitted decomposition.
    Uniform,
    /// Fixed distance; must be below `epsilon/2`.
    Exact(f64),
}

/// Builds a [`FiniteSubModel`] by seeded unitary perturbation of targets.
///
/// Each emitted decomposition is `U d U†` for a Cayley unitary `U` whose scale
/// is tuned by bisection so the max aligned Frobenius distance to the target
/// equals the drawn magnitude. Perturbations that collide with an earlier
/// decomposition are redrawn.
#[derive(Clone, Debug)]
pub struct SubModelBuilder {
    epsilon: f64,
    seed: u64,
    copies: usize,
    magnitude: PerturbationMagnitude,
    max_retries: usize,
}

impl SubModelBuilder {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self { epsilon, seed, copies: 1, magnitude: PerturbationMagnitude::Uniform, max_retries: 16 }
    }

    /// Number of perturbed decompositions emitted per target.
    pub fn copies(mut self, copies: usize) -> Self {
        self.copies = copies;
        self
    }

    pub fn magnitude(mut self, magnitude: PerturbationMagnitude) -> Self {
        self.magnitude = magnitude;
        self
    }

    pub fn max_retries(mut self, retries: usize) -> Self {
        self.max_retries = retries;
        self
    }

    pub fn build(&self, targets: &[Decomposition]) -> Result<FiniteSubModel> {
        if !(self.epsilon > 10.0 * DEFAULT_TOL && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {} must exceed ten times the numeric tolerance",
                self.epsilon
            )));
        }
        if self.copies == 0 {
            return Err(Error::InvalidArgument("copies must be at least 1".into()));
        }
        if let PerturbationMagnitude::Exact(d) = self.magnitude {
            if !(0.0..self.epsilon / 2.0).contains(&d) {
                return Err(Error::InvalidArgument(format!("perturbation magnitude {d} must lie in [0, epsilon/2)")));
            }
        }
        if targets.is_empty() {
            return Err(Error::Empty("sub-model targets"));
        }
        for t in targets {
            t.validate(DEFAULT_TOL)?;
        }

        let mut out: Vec<Decomposition> = Vec::with_capacity(targets.len() * self.copies);
        for target in targets {
            for _ in 0..self.copies {
                let slot = out.len() as u64;
                let d = self.perturb_disjoint(target, slot, &out)?;
                out.push(d);
            }
        }
        FiniteSubModel::from_decompositions(out, self.epsilon, self.seed)
    }

    fn perturb_disjoint(&self, target: &Decomposition, slot: u64, earlier: &[Decomposition]) -> Result<Decomposition> {
        for retry in 0..=self.max_retries {
            let mut rng = seeds::rng(seeds::derive(self.seed, stream::BUILD, (slot << 20) | retry as u64));
            let delta = match self.magnitude {
                PerturbationMagnitude::Uniform => rng.random::<f64>() * self.epsilon / 2.0,
                PerturbationMagnitude::Exact(d) => d,
            };
            let candidate = perturb(target, delta, &mut rng);
            if !earlier.iter().any(|e| shares_operator(e, &candidate)) {
                return Ok(candidate);
            }
        }
        Err(Error::DisjointnessFailure { retries: self.max_retries })
    }
}

/// One perturbed copy of each target with magnitudes drawn below `epsilon/2`.
pub fn build_submodel(targets: &[Decomposition], epsilon: f64, seed: u64) -> Result<FiniteSubModel> {
    SubModelBuilder::new(epsilon, seed).build(targets)
}

fn max_distance(a: &Decomposition, b: &Decomposition) -> f64 {
    a.operators().iter().zip(b.operators()).map(|(p, q)| p.frobenius_distance(q)).fold(0.0, f64::max)
}

/// `U d U†` with `max_j ‖U d_j U† − d_j‖_F` equal to `delta` up to bisection
/// precision, and never above it.
pub(crate) fn perturb<R: Rng + ?Sized>(target: &Decomposition, delta: f64, rng: &mut R) -> Decomposition {
    if delta == 0.0 {
        return target.clone();
    }
    loop {
        let h = random_hermitian(target.dim(), rng);
        let at = |t: f64| {
            let u = ComplexMatrix::cayley_unitary(&h, t);
            let d = target.conjugated(&u).expect("dimensions agree");
            (max_distance(&d, target), d)
        };
        let mut hi = delta.max(1e-12);
        let mut found = false;
        for _ in 0..64 {
            if at(hi).0 >= delta {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        // A generator (almost) commuting with every operator cannot reach delta.
        if !found {
            continue;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if at(mid).0 >= delta {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        return at(lo).1;
    }
}
