use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{ComplexMatrix, Decomposition, DecompositionKind, Resolution};
use crate::DEFAULT_TOL;

/// Two operators closer than this (Frobenius) count as the same operator.
pub const DISJOINTNESS_TOL: f64 = 1e-9;

/// Alignments are searched exhaustively up to this many outcomes, greedily above.
pub const EXHAUSTIVE_ALIGNMENT_LIMIT: usize = 8;

/// An ordered finite family of mutually projector-disjoint decompositions
/// with a matching precision `epsilon`.
///
/// Distances are Frobenius norms of aligned operator pairs, aggregated by max.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSubModel {
    dim: usize,
    kind: DecompositionKind,
    decompositions: Vec<Decomposition>,
    epsilon: f64,
    build_seed: u64,
}

/// Result of a successful lookup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LookupMatch {
    pub index: usize,
    /// `alignment[j]` is the model outcome standing in for target outcome `j`.
    pub alignment: Vec<usize>,
    pub distance: f64,
}

impl FiniteSubModel {
    pub fn from_decompositions(decompositions: Vec<Decomposition>, epsilon: f64, build_seed: u64) -> Result<Self> {
        let first = decompositions.first().ok_or(Error::Empty("sub-model decompositions"))?;
        let (dim, kind) = (first.dim(), first.kind());
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidSubModel(format!("epsilon {epsilon} must be positive")));
        }
        for (i, d) in decompositions.iter().enumerate() {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d.dim() });
            }
            if d.kind() != kind {
                return Err(Error::InvalidSubModel(format!("decomposition {i} is {:?}, expected {kind:?}", d.kind())));
            }
            d.validate(DEFAULT_TOL)?;
        }
        if let Some((a, b)) = first_collision(&decompositions) {
            return Err(Error::InvalidSubModel(format!(
                "decompositions {a} and {b} share an operator; the family is not projector-disjoint"
            )));
        }
        Ok(Self { dim, kind, decompositions, epsilon, build_seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DecompositionKind {
        self.kind
    }

    pub fn decompositions(&self) -> &[Decomposition] {
        &self.decompositions
    }

    pub fn decomposition(&self, index: usize) -> &Decomposition {
        &self.decompositions[index]
    }

    pub fn len(&self) -> usize {
        self.decompositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decompositions.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn build_seed(&self) -> u64 {
        self.build_seed
    }

    /// First decomposition whose best-aligned distance to `target` is below epsilon.
    pub fn lookup(&self, target: &Decomposition) -> Result<LookupMatch> {
        self.check_target(target)?;
        let mut closest = f64::INFINITY;
        for (index, d) in self.decompositions.iter().enumerate() {
            if d.len() != target.len() {
                continue;
            }
            let (alignment, distance) = best_alignment(target.operators(), d.operators());
            if distance < self.epsilon {
                return Ok(LookupMatch { index, alignment, distance });
            }
            closest = closest.min(distance);
        }
        Err(Error::NoMatch { epsilon: self.epsilon, closest })
    }

    pub(crate) fn check_target(&self, target: &Decomposition) -> Result<()> {
        if target.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: target.dim() });
        }
        if target.kind() != self.kind {
            return Err(Error::InvalidArgument(format!(
                "target is {:?} but the sub-model is {:?}",
                target.kind(),
                self.kind
            )));
        }
        Ok(())
    }
}

/// Indices of the first pair of decompositions sharing an operator.
pub(crate) fn first_collision(decompositions: &[Decomposition]) -> Option<(usize, usize)> {
    for (b, db) in decompositions.iter().enumerate() {
        if let Some(a) = decompositions[..b].iter().position(|da| shares_operator(da, db)) {
            return Some((a, b));
        }
    }
    None
}

pub(crate) fn shares_operator(a: &Decomposition, b: &Decomposition) -> bool {
    a.operators().iter().any(|p| b.operators().iter().any(|q| p.frobenius_distance(q) < DISJOINTNESS_TOL))
}

/// Permutation minimizing `max_j ‖target_j − model_{π(j)}‖_F`, with that distance.
///
/// Exhaustive branch and bound for small decompositions; ties resolve to the
/// lexicographically first permutation. Larger ones use greedy matching.
pub fn best_alignment(target: &[ComplexMatrix], model: &[ComplexMatrix]) -> (Vec<usize>, f64) {
    let n = target.len();
    assert_eq!(n, model.len(), "alignment needs equal outcome counts");
    let dist: Vec<Vec<f64>> = target.iter().map(|t| model.iter().map(|m| t.frobenius_distance(m)).collect()).collect();
    if n <= EXHAUSTIVE_ALIGNMENT_LIMIT {
        let mut search = Bottleneck {
            dist: &dist,
            used: vec![false; n],
            current: Vec::with_capacity(n),
            best: (0..n).collect(),
            best_cost: f64::INFINITY,
        };
        search.run(0, 0.0);
        (search.best, search.best_cost)
    } else {
        greedy_alignment(&dist)
    }
}

struct Bottleneck<'a> {
    dist: &'a [Vec<f64>],
    used: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
    best_cost: f64,
}

impl Bottleneck<'_> {
    fn run(&mut self, row: usize, cost: f64) {
        if row == self.dist.len() {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best.clone_from(&self.current);
            }
            return;
        }
        for col in 0..self.dist.len() {
            if self.used[col] {
                continue;
            }
            let c = cost.max(self.dist[row][col]);
            if c >= self.best_cost {
                continue;
            }
            self.used[col] = true;
            self.current.push(col);
            self.run(row + 1, c);
            self.current.pop();
            self.used[col] = false;
        }
    }
}

fn greedy_alignment(dist: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = dist.len();
    let mut pairs: Vec<(f64, usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |k| (dist[j][k], j, k))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    let mut cost = 0.0f64;
    for (d, j, k) in pairs {
        if out[j] == usize::MAX && !col_used[k] {
            out[j] = k;
            col_used[k] = true;
            cost = cost.max(d);
        }
    }
    (out, cost)
}

#[derive(Serialize)]
struct ModelRef<'a> {
    dim: usize,
    kind: DecompositionKind,
    epsilon_r: f64,
    build_seed: u64,
    decompositions: &'a [Decomposition],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    dim: usize,
    kind: DecompositionKind,
    epsilon_r: f64,
    build_seed: u64,
    decompositions: Vec<Decomposition>,
}

impl Serialize for FiniteSubModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelRef {
            dim: self.dim,
            kind: self.kind,
            epsilon_r: self.epsilon,
            build_seed: self.build_seed,
            decompositions: &self.decompositions,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSubModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ModelDocument::deserialize(d)?;
        let model = FiniteSubModel::from_decompositions(doc.decompositions, doc.epsilon_r, doc.build_seed)
            .map_err(D::Error::custom)?;
        if model.dim != doc.dim || model.kind != doc.kind {
            return Err(D::Error::custom("declared dim or kind disagrees with the decompositions"));
        }
        Ok(model)
    }
}
