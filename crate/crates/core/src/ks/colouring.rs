use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::structure::OrthogonalityStructure;
use crate::error::{Error, Result};

/// A total {0,1} assignment on the vectors of a set, indexed by vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Colouring(Vec<bool>);

impl Colouring {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    pub fn from_bits(values: &[u8]) -> Result<Self> {
        values
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidArgument(format!("colour {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Builds a colouring on `0..len` from a sparse map; fails if any index is missing.
    pub fn from_map(len: usize, map: &BTreeMap<usize, bool>) -> Result<Self> {
        (0..len)
            .map(|i| map.get(&i).copied().ok_or(Error::PartialColouring { missing: i }))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

impl Serialize for Colouring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.iter().map(|&b| u8::from(b)).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Colouring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits: Vec<u8> = Vec::deserialize(d)?;
        Colouring::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "violated_bases", rename_all = "snake_case")]
pub enum KsVerdict {
    Valid,
    Violations(Vec<Vec<usize>>),
}

impl KsVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, KsVerdict::Valid)
    }
}

/// Valid iff every basis has exactly one vector coloured 1.
pub fn validate_ks_colouring(structure: &OrthogonalityStructure, colouring: &Colouring) -> Result<KsVerdict> {
    let n = structure.num_vectors();
    if colouring.len() < n {
        return Err(Error::PartialColouring { missing: colouring.len() });
    }
    if colouring.len() > n {
        return Err(Error::InvalidArgument(format!("colouring has {} values for {n} vectors", colouring.len())));
    }
    let bad: Vec<Vec<usize>> =
        structure.bases().iter().filter(|b| b.iter().filter(|&&v| colouring.get(v)).count() != 1).cloned().collect();
    Ok(if bad.is_empty() { KsVerdict::Valid } else { KsVerdict::Violations(bad) })
}

/// Proof that the search space was exhausted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncolourableCertificate {
    pub vectors: usize,
    pub bases: usize,
    pub explored_nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { colouring: Colouring, explored_nodes: u64 },
    Uncolourable(UncolourableCertificate),
}

impl SearchOutcome {
    pub fn is_colourable(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn explored_nodes(&self) -> u64 {
        match self {
            SearchOutcome::Found { explored_nodes, .. } => *explored_nodes,
            SearchOutcome::Uncolourable(c) => c.explored_nodes,
        }
    }
}

/// Backtracking search for a KS-colouring with unit propagation.
///
/// Vectors are branched on in descending order of basis membership, ties by
/// index; each branch tries colour 1 before 0.
pub fn search_colouring(structure: &OrthogonalityStructure) -> SearchOutcome {
    search_bases(structure.num_vectors(), structure.bases())
}

pub(crate) fn search_bases(num_vectors: usize, bases: &[Vec<usize>]) -> SearchOutcome {
    let mut membership = vec![Vec::new(); num_vectors];
    for (b, basis) in bases.iter().enumerate() {
        for &v in basis {
            membership[v].push(b);
        }
    }
    let mut order: Vec<usize> = (0..num_vectors).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(membership[v].len()), v));

    let mut search =
        Search { bases, membership: &membership, colour: vec![None; num_vectors], trail: Vec::new(), nodes: 0 };
    if search.solve(&order, 0) {
        let colouring = Colouring::new(search.colour.iter().map(|c| c.unwrap_or(false)).collect());
        SearchOutcome::Found { colouring, explored_nodes: search.nodes }
    } else {
        SearchOutcome::Uncolourable(UncolourableCertificate {
            vectors: num_vectors,
            bases: bases.len(),
            explored_nodes: search.nodes,
        })
    }
}

struct Search<'a> {
    bases: &'a [Vec<usize>],
    membership: &'a [Vec<usize>],
    colour: Vec<Option<bool>>,
    trail: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn solve(&mut self, order: &[usize], mut pos: usize) -> bool {
        while pos < order.len() && self.colour[order[pos]].is_some() {
            pos += 1;
        }
        let Some(&v) = order.get(pos) else {
            return true;
        };
        for value in [true, false] {
            self.nodes += 1;
            let mark = self.trail.len();
            if self.assign(v, value) && self.solve(order, pos + 1) {
                return true;
            }
            for u in self.trail.drain(mark..) {
                self.colour[u] = None;
            }
        }
        false
    }

    /// Assigns and propagates; false on conflict (trail still records partial work).
    fn assign(&mut self, v: usize, value: bool) -> bool {
        let mut queue = vec![(v, value)];
        while let Some((u, val)) = queue.pop() {
            match self.colour[u] {
                Some(c) if c == val => continue,
                Some(_) => return false,
                None => {}
            }
            self.colour[u] = Some(val);
            self.trail.push(u);
            for &b in &self.membership[u] {
                let basis = &self.bases[b];
                let mut ones = 0;
                let mut free = None;
                let mut free_count = 0;
                for &w in basis {
                    match self.colour[w] {
                        Some(true) => ones += 1,
                        Some(false) => {}
                        None => {
                            free_count += 1;
                            free = Some(w);
                        }
                    }
                }
                if ones > 1 {
                    return false;
                }
                if ones == 1 {
                    queue.extend(basis.iter().filter(|&&w| self.colour[w].is_none()).map(|&w| (w, false)));
                } else if free_count == 0 {
                    return false;
                } else if free_count == 1 {
                    queue.push((free.unwrap(), true));
                }
            }
        }
        true
    }
}

/// Largest set size accepted by [`count_colourings_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Counts valid colourings by enumerating all `2^n` assignments.
pub fn count_colourings_exhaustive(structure: &OrthogonalityStructure) -> Result<u64> {
    let n = structure.num_vectors();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { what: "vector set", size: n, limit: EXHAUSTIVE_LIMIT });
    }
    let masks: Vec<u32> = structure.bases().iter().map(|b| b.iter().fold(0u32, |m, &v| m | (1 << v))).collect();
    let count = (0u32..(1u32 << n)).filter(|&c| masks.iter().all(|&m| (c & m).count_ones() == 1)).count();
    Ok(count as u64)
}
