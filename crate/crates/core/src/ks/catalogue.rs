//! Catalogue files: `{"name", "dim", "denominator", "vectors"}`.
//!
//! With a non-null `denominator` the components are integers over that
//! denominator and the set is exact; with `null` they are real unit vectors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::colouring::{count_colourings_exhaustive, search_colouring, SearchOutcome};
use super::structure::{build_orthogonality, OrthogonalityStructure};
use super::vectors::VectorSet;
use crate::error::{Error, Result};

/// Largest set for which certification also runs the exhaustive oracle.
pub const EXHAUSTIVE_CERTIFICATION_LIMIT: usize = 20;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogueDocument {
    pub name: String,
    pub dim: usize,
    pub denominator: Option<u64>,
    pub vectors: Vec<Vec<serde_json::Number>>,
}

impl CatalogueDocument {
    pub fn into_vector_set(self, tol: f64) -> Result<VectorSet> {
        match self.denominator {
            Some(k) => {
                let vectors = self
                    .vectors
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.iter()
                            .map(|x| {
                                x.as_i64().ok_or_else(|| {
                                    Error::InvalidVectorSet(format!("vector {i}: component {x} is not an integer"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                VectorSet::from_integer(self.name, self.dim, k, vectors)
            }
            None => {
                let vectors =
                    self.vectors.iter().map(|v| v.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect()).collect();
                VectorSet::from_real(self.name, self.dim, vectors, tol)
            }
        }
    }

    pub fn from_vector_set(set: &VectorSet) -> Self {
        let vectors = (0..set.len())
            .map(|i| match set.integer_vector(i) {
                Some(v) => v.iter().map(|&x| x.into()).collect(),
                None => set.unit_vector(i).iter().map(|&x| serde_json::Number::from_f64(x).expect("finite")).collect(),
            })
            .collect();
        Self { name: set.name().to_string(), dim: set.dim(), denominator: set.denominator(), vectors }
    }
}

impl Serialize for VectorSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CatalogueDocument::from_vector_set(self).serialize(s)
    }
}

pub fn parse_catalogue(text: &str, origin: &Path, tol: f64) -> Result<VectorSet> {
    let doc: CatalogueDocument = serde_json::from_str(text).map_err(|e| Error::parse(origin, e))?;
    doc.into_vector_set(tol)
}

pub fn load_catalogue(path: &Path, tol: f64) -> Result<VectorSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_catalogue(&text, path, tol)
}

const BUILTIN: &[(&str, &str)] = &[
    ("ceg-18-d4", include_str!("../../catalogue/ceg-18-d4.json")),
    ("basis-49-d3", include_str!("../../catalogue/basis-49-d3.json")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(n, _)| *n)
}

/// A catalogue entry shipped with the crate.
pub fn builtin(name: &str) -> Option<VectorSet> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_catalogue(text, Path::new(n), crate::DEFAULT_TOL).expect("shipped catalogue parses"))
}

/// Outcome of certifying a catalogue entry.
#[derive(Clone, Debug, Serialize)]
pub struct Certification {
    pub name: String,
    pub dim: usize,
    pub vectors: usize,
    pub bases: usize,
    pub search: SearchOutcome,
    /// Number of valid colourings by exhaustive enumeration, when small enough.
    pub exhaustive_colourings: Option<u64>,
}

impl Certification {
    pub fn is_uncolourable(&self) -> bool {
        !self.search.is_colourable()
    }
}

/// Runs the backtracking search and, for small sets, the exhaustive oracle.
/// Fails if the two routes disagree.
pub fn certify(set: &VectorSet, tol: f64) -> Result<(OrthogonalityStructure, Certification)> {
    let structure = build_orthogonality(set, tol);
    let search = search_colouring(&structure);
    let exhaustive = if set.len() <= EXHAUSTIVE_CERTIFICATION_LIMIT {
        let count = count_colourings_exhaustive(&structure)?;
        if (count > 0) != search.is_colourable() {
            return Err(Error::InvalidVectorSet(format!(
                "search and exhaustive enumeration disagree on {}",
                set.name()
            )));
        }
        Some(count)
    } else {
        None
    };
    let cert = Certification {
        name: set.name().to_string(),
        dim: set.dim(),
        vectors: set.len(),
        bases: structure.bases().len(),
        search,
        exhaustive_colourings: exhaustive,
    };
    Ok((structure, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for name in builtin_names() {
            assert!(builtin(name).is_some(), "{name}");
        }
    }

    #[test]
    fn non_integer_component_in_exact_set_is_rejected() {
        let text = r#"{"name": "x", "dim": 2, "denominator": 1, "vectors": [[1.5, 0]]}"#;
        assert!(parse_catalogue(text, Path::new("x"), 1e-9).is_err());
    }

    #[test]
    fn malformed_json_reports_position() {
        let text = "{\n  \"name\": \"x\",\n  \"dim\": 2,\n  \"vectors\": [[1, 0],\n}";
        match parse_catalogue(text, Path::new("bad.json"), 1e-9) {
            Err(Error::Parse { line, .. }) => assert!(line >= 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn document_round_trip() {
        let set = builtin("ceg-18-d4").unwrap();
        let doc = CatalogueDocument::from_vector_set(&set);
        let back = doc.into_vector_set(1e-9).unwrap();
        assert_eq!(back, set);
    }
}
