use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Outcome label carried alongside an operator. Product observables use
/// tuple labels, e.g. `(+1, -1)` for a joint eigenspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Real(f64),
    Tuple(Vec<f64>),
    Symbol(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Real(x) => write!(f, "{x}"),
            Label::Tuple(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("{x:+}")).collect();
                write!(f, "({})", parts.join(","))
            }
            Label::Symbol(s) => f.write_str(s),
        }
    }
}

impl Label {
    pub fn as_tuple(&self) -> Option<&[f64]> {
        match self {
            Label::Tuple(xs) => Some(xs),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionKind {
    Projective,
    Povm,
}

/// Anything that resolves the identity into labelled operators.
pub trait Resolution {
    fn dim(&self) -> usize;
    fn operators(&self) -> &[ComplexMatrix];
    fn labels(&self) -> &[Label];

    fn len(&self) -> usize {
        self.operators().len()
    }

    fn is_empty(&self) -> bool {
        self.operators().is_empty()
    }
}

fn default_labels(n: usize) -> Vec<Label> {
    (0..n).map(|i| Label::Real(i as f64)).collect()
}

fn check_common(ops: &[ComplexMatrix], labels: &[Label], tol: f64) -> Result<usize> {
    let first = ops.first().ok_or_else(|| Error::InvalidDecomposition("no operators".into()))?;
    let dim = first.dim();
    if let Some(bad) = ops.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    if labels.len() != ops.len() {
        return Err(Error::InvalidDecomposition(format!("{} labels for {} operators", labels.len(), ops.len())));
    }
    let mut sum = ComplexMatrix::zeros(dim);
    for p in ops {
        sum = sum.add(p)?;
    }
    if !sum.approx_eq(&ComplexMatrix::identity(dim), tol) {
        return Err(Error::InvalidDecomposition("operators do not sum to the identity".into()));
    }
    Ok(dim)
}

/// Orthogonal projectors summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveDecomposition {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

impl ProjectiveDecomposition {
    pub fn new(projectors: Vec<ComplexMatrix>, labels: Vec<Label>) -> Result<Self> {
        Self::with_tolerance(projectors, labels, DEFAULT_TOL)
    }

    pub fn with_tolerance(projectors: Vec<ComplexMatrix>, labels: Vec<Label>, tol: f64) -> Result<Self> {
        let dim = check_common(&projectors, &labels, tol)?;
        for (j, p) in projectors.iter().enumerate() {
            if !p.is_projector(tol) {
                return Err(Error::InvalidDecomposition(format!("operator {j} is not an orthogonal projector")));
            }
        }
        for j in 0..projectors.len() {
            for k in (j + 1)..projectors.len() {
                let prod = projectors[j].matmul(&projectors[k])?;
                if prod.max_abs() > tol {
                    return Err(Error::InvalidDecomposition(format!(
                        "projectors {j} and {k} are not mutually orthogonal"
                    )));
                }
            }
        }
        Ok(Self { dim, projectors, labels })
    }

    /// Rank-1 projectors onto the given (not necessarily normalized) orthogonal vectors.
    pub fn from_basis(vectors: &[Vec<C64>], labels: Option<Vec<Label>>) -> Result<Self> {
        let projectors = vectors.iter().map(|v| ComplexMatrix::projector_onto(v)).collect::<Result<Vec<_>>>()?;
        let labels = labels.unwrap_or_else(|| default_labels(vectors.len()));
        Self::new(projectors, labels)
    }

    pub fn from_real_basis(vectors: &[Vec<f64>], labels: Option<Vec<Label>>) -> Result<Self> {
        let vs: Vec<Vec<C64>> = vectors.iter().map(|v| v.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_basis(&vs, labels)
    }

    /// The computational basis of dimension `dim`, labelled by index.
    pub fn computational(dim: usize) -> Self {
        let vectors: Vec<Vec<f64>> =
            (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::from_real_basis(&vectors, None).expect("standard basis is orthonormal")
    }

    pub(crate) fn from_parts_unchecked(projectors: Vec<ComplexMatrix>, labels: Vec<Label>) -> Self {
        Self { dim: projectors[0].dim(), projectors, labels }
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Reorders outcomes: new outcome `j` is old outcome `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            dim: self.dim,
            projectors: order.iter().map(|&k| self.projectors[k].clone()).collect(),
            labels: order.iter().map(|&k| self.labels[k].clone()).collect(),
        }
    }

    pub fn as_povm(&self) -> PovmDecomposition {
        PovmDecomposition { dim: self.dim, effects: self.projectors.clone(), labels: self.labels.clone() }
    }
}

impl Resolution for ProjectiveDecomposition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn operators(&self) -> &[ComplexMatrix] {
        &self.projectors
    }
    fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// Positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmDecomposition {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

impl PovmDecomposition {
    pub fn new(effects: Vec<ComplexMatrix>, labels: Vec<Label>) -> Result<Self> {
        Self::with_tolerance(effects, labels, DEFAULT_TOL)
    }

    pub fn with_tolerance(effects: Vec<ComplexMatrix>, labels: Vec<Label>, tol: f64) -> Result<Self> {
        let dim = check_common(&effects, &labels, tol)?;
        for (j, e) in effects.iter().enumerate() {
            if !e.is_positive_semidefinite(tol) {
                return Err(Error::InvalidDecomposition(format!("effect {j} is not Hermitian positive semidefinite")));
            }
        }
        Ok(Self { dim, effects, labels })
    }

    pub(crate) fn from_parts_unchecked(effects: Vec<ComplexMatrix>, labels: Vec<Label>) -> Self {
        Self { dim: effects[0].dim(), effects, labels }
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }
}

impl Resolution for PovmDecomposition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn operators(&self) -> &[ComplexMatrix] {
        &self.effects
    }
    fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// Either kind of decomposition; the unit of a measurement context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decomposition {
    Projective(ProjectiveDecomposition),
    Povm(PovmDecomposition),
}

impl Decomposition {
    pub fn kind(&self) -> DecompositionKind {
        match self {
            Decomposition::Projective(_) => DecompositionKind::Projective,
            Decomposition::Povm(_) => DecompositionKind::Povm,
        }
    }

    /// Applies `f` to every operator, keeping labels. The caller guarantees the
    /// map preserves the decomposition's invariants (e.g. unitary conjugation).
    pub(crate) fn map_operators(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        match self {
            Decomposition::Projective(d) => Decomposition::Projective(ProjectiveDecomposition::from_parts_unchecked(
                d.projectors.iter().map(&f).collect(),
                d.labels.clone(),
            )),
            Decomposition::Povm(d) => Decomposition::Povm(PovmDecomposition::from_parts_unchecked(
                d.effects.iter().map(&f).collect(),
                d.labels.clone(),
            )),
        }
    }

    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.dim() });
        }
        Ok(self.map_operators(|p| p.conjugate_by(u).expect("dimensions checked")))
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            Decomposition::Projective(d) => {
                ProjectiveDecomposition::with_tolerance(d.projectors.clone(), d.labels.clone(), tol).map(|_| ())
            }
            Decomposition::Povm(d) => {
                PovmDecomposition::with_tolerance(d.effects.clone(), d.labels.clone(), tol).map(|_| ())
            }
        }
    }

    pub fn as_projective(&self) -> Option<&ProjectiveDecomposition> {
        match self {
            Decomposition::Projective(d) => Some(d),
            Decomposition::Povm(_) => None,
        }
    }
}

impl Resolution for Decomposition {
    fn dim(&self) -> usize {
        match self {
            Decomposition::Projective(d) => d.dim(),
            Decomposition::Povm(d) => d.dim(),
        }
    }
    fn operators(&self) -> &[ComplexMatrix] {
        match self {
            Decomposition::Projective(d) => d.operators(),
            Decomposition::Povm(d) => d.operators(),
        }
    }
    fn labels(&self) -> &[Label] {
        match self {
            Decomposition::Projective(d) => d.labels(),
            Decomposition::Povm(d) => d.labels(),
        }
    }
}

impl From<ProjectiveDecomposition> for Decomposition {
    fn from(d: ProjectiveDecomposition) -> Self {
        Decomposition::Projective(d)
    }
}

impl From<PovmDecomposition> for Decomposition {
    fn from(d: PovmDecomposition) -> Self {
        Decomposition::Povm(d)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ProjectiveDocument {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PovmDocument {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    labels: Vec<Label>,
}

fn check_declared_dim(declared: usize, actual: usize) -> Result<()> {
    if declared != actual {
        return Err(Error::DimensionMismatch { expected: declared, found: actual });
    }
    Ok(())
}

impl Serialize for ProjectiveDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjectiveDocument { dim: self.dim, projectors: self.projectors.clone(), labels: self.labels.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectiveDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ProjectiveDocument::deserialize(d)?;
        let out = ProjectiveDecomposition::new(doc.projectors, doc.labels).map_err(serde::de::Error::custom)?;
        check_declared_dim(doc.dim, out.dim).map_err(serde::de::Error::custom)?;
        Ok(out)
    }
}

impl Serialize for PovmDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PovmDocument { dim: self.dim, effects: self.effects.clone(), labels: self.labels.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PovmDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PovmDocument::deserialize(d)?;
        let out = PovmDecomposition::new(doc.effects, doc.labels).map_err(serde::de::Error::custom)?;
        check_declared_dim(doc.dim, out.dim).map_err(serde::de::Error::custom)?;
        Ok(out)
    }
}

/// Unvalidated decomposition document; validated with an explicit tolerance.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum DecompositionDocument {
    Projective(ProjectiveDocument),
    Povm(PovmDocument),
}

impl DecompositionDocument {
    pub(crate) fn into_decomposition(self, tol: f64) -> Result<Decomposition> {
        match self {
            DecompositionDocument::Projective(d) => {
                let out = ProjectiveDecomposition::with_tolerance(d.projectors, d.labels, tol)?;
                check_declared_dim(d.dim, out.dim)?;
                Ok(out.into())
            }
            DecompositionDocument::Povm(d) => {
                let out = PovmDecomposition::with_tolerance(d.effects, d.labels, tol)?;
                check_declared_dim(d.dim, out.dim)?;
                Ok(out.into())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_orthogonal_projectors() {
        let p = ComplexMatrix::projector_onto_real(&[1.0, 0.0]).unwrap();
        let q = ComplexMatrix::projector_onto_real(&[1.0, 1.0]).unwrap();
        let err = ProjectiveDecomposition::new(vec![p, q], default_labels(2));
        assert!(err.is_err());
    }

    #[test]
    fn rejects_incomplete_resolution() {
        let p = ComplexMatrix::projector_onto_real(&[1.0, 0.0, 0.0]).unwrap();
        let q = ComplexMatrix::projector_onto_real(&[0.0, 1.0, 0.0]).unwrap();
        assert!(ProjectiveDecomposition::new(vec![p, q], default_labels(2)).is_err());
    }

    #[test]
    fn rejects_label_count_mismatch() {
        let d = ProjectiveDecomposition::computational(2);
        assert!(ProjectiveDecomposition::new(d.projectors().to_vec(), default_labels(3)).is_err());
    }

    #[test]
    fn povm_rejects_negative_effect() {
        let e0 = ComplexMatrix::from_real_rows(&[&[1.2, 0.0], &[0.0, 0.5]]).unwrap();
        let e1 = ComplexMatrix::from_real_rows(&[&[-0.2, 0.0], &[0.0, 0.5]]).unwrap();
        assert!(PovmDecomposition::new(vec![e0, e1], default_labels(2)).is_err());
    }

    #[test]
    fn json_shape_and_untagged_dispatch() {
        let d: Decomposition = ProjectiveDecomposition::computational(2).into();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["dim"], 2);
        assert!(v.get("projectors").is_some());
        let back: Decomposition = serde_json::from_value(v).unwrap();
        assert_eq!(back.kind(), DecompositionKind::Projective);

        let p: Decomposition = ProjectiveDecomposition::computational(2).as_povm().into();
        let v = serde_json::to_value(&p).unwrap();
        assert!(v.get("effects").is_some());
        let back: Decomposition = serde_json::from_value(v).unwrap();
        assert_eq!(back.kind(), DecompositionKind::Povm);
    }

    #[test]
    fn labels_are_untagged() {
        let labels: Vec<Label> = serde_json::from_str(r#"[1, [1, -1], "up"]"#).unwrap();
        assert_eq!(labels[0], Label::Real(1.0));
        assert_eq!(labels[1], Label::Tuple(vec![1.0, -1.0]));
        assert_eq!(labels[2], Label::Symbol("up".into()));
    }
}
