use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::matrix::{complex_vec, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// A pure or mixed state. The density matrix is always materialized; Born
/// probabilities are computed from it regardless of how the state was given.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Option<Vec<C64>>,
    density: ComplexMatrix,
}

impl QuantumState {
    pub fn pure(amplitudes: Vec<C64>) -> Result<Self> {
        Self::pure_with_tolerance(amplitudes, DEFAULT_TOL)
    }

    pub fn pure_with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("squared amplitudes sum to {norm2}, not 1")));
        }
        let v = DVector::from_column_slice(&amplitudes);
        let density = ComplexMatrix::new(&v * v.adjoint())?;
        Ok(Self { amplitudes: Some(amplitudes), density })
    }

    /// Normalizes `amplitudes` before constructing the state.
    pub fn pure_normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::pure(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        Self::pure_normalized(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn mixed(density: ComplexMatrix) -> Result<Self> {
        Self::mixed_with_tolerance(density, DEFAULT_TOL)
    }

    pub fn mixed_with_tolerance(density: ComplexMatrix, tol: f64) -> Result<Self> {
        if !density.is_hermitian(tol) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = density.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        if !density.is_positive_semidefinite(tol) {
            return Err(Error::InvalidState("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self { amplitudes: None, density })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let rho = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self { amplitudes: None, density: rho }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![C64::ZERO; dim];
        amps[index] = C64::ONE;
        Self::pure(amps).expect("basis vector is normalized")
    }

    pub(crate) fn from_density_unchecked(density: ComplexMatrix) -> Self {
        Self { amplitudes: None, density }
    }

    pub(crate) fn from_amplitudes_unchecked(amplitudes: Vec<C64>) -> Self {
        let v = DVector::from_column_slice(&amplitudes);
        let density = ComplexMatrix::new(&v * v.adjoint()).expect("nonempty");
        Self { amplitudes: Some(amplitudes), density }
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn is_pure_representation(&self) -> bool {
        self.amplitudes.is_some()
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        self.amplitudes.as_deref()
    }

    pub fn density_matrix(&self) -> &ComplexMatrix {
        &self.density
    }

    /// `Tr(rho A)`; real for Hermitian `A`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        Ok(trace_of_product(&self.density, op))
    }

    /// Whether two states have the same density matrix within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.density.approx_eq(&other.density, tol)
    }
}

/// `Re Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let (a, b) = (a.as_dmatrix(), b.as_dmatrix());
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct StateDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_complex_vec")]
    pub amplitudes: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<ComplexMatrix>,
}

mod opt_complex_vec {
    use super::{complex_vec, C64};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => complex_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        let pairs: Option<Vec<[f64; 2]>> = Option::deserialize(d)?;
        Ok(pairs.map(|p| p.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
    }
}

impl StateDocument {
    pub fn into_state(self, tol: f64) -> Result<QuantumState> {
        let state = match (self.amplitudes, self.density) {
            (Some(a), None) => QuantumState::pure_with_tolerance(a, tol)?,
            (None, Some(d)) => QuantumState::mixed_with_tolerance(d, tol)?,
            _ => return Err(Error::InvalidState("exactly one of `amplitudes` or `density` must be given".into())),
        };
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: state.dim() });
        }
        Ok(state)
    }
}

impl Serialize for QuantumState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDocument {
            dim: self.dim(),
            amplitudes: self.amplitudes.clone(),
            density: if self.amplitudes.is_some() { None } else { Some(self.density.clone()) },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StateDocument::deserialize(d)?.into_state(DEFAULT_TOL).map_err(serde::de::Error::custom)
    }
}
